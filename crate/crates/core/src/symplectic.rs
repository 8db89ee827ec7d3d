//! Phase-space checks for the pair
//! `H1 = ½p² + θ'(q)` and `H2 = (1 - α(q)) ½p²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::Smooth;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(q: f64, p: f64) -> Self {
        PhasePoint { q, p }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    H1,
    H2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianPair {
    pub theta: Smooth,
    pub alpha: Smooth,
}

impl HamiltonianPair {
    pub fn new(theta: Smooth, alpha: Smooth) -> Self {
        HamiltonianPair { theta, alpha }
    }

    pub fn energy(&self, which: Which, x: PhasePoint) -> f64 {
        match which {
            Which::H1 => 0.5 * x.p * x.p + self.theta.jet(x.q)[1],
            Which::H2 => (1.0 - self.alpha.eval(x.q)) * 0.5 * x.p * x.p,
        }
    }

    /// `(dq/dt, dp/dt)` from Hamilton's equations.
    ///
    /// For `H2` this is `((1 - α) p, +½ α' p²)`: `dp/dt = -∂H2/∂q` and
    /// `∂H2/∂q = -½ α' p²`.
    pub fn eom(&self, which: Which, x: PhasePoint) -> (f64, f64) {
        match which {
            Which::H1 => (x.p, -self.theta.jet(x.q)[2]),
            Which::H2 => {
                let [a, da, _] = self.alpha.jet(x.q);
                ((1.0 - a) * x.p, 0.5 * da * x.p * x.p)
            }
        }
    }

    fn check_domain(&self, which: Which, x: PhasePoint, t: f64) -> Result<()> {
        if which == Which::H2 && !(self.alpha.eval(x.q) < 1.0) {
            return Err(Error::LeftWorkingDomain { t });
        }
        if !(x.q.is_finite() && x.p.is_finite()) {
            return Err(Error::LeftWorkingDomain { t });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub q: f64,
    pub p: f64,
    pub h: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("a trajectory has at least its start")
    }

    /// `max |H(t) - H(0)|`.
    pub fn drift(&self) -> f64 {
        let h0 = self.samples[0].h;
        self.samples.iter().map(|s| (s.h - h0).abs()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,q,p,H\n");
        for s in &self.samples {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", s.t, s.q, s.p, s.h));
        }
        out
    }
}

/// Classical RK4 with `round(t_end / dt)` equal steps.
pub fn flow(h: &HamiltonianPair, which: Which, x0: PhasePoint, t_end: f64, dt: f64) -> Result<Trajectory> {
    if !(dt > 0.0 && t_end > 0.0 && dt.is_finite() && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("need dt > 0 and t_end > 0, got dt={dt}, t_end={t_end}")));
    }
    let n = ((t_end / dt).round() as usize).max(1);
    let step = t_end / n as f64;
    let f = |x: PhasePoint| h.eom(which, x);
    let mut x = x0;
    h.check_domain(which, x, 0.0)?;
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(Sample { t: 0.0, q: x.q, p: x.p, h: h.energy(which, x) });
    for k in 0..n {
        let t = k as f64 * step;
        let k1 = f(x);
        let x2 = PhasePoint::new(x.q + 0.5 * step * k1.0, x.p + 0.5 * step * k1.1);
        h.check_domain(which, x2, t + 0.5 * step)?;
        let k2 = f(x2);
        let x3 = PhasePoint::new(x.q + 0.5 * step * k2.0, x.p + 0.5 * step * k2.1);
        h.check_domain(which, x3, t + 0.5 * step)?;
        let k3 = f(x3);
        let x4 = PhasePoint::new(x.q + step * k3.0, x.p + step * k3.1);
        h.check_domain(which, x4, t + step)?;
        let k4 = f(x4);
        x = PhasePoint::new(
            x.q + step / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            x.p + step / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        );
        let t1 = (k + 1) as f64 * step;
        h.check_domain(which, x, t1)?;
        samples.push(Sample { t: t1, q: x.q, p: x.p, h: h.energy(which, x) });
    }
    Ok(Trajectory { samples })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub q0: f64,
    pub q1: f64,
    pub p0: f64,
    pub p1: f64,
}

/// Closedness of `dH2 = A dq + B dp` on an `n × n` grid over `region`.
///
/// `A = ∂H2/∂q = -½α'p²` and `B = ∂H2/∂p = (1-α)p` are taken analytically;
/// the residual is `max |D_p A - D_q B|` with central differences whose
/// steps equal the grid spacing. The exterior derivative of a closed form
/// vanishes, so what remains is the truncation error `(h_q²/6) |α''' p|`.
pub fn check_closed_dh2(h: &HamiltonianPair, region: Rect, n: usize) -> Result<f64> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("grid needs n >= 4, got {n}")));
    }
    if !(region.q1 > region.q0 && region.p1 > region.p0) {
        return Err(Error::InvalidArgument("empty phase-space region".into()));
    }
    let hq = (region.q1 - region.q0) / (n - 1) as f64;
    let hp = (region.p1 - region.p0) / (n - 1) as f64;
    let a = |q: f64, p: f64| -0.5 * h.alpha.jet(q)[1] * p * p;
    let b = |q: f64, p: f64| (1.0 - h.alpha.eval(q)) * p;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let q = region.q0 + hq * i as f64;
        for j in 0..n {
            let p = region.p0 + hp * j as f64;
            let dpa = (a(q, p + hp) - a(q, p - hp)) / (2.0 * hp);
            let dqb = (b(q + hq, p) - b(q - hq, p)) / (2.0 * hq);
            worst = worst.max((dpa - dqb).abs());
        }
    }
    Ok(worst)
}

/// `p ∂H1/∂p - p ∂H2/∂p = α p²`.
pub fn poincare_residual(h: &HamiltonianPair, x: PhasePoint) -> f64 {
    h.alpha.eval(x.q) * x.p * x.p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free() -> HamiltonianPair {
        HamiltonianPair::new(Smooth::zero(), Smooth::zero())
    }

    fn half_tanh() -> Smooth {
        Smooth::Tanh { amp: 0.5, center: 0.0, scale: 1.0 }
    }

    #[test]
    fn eom_examples() {
        assert_eq!(free().eom(Which::H2, PhasePoint::new(0.0, 1.0)), (1.0, 0.0));
        let quad = HamiltonianPair::new(Smooth::Poly(vec![0.0, 0.0, 0.5]), Smooth::zero());
        assert_eq!(quad.eom(Which::H1, PhasePoint::new(1.0, 0.0)), (0.0, -1.0));
        let h = HamiltonianPair::new(Smooth::zero(), half_tanh());
        assert_eq!(h.eom(Which::H2, PhasePoint::new(0.0, 2.0)), (2.0, 1.0));
    }

    #[test]
    fn free_drift() {
        let tr = flow(&free(), Which::H2, PhasePoint::new(0.0, 1.0), 1.0, 1e-3).unwrap();
        let s = tr.last();
        assert!((s.q - 1.0).abs() < 1e-12 && (s.p - 1.0).abs() < 1e-15);
        assert!(tr.samples.iter().all(|s| s.h == 0.5));
    }

    #[test]
    fn tanh_profile_conserves_h2() {
        let h = HamiltonianPair::new(Smooth::zero(), half_tanh());
        let tr = flow(&h, Which::H2, PhasePoint::new(0.0, 1.0), 1.0, 1e-3).unwrap();
        assert!(tr.drift() < 1e-8, "{}", tr.drift());
    }

    #[test]
    fn oscillator_period() {
        // θ = q³/6 so that θ'' = q
        let h = HamiltonianPair::new(Smooth::Poly(vec![0.0, 0.0, 0.0, 1.0 / 6.0]), Smooth::zero());
        let tr = flow(&h, Which::H1, PhasePoint::new(1.0, 0.0), 2.0 * std::f64::consts::PI, 1e-3).unwrap();
        let s = tr.last();
        assert!((s.q - 1.0).abs() < 1e-9 && s.p.abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn leaving_the_domain_is_reported() {
        let h = HamiltonianPair::new(Smooth::zero(), Smooth::Poly(vec![0.0, 1.0]));
        // α = q reaches 1 at q = 1
        match flow(&h, Which::H2, PhasePoint::new(0.0, 1.0), 5.0, 1e-2) {
            Err(Error::LeftWorkingDomain { t }) => assert!(t > 0.0 && t < 5.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn closedness_residuals() {
        let sq = Rect { q0: -1.0, q1: 1.0, p0: -1.0, p1: 1.0 };
        assert!(check_closed_dh2(&free(), sq, 16).unwrap() < 1e-12);
        let quad = HamiltonianPair::new(Smooth::zero(), Smooth::Poly(vec![0.0, 0.0, 0.25]));
        assert!(check_closed_dh2(&quad, sq, 32).unwrap() < 1e-6);
        let t = HamiltonianPair::new(Smooth::zero(), half_tanh());
        let r1 = check_closed_dh2(&t, sq, 33).unwrap();
        let r2 = check_closed_dh2(&t, sq, 65).unwrap();
        assert!((r1 / r2 - 4.0).abs() < 0.2, "{r1} {r2}");
    }

    #[test]
    fn poincare_examples() {
        assert_eq!(poincare_residual(&free(), PhasePoint::new(0.0, 1.0)), 0.0);
        let h = HamiltonianPair::new(Smooth::zero(), Smooth::constant(0.5));
        assert_eq!(poincare_residual(&h, PhasePoint::new(0.0, 1.0)), 0.5);
        assert_eq!(poincare_residual(&h, PhasePoint::new(0.0, 2.0)), 2.0);
    }
}
