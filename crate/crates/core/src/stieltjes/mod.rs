//! One-sided Lebesgue–Stieltjes measures and the integration and pairing
//! engines built on them.
//!
//! The endpoint rule is used everywhere: at an included endpoint a function
//! contributes its assigned value; at an excluded endpoint it contributes
//! the one-sided limit taken from inside the interval.

pub mod norms;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_topology::{ExtReal, Interval, IntervalSet, Orientation};
use crate::piecewise::{require_test_function, PiecewiseFn, Smooth};
pub use norms::{norms, Norms};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Lebesgue,
    StieltjesLeft,
    StieltjesRight,
}

impl MeasureKind {
    pub fn orientation(self) -> Orientation {
        match self {
            MeasureKind::Lebesgue => Orientation::Standard,
            MeasureKind::StieltjesLeft => Orientation::Left,
            MeasureKind::StieltjesRight => Orientation::Right,
        }
    }

    pub fn from_orientation(o: Orientation) -> Self {
        match o {
            Orientation::Standard => MeasureKind::Lebesgue,
            Orientation::Left => MeasureKind::StieltjesLeft,
            Orientation::Right => MeasureKind::StieltjesRight,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    kind: MeasureKind,
    distribution: PiecewiseFn,
    atoms: Vec<(f64, f64)>,
}

impl Measure {
    /// Validates `F(0) = 0`, semicontinuity matching `kind`, and finite atoms.
    pub fn new(kind: MeasureKind, distribution: PiecewiseFn, atoms: Vec<(f64, f64)>) -> Result<Self> {
        match distribution.value_at(0.0) {
            Some(0.0) => {}
            other => return Err(Error::TopologyMismatch(format!("distribution function must vanish at 0, found {other:?}"))),
        }
        let o = kind.orientation();
        if o != Orientation::Standard && !distribution.is_semicontinuous(o) {
            return Err(Error::TopologyMismatch(format!("distribution function is not {o}-semicontinuous at every breakpoint")));
        }
        if atoms.iter().any(|(x, w)| !x.is_finite() || !w.is_finite()) {
            return Err(Error::InvalidArgument("atoms need finite points and weights".into()));
        }
        Ok(Measure { kind, distribution, atoms })
    }

    /// Lebesgue measure, `F(x) = x`.
    pub fn lebesgue() -> Self {
        Measure { kind: MeasureKind::Lebesgue, distribution: PiecewiseFn::from_smooth(Smooth::identity()), atoms: Vec::new() }
    }

    pub fn from_distribution(kind: MeasureKind, f: PiecewiseFn) -> Result<Self> {
        Measure::new(kind, f, Vec::new())
    }

    /// A single atom of weight `w` at `p` over a zero distribution function.
    pub fn point_mass(kind: MeasureKind, p: f64, w: f64) -> Result<Self> {
        Measure::new(kind, PiecewiseFn::constant(0.0), vec![(p, w)])
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn distribution(&self) -> &PiecewiseFn {
        &self.distribution
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    fn close(&self, s: &IntervalSet) -> Result<IntervalSet> {
        let o = self.kind.orientation();
        let c = s.orient_closure(o);
        if !c.is_oriented(o) {
            return Err(Error::TopologyMismatch(format!("{s} cannot be oriented as {o}")));
        }
        Ok(c)
    }

    fn atoms_in(&self, s: &IntervalSet) -> f64 {
        self.atoms.iter().filter(|(x, _)| s.contains(ExtReal::finite(*x))).map(|(_, w)| w).sum()
    }

    /// `Σ F(hi) - F(lo)` over the pieces of the oriented set, plus atoms.
    pub fn measure_of(&self, s: &IntervalSet) -> Result<f64> {
        let s = self.close(s)?;
        let f = &self.distribution;
        let mut total = 0.0;
        for p in s.pieces() {
            if p.is_point() {
                // F(b) - F(b) under the endpoint rule; only atoms weigh points
                continue;
            }
            total += edge_value(f, p, Side::Hi)? - edge_value(f, p, Side::Lo)?;
        }
        Ok(total + self.atoms_in(&s))
    }

    /// Signed reading `F(x) = μ((0, x])` for `x >= 0` and `-μ((x, 0])` below.
    pub fn distribution_reading(&self, x: f64) -> Result<f64> {
        let iv = match self.kind {
            MeasureKind::StieltjesRight => |a, b| Interval::right_open(a, b),
            _ => |a, b| Interval::left_open(a, b),
        };
        if x >= 0.0 {
            self.measure_of(&iv(0.0, x).into())
        } else {
            self.measure_of(&iv(x, 0.0).into()).map(|v| -v)
        }
    }

    /// Variation of `F` along the oriented set plus `|atoms|`.
    pub fn total_variation(&self, s: &IntervalSet) -> Result<f64> {
        if !s.is_bounded() {
            return Err(Error::Unbounded(format!("total variation over {s}")));
        }
        let s = self.close(s)?;
        let mut v = 0.0;
        for p in s.pieces() {
            v += path_variation(&walk(&self.distribution, p, false)?);
        }
        let atoms: f64 = self.atoms.iter().filter(|(x, _)| s.contains(ExtReal::finite(*x))).map(|(_, w)| w.abs()).sum();
        Ok(v + atoms)
    }
}

#[derive(Clone, Copy, PartialEq)]
pub(crate) enum Side {
    Lo,
    Hi,
}

/// Value of `f` at an interval edge under the endpoint rule. Infinite edges
/// use the limit at infinity.
pub(crate) fn edge_value(f: &PiecewiseFn, p: &Interval, side: Side) -> Result<f64> {
    let (x, included) = match side {
        Side::Lo => (p.lo.value(), p.lo_included),
        Side::Hi => (p.hi.value(), p.hi_included),
    };
    let inner = match side {
        Side::Lo => f.right_limit(x),
        Side::Hi => f.left_limit(x),
    };
    let v = if x.is_finite() && included { f.value_at(x).or(inner) } else { inner.or(f.value_at(x)) };
    v.ok_or_else(|| Error::Unbounded(format!("no finite value of the distribution function at {x}")))
}

/// Values visited by `f` along the piece, in order: the start value, every
/// interior extremum, and both one-sided limits plus any assigned value at
/// each interior breakpoint. `closed` treats both edges as included.
pub(crate) fn walk(f: &PiecewiseFn, p: &Interval, closed: bool) -> Result<Vec<f64>> {
    let (lo, hi) = (p.lo.value(), p.hi.value());
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Unbounded(format!("variation over {p}")));
    }
    let mut vals = Vec::new();
    let lo_inc = closed || p.lo_included;
    let hi_inc = closed || p.hi_included;
    let inner_bps: Vec<f64> = f.breakpoints().iter().copied().filter(|&b| b > lo && b < hi).collect();
    if lo_inc {
        if let Some(v) = f.value_at(lo) {
            vals.push(v);
        }
    }
    if lo == hi {
        return Ok(vals);
    }
    vals.push(f.right_limit(lo).expect("finite point"));
    let mut knots = vec![lo];
    knots.extend(&inner_bps);
    knots.push(hi);
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let piece = piece_on(f, a, b);
        for c in piece.critical_points(a, b)? {
            vals.push(piece.eval(c));
        }
        vals.push(piece.eval(b));
        if b < hi {
            if let Some(v) = f.value_at(b) {
                vals.push(v);
            }
            vals.push(f.right_limit(b).expect("finite point"));
        }
    }
    if hi_inc {
        if let Some(v) = f.value_at(hi) {
            vals.push(v);
        }
    }
    Ok(vals)
}

pub(crate) fn path_variation(vals: &[f64]) -> f64 {
    vals.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// The piece of `f` covering the open gap `(a, b)`.
pub fn piece_on(f: &PiecewiseFn, a: f64, b: f64) -> &Smooth {
    let probe = if a.is_finite() && b.is_finite() {
        0.5 * (a + b)
    } else if a.is_finite() {
        a + 1.0
    } else if b.is_finite() {
        b - 1.0
    } else {
        0.0
    };
    let i = f.breakpoints().partition_point(|&x| x <= probe);
    &f.pieces()[i]
}

/// Finite knots splitting `(lo, hi)` at the breakpoints of every function given.
pub(crate) fn knots(lo: f64, hi: f64, fs: &[&PiecewiseFn]) -> Vec<f64> {
    let mut k = vec![lo, hi];
    for f in fs {
        k.extend(f.breakpoints().iter().copied().filter(|&b| b > lo && b < hi));
    }
    k.sort_by(f64::total_cmp);
    k.dedup();
    k
}

/// Value of the integrand `f` at a jump of the distribution function,
/// taken from the continuity side of the measure.
fn integrand_at_jump(f: &PiecewiseFn, kind: MeasureKind, x: f64) -> f64 {
    let v = match kind {
        MeasureKind::StieltjesLeft => f.left_limit(x),
        MeasureKind::StieltjesRight => f.right_limit(x),
        MeasureKind::Lebesgue => f.value_at(x).or(f.left_limit(x)),
    };
    v.unwrap_or(0.0)
}

/// `∫_s f dμ`: quadrature of `f F'` on smooth gaps, plus `f` times every
/// jump of `F` counted by the endpoint rule, plus atoms.
pub fn integrate(f: &PiecewiseFn, m: &Measure, s: &IntervalSet) -> Result<f64> {
    let s = m.close(s)?;
    let dist = &m.distribution;
    let mut total = 0.0;
    for p in s.pieces() {
        let (lo, hi) = (p.lo.value(), p.hi.value());
        if p.is_point() {
            continue;
        }
        let ks = knots(lo, hi, &[f, dist]);
        for w in ks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let fp = piece_on(f, a, b);
            let dp = piece_on(dist, a, b);
            if dp.as_constant().is_some() {
                continue;
            }
            let g = |x: f64| {
                let d = dp.jet(x)[1];
                if d == 0.0 {
                    0.0
                } else {
                    fp.eval(x) * d
                }
            };
            total += quadrature::integrate(&g, a, b)?;
        }
        // interior jumps of F
        for &b in dist.breakpoints().iter().filter(|&&b| b > lo && b < hi) {
            let jump = dist.right_limit(b).unwrap() - dist.left_limit(b).unwrap();
            if jump != 0.0 {
                total += integrand_at_jump(f, m.kind, b) * jump;
            }
        }
        // partial jumps at the edges, exactly as measure_of counts them
        if lo.is_finite() {
            let j = dist.right_limit(lo).unwrap() - edge_value(dist, p, Side::Lo)?;
            if j != 0.0 {
                total += integrand_at_jump(f, m.kind, lo) * j;
            }
        }
        if hi.is_finite() {
            let j = edge_value(dist, p, Side::Hi)? - dist.left_limit(hi).unwrap();
            if j != 0.0 {
                total += integrand_at_jump(f, m.kind, hi) * j;
            }
        }
    }
    for &(x, w) in &m.atoms {
        if s.contains(ExtReal::finite(x)) {
            total += integrand_at_jump(f, m.kind, x) * w;
        }
    }
    Ok(total)
}

/// Jump content of `f` inside `s` as seen by a measure of the given kind.
///
/// A left measure sees the increment `f(b+) - f(b)`, a right measure sees
/// `f(b) - f(b-)`, Lebesgue sees the full two-sided jump. A left
/// semicontinuous step therefore has zero right-measure jump content, and
/// its right extension has zero left-measure content.
pub fn jump_measure(f: &PiecewiseFn, kind: MeasureKind, s: &IntervalSet) -> f64 {
    let s = s.orient_closure(kind.orientation());
    let mut total = 0.0;
    for (i, &b) in f.breakpoints().iter().enumerate() {
        if !s.contains(ExtReal::finite(b)) {
            continue;
        }
        let l = f.pieces()[i].eval(b);
        let r = f.pieces()[i + 1].eval(b);
        let v = f.point_values()[i];
        total += match kind {
            MeasureKind::StieltjesLeft => r - v.unwrap_or(l),
            MeasureKind::StieltjesRight => v.unwrap_or(r) - l,
            MeasureKind::Lebesgue => r - l,
        };
    }
    total
}

/// `⟨f, φ'⟩` computed piece by piece over the half-open partition of the
/// line at `f`'s breakpoints (`(·, b]` for Left, `[b, ·)` for Right, open
/// gaps for Standard), integrating by parts on each piece:
/// `[f φ]_lo^hi - ∫ f' φ`.
pub fn pair_against_test_derivative(f: &PiecewiseFn, phi: &Smooth, o: Orientation) -> Result<f64> {
    require_test_function(phi)?;
    let bps = f.breakpoints();
    let mut total = 0.0;
    for i in 0..=bps.len() {
        let lo = if i == 0 { f64::NEG_INFINITY } else { bps[i - 1] };
        let hi = bps.get(i).copied().unwrap_or(f64::INFINITY);
        let (lo_inc, hi_inc) = match o {
            Orientation::Left => (false, hi.is_finite()),
            Orientation::Right => (lo.is_finite(), false),
            Orientation::Standard => (false, false),
        };
        let piece = &f.pieces()[i];
        for (sign, x) in [(-1.0, lo), (1.0, hi)] {
            if !x.is_finite() {
                if !Smooth::mul(piece, phi).decays_rapidly(x.signum()) {
                    return Err(Error::NoDecay(format!("f·φ does not vanish toward {x}")));
                }
                continue;
            }
            let included = if sign < 0.0 { lo_inc } else { hi_inc };
            let inner = piece.eval(x);
            let fv = if included { f.value_at(x).unwrap_or(inner) } else { inner };
            total += sign * fv * phi.eval(x);
        }
        let dp = piece.derivative();
        if !dp.is_zero() {
            let g = |x: f64| {
                let d = dp.eval(x);
                if d == 0.0 {
                    0.0
                } else {
                    d * phi.eval(x)
                }
            };
            total -= quadrature::integrate(&g, lo, hi)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval_topology::Interval;

    const L: Orientation = Orientation::Left;
    const R: Orientation = Orientation::Right;

    fn set(s: &str) -> IntervalSet {
        s.parse().unwrap()
    }

    fn h_l() -> PiecewiseFn {
        PiecewiseFn::heaviside(L).unwrap()
    }

    #[test]
    fn measure_asymmetry() {
        let mu_l = Measure::from_distribution(MeasureKind::StieltjesLeft, h_l()).unwrap();
        assert_eq!(mu_l.measure_of(&set("(0,1]")).unwrap(), 0.0);
        assert_eq!(mu_l.measure_of(&set("(-1,1]")).unwrap(), 1.0);
        let lam = Measure::from_distribution(MeasureKind::Lebesgue, h_l()).unwrap();
        assert_eq!(lam.measure_of(&set("[0,1]")).unwrap(), 1.0);
        assert_eq!(Measure::lebesgue().measure_of(&set("[0,1]")).unwrap(), 1.0);
    }

    #[test]
    fn construction_validates() {
        let hr = PiecewiseFn::heaviside(R).unwrap();
        // H_R(0) = 1 breaks the normalization
        assert!(matches!(Measure::from_distribution(MeasureKind::StieltjesRight, hr), Err(Error::TopologyMismatch(_))));
        let shifted = PiecewiseFn::heaviside_at(R, 1.0).unwrap();
        assert!(Measure::from_distribution(MeasureKind::StieltjesRight, shifted.clone()).is_ok());
        assert!(matches!(Measure::from_distribution(MeasureKind::StieltjesLeft, shifted), Err(Error::TopologyMismatch(_))));
    }

    #[test]
    fn total_variation_examples() {
        let f_r = PiecewiseFn::heaviside_at(R, 1.0).unwrap();
        let m = Measure::from_distribution(MeasureKind::StieltjesRight, f_r).unwrap();
        assert_eq!(m.total_variation(&set("[0,2)")).unwrap(), 1.0);
        assert_eq!(Measure::lebesgue().total_variation(&set("[0,1]")).unwrap(), 1.0);
        let hump = PiecewiseFn::from_smooth(Smooth::Poly(vec![0.0, 1.0, -1.0]));
        let m = Measure::from_distribution(MeasureKind::Lebesgue, hump).unwrap();
        assert!((m.total_variation(&set("[0,1]")).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(Measure::lebesgue().total_variation(&set("[0,+inf)")), Err(Error::Unbounded(_))));
    }

    #[test]
    fn integrate_examples() {
        let phi = PiecewiseFn::from_smooth(Smooth::gaussian());
        let delta = Measure::point_mass(MeasureKind::Lebesgue, 0.0, 1.0).unwrap();
        assert_eq!(integrate(&phi, &delta, &IntervalSet::real_line()).unwrap(), 1.0);
        let lam = Measure::lebesgue();
        assert!((integrate(&h_l(), &lam, &set("(0,1]")).unwrap() - 1.0).abs() < 1e-14);
        let x = PiecewiseFn::from_smooth(Smooth::identity());
        assert!((integrate(&x, &lam, &set("[0,1]")).unwrap() - 0.5).abs() < 1e-14);
        let g = integrate(&phi, &lam, &IntervalSet::real_line()).unwrap();
        assert!((g - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn integrating_one_gives_the_measure() {
        let one = PiecewiseFn::constant(1.0);
        let f = PiecewiseFn::heaviside_at(L, 0.5).unwrap().add(&PiecewiseFn::from_smooth(Smooth::identity()));
        let f = f.add(&PiecewiseFn::constant(-f.value_at(0.0).unwrap()));
        let m = Measure::new(MeasureKind::StieltjesLeft, f, vec![(0.25, 2.0)]).unwrap();
        for s in ["(0,1]", "(-1,0.5]", "(0.5,2]", "[0,0.5]", "(0.1,0.3) U (0.4,0.9)"] {
            let s = set(s);
            let a = integrate(&one, &m, &s).unwrap();
            let b = m.measure_of(&s).unwrap();
            assert!((a - b).abs() < 1e-12, "{s}: {a} vs {b}");
        }
    }

    #[test]
    fn pairing_table() {
        let phi = Smooth::gaussian();
        let sl = PiecewiseFn::sgn(L).unwrap();
        let sr = PiecewiseFn::sgn(R).unwrap();
        assert_eq!(pair_against_test_derivative(&sl, &phi, L).unwrap(), -2.0);
        assert_eq!(pair_against_test_derivative(&sr, &phi, L).unwrap(), 0.0);
        assert_eq!(pair_against_test_derivative(&sl, &phi, R).unwrap(), 0.0);
        assert_eq!(pair_against_test_derivative(&sr, &phi, R).unwrap(), -2.0);
        let g = h_l().sub(&h_l().reflect());
        assert_eq!(pair_against_test_derivative(&g, &phi, L).unwrap(), -1.0);
    }

    #[test]
    fn pairing_smooth_is_integration_by_parts() {
        let f = PiecewiseFn::from_smooth(Smooth::Tanh { amp: 1.0, center: 0.3, scale: 0.5 });
        let phi = Smooth::gaussian();
        let want = -quadrature::integrate(&|x: f64| f.pieces()[0].jet(x)[1] * phi.eval(x), f64::NEG_INFINITY, f64::INFINITY).unwrap();
        for o in [L, R, Orientation::Standard] {
            assert!((pair_against_test_derivative(&f, &phi, o).unwrap() - want).abs() < 1e-10);
        }
    }

    #[test]
    fn pairing_rejects_slow_decay() {
        let phi = Smooth::Exp { amp: 1.0, rate: 1.0 };
        assert!(matches!(pair_against_test_derivative(&h_l(), &phi, L), Err(Error::NoDecay(_))));
    }

    #[test]
    fn jump_content_orthogonality() {
        let f_l = PiecewiseFn::indicator(&Interval::left_open(0.0, 1.0)).unwrap();
        let g = f_l.extend(R);
        let s = set("(-5,5]");
        assert_eq!(jump_measure(&f_l, MeasureKind::StieltjesRight, &s), 0.0);
        assert_eq!(jump_measure(&g, MeasureKind::StieltjesLeft, &s), 0.0);
        // the right-orientation content of f_L is invisible; its left content is not
        let h = PiecewiseFn::heaviside(L).unwrap();
        assert_eq!(jump_measure(&h, MeasureKind::StieltjesLeft, &s), 1.0);
        assert_eq!(jump_measure(&h, MeasureKind::StieltjesRight, &s), 0.0);
    }
}
