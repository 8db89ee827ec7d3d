//! Finite-atom distributions: a regular piecewise part plus weighted `δ`
//! and `δ'` atoms, their primitives, and the Cauchy-regularized delta.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_topology::Orientation;
use crate::piecewise::{poly, require_test_function, PiecewiseFn, Smooth};
use crate::stieltjes::{piece_on, quadrature};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    /// 0 for `δ`, 1 for `δ'`.
    pub order: u32,
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct Distribution {
    regular: PiecewiseFn,
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
struct RawDistribution {
    #[serde(default = "zero_fn")]
    regular: PiecewiseFn,
    #[serde(default)]
    atoms: Vec<Atom>,
}

fn zero_fn() -> PiecewiseFn {
    PiecewiseFn::constant(0.0)
}

impl TryFrom<RawDistribution> for Distribution {
    type Error = Error;

    fn try_from(r: RawDistribution) -> Result<Self> {
        Distribution::new(r.regular, r.atoms)
    }
}

impl Distribution {
    /// Atoms sharing a point and order are merged by adding weights.
    pub fn new(regular: PiecewiseFn, atoms: Vec<Atom>) -> Result<Self> {
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            if !a.x.is_finite() || !a.w.is_finite() {
                return Err(Error::Distribution(format!("atom at {} with weight {} is not finite", a.x, a.w)));
            }
            if a.order > 1 {
                return Err(Error::Distribution(format!("atoms of order {} are not supported", a.order)));
            }
            match merged.iter_mut().find(|m| m.x == a.x && m.order == a.order) {
                Some(m) => m.w += a.w,
                None => merged.push(Atom { x: a.x + 0.0, ..a }),
            }
        }
        merged.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.order.cmp(&b.order)));
        Ok(Distribution { regular, atoms: merged })
    }

    pub fn delta(x: f64, w: f64) -> Self {
        Distribution { regular: zero_fn(), atoms: vec![Atom { x: x + 0.0, order: 0, w }] }
    }

    pub fn delta_prime(x: f64, w: f64) -> Self {
        Distribution { regular: zero_fn(), atoms: vec![Atom { x: x + 0.0, order: 1, w }] }
    }

    pub fn regular(&self) -> &PiecewiseFn {
        &self.regular
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        Distribution::new(self.regular.add(&other.regular), atoms).expect("inputs already validated")
    }

    pub fn scale(&self, c: f64) -> Self {
        Distribution { regular: self.regular.scale(c), atoms: self.atoms.iter().map(|a| Atom { w: c * a.w, ..*a }).collect() }
    }

    /// `x -> -x`; a `δ^(k)` weight picks up `(-1)^k`.
    pub fn reflect(&self) -> Self {
        let atoms =
            self.atoms.iter().map(|a| Atom { x: 0.0 - a.x, order: a.order, w: if a.order % 2 == 1 { -a.w } else { a.w } }).collect();
        Distribution::new(self.regular.reflect(), atoms).expect("reflection keeps atoms valid")
    }
}

/// `Σ (-1)^k w φ^(k)(x) + ∫ regular · φ`.
pub fn pair(d: &Distribution, phi: &Smooth) -> Result<f64> {
    let mut total = 0.0;
    for a in &d.atoms {
        let j = phi.jet(a.x);
        total += match a.order {
            0 => a.w * j[0],
            _ => -a.w * j[1],
        };
    }
    let r = &d.regular;
    if r.pieces().iter().all(Smooth::is_zero) {
        return Ok(total);
    }
    require_test_function(phi)?;
    let mut knots = vec![f64::NEG_INFINITY];
    knots.extend_from_slice(r.breakpoints());
    knots.push(f64::INFINITY);
    for w in knots.windows(2) {
        let piece = piece_on(r, w[0], w[1]);
        if piece.is_zero() {
            continue;
        }
        let g = |x: f64| {
            let p = phi.eval(x);
            if p == 0.0 {
                0.0
            } else {
                piece.eval(x) * p
            }
        };
        total += quadrature::integrate(&g, w[0], w[1])?;
    }
    Ok(total)
}

/// `Σ w H_o(x - p)` over the `δ` atoms plus the primitive of a polynomial
/// regular part, normalized to vanish at 0.
pub fn primitive(d: &Distribution, o: Orientation) -> Result<PiecewiseFn> {
    if o == Orientation::Standard {
        return Err(Error::BadOrientation("standard"));
    }
    if let Some(a) = d.atoms.iter().find(|a| a.order >= 1) {
        return Err(Error::Distribution(format!("no primitive for a derivative atom at {}", a.x)));
    }
    let mut out = regular_primitive(&d.regular)?.with_orientation(o);
    for a in &d.atoms {
        out = out.add(&PiecewiseFn::heaviside_at(o, a.x)?.scale(a.w));
    }
    Ok(out.simplify())
}

/// Primitive shifted by `-½ Σ w`, so that `δ` at 0 maps to `½ sgn_o`.
pub fn primitive_half_sgn(d: &Distribution, o: Orientation) -> Result<PiecewiseFn> {
    let total: f64 = d.atoms.iter().map(|a| a.w).sum();
    Ok(primitive(d, o)?.add(&PiecewiseFn::constant(-0.5 * total).with_orientation(o)))
}

fn regular_primitive(r: &PiecewiseFn) -> Result<PiecewiseFn> {
    if r.pieces().iter().all(Smooth::is_zero) {
        return Ok(PiecewiseFn::constant(0.0));
    }
    let polys: Vec<&[f64]> = r
        .pieces()
        .iter()
        .map(|p| p.as_poly().ok_or_else(|| Error::Distribution("primitive needs polynomial regular parts".into())))
        .collect::<Result<_>>()?;
    let bps = r.breakpoints();
    let anti: Vec<Vec<f64>> = polys.iter().map(|c| poly::antiderivative(c)).collect();
    // piece containing 0 is anchored at 0; the others are shifted for continuity
    let home = bps.partition_point(|&b| b <= 0.0);
    let mut offset = vec![0.0; anti.len()];
    offset[home] = -poly::eval(&anti[home], 0.0);
    for i in home + 1..anti.len() {
        let b = bps[i - 1];
        offset[i] = poly::eval(&anti[i - 1], b) + offset[i - 1] - poly::eval(&anti[i], b);
    }
    for i in (0..home).rev() {
        let b = bps[i];
        offset[i] = poly::eval(&anti[i + 1], b) + offset[i + 1] - poly::eval(&anti[i], b);
    }
    let pieces: Vec<Smooth> = anti.iter().zip(&offset).map(|(c, &k)| Smooth::Poly(poly::add(c, &[k]))).collect();
    let values = bps.iter().enumerate().map(|(i, &b)| Some(pieces[i].eval(b))).collect();
    PiecewiseFn::new(bps.to_vec(), pieces, values, Orientation::Standard)
}

/// Classical derivative on each gap plus one `δ` per jump, weighted by the
/// two-sided jump. The orientation plays no role in the result itself.
pub fn distributional_derivative(f: &PiecewiseFn, _o: Orientation) -> Distribution {
    let atoms = (0..f.breakpoints().len())
        .filter_map(|i| {
            let j = f.jump(i);
            (j != 0.0).then(|| Atom { x: f.breakpoints()[i], order: 0, w: j })
        })
        .collect();
    Distribution::new(f.derivative(), atoms).expect("jumps are finite")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Cauchy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizedDelta {
    pub epsilon: f64,
    pub kernel: Kernel,
}

impl RegularizedDelta {
    pub fn cauchy(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(RegularizedDelta { epsilon, kernel: Kernel::Cauchy })
    }

    /// `(1/π) ε / (x² + ε²)`, normalized to unit mass.
    pub fn density(&self, x: f64) -> f64 {
        self.epsilon / (x * x + self.epsilon * self.epsilon) / PI
    }
}

/// `∫ (1/π) ε/(x²+ε²) φ(x) dx`, evaluated after `x = ε tan θ`, which turns
/// the kernel into `dθ/π` on `(-π/2, π/2)`.
pub fn regularized_pair(r: &RegularizedDelta, phi: &Smooth) -> Result<f64> {
    if !(r.epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    require_test_function(phi)?;
    let eps = r.epsilon;
    let g = |t: f64| {
        let x = eps * t.tan();
        if x.is_finite() {
            phi.eval(x)
        } else {
            0.0
        }
    };
    let v = quadrature::integrate(&g, -FRAC_PI_2, 0.0)? + quadrature::integrate(&g, 0.0, FRAC_PI_2)?;
    Ok(v / PI)
}

/// Components of the graph minus jump atoms of the distributional
/// derivative.
///
/// Under Left/Right the function is first extended to be o-semicontinuous
/// and the line is closed into a circle through the glue point at infinity,
/// so the outermost pieces join. Under Standard the line stays open, and
/// an assigned value matching neither one-sided limit is an isolated point
/// and so its own component.
pub fn euler_character(f: &PiecewiseFn, o: Orientation) -> i64 {
    let g = match o {
        Orientation::Standard => f.clone(),
        _ => f.extend(o),
    };
    let n = g.pieces().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    let unite = |p: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(p, a), find(p, b));
        if ra != rb {
            p[ra.max(rb)] = ra.min(rb);
        }
    };
    let mut isolated = 0;
    for (i, &b) in g.breakpoints().iter().enumerate() {
        match g.classify(b) {
            crate::piecewise::Continuity::Continuous => unite(&mut parent, i, i + 1),
            c => {
                if o == Orientation::Standard && g.point_values()[i].is_some() && !c.fits(Orientation::Left) && !c.fits(Orientation::Right)
                {
                    isolated += 1;
                }
            }
        }
    }
    if o != Orientation::Standard {
        unite(&mut parent, 0, n - 1);
    }
    let components = (0..n).filter(|&i| find(&mut parent, i) == i).count() as i64 + isolated;
    let jumps = distributional_derivative(f, o).atoms().len() as i64;
    components - jumps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise::test_function;

    const L: Orientation = Orientation::Left;
    const R: Orientation = Orientation::Right;

    #[test]
    fn pair_examples() {
        let g = Smooth::gaussian();
        let xg = test_function("x-gaussian").unwrap();
        assert_eq!(pair(&Distribution::delta(0.0, 1.0), &g).unwrap(), 1.0);
        assert_eq!(pair(&Distribution::delta_prime(0.0, 1.0), &xg).unwrap(), -1.0);
        assert_eq!(pair(&Distribution::delta_prime(0.0, 1.0), &g).unwrap(), 0.0);
    }

    #[test]
    fn primitive_examples() {
        let hl = PiecewiseFn::heaviside(L).unwrap();
        assert!(primitive(&Distribution::delta(0.0, 1.0), L).unwrap().approx_eq_on_grid(&hl, 0.0));
        assert!(primitive(&Distribution::delta(0.0, 2.0), L).unwrap().approx_eq_on_grid(&hl.scale(2.0), 0.0));
        let hr1 = PiecewiseFn::heaviside_at(R, 1.0).unwrap();
        assert!(primitive(&Distribution::delta(1.0, 1.0), R).unwrap().approx_eq_on_grid(&hr1, 0.0));
        let half = primitive_half_sgn(&Distribution::delta(0.0, 1.0), L).unwrap();
        assert!(half.approx_eq_on_grid(&PiecewiseFn::sgn(L).unwrap().scale(0.5), 0.0));
        assert!(primitive(&Distribution::delta_prime(0.0, 1.0), L).is_err());
    }

    #[test]
    fn primitive_of_polynomial_regular_part() {
        // regular part: 1 on x<1, 2x on x>1
        let r = PiecewiseFn::new(vec![1.0], vec![Smooth::constant(1.0), Smooth::Poly(vec![0.0, 2.0])], vec![None], Orientation::Standard)
            .unwrap();
        let p = primitive(&Distribution::new(r, vec![]).unwrap(), L).unwrap();
        for (x, want) in [(-1.0, -1.0), (0.0, 0.0), (1.0, 1.0), (2.0, 4.0)] {
            assert!((p.value_at(x).unwrap() - want).abs() < 1e-14, "{x}");
        }
    }

    #[test]
    fn derivative_examples() {
        let d = distributional_derivative(&PiecewiseFn::sgn(L).unwrap(), L);
        assert_eq!(d.atoms(), &[Atom { x: 0.0, order: 0, w: 2.0 }]);
        let d = distributional_derivative(&PiecewiseFn::heaviside(L).unwrap(), L);
        assert_eq!(d.atoms(), &[Atom { x: 0.0, order: 0, w: 1.0 }]);
        let d = distributional_derivative(&PiecewiseFn::from_smooth(Smooth::gaussian()), L);
        assert!(d.atoms().is_empty());
        for x in [-1.0f64, 0.3, 2.0] {
            let want = -2.0 * x * (-x * x).exp();
            assert!((d.regular().value_at(x).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn regularized_examples() {
        let g = Smooth::gaussian();
        let r = RegularizedDelta::cauchy(1e-3).unwrap();
        assert!((regularized_pair(&r, &g).unwrap() - 1.0).abs() < 5e-3);
        let xg = test_function("x-gaussian").unwrap();
        assert!(regularized_pair(&r, &xg).unwrap().abs() < 5e-3);
        assert!(RegularizedDelta::cauchy(0.0).is_err());
    }

    #[test]
    fn euler_examples() {
        let hl = PiecewiseFn::heaviside(L).unwrap();
        let g = hl.sub(&hl.reflect());
        assert_eq!(euler_character(&g, L), 0);
        assert_eq!(euler_character(&PiecewiseFn::sgn_twosided(), Orientation::Standard), 1);
        for o in [L, R, Orientation::Standard] {
            assert_eq!(euler_character(&PiecewiseFn::constant(3.0), o), 1);
        }
    }

    #[test]
    fn reflection_covariance() {
        let d = Distribution::new(
            PiecewiseFn::heaviside(L).unwrap(),
            vec![Atom { x: 0.4, order: 1, w: 1.5 }, Atom { x: -0.2, order: 0, w: -0.7 }],
        )
        .unwrap();
        let phi = test_function("hermite-gaussian-1").unwrap().scaled(0.3);
        let phi = Smooth::add(&phi, &Smooth::Gaussian { amp: 1.0, center: 0.5, width: 0.8 });
        let lhs = pair(&d, &phi.reflect()).unwrap();
        let rhs = pair(&d.reflect(), &phi).unwrap();
        assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn json_shape() {
        let d: Distribution = serde_json::from_str(r#"{"atoms":[{"x":0,"order":1,"w":2}]}"#).unwrap();
        assert_eq!(d, Distribution::delta_prime(0.0, 2.0));
        assert!(serde_json::from_str::<Distribution>(r#"{"atoms":[{"x":0,"order":2,"w":1}]}"#).is_err());
    }
}
