//! The transformed operator `Ĥ = (a² - κα sgn_o(x)) (i d/dx)²` on a
//! periodic grid, with `κ = 1/4` by default.
//!
//! On the grid `x_j = (j - n/2) h`, `h = L/n`, the origin is node `n/2`
//! and `sgn_o(0)` takes the orientation's value: -1 for Left, +1 for
//! Right, 0 for Standard. The matrix is `M = C D₂` with `D₂` the positive
//! semidefinite periodic second difference `(-1, 2, -1)/h²`.

pub mod krein;
pub mod propagate;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_topology::{IntervalSet, Orientation};
use crate::piecewise::{require_test_function, PiecewiseFn, Smooth};
use crate::stieltjes::{self, norms, Measure};

pub use krein::{krein_check, krein_model, KreinForm, KreinReport};
pub use propagate::{propagate, Method};

fn default_factor() -> f64 {
    0.25
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub a: f64,
    pub alpha: f64,
    pub orientation: Orientation,
    pub grid_n: usize,
    pub circumference: f64,
    /// Multiplier of `α sgn` in the coefficient.
    #[serde(default = "default_factor")]
    pub factor: f64,
    /// Allows a sign-changing coefficient (Krein regime).
    #[serde(default)]
    pub krein_override: bool,
}

impl Default for HamiltonianConfig {
    fn default() -> Self {
        HamiltonianConfig {
            a: 1.0,
            alpha: 0.0,
            orientation: Orientation::Left,
            grid_n: 64,
            circumference: std::f64::consts::TAU,
            factor: default_factor(),
            krein_override: false,
        }
    }
}

impl HamiltonianConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidArgument(format!("a must be positive, got {}", self.a)));
        }
        if !self.alpha.is_finite() || !self.factor.is_finite() {
            return Err(Error::InvalidArgument("alpha and factor must be finite".into()));
        }
        if self.grid_n < 8 || !self.grid_n.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("grid_n must be even and >= 8, got {}", self.grid_n)));
        }
        if !(self.circumference > 0.0 && self.circumference.is_finite()) {
            return Err(Error::InvalidArgument(format!("circumference must be positive, got {}", self.circumference)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.circumference / self.grid_n as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        let half = (self.grid_n / 2) as i64;
        (0..self.grid_n as i64).map(|j| (j - half) as f64 * h).collect()
    }

    /// `κ|α| / a²`, the relative size of the sign term.
    pub fn potential_ratio(&self) -> f64 {
        self.factor * self.alpha.abs() / (self.a * self.a)
    }

    pub fn is_elliptic(&self) -> bool {
        self.factor * self.alpha.abs() < self.a * self.a
    }

    /// `c(x) = a² - κα sgn_o(x)` as a piecewise function on the line.
    pub fn coefficient_fn(&self) -> PiecewiseFn {
        let s = sign_fn(self.orientation);
        PiecewiseFn::constant(self.a * self.a).add(&s.scale(-self.factor * self.alpha))
    }
}

/// `sgn_o` with value -1 / +1 / 0 at the origin.
pub fn sign_at(o: Orientation, x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        match o {
            Orientation::Left => -1.0,
            Orientation::Right => 1.0,
            Orientation::Standard => 0.0,
        }
    }
}

fn sign_fn(o: Orientation) -> PiecewiseFn {
    let at = sign_at(o, 0.0);
    PiecewiseFn::step(0.0, -1.0, 1.0, Some(at), o)
}

/// Positive semidefinite periodic second difference.
pub fn second_difference(n: usize, h: f64) -> DMatrix<f64> {
    let k = 1.0 / (h * h);
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * k
        } else if (i + 1) % n == j || (j + 1) % n == i {
            -k
        } else {
            0.0
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianOperator {
    pub cfg: HamiltonianConfig,
    pub grid: Vec<f64>,
    pub coefficient: Vec<f64>,
    pub matrix: DMatrix<f64>,
}

pub fn build(cfg: &HamiltonianConfig) -> Result<HamiltonianOperator> {
    cfg.validate()?;
    let potential = cfg.factor * cfg.alpha.abs();
    let kinetic = cfg.a * cfg.a;
    if potential >= kinetic && !cfg.krein_override {
        return Err(Error::NotElliptic { potential, kinetic });
    }
    let grid = cfg.grid();
    let coefficient: Vec<f64> = grid.iter().map(|&x| kinetic - cfg.factor * cfg.alpha * sign_at(cfg.orientation, x)).collect();
    let d2 = second_difference(cfg.grid_n, cfg.spacing());
    let mut matrix = d2;
    for (i, c) in coefficient.iter().enumerate() {
        matrix.row_mut(i).scale_mut(*c);
    }
    Ok(HamiltonianOperator { cfg: cfg.clone(), grid, coefficient, matrix })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "values", rename_all = "lowercase")]
pub enum Spectrum {
    Real(Vec<f64>),
    /// `(re, im)` pairs, sorted by real then imaginary part.
    Complex(Vec<(f64, f64)>),
}

impl Spectrum {
    pub fn real(&self) -> Option<&[f64]> {
        match self {
            Spectrum::Real(v) => Some(v),
            Spectrum::Complex(_) => None,
        }
    }

    pub fn to_csv(&self) -> String {
        match self {
            Spectrum::Real(v) => {
                let mut s = String::from("index,eigenvalue\n");
                for (i, x) in v.iter().enumerate() {
                    s.push_str(&format!("{i},{x:.16e}\n"));
                }
                s
            }
            Spectrum::Complex(v) => {
                let mut s = String::from("index,re,im\n");
                for (i, (re, im)) in v.iter().enumerate() {
                    s.push_str(&format!("{i},{re:.16e},{im:.16e}\n"));
                }
                s
            }
        }
    }
}

impl HamiltonianOperator {
    pub fn n(&self) -> usize {
        self.grid.len()
    }

    pub fn positive_coefficient(&self) -> bool {
        self.coefficient.iter().all(|&c| c > 0.0)
    }

    /// `C^{1/2} D₂ C^{1/2}`, similar to `M` when `C > 0`.
    pub(crate) fn symmetrized(&self) -> DMatrix<f64> {
        let d2 = second_difference(self.n(), self.cfg.spacing());
        let s: Vec<f64> = self.coefficient.iter().map(|c| c.sqrt()).collect();
        DMatrix::from_fn(self.n(), self.n(), |i, j| s[i] * d2[(i, j)] * s[j])
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        if self.positive_coefficient() {
            let eig = SymmetricEigen::try_new(self.symmetrized(), 1e-14, 10_000).ok_or(Error::SolverFailed)?;
            let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            v.sort_by(f64::total_cmp);
            return Ok(Spectrum::Real(v));
        }
        let schur = nalgebra::Schur::try_new(self.matrix.clone(), 1e-14, 10_000).ok_or(Error::SolverFailed)?;
        let mut v: Vec<(f64, f64)> = schur.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        Ok(Spectrum::Complex(v))
    }
}

/// Report of the norm ratio `‖Ĥφ‖ / ‖φ''‖_BV` evaluated through the bound
/// chain `‖Ĥφ‖ ≤ ‖φ''‖ + ‖V(φ'')‖ = (1 + |a|)‖φ''‖` with `‖φ''‖₁ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormRatioReport {
    /// Chain numerator over `(1 + |a|) ‖φ''‖₁`; the printed value is 1.
    pub ratio: f64,
    /// `‖φ''‖₁ + ‖V(φ'')‖₁` after normalization.
    pub chain_numerator: f64,
    /// `(1 + |a|) ‖φ''‖₁`.
    pub denominator: f64,
    /// `|a| = κ|α|/a²`, the potential-to-kinetic factor.
    pub potential_norm_factor: f64,
    /// `‖Ĥφ‖₁ / (a² (1 + |a|) ‖φ''‖₁)` with the true `L¹` norm of `Ĥφ`;
    /// never above `ratio`.
    pub direct_ratio: f64,
    /// Scale applied to `φ` so that `‖φ''‖₁ = 1`.
    pub normalization: f64,
}

/// `V(φ'') = (κα/a²) sgn_o φ''` and `Ĥφ / a² = -(φ'' - V(φ''))`, with all
/// `L¹` norms computed on the line through the Stieltjes engine.
pub fn operator_norm_ratio(h: &HamiltonianOperator, phi: &Smooth) -> Result<NormRatioReport> {
    require_test_function(phi)?;
    let cfg = &h.cfg;
    let line = IntervalSet::real_line();
    let dd = PiecewiseFn::from_smooth(phi.derivative().derivative());
    let raw = norms::lp_norm(&dd, &line, 1.0)?;
    if !(raw > 0.0) {
        return Err(Error::ZeroDenominator("‖φ''‖₁"));
    }
    let scale = 1.0 / raw;
    let dd = dd.scale(scale);
    let dd_l1 = norms::lp_norm(&dd, &line, 1.0)?;
    let k = cfg.factor * cfg.alpha / (cfg.a * cfg.a);
    let v = dd.mul(&sign_fn(cfg.orientation)).scale(k);
    let v_l1 = norms::lp_norm(&v, &line, 1.0)?;
    let pot = k.abs();
    let denominator = (1.0 + pot) * dd_l1;
    if denominator == 0.0 {
        return Err(Error::ZeroDenominator("(1 + |a|) ‖φ''‖"));
    }
    let chain_numerator = dd_l1 + v_l1;
    let h_phi = dd.sub(&v);
    let direct = norms::lp_norm(&h_phi, &line, 1.0)?;
    Ok(NormRatioReport {
        ratio: chain_numerator / denominator,
        chain_numerator,
        denominator,
        potential_norm_factor: pot,
        direct_ratio: direct / denominator,
        normalization: scale,
    })
}

/// The four blocks `⟨bra| Ĥ_k |ket⟩`, `k` the ket's orientation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub ll: f64,
    pub rr: f64,
    pub lr: f64,
    pub rl: f64,
}

impl DecompositionReport {
    pub fn cross_terms(&self) -> (f64, f64) {
        (self.lr, self.rl)
    }
}

/// `⟨bra| c_k (-d²/dx²) |ket⟩` with the ket's second derivative taken in
/// the distributional sense. Jumps `J` and kinks `K` of the ket enter as
/// `-K g(b) + J g'(b)`, `g = bra · c_k` read from the bra's side, and are
/// counted only where the ket is semicontinuous in the bra's orientation
/// (or continuous): jump content of the other orientation has measure zero.
fn block(bra: &PiecewiseFn, bra_o: Orientation, ket: &PiecewiseFn, ket_o: Orientation, cfg: &HamiltonianConfig) -> Result<f64> {
    let c = HamiltonianConfig { orientation: ket_o, ..cfg.clone() }.coefficient_fn();
    let g = bra.mul(&c);
    let dg = g.derivative();
    let ket_d1 = ket.derivative();
    let ket_d2 = ket_d1.derivative();
    let regular = stieltjes::integrate(&g.mul(&ket_d2), &Measure::lebesgue(), &IntervalSet::real_line())?;
    let mut total = -regular;
    let side = |f: &PiecewiseFn, b: f64| -> f64 {
        match bra_o {
            Orientation::Left => f.left_limit(b).unwrap_or(0.0),
            Orientation::Right => f.right_limit(b).unwrap_or(0.0),
            Orientation::Standard => 0.5 * (f.left_limit(b).unwrap_or(0.0) + f.right_limit(b).unwrap_or(0.0)),
        }
    };
    for (i, &b) in ket.breakpoints().iter().enumerate() {
        let visible = bra_o == Orientation::Standard || ket.classify(b).fits(bra_o);
        if !visible {
            continue;
        }
        let jump = ket.jump(i);
        let kink = ket_d1.right_limit(b).unwrap() - ket_d1.left_limit(b).unwrap();
        total += -kink * side(&g, b) + jump * side(&dg, b);
    }
    Ok(total)
}

pub fn decomposition_check(psi_l: &PiecewiseFn, psi_r: &PiecewiseFn, cfg: &HamiltonianConfig) -> Result<DecompositionReport> {
    let (l, r) = (Orientation::Left, Orientation::Right);
    Ok(DecompositionReport {
        ll: block(psi_l, l, psi_l, l, cfg)?,
        rr: block(psi_r, r, psi_r, r, cfg)?,
        lr: block(psi_l, l, psi_r, r, cfg)?,
        rl: block(psi_r, r, psi_l, l, cfg)?,
    })
}

/// `|ψ(x)| · |Ĥψ(x)|` integrand's BV norm over a bounded set, for smooth
/// pieces of `ψ`: the pairing is formed pointwise and then normed.
pub fn energy_integrand_bv(psi: &PiecewiseFn, cfg: &HamiltonianConfig, s: &IntervalSet) -> Result<f64> {
    let c = cfg.coefficient_fn();
    let h_psi = c.mul(&psi.derivative().derivative()).scale(-1.0);
    norms::bv_norm(&psi.mul(&h_psi), s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval_topology::Interval;
    use crate::piecewise::test_function;

    fn cfg(alpha: f64, o: Orientation, n: usize) -> HamiltonianConfig {
        HamiltonianConfig { alpha, orientation: o, grid_n: n, ..Default::default() }
    }

    #[test]
    fn build_examples() {
        let free = build(&cfg(0.0, Orientation::Left, 64)).unwrap();
        assert_eq!(free.matrix, free.matrix.transpose());
        let h = build(&cfg(1.0, Orientation::Left, 64)).unwrap();
        assert_eq!(h.coefficient[32], 1.25);
        assert_eq!(h.coefficient[40], 0.75);
        assert_eq!(h.grid[32], 0.0);
        let h = build(&cfg(1.0, Orientation::Right, 64)).unwrap();
        assert_eq!(h.coefficient[32], 0.75);
        assert!(matches!(build(&cfg(4.0, Orientation::Left, 64)), Err(Error::NotElliptic { .. })));
        let over = HamiltonianConfig { krein_override: true, ..cfg(8.0, Orientation::Left, 64) };
        assert!(build(&over).is_ok());
        assert!(build(&cfg(0.0, Orientation::Left, 7)).is_err());
    }

    #[test]
    fn row_sums_vanish() {
        let d2 = second_difference(16, 0.3);
        for i in 0..16 {
            assert!(d2.row(i).sum().abs() < 1e-12);
        }
    }

    #[test]
    fn free_spectrum_low_modes() {
        let h = build(&cfg(0.0, Orientation::Left, 128)).unwrap();
        let s = h.spectrum().unwrap();
        let v = s.real().unwrap();
        assert!(v[0].abs() < 1e-10);
        for (got, want) in v[1..5].iter().zip([1.0, 1.0, 4.0, 4.0]) {
            assert!((got - want).abs() < 5e-3, "{got} vs {want}");
        }
    }

    #[test]
    fn krein_override_gives_complex_capable_spectrum() {
        let over = HamiltonianConfig { krein_override: true, ..cfg(8.0, Orientation::Left, 16) };
        let s = build(&over).unwrap().spectrum().unwrap();
        assert!(matches!(s, Spectrum::Complex(ref v) if v.len() == 16));
    }

    #[test]
    fn norm_ratio_examples() {
        let g = test_function("gaussian").unwrap();
        let h = build(&cfg(1.0, Orientation::Left, 64)).unwrap();
        let r = operator_norm_ratio(&h, &g).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-6);
        assert!(r.direct_ratio <= r.ratio + 1e-12);
        let free = build(&cfg(0.0, Orientation::Left, 64)).unwrap();
        assert!((operator_norm_ratio(&free, &g).unwrap().ratio - 1.0).abs() < 1e-9);
        let r3 = operator_norm_ratio(&h, &g.scaled(3.0)).unwrap();
        assert!((r3.ratio - r.ratio).abs() < 1e-12);
    }

    #[test]
    fn decomposition_examples() {
        let c = cfg(0.5, Orientation::Left, 64);
        let psi_l = PiecewiseFn::indicator(&Interval::left_open(0.0, 1.0)).unwrap();
        let psi_r = PiecewiseFn::indicator(&Interval::right_open(0.0, 1.0)).unwrap();
        let d = decomposition_check(&psi_l, &psi_r, &c).unwrap();
        assert_eq!(d.cross_terms(), (0.0, 0.0));
        let smooth = PiecewiseFn::from_smooth(Smooth::gaussian());
        let d = decomposition_check(&smooth, &smooth, &c).unwrap();
        for v in [d.rr, d.lr, d.rl] {
            assert!((v - d.ll).abs() < 1e-9, "{d:?}");
        }
        let zero = PiecewiseFn::constant(0.0);
        let d = decomposition_check(&zero, &zero, &c).unwrap();
        assert_eq!((d.ll, d.rr, d.lr, d.rl), (0.0, 0.0, 0.0, 0.0));
    }
}
