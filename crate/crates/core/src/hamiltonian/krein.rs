//! Fundamental symmetry `J = diag(sgn_o(x_j))` and the signature of the
//! indefinite form `⟨J·,·⟩` on eigendirections.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use serde::Serialize;

use super::{build, second_difference, sign_at, HamiltonianConfig, HamiltonianOperator};
use crate::error::{Error, Result};
use crate::interval_topology::Orientation;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KreinForm {
    pub j: Vec<f64>,
    /// `(n₊, n₋)` of `J` itself.
    pub signature: (usize, usize),
}

impl KreinForm {
    pub fn new(j: Vec<f64>) -> Result<Self> {
        if j.iter().any(|&s| s != 1.0 && s != -1.0) {
            return Err(Error::InvalidArgument("J entries must be ±1".into()));
        }
        let pos = j.iter().filter(|&&s| s > 0.0).count();
        let neg = j.len() - pos;
        Ok(KreinForm { j, signature: (pos, neg) })
    }

    pub fn identity(n: usize) -> Self {
        KreinForm { j: vec![1.0; n], signature: (n, 0) }
    }

    /// `diag(sgn_o(x_j))`, with the orientation deciding the node at 0.
    pub fn sign(cfg: &HamiltonianConfig) -> Result<Self> {
        if cfg.orientation == Orientation::Standard {
            return Err(Error::BadOrientation("standard"));
        }
        Self::new(cfg.grid().iter().map(|&x| sign_at(cfg.orientation, x)).collect())
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.j))
    }
}

/// The model `A = -sgn(x) d²/dx²`, i.e. `diag(sgn_o) D₂`, paired with its
/// fundamental symmetry.
pub fn krein_model(n: usize, circumference: f64, o: Orientation) -> Result<(HamiltonianOperator, KreinForm)> {
    let cfg =
        HamiltonianConfig { a: 1.0, alpha: 0.0, orientation: o, grid_n: n, circumference, krein_override: true, ..Default::default() };
    let k = KreinForm::sign(&cfg)?;
    let mut h = build(&cfg)?;
    h.coefficient = k.j.clone();
    h.matrix = second_difference(n, cfg.spacing());
    for (i, s) in k.j.iter().enumerate() {
        h.matrix.row_mut(i).scale_mut(*s);
    }
    Ok((h, k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KreinCounts {
    pub pos: usize,
    pub neg: usize,
    /// Complex, defective or `J`-isotropic directions.
    pub neutral: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KreinReport {
    pub j_symmetry_residual: f64,
    pub pos_subspace_dim: usize,
    pub neg_subspace_dim: usize,
    pub neutral_dim: usize,
}

fn inertia(g: DMatrix<f64>, tol: f64) -> (usize, usize) {
    if g.nrows() == 0 {
        return (0, 0);
    }
    let e = SymmetricEigen::new(g);
    let pos = e.eigenvalues.iter().filter(|&&v| v > tol).count();
    let neg = e.eigenvalues.iter().filter(|&&v| v < -tol).count();
    (pos, neg)
}

/// Columns of `V` spanning the numerical null space of `a`.
fn null_space(a: DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    let n = a.ncols();
    let svd = SVD::try_new(a, false, true, 1e-15, 10_000).ok_or(Error::SolverFailed)?;
    let vt = svd.v_t.ok_or(Error::SolverFailed)?;
    let cols: Vec<_> = (0..n).filter(|&i| svd.singular_values[i] <= tol).map(|i| vt.row(i).transpose()).collect();
    Ok(if cols.is_empty() { DMatrix::zeros(n, 0) } else { DMatrix::from_columns(&cols) })
}

fn jgram(v: &DMatrix<f64>, j: &DMatrix<f64>) -> DMatrix<f64> {
    let g = v.transpose() * j * v;
    (&g + g.transpose()) * 0.5
}

/// When `JM` is symmetric positive semidefinite: with `S = (JM)^{1/2}`,
/// `M = J S²` shares its nonzero spectrum with the symmetric `S J S`, and
/// the sign of each nonzero eigenvalue is the `J`-sign of its eigenvector.
/// Kernel directions are typed by the `J`-Gram matrix of `ker(JM)`; any
/// remaining zero directions belong to Jordan chains and are neutral.
fn counts_psd(h: &DMatrix<f64>, j: &DMatrix<f64>, tol: f64) -> Result<Option<KreinCounts>> {
    let e = SymmetricEigen::try_new(h.clone(), 1e-15, 10_000).ok_or(Error::SolverFailed)?;
    if e.eigenvalues.iter().any(|&v| v < -tol) {
        return Ok(None);
    }
    let root: Vec<f64> = e.eigenvalues.iter().map(|&v| v.max(0.0).sqrt()).collect();
    let q = &e.eigenvectors;
    let s = q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(root)) * q.transpose();
    let a = &s * j * &s;
    let a = (&a + a.transpose()) * 0.5;
    let ea = SymmetricEigen::new(a);
    let pos = ea.eigenvalues.iter().filter(|&&v| v > tol).count();
    let neg = ea.eigenvalues.iter().filter(|&&v| v < -tol).count();
    let zeros = h.nrows() - pos - neg;
    let kernel_cols: Vec<_> = (0..h.nrows()).filter(|&i| e.eigenvalues[i] <= tol).map(|i| q.column(i).into_owned()).collect();
    let (kp, kn) = if kernel_cols.is_empty() { (0, 0) } else { inertia(jgram(&DMatrix::from_columns(&kernel_cols), j), 1e-8) };
    Ok(Some(KreinCounts { pos: pos + kp, neg: neg + kn, neutral: zeros - kp - kn }))
}

/// Eigenvalue clusters, null spaces by SVD, and the `J`-Gram inertia on
/// each real eigenspace. Complex and defective directions are neutral.
fn counts_general(m: &DMatrix<f64>, j: &DMatrix<f64>, scale: f64) -> Result<KreinCounts> {
    let n = m.nrows();
    let schur = nalgebra::Schur::try_new(m.clone(), 1e-15, 10_000).ok_or(Error::SolverFailed)?;
    let ev = schur.complex_eigenvalues();
    let tol = 1e-8 * scale;
    let mut reals: Vec<f64> = ev.iter().filter(|z| z.im.abs() <= tol).map(|z| z.re).collect();
    reals.sort_by(f64::total_cmp);
    let mut counts = KreinCounts { pos: 0, neg: 0, neutral: n - reals.len() };
    let mut i = 0;
    while i < reals.len() {
        let mut k = i + 1;
        while k < reals.len() && reals[k] - reals[k - 1] <= tol {
            k += 1;
        }
        let mult = k - i;
        let lambda = reals[i..k].iter().sum::<f64>() / mult as f64;
        let shifted = m - DMatrix::identity(n, n) * lambda;
        let v = null_space(shifted, 1e-6 * scale)?;
        let (p, q) = inertia(jgram(&v, j), 1e-8);
        let (p, q) = (p.min(mult), q.min(mult - p.min(mult)));
        counts.pos += p;
        counts.neg += q;
        counts.neutral += mult - p - q;
        i = k;
    }
    Ok(counts)
}

pub fn krein_check(h: &HamiltonianOperator, k: &KreinForm) -> Result<KreinReport> {
    let n = h.n();
    if k.j.len() != n {
        return Err(Error::InvalidArgument(format!("J has size {}, operator has {n}", k.j.len())));
    }
    let j = k.matrix();
    let jm = &j * &h.matrix;
    let residual = (&jm - jm.transpose()).abs().max();
    let scale = h.matrix.abs().max().max(1.0);
    let sym = (&jm + jm.transpose()) * 0.5;
    let counts = match counts_psd(&sym, &j, 1e-9 * scale)? {
        Some(c) if residual <= 1e-12 * scale => c,
        _ => counts_general(&h.matrix, &j, scale)?,
    };
    Ok(KreinReport {
        j_symmetry_residual: residual,
        pos_subspace_dim: counts.pos,
        neg_subspace_dim: counts.neg,
        neutral_dim: counts.neutral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn model_is_j_symmetric() {
        for o in [Orientation::Left, Orientation::Right] {
            let (h, k) = krein_model(64, TAU, o).unwrap();
            let r = krein_check(&h, &k).unwrap();
            assert!(r.j_symmetry_residual < 1e-12);
            assert_eq!(r.pos_subspace_dim + r.neg_subspace_dim + r.neutral_dim, 64);
            for d in [r.pos_subspace_dim, r.neg_subspace_dim] {
                assert!((31..=33).contains(&d), "{r:?}");
            }
        }
    }

    #[test]
    fn signature_by_orientation() {
        // Σ sgn_L = -2 keeps the constant kernel vector J-negative; under
        // Right the sum vanishes and zero becomes a 2-step Jordan chain.
        let (h, k) = krein_model(64, TAU, Orientation::Left).unwrap();
        let r = krein_check(&h, &k).unwrap();
        assert_eq!((r.pos_subspace_dim, r.neg_subspace_dim, r.neutral_dim), (31, 33, 0));
        let (h, k) = krein_model(64, TAU, Orientation::Right).unwrap();
        let r = krein_check(&h, &k).unwrap();
        assert_eq!((r.pos_subspace_dim, r.neg_subspace_dim, r.neutral_dim), (31, 31, 2));
    }

    #[test]
    fn free_operator_is_positive() {
        let h = build(&HamiltonianConfig::default()).unwrap();
        let r = krein_check(&h, &KreinForm::identity(64)).unwrap();
        assert!(r.j_symmetry_residual < 1e-12);
        assert_eq!((r.pos_subspace_dim, r.neg_subspace_dim), (64, 0));
    }

    #[test]
    fn general_route_agrees_on_the_model() {
        let (h, k) = krein_model(16, TAU, Orientation::Left).unwrap();
        let j = k.matrix();
        let c = counts_general(&h.matrix, &j, h.matrix.abs().max()).unwrap();
        assert_eq!((c.pos, c.neg, c.neutral), (7, 9, 0));
    }

    #[test]
    fn form_squares_to_identity() {
        let k = KreinForm::sign(&HamiltonianConfig::default()).unwrap();
        let j = k.matrix();
        assert_eq!(&j * &j, DMatrix::identity(64, 64));
        assert_eq!(k.signature, (31, 33));
        assert!(KreinForm::new(vec![1.0, 0.0]).is_err());
    }
}
