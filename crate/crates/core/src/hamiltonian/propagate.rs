//! Imaginary-time evolution `ψ(τ) = e^{-τM} ψ₀`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::HamiltonianOperator;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exponential,
    TrotterSlices(usize),
}

/// `sqrt(h Σ ψ_j²)`, the grid `L²` norm.
pub fn grid_norm(psi: &[f64], h: f64) -> f64 {
    (h * psi.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

pub fn l2_distance(a: &[f64], b: &[f64], h: f64) -> f64 {
    (h * a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()).sqrt()
}

pub fn normalize(psi: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = grid_norm(psi, h);
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::ZeroDenominator("‖ψ₀‖"));
    }
    Ok(psi.iter().map(|v| v / n).collect())
}

pub fn snapshot_csv(grid: &[f64], psi: &[f64]) -> String {
    let mut s = String::from("x,re_psi\n");
    for (x, v) in grid.iter().zip(psi) {
        s.push_str(&format!("{x:.16e},{v:.16e}\n"));
    }
    s
}

pub fn propagate(h: &HamiltonianOperator, psi0: &[f64], tau: f64, method: Method) -> Result<Vec<f64>> {
    let n = h.n();
    if psi0.len() != n {
        return Err(Error::InvalidArgument(format!("ψ₀ has {} entries, grid has {n}", psi0.len())));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("τ must be positive, got {tau}")));
    }
    let norm = grid_norm(psi0, h.cfg.spacing());
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("ψ₀ must have unit L² norm, got {norm}")));
    }
    if !h.positive_coefficient() {
        return Err(Error::KreinRegime("imaginary-time kernel is not positive".into()));
    }
    match method {
        Method::Exponential => exponential(h, psi0, tau),
        Method::TrotterSlices(0) => Err(Error::InvalidArgument("need at least one slice".into())),
        Method::TrotterSlices(k) => Ok(trotter(h, psi0, tau, k)),
    }
}

/// `e^{-τM} = C^{1/2} e^{-τS} C^{-1/2}` with `S = C^{1/2} D₂ C^{1/2}`
/// symmetric, so only a symmetric eigendecomposition is needed.
fn exponential(h: &HamiltonianOperator, psi0: &[f64], tau: f64) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(h.symmetrized(), 1e-15, 10_000).ok_or(Error::SolverFailed)?;
    let root: Vec<f64> = h.coefficient.iter().map(|c| c.sqrt()).collect();
    let start = DVector::from_iterator(psi0.len(), psi0.iter().zip(&root).map(|(v, r)| v / r));
    let q = &eig.eigenvectors;
    let coeffs = q.transpose() * start;
    let decayed = DVector::from_iterator(coeffs.len(), coeffs.iter().zip(eig.eigenvalues.iter()).map(|(c, l)| c * (-tau * l).exp()));
    let out = q * decayed;
    Ok(out.iter().zip(&root).map(|(v, r)| v * r).collect())
}

/// Row `d ↦ [e^{-s D₂}]_{j, j-d}` of the periodic lattice heat kernel,
/// summed over the Fourier modes of `D₂`.
fn heat_row(n: usize, spacing: f64, s: f64) -> Vec<f64> {
    let lam: Vec<f64> = (0..n)
        .map(|m| {
            let t = (std::f64::consts::PI * m as f64 / n as f64).sin();
            4.0 * t * t / (spacing * spacing)
        })
        .collect();
    (0..n)
        .map(|d| {
            let mut acc = 0.0;
            for (m, l) in lam.iter().enumerate() {
                let phase = std::f64::consts::TAU * (m * d % n) as f64 / n as f64;
                acc += (-s * l).exp() * phase.cos();
            }
            acc / n as f64
        })
        .collect()
}

/// Each slice integrates the momentum out exactly with the coefficient
/// frozen at the arrival point: row `j` of the slice kernel is the lattice
/// Gaussian of width `sqrt(2 c(x_j) δτ)`. Freezing per row drops the
/// commutator `[C, D₂]`, so the product converges at first order.
fn trotter(h: &HamiltonianOperator, psi0: &[f64], tau: f64, slices: usize) -> Vec<f64> {
    let n = h.n();
    let dt = tau / slices as f64;
    let c = &h.coefficient;
    let mut rows: HashMap<u64, Vec<f64>> = HashMap::new();
    for v in c {
        rows.entry(v.to_bits()).or_insert_with(|| heat_row(n, h.cfg.spacing(), v * dt));
    }
    let kernel = DMatrix::from_fn(n, n, |j, k| rows[&c[j].to_bits()][(j + n - k) % n]);
    let mut psi = DVector::from_column_slice(psi0);
    for _ in 0..slices {
        psi = &kernel * psi;
    }
    psi.iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::super::{build, HamiltonianConfig};
    use super::*;
    use crate::interval_topology::Orientation;

    fn op(alpha: f64, n: usize) -> HamiltonianOperator {
        build(&HamiltonianConfig { alpha, grid_n: n, orientation: Orientation::Left, ..Default::default() }).unwrap()
    }

    fn bump(h: &HamiltonianOperator) -> Vec<f64> {
        let raw: Vec<f64> = h.grid.iter().map(|x| (-(x - 0.3) * (x - 0.3)).exp()).collect();
        normalize(&raw, h.cfg.spacing()).unwrap()
    }

    #[test]
    fn constant_mode_is_stationary() {
        let h = op(0.0, 32);
        let c = normalize(&[1.0; 32], h.cfg.spacing()).unwrap();
        for m in [Method::Exponential, Method::TrotterSlices(5)] {
            let out = propagate(&h, &c, 0.7, m).unwrap();
            assert!(l2_distance(&out, &c, h.cfg.spacing()) < 1e-12);
        }
    }

    #[test]
    fn fourier_mode_decays() {
        let h = op(0.0, 64);
        let sp = h.cfg.spacing();
        let mode = normalize(&h.grid.iter().map(|x| x.cos()).collect::<Vec<_>>(), sp).unwrap();
        let tau = 0.3;
        let discrete = 4.0 / (sp * sp) * (std::f64::consts::PI / 64.0).sin().powi(2);
        for m in [Method::Exponential, Method::TrotterSlices(3)] {
            let out = propagate(&h, &mode, tau, m).unwrap();
            for (o, v) in out.iter().zip(&mode) {
                assert!((o - v * (-tau * discrete).exp()).abs() < 1e-12);
                assert!((o - v * (-tau).exp()).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn exponential_matches_dense_exp() {
        let h = op(0.5, 16);
        let psi = bump(&h);
        let dense = (h.matrix.clone() * -0.1).exp() * DVector::from_column_slice(&psi);
        let ours = propagate(&h, &psi, 0.1, Method::Exponential).unwrap();
        for (a, b) in ours.iter().zip(dense.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn trotter_is_first_order() {
        let h = op(0.5, 64);
        let psi = bump(&h);
        let exact = propagate(&h, &psi, 0.1, Method::Exponential).unwrap();
        let e = |k| l2_distance(&propagate(&h, &psi, 0.1, Method::TrotterSlices(k)).unwrap(), &exact, h.cfg.spacing());
        let ratio = e(32) / e(64);
        assert!((ratio - 2.0).abs() < 0.4, "{ratio}");
    }

    #[test]
    fn preconditions() {
        let h = op(0.5, 16);
        assert!(propagate(&h, &[1.0; 16], 0.1, Method::Exponential).is_err());
        let psi = bump(&h);
        assert!(propagate(&h, &psi, 0.1, Method::TrotterSlices(0)).is_err());
        let k = build(&HamiltonianConfig { alpha: 8.0, grid_n: 16, krein_override: true, ..Default::default() }).unwrap();
        assert!(matches!(propagate(&k, &psi, 0.1, Method::Exponential), Err(Error::KreinRegime(_))));
    }
}
