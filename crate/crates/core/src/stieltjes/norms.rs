//! Sup, L^p and bounded-variation norms over bounded interval sets.

use serde::Serialize;

use super::{knots, path_variation, piece_on, quadrature, walk};
use crate::error::{Error, Result};
use crate::interval_topology::IntervalSet;
use crate::piecewise::PiecewiseFn;

/// Extra uniform samples per smooth gap for the sup search.
const SUP_SAMPLES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Norms {
    pub sup: f64,
    pub l1: f64,
    pub l2: f64,
    /// `(p, ‖f‖_p)` for the requested exponent.
    pub lp: (f64, f64),
    pub bv: f64,
}

/// `sup`, `L^1`, `L^2`, `L^p` and `BV = |f(a)| + V(f)` of `f` over `s`.
///
/// The BV walk runs over the closure of each piece of `s`, starting from
/// the assigned value at the left edge `a`, and includes the jumps between
/// consecutive pieces.
pub fn norms(f: &PiecewiseFn, s: &IntervalSet, p: f64) -> Result<Norms> {
    if !s.is_bounded() {
        return Err(Error::Unbounded(format!("norms over {s}")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("L^p exponent must be finite and >= 1, got {p}")));
    }
    Ok(Norms { sup: sup_norm(f, s)?, l1: lp_norm(f, s, 1.0)?, l2: lp_norm(f, s, 2.0)?, lp: (p, lp_norm(f, s, p)?), bv: bv_norm(f, s)? })
}

pub fn sup_norm(f: &PiecewiseFn, s: &IntervalSet) -> Result<f64> {
    let mut best: f64 = 0.0;
    let mut see = |v: f64| best = best.max(v.abs());
    for piece in s.pieces() {
        let (lo, hi) = (piece.lo.value(), piece.hi.value());
        if piece.is_point() {
            if let Some(v) = f.value_at(lo) {
                see(v);
            }
            continue;
        }
        // the walk already visits edge values, limits, breakpoint values and extrema
        for v in walk(f, piece, false)? {
            see(v);
        }
        for w in knots(lo, hi, &[f]).windows(2) {
            let g = piece_on(f, w[0], w[1]);
            for k in 1..SUP_SAMPLES {
                see(g.eval(w[0] + (w[1] - w[0]) * k as f64 / SUP_SAMPLES as f64));
            }
        }
    }
    Ok(best)
}

pub fn lp_norm(f: &PiecewiseFn, s: &IntervalSet, p: f64) -> Result<f64> {
    let mut total = 0.0;
    for piece in s.pieces() {
        let (lo, hi) = (piece.lo.value(), piece.hi.value());
        for w in knots(lo, hi, &[f]).windows(2) {
            let g = piece_on(f, w[0], w[1]);
            let integrand = |x: f64| {
                let v = g.eval(x).abs();
                if p == 1.0 {
                    v
                } else {
                    v.powf(p)
                }
            };
            total += quadrature::integrate(&integrand, w[0], w[1])?;
        }
    }
    Ok(total.powf(1.0 / p))
}

pub fn bv_norm(f: &PiecewiseFn, s: &IntervalSet) -> Result<f64> {
    let mut path = Vec::new();
    for piece in s.pieces() {
        path.extend(walk(f, piece, true)?);
    }
    let Some(&start) = path.first() else {
        return Ok(0.0);
    };
    Ok(start.abs() + path_variation(&path))
}
