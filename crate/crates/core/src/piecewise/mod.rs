//! Semicontinuous piecewise functions.
//!
//! A [`PiecewiseFn`] is a list of finite breakpoints `b_0 < ... < b_{k-1}`,
//! `k + 1` analytic pieces living on the open gaps between them, and an
//! optional assigned value at every breakpoint. Leaving a value unassigned
//! means the function is classified by its one-sided limits only.

pub mod poly;
pub mod smooth;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_topology::{Interval, Orientation};
pub use smooth::{require_test_function, test_function, Smooth};

/// Offsets used to probe continuity of a piece from each side.
const PROBE_OFFSETS: [f64; 8] = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10];
const PROBE_TOL: f64 = 1e-9;
/// Relative tolerance when comparing assigned values with limits.
pub const CLASSIFY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Continuity {
    Continuous,
    LeftSC,
    RightSC,
    CompletelyDiscontinuous,
}

impl Continuity {
    /// Semicontinuous in the sense of `o` (continuous points qualify).
    pub fn fits(self, o: Orientation) -> bool {
        matches!(
            (self, o),
            (Continuity::Continuous, _) | (Continuity::LeftSC, Orientation::Left) | (Continuity::RightSC, Orientation::Right)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewise")]
pub struct PiecewiseFn {
    breakpoints: Vec<f64>,
    pieces: Vec<Smooth>,
    #[serde(rename = "point_values")]
    values: Vec<Option<f64>>,
    #[serde(rename = "orientation_hint")]
    orientation: Orientation,
}

#[derive(Deserialize)]
struct RawPiecewise {
    #[serde(default)]
    breakpoints: Vec<f64>,
    pieces: Vec<Smooth>,
    #[serde(default)]
    point_values: Option<Vec<Option<f64>>>,
    #[serde(default = "standard")]
    orientation_hint: Orientation,
}

fn standard() -> Orientation {
    Orientation::Standard
}

impl TryFrom<RawPiecewise> for PiecewiseFn {
    type Error = Error;

    fn try_from(r: RawPiecewise) -> Result<Self> {
        let values = r.point_values.unwrap_or_else(|| vec![None; r.breakpoints.len()]);
        PiecewiseFn::new(r.breakpoints, r.pieces, values, r.orientation_hint)
    }
}

/// Where a point sits relative to the breakpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Locus {
    Breakpoint(usize),
    Piece(usize),
}

impl PiecewiseFn {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Smooth>, values: Vec<Option<f64>>, orientation: Orientation) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        if values.len() != breakpoints.len() {
            return Err(Error::InvalidArgument("one point value per breakpoint required".into()));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidArgument("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("breakpoints must be strictly increasing".into()));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("point values must be finite".into()));
        }
        let breakpoints = breakpoints.into_iter().map(|b| b + 0.0).collect();
        let f = PiecewiseFn { breakpoints, pieces, values, orientation };
        f.probe_continuity()?;
        Ok(f)
    }

    /// Sampled sanity check that every piece is finite and continuous on
    /// its open gap.
    fn probe_continuity(&self) -> Result<()> {
        for (i, piece) in self.pieces.iter().enumerate() {
            let (lo, hi) = self.gap(i);
            for x in interior_probes(lo, hi) {
                let fx = piece.eval(x);
                if !fx.is_finite() {
                    return Err(Error::InvalidArgument(format!("piece {i} is not finite at {x}")));
                }
                for side in [-1.0, 1.0] {
                    let diffs: Vec<f64> = PROBE_OFFSETS
                        .iter()
                        .map(|d| x + side * d * (1.0 + x.abs()))
                        .filter(|y| *y > lo && *y < hi)
                        .map(|y| (piece.eval(y) - fx).abs())
                        .collect();
                    // a jump leaves the differences on a plateau; a steep but
                    // continuous piece shrinks them with the offset
                    if let (Some(&first), Some(&last)) = (diffs.first(), diffs.last()) {
                        if !(last <= PROBE_TOL * (1.0 + fx.abs()) || last <= 1e-4 * first) {
                            return Err(Error::InvalidArgument(format!("piece {i} fails the continuity probe at {x}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_smooth(s: Smooth) -> Self {
        PiecewiseFn { breakpoints: Vec::new(), pieces: vec![s], values: Vec::new(), orientation: Orientation::Standard }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_smooth(Smooth::constant(c))
    }

    /// Step function with `lo` below `b`, `hi` above, and assigned value `at`.
    pub fn step(b: f64, lo: f64, hi: f64, at: Option<f64>, o: Orientation) -> Self {
        PiecewiseFn {
            breakpoints: vec![b + 0.0],
            pieces: vec![Smooth::constant(lo), Smooth::constant(hi)],
            values: vec![at],
            orientation: o,
        }
    }

    /// `H_L` (value 0 at the origin) or `H_R` (value 1).
    pub fn heaviside(o: Orientation) -> Result<Self> {
        Self::heaviside_at(o, 0.0)
    }

    pub fn heaviside_at(o: Orientation, p: f64) -> Result<Self> {
        let at = match o {
            Orientation::Left => 0.0,
            Orientation::Right => 1.0,
            Orientation::Standard => return Err(Error::BadOrientation("standard")),
        };
        Ok(Self::step(p, 0.0, 1.0, Some(at), o))
    }

    /// `sgn_L = H_L(x) - H_R(-x)` (value -1 at 0) or `sgn_R = H_R(x) - H_L(-x)` (+1).
    pub fn sgn(o: Orientation) -> Result<Self> {
        let at = match o {
            Orientation::Left => -1.0,
            Orientation::Right => 1.0,
            Orientation::Standard => return Err(Error::BadOrientation("standard")),
        };
        Ok(Self::step(0.0, -1.0, 1.0, Some(at), o))
    }

    /// Two-sided sign, `f(0)` left unassigned.
    pub fn sgn_twosided() -> Self {
        Self::step(0.0, -1.0, 1.0, None, Orientation::Standard)
    }

    /// Indicator of a bounded interval with values fixed by the endpoint flags.
    pub fn indicator(iv: &Interval) -> Result<Self> {
        Self::indicator_with(iv, Some(iv.lo_included as u8 as f64), Some(iv.hi_included as u8 as f64))
    }

    /// Indicator of `(lo, hi)` with both endpoint values unassigned.
    pub fn indicator_unassigned(lo: f64, hi: f64) -> Result<Self> {
        Self::indicator_with(&Interval::open(lo, hi), None, None)
    }

    fn indicator_with(iv: &Interval, at_lo: Option<f64>, at_hi: Option<f64>) -> Result<Self> {
        let (lo, hi) = (iv.lo.value(), iv.hi.value());
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidArgument(format!("indicator needs a bounded proper interval, got {iv}")));
        }
        let o = match (iv.lo_included, iv.hi_included) {
            (false, true) => Orientation::Left,
            (true, false) => Orientation::Right,
            _ => Orientation::Standard,
        };
        Self::new(vec![lo, hi], vec![Smooth::zero(), Smooth::constant(1.0), Smooth::zero()], vec![at_lo, at_hi], o)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Smooth] {
        &self.pieces
    }

    pub fn point_values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn orientation_hint(&self) -> Orientation {
        self.orientation
    }

    pub fn with_orientation(mut self, o: Orientation) -> Self {
        self.orientation = o;
        self
    }

    /// Open gap `(b_{i-1}, b_i)` of piece `i`, with infinite outer ends.
    pub fn gap(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { f64::NEG_INFINITY } else { self.breakpoints[i - 1] };
        let hi = self.breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
        (lo, hi)
    }

    pub fn locate(&self, x: f64) -> Locus {
        // partial_cmp so that -0.0 and 0.0 locate the same breakpoint
        match self.breakpoints.binary_search_by(|b| b.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => Locus::Breakpoint(i),
            Err(i) => Locus::Piece(i),
        }
    }

    /// Assigned value, or `None` at an unassigned breakpoint. Infinite
    /// arguments yield the limit of the outer piece.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        if !x.is_finite() {
            let piece = if x > 0.0 { self.pieces.last() } else { self.pieces.first() };
            return piece.and_then(|p| p.limit(x.signum()));
        }
        match self.locate(x) {
            Locus::Breakpoint(i) => self.values[i],
            Locus::Piece(i) => Some(self.pieces[i].eval(x)),
        }
    }

    pub fn left_limit(&self, x: f64) -> Option<f64> {
        if x == f64::NEG_INFINITY {
            return None;
        }
        if x == f64::INFINITY {
            return self.value_at(x);
        }
        match self.locate(x) {
            Locus::Breakpoint(i) | Locus::Piece(i) => Some(self.pieces[i].eval(x)),
        }
    }

    pub fn right_limit(&self, x: f64) -> Option<f64> {
        if x == f64::INFINITY {
            return None;
        }
        if x == f64::NEG_INFINITY {
            return self.value_at(x);
        }
        match self.locate(x) {
            Locus::Breakpoint(i) => Some(self.pieces[i + 1].eval(x)),
            Locus::Piece(i) => Some(self.pieces[i].eval(x)),
        }
    }

    /// Jump `f(b+) - f(b-)` at breakpoint `i`.
    pub fn jump(&self, i: usize) -> f64 {
        let b = self.breakpoints[i];
        self.pieces[i + 1].eval(b) - self.pieces[i].eval(b)
    }

    pub fn classify(&self, x: f64) -> Continuity {
        let i = match self.locate(x) {
            Locus::Piece(_) => return Continuity::Continuous,
            Locus::Breakpoint(i) => i,
        };
        let b = self.breakpoints[i];
        let l = self.pieces[i].eval(b);
        let r = self.pieces[i + 1].eval(b);
        let scale = 1.0 + l.abs().max(r.abs()).max(self.values[i].map_or(0.0, f64::abs));
        let close = |p: f64, q: f64| (p - q).abs() <= CLASSIFY_TOL * scale;
        match self.values[i] {
            None if close(l, r) => Continuity::Continuous,
            None => Continuity::CompletelyDiscontinuous,
            Some(v) => match (close(v, l), close(v, r)) {
                (true, true) => Continuity::Continuous,
                (true, false) => Continuity::LeftSC,
                (false, true) => Continuity::RightSC,
                (false, false) => Continuity::CompletelyDiscontinuous,
            },
        }
    }

    /// Every breakpoint is continuous or semicontinuous in the sense of `o`.
    pub fn is_semicontinuous(&self, o: Orientation) -> bool {
        self.breakpoints.iter().all(|&b| self.classify(b).fits(o))
    }

    /// `x -> f(-x)`.
    pub fn reflect(&self) -> Self {
        PiecewiseFn {
            breakpoints: self.breakpoints.iter().rev().map(|b| 0.0 - b).collect(),
            pieces: self.pieces.iter().rev().map(Smooth::reflect).collect(),
            values: self.values.iter().rev().copied().collect(),
            orientation: self.orientation.mirror(),
        }
    }

    /// Reassigns breakpoint values from `o`'s continuity side. `Standard`
    /// heals removable discontinuities and leaves genuine jumps unassigned.
    pub fn extend(&self, o: Orientation) -> Self {
        let mut out = self.clone();
        for i in 0..self.breakpoints.len() {
            let b = self.breakpoints[i];
            let l = self.pieces[i].eval(b);
            let r = self.pieces[i + 1].eval(b);
            out.values[i] = match o {
                Orientation::Left => Some(l),
                Orientation::Right => Some(r),
                Orientation::Standard => {
                    let scale = 1.0 + l.abs().max(r.abs());
                    if (l - r).abs() <= CLASSIFY_TOL * scale {
                        Some(l)
                    } else {
                        None
                    }
                }
            };
        }
        out.orientation = o;
        out
    }

    pub fn scale(&self, c: f64) -> Self {
        PiecewiseFn {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| Smooth::mul(&Smooth::constant(c), p)).collect(),
            values: self.values.iter().map(|v| v.map(|v| c * v)).collect(),
            orientation: self.orientation,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, Smooth::add, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.combine(other, Smooth::mul, |a, b| a * b)
    }

    fn combine(&self, other: &Self, piece_op: impl Fn(&Smooth, &Smooth) -> Smooth, value_op: impl Fn(f64, f64) -> f64) -> Self {
        let mut bps: Vec<f64> = self.breakpoints.iter().chain(&other.breakpoints).map(|b| b + 0.0).collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let piece_for = |f: &Self, j: usize| -> usize {
            // piece of `f` covering the gap just below merged breakpoint j
            match bps.get(j) {
                Some(&b) => f.breakpoints.partition_point(|&x| x < b),
                None => f.pieces.len() - 1,
            }
        };
        let pieces = (0..=bps.len()).map(|j| piece_op(&self.pieces[piece_for(self, j)], &other.pieces[piece_for(other, j)])).collect();
        let values = bps.iter().map(|&b| Some(value_op(self.value_at(b)?, other.value_at(b)?))).collect();
        let orientation = if self.orientation == other.orientation { self.orientation } else { Orientation::Standard };
        PiecewiseFn { breakpoints: bps, pieces, values, orientation }
    }

    /// Classical derivative on each gap; breakpoint values unassigned.
    pub fn derivative(&self) -> Self {
        PiecewiseFn {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(Smooth::derivative).collect(),
            values: vec![None; self.breakpoints.len()],
            orientation: Orientation::Standard,
        }
    }

    /// Removes breakpoints across which the pieces coincide and the value
    /// (if any) matches.
    pub fn simplify(&self) -> Self {
        let mut breakpoints = Vec::new();
        let mut pieces = vec![self.pieces[0].clone()];
        let mut values = Vec::new();
        for i in 0..self.breakpoints.len() {
            let b = self.breakpoints[i];
            let next = &self.pieces[i + 1];
            let cur = pieces.last().unwrap();
            let same = cur == next
                && self.values[i].is_none_or(|v| {
                    let l = cur.eval(b);
                    (v - l).abs() <= CLASSIFY_TOL * (1.0 + l.abs())
                });
            if !same {
                breakpoints.push(b);
                values.push(self.values[i]);
                pieces.push(next.clone());
            }
        }
        PiecewiseFn { breakpoints, pieces, values, orientation: self.orientation }
    }

    /// Deterministic probe points: every breakpoint, gap midpoints, points
    /// just off each breakpoint, and a few far-field samples.
    pub fn probe_grid(&self) -> Vec<f64> {
        let mut g: Vec<f64> = vec![-10.0, -3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0, 10.0];
        for (k, &b) in self.breakpoints.iter().enumerate() {
            g.extend([b, b - 1e-6, b + 1e-6, b - 0.25, b + 0.25]);
            if let Some(&nb) = self.breakpoints.get(k + 1) {
                g.push(0.5 * (b + nb));
            }
        }
        g.sort_by(f64::total_cmp);
        g.dedup();
        g
    }

    /// Pointwise agreement (including unassigned status) on both grids.
    pub fn approx_eq_on_grid(&self, other: &Self, tol: f64) -> bool {
        let mut grid = self.probe_grid();
        grid.extend(other.probe_grid());
        grid.iter().all(|&x| match (self.value_at(x), other.value_at(x)) {
            (Some(a), Some(b)) => (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())),
            (None, None) => true,
            _ => false,
        })
    }

    /// Every piece is a constant.
    pub fn is_step(&self) -> bool {
        self.pieces.iter().all(|p| p.as_constant().is_some())
    }
}

fn interior_probes(lo: f64, hi: f64) -> Vec<f64> {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (1..=5).map(|k| lo + (hi - lo) * k as f64 / 6.0).collect(),
        (true, false) => vec![lo + 0.5, lo + 2.0, lo + 10.0],
        (false, true) => vec![hi - 0.5, hi - 2.0, hi - 10.0],
        (false, false) => vec![-5.0, -0.5, 0.0, 0.5, 5.0],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval_topology::Interval;

    const L: Orientation = Orientation::Left;
    const R: Orientation = Orientation::Right;

    #[test]
    fn heaviside_values() {
        let hl = PiecewiseFn::heaviside(L).unwrap();
        let hr = PiecewiseFn::heaviside(R).unwrap();
        assert_eq!(hl.value_at(0.0), Some(0.0));
        assert_eq!(hr.value_at(0.0), Some(1.0));
        assert_eq!(hl.value_at(5.0), Some(1.0));
        assert_eq!(hr.value_at(-2.0), Some(0.0));
        assert!(PiecewiseFn::heaviside(Orientation::Standard).is_err());
    }

    #[test]
    fn sgn_values() {
        let sl = PiecewiseFn::sgn(L).unwrap();
        let sr = PiecewiseFn::sgn(R).unwrap();
        assert_eq!(sl.value_at(0.0), Some(-1.0));
        assert_eq!(sr.value_at(0.0), Some(1.0));
        assert_eq!(sl.value_at(-3.0), Some(-1.0));
        assert_eq!(sl.value_at(3.0), Some(1.0));
    }

    #[test]
    fn sgn_from_heavisides() {
        let hl = PiecewiseFn::heaviside(L).unwrap();
        let hr = PiecewiseFn::heaviside(R).unwrap();
        let sl = hl.sub(&hr.reflect());
        assert!(sl.approx_eq_on_grid(&PiecewiseFn::sgn(L).unwrap(), 0.0));
        let sr = hr.sub(&hl.reflect());
        assert!(sr.approx_eq_on_grid(&PiecewiseFn::sgn(R).unwrap(), 0.0));
    }

    #[test]
    fn reflect_examples() {
        let r = PiecewiseFn::heaviside(L).unwrap().reflect();
        assert_eq!(r.value_at(0.0), Some(0.0));
        assert_eq!(r.value_at(-1.0), Some(1.0));
        let sl = PiecewiseFn::sgn(L).unwrap();
        let minus_sr = PiecewiseFn::sgn(R).unwrap().scale(-1.0);
        assert!(sl.reflect().approx_eq_on_grid(&minus_sr, 0.0));
        assert!(sl.reflect().reflect().approx_eq_on_grid(&sl, 0.0));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(PiecewiseFn::heaviside(L).unwrap().classify(0.0), Continuity::LeftSC);
        assert_eq!(PiecewiseFn::heaviside(R).unwrap().classify(0.0), Continuity::RightSC);
        assert_eq!(PiecewiseFn::from_smooth(Smooth::gaussian()).classify(0.0), Continuity::Continuous);
        assert_eq!(PiecewiseFn::sgn_twosided().classify(0.0), Continuity::CompletelyDiscontinuous);
        // removable mismatch
        let f = PiecewiseFn::step(1.0, 2.0, 2.0, Some(5.0), Orientation::Standard);
        assert_eq!(f.classify(1.0), Continuity::CompletelyDiscontinuous);
        assert_eq!(f.extend(Orientation::Standard).classify(1.0), Continuity::Continuous);
    }

    #[test]
    fn extend_examples() {
        let e = PiecewiseFn::sgn_twosided().extend(L);
        assert!(e.approx_eq_on_grid(&PiecewiseFn::sgn(L).unwrap(), 0.0));
        let hl = PiecewiseFn::heaviside(L).unwrap();
        assert_eq!(hl.extend(L), hl);
        let chi = PiecewiseFn::indicator_unassigned(0.0, 1.0).unwrap().extend(L);
        let want = PiecewiseFn::indicator(&Interval::left_open(0.0, 1.0)).unwrap();
        assert!(chi.approx_eq_on_grid(&want, 0.0));
        assert_eq!(chi.value_at(0.0), Some(0.0));
        assert_eq!(chi.value_at(1.0), Some(1.0));
    }

    #[test]
    fn algebra_examples() {
        let hl = PiecewiseFn::heaviside(L).unwrap();
        let z = hl.add(&hl.scale(-1.0)).simplify();
        assert!(z.approx_eq_on_grid(&PiecewiseFn::constant(0.0), 0.0));
        assert!(z.breakpoints().is_empty());
        let chi = PiecewiseFn::indicator(&Interval::left_open(0.0, 1.0)).unwrap();
        assert!(chi.mul(&chi).approx_eq_on_grid(&chi, 0.0));
        assert_eq!(chi.mul(&chi).orientation_hint(), L);
    }

    #[test]
    fn construction_rejects_bad_shapes() {
        assert!(PiecewiseFn::new(vec![0.0], vec![Smooth::zero()], vec![None], L).is_err());
        assert!(PiecewiseFn::new(vec![1.0, 0.0], vec![Smooth::zero(); 3], vec![None; 2], L).is_err());
        assert!(PiecewiseFn::new(vec![f64::INFINITY], vec![Smooth::zero(); 2], vec![None], L).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = PiecewiseFn::sgn(L).unwrap();
        let j = serde_json::to_string(&f).unwrap();
        assert!(j.contains("point_values") && j.contains("orientation_hint"));
        let back: PiecewiseFn = serde_json::from_str(&j).unwrap();
        assert_eq!(back, f);
        let unassigned: PiecewiseFn =
            serde_json::from_str(r#"{"breakpoints":[0],"pieces":[{"kind":"const","value":-1},{"kind":"const","value":1}]}"#).unwrap();
        assert_eq!(unassigned, PiecewiseFn::sgn_twosided());
    }
}
