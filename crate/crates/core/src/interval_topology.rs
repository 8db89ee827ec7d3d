//! Extended-real interval sets with explicit endpoint inclusion.
//!
//! The generating sets of the two half-open Borel topologies are `(a, b]`
//! (left, [`Orientation::Left`]) and `[a, b)` (right). An [`IntervalSet`] is
//! a finite disjoint union of intervals kept in canonical form: sorted by
//! lower endpoint, non-empty, and with touching pieces merged.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of the extended real line `[-inf, +inf]`. Never NaN.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const NEG_INF: ExtReal = ExtReal(f64::NEG_INFINITY);
    pub const POS_INF: ExtReal = ExtReal(f64::INFINITY);

    pub fn new(x: f64) -> Result<Self> {
        if x.is_nan() {
            Err(Error::InvalidArgument("NaN is not an extended real".into()))
        } else {
            Ok(ExtReal(x))
        }
    }

    /// Panics on NaN; meant for literals.
    pub fn finite(x: f64) -> Self {
        assert!(x.is_finite(), "ExtReal::finite called with {x}");
        ExtReal(x)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl std::ops::Neg for ExtReal {
    type Output = Self;

    fn neg(self) -> Self {
        ExtReal(-self.0)
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        // NaN is excluded by construction, so this is total.
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }
}

impl From<ExtReal> for f64 {
    fn from(x: ExtReal) -> f64 {
        x.0
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            write!(f, "+inf")
        } else if self.0 == f64::NEG_INFINITY {
            write!(f, "-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for ExtReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "∞" | "+∞" => Ok(ExtReal::POS_INF),
            "-inf" | "-∞" | "−∞" => Ok(ExtReal::NEG_INF),
            t => t.parse::<f64>().map_err(|e| Error::InvalidArgument(format!("bad number {t:?}: {e}"))).and_then(ExtReal::new),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else if self.0 > 0.0 {
            s.serialize_str("+inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => ExtReal::new(x).map_err(de::Error::custom),
            Raw::Str(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

/// Which half-open topology a computation lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Generating sets `(a, b]`; left-semicontinuous functions.
    Left,
    /// Generating sets `[a, b)`; right-semicontinuous functions.
    Right,
    /// Full Borel sigma-algebra with Lebesgue measure.
    Standard,
}

impl Orientation {
    pub fn mirror(self) -> Self {
        match self {
            Orientation::Left => Orientation::Right,
            Orientation::Right => Orientation::Left,
            Orientation::Standard => Orientation::Standard,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Orientation::Left => "left",
            Orientation::Right => "right",
            Orientation::Standard => "standard",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(Orientation::Left),
            "right" | "r" => Ok(Orientation::Right),
            "standard" | "std" | "s" | "lebesgue" => Ok(Orientation::Standard),
            other => Err(Error::InvalidArgument(format!("unknown orientation {other:?}"))),
        }
    }
}

/// An interval of the extended real line with explicit endpoint flags.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: ExtReal,
    pub hi: ExtReal,
    #[serde(rename = "lo_inc")]
    pub lo_included: bool,
    #[serde(rename = "hi_inc")]
    pub hi_included: bool,
}

impl Interval {
    pub fn new(lo: ExtReal, hi: ExtReal, lo_included: bool, hi_included: bool) -> Self {
        Interval { lo, hi, lo_included, hi_included }
    }

    /// `(a, b)`
    pub fn open(a: f64, b: f64) -> Self {
        Self::from_f64(a, b, false, false)
    }

    /// `[a, b]`
    pub fn closed(a: f64, b: f64) -> Self {
        Self::from_f64(a, b, true, true)
    }

    /// `(a, b]`, the left generating form.
    pub fn left_open(a: f64, b: f64) -> Self {
        Self::from_f64(a, b, false, true)
    }

    /// `[a, b)`, the right generating form.
    pub fn right_open(a: f64, b: f64) -> Self {
        Self::from_f64(a, b, true, false)
    }

    /// `{a}`
    pub fn point(a: f64) -> Self {
        Self::from_f64(a, a, true, true)
    }

    fn from_f64(a: f64, b: f64, lo_inc: bool, hi_inc: bool) -> Self {
        Interval {
            lo: ExtReal::new(a).expect("NaN endpoint"),
            hi: ExtReal::new(b).expect("NaN endpoint"),
            lo_included: lo_inc,
            hi_included: hi_inc,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Greater => true,
            Ordering::Equal => !(self.lo_included && self.hi_included),
            Ordering::Less => false,
        }
    }

    pub fn is_point(&self) -> bool {
        !self.is_empty() && self.lo == self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: ExtReal) -> bool {
        let above = match x.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_included,
            Ordering::Less => false,
        };
        let below = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_included,
            Ordering::Greater => false,
        };
        above && below
    }

    /// Lebesgue length; infinite for unbounded intervals.
    pub fn length(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi.value() - self.lo.value()
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_inc) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo, self.lo_included),
            Ordering::Less => (other.lo, other.lo_included),
            Ordering::Equal => (self.lo, self.lo_included && other.lo_included),
        };
        let (hi, hi_inc) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi, self.hi_included),
            Ordering::Greater => (other.hi, other.hi_included),
            Ordering::Equal => (self.hi, self.hi_included && other.hi_included),
        };
        Interval::new(lo, hi, lo_inc, hi_inc)
    }

    /// Convert to the generating form of `o`, adding or removing only endpoints.
    pub fn oriented(&self, o: Orientation) -> Interval {
        match o {
            Orientation::Left => Interval::new(self.lo, self.hi, false, true),
            Orientation::Right => Interval::new(self.lo, self.hi, true, false),
            Orientation::Standard => *self,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", self.lo);
        }
        write!(f, "{}{}, {}{}", if self.lo_included { '[' } else { '(' }, self.lo, self.hi, if self.hi_included { ']' } else { ')' })
    }
}

impl FromStr for Interval {
    type Err = Error;

    /// Parses `(a,b]`, `[a,b)`, `[a,b]`, `(a,b)` and `{a}`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse interval {s:?}"));
        if let Some(inner) = t.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            let x: ExtReal = inner.parse()?;
            return Ok(Interval::new(x, x, true, true));
        }
        let mut chars = t.chars();
        let open = chars.next().ok_or_else(bad)?;
        let close = chars.next_back().ok_or_else(bad)?;
        let lo_inc = match open {
            '[' => true,
            '(' => false,
            _ => return Err(bad()),
        };
        let hi_inc = match close {
            ']' => true,
            ')' => false,
            _ => return Err(bad()),
        };
        let body: &str = chars.as_str();
        let (a, b) = body.split_once(',').ok_or_else(bad)?;
        Ok(Interval::new(a.parse()?, b.parse()?, lo_inc, hi_inc))
    }
}

/// Finite disjoint union of intervals in canonical form.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawIntervalSet")]
pub struct IntervalSet {
    pieces: Vec<Interval>,
}

#[derive(Deserialize)]
struct RawIntervalSet {
    pieces: Vec<Interval>,
}

impl TryFrom<RawIntervalSet> for IntervalSet {
    type Error = Error;

    fn try_from(raw: RawIntervalSet) -> Result<Self> {
        Ok(IntervalSet::from_intervals(raw.pieces))
    }
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { pieces: Vec::new() }
    }

    /// The whole extended line `[-inf, +inf]`.
    pub fn whole() -> Self {
        IntervalSet::single(Interval::new(ExtReal::NEG_INF, ExtReal::POS_INF, true, true))
    }

    /// The real line `(-inf, +inf)`.
    pub fn real_line() -> Self {
        IntervalSet::single(Interval::new(ExtReal::NEG_INF, ExtReal::POS_INF, false, false))
    }

    pub fn single(iv: Interval) -> Self {
        Self::from_intervals(vec![iv])
    }

    /// Canonicalizes an arbitrary list of (possibly overlapping) intervals.
    pub fn from_intervals(intervals: Vec<Interval>) -> Self {
        IntervalSet { pieces: canonicalize(intervals) }
    }

    pub fn pieces(&self) -> &[Interval] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.pieces.iter().all(Interval::is_bounded)
    }

    pub fn contains(&self, x: ExtReal) -> bool {
        // pieces are sorted and disjoint: find the last piece with lo <= x
        let idx = self.pieces.partition_point(|p| p.lo <= x);
        idx > 0 && self.pieces[idx - 1].contains(x)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = self.pieces.clone();
        all.extend_from_slice(&other.pieces);
        IntervalSet::from_intervals(all)
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                let c = a.intersect(b);
                if !c.is_empty() {
                    out.push(c);
                }
            }
        }
        IntervalSet::from_intervals(out)
    }

    /// Complement inside `[-inf, +inf]`.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = ExtReal::NEG_INF;
        let mut cursor_inc = true;
        for p in &self.pieces {
            out.push(Interval::new(cursor, p.lo, cursor_inc, !p.lo_included));
            cursor = p.hi;
            cursor_inc = !p.hi_included;
        }
        out.push(Interval::new(cursor, ExtReal::POS_INF, cursor_inc, true));
        IntervalSet::from_intervals(out)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersection(&other.complement())
    }

    pub fn symmetric_difference(&self, other: &IntervalSet) -> IntervalSet {
        self.difference(other).union(&other.difference(self))
    }

    /// Total Lebesgue length.
    pub fn lebesgue_measure(&self) -> f64 {
        self.pieces.iter().map(Interval::length).sum()
    }

    /// True when the set is a finite collection of points.
    pub fn is_null(&self) -> bool {
        self.pieces.iter().all(Interval::is_point)
    }

    /// Rewrites every piece into the generating form of `o`.
    ///
    /// Only endpoints change, so the result differs from `self` on a finite
    /// point set. Degenerate point pieces vanish under `Left`/`Right`
    /// because `(b, b]` and `[b, b)` are empty.
    pub fn orient_closure(&self, o: Orientation) -> IntervalSet {
        if o == Orientation::Standard {
            return self.clone();
        }
        IntervalSet::from_intervals(self.pieces.iter().map(|p| p.oriented(o)).collect())
    }

    /// Every piece already has the generating form of `o`.
    pub fn is_oriented(&self, o: Orientation) -> bool {
        match o {
            Orientation::Left => self.pieces.iter().all(|p| !p.lo_included && p.hi_included),
            Orientation::Right => self.pieces.iter().all(|p| p.lo_included && !p.hi_included),
            Orientation::Standard => true,
        }
    }

    /// Finite endpoints of all pieces, sorted.
    pub fn endpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.pieces.iter().flat_map(|p| [p.lo.value(), p.hi.value()]).filter(|x| x.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

fn canonicalize(mut v: Vec<Interval>) -> Vec<Interval> {
    v.retain(|iv| !iv.is_empty());
    // sort by lo; an included lo sorts before an excluded one at the same point
    v.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_included.cmp(&a.lo_included)));
    let mut out: Vec<Interval> = Vec::with_capacity(v.len());
    for iv in v {
        if let Some(cur) = out.last_mut() {
            let touches = iv.lo < cur.hi || (iv.lo == cur.hi && (cur.hi_included || iv.lo_included));
            if touches {
                if iv.lo == cur.lo {
                    cur.lo_included |= iv.lo_included;
                }
                match iv.hi.cmp(&cur.hi) {
                    Ordering::Greater => {
                        cur.hi = iv.hi;
                        cur.hi_included = iv.hi_included;
                    }
                    Ordering::Equal => cur.hi_included |= iv.hi_included,
                    Ordering::Less => {}
                }
                continue;
            }
        }
        out.push(iv);
    }
    out
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return f.write_str("∅");
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for IntervalSet {
    type Err = Error;

    /// Parses unions such as `(0,1] U [2,3)`; `∅` or `empty` is the empty set.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() || t == "∅" || t.eq_ignore_ascii_case("empty") {
            return Ok(IntervalSet::empty());
        }
        let parts = t.split(['U', '∪', ';']).filter(|p| !p.trim().is_empty()).map(str::parse).collect::<Result<Vec<Interval>>>()?;
        Ok(IntervalSet::from_intervals(parts))
    }
}

impl From<Interval> for IntervalSet {
    fn from(iv: Interval) -> Self {
        IntervalSet::single(iv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> IntervalSet {
        s.parse().unwrap()
    }

    #[test]
    fn union_merges_left_adjacency() {
        assert_eq!(set("(0,1]").union(&set("(1,2]")), set("(0,2]"));
    }

    #[test]
    fn union_with_empty_is_identity() {
        assert_eq!(set("(0,1]").union(&IntervalSet::empty()), set("(0,1]"));
    }

    #[test]
    fn union_merges_right_adjacency() {
        let u = set("[0,1)").union(&set("[1,2)"));
        assert_eq!(u.pieces(), &[Interval::right_open(0.0, 2.0)]);
    }

    #[test]
    fn mixed_adjacency_is_plain_set_union() {
        let u = set("(0,1]").union(&set("[1,2)"));
        assert_eq!(u.pieces(), &[Interval::open(0.0, 2.0)]);
        // a missing point keeps pieces apart
        let gap = set("(0,1)").union(&set("(1,2)"));
        assert_eq!(gap.pieces().len(), 2);
    }

    #[test]
    fn contains_respects_flags() {
        let s = set("(0,1]");
        assert!(!s.contains(ExtReal::finite(0.0)));
        assert!(s.contains(ExtReal::finite(1.0)));
        assert!(!set("[0,1)").contains(ExtReal::finite(1.0)));
        assert!(set("[0,1)").contains(ExtReal::finite(0.0)));
    }

    #[test]
    fn orient_closure_examples() {
        assert_eq!(set("(0,1)").orient_closure(Orientation::Left), set("(0,1]"));
        assert_eq!(set("(0,1)").orient_closure(Orientation::Right), set("[0,1)"));
        assert_eq!(set("(0,1]").orient_closure(Orientation::Left), set("(0,1]"));
        assert_eq!(set("{3}").orient_closure(Orientation::Left), IntervalSet::empty());
    }

    #[test]
    fn points_absorb_into_neighbours() {
        assert_eq!(set("{1}").union(&set("(1,2]")), set("[1,2]"));
        assert_eq!(set("(0,1)").union(&set("{1}")), set("(0,1]"));
    }

    #[test]
    fn complement_of_half_line() {
        let c = set("(-inf,0]").complement();
        assert_eq!(c, set("{-inf} U (0,+inf]"));
        assert_eq!(c.complement(), set("(-inf,0]"));
    }

    #[test]
    fn parse_and_display_round_trip() {
        let s = set("(-inf,0] U [1,2) U {5}");
        assert_eq!(s.to_string().replace('∪', "U").parse::<IntervalSet>().unwrap(), s);
    }

    #[test]
    fn json_shape() {
        let s = set("(-inf,1]");
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"pieces":[{"lo":"-inf","hi":1.0,"lo_inc":false,"hi_inc":true}]}"#);
        let back: IntervalSet = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        // non-canonical input is canonicalized on load
        let raw = r#"{"pieces":[{"lo":1,"hi":2,"lo_inc":false,"hi_inc":true},{"lo":0,"hi":1,"lo_inc":false,"hi_inc":true}]}"#;
        let loaded: IntervalSet = serde_json::from_str(raw).unwrap();
        assert_eq!(loaded, set("(0,2]"));
    }

    #[test]
    fn nan_rejected() {
        assert!(ExtReal::new(f64::NAN).is_err());
        assert!(serde_json::from_str::<ExtReal>("\"nan\"").is_err());
    }
}
