#![allow(clippy::excessive_precision)] // published Kronrod nodes, kept digit for digit
//! Adaptive 21-point Gauss–Kronrod quadrature with tail truncation.

use crate::error::{Error, Result};

/// Absolute tolerance for every finite-interval integral.
pub const ABS_TOL: f64 = 1e-10;
/// A tail segment counts as negligible below this.
pub const TAIL_TOL: f64 = 1e-12;
pub const MAX_DOUBLINGS: usize = 40;
const MAX_SEGMENTS: usize = 4000;

// Kronrod abscissae/weights; odd indices are the embedded 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_024_816,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// One GK21 panel: (Kronrod estimate, |Kronrod - Gauss|).
fn gk21(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[10] * fc;
    let mut g = 0.0;
    for i in 0..10 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive integral over a bounded interval; returns
/// `(value, error_estimate)`.
pub fn integrate_finite(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Unbounded(format!("finite quadrature on [{a}, {b}]")));
    }
    let (v, e) = gk21(f, a, b);
    let mut segs = vec![(a, b, v, e)];
    loop {
        let total_err: f64 = segs.iter().map(|s| s.3).sum();
        let total: f64 = segs.iter().map(|s| s.2).sum();
        if !total.is_finite() {
            return Err(Error::Quadrature { lo: a, hi: b });
        }
        if total_err <= tol.max(1e-14 * total.abs()) {
            return Ok((total, total_err));
        }
        if segs.len() >= MAX_SEGMENTS {
            return Err(Error::Quadrature { lo: a, hi: b });
        }
        // bisect the worst segment; ties resolve to the leftmost for determinism
        let (idx, _) = segs.iter().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, s)| if s.3 > best.1 { (i, s.3) } else { best });
        let (l, r, _, _) = segs[idx];
        let m = 0.5 * (l + r);
        if m <= l || m >= r {
            return Ok((total, total_err));
        }
        let (v1, e1) = gk21(f, l, m);
        let (v2, e2) = gk21(f, m, r);
        segs[idx] = (l, m, v1, e1);
        segs.insert(idx + 1, (m, r, v2, e2));
    }
}

/// `∫_a^b f`, either end possibly infinite. Tails are truncated at a radius
/// that doubles until a new segment contributes less than [`TAIL_TOL`].
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::InvalidArgument("NaN integration limit".into()));
    }
    if a > b {
        return integrate(f, b, a).map(|v| -v);
    }
    if a == b {
        return Ok(0.0);
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate_finite(f, a, b, ABS_TOL).map(|r| r.0),
        (true, false) => tail(f, a, 1.0),
        (false, true) => tail(f, b, -1.0),
        (false, false) => Ok(tail(f, 0.0, -1.0)? + tail(f, 0.0, 1.0)?),
    }
}

/// `∫` from `start` toward `dir * inf`.
fn tail(f: &impl Fn(f64) -> f64, start: f64, dir: f64) -> Result<f64> {
    let mut total = 0.0;
    let mut inner = start;
    let mut width: f64 = 1.0;
    let mut quiet = 0;
    for _ in 0..MAX_DOUBLINGS {
        let outer = inner + dir * width;
        let (v, _) = integrate_finite(f, inner.min(outer), inner.max(outer), ABS_TOL)?;
        total += v;
        // two consecutive negligible segments guard against a sign change
        // that happens to cancel inside one segment
        if v.abs() < TAIL_TOL {
            quiet += 1;
            if quiet == 2 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        inner = outer;
        width *= 2.0;
    }
    Err(Error::Divergent { doublings: MAX_DOUBLINGS })
}
