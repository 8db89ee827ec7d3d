//! Analytic scalar functions with closed-form derivatives.
//!
//! Everything the pairing and operator code needs (values, first and second
//! derivatives, limits at infinity, critical points) is computed from the
//! expression tree, never by numerical differentiation.

use serde::{Deserialize, Serialize};

use super::poly;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "SmoothSpec", try_from = "SmoothSpec")]
pub enum Smooth {
    /// Ascending coefficients.
    Poly(Vec<f64>),
    /// `amp * exp(-((x - center) / width)^2)`
    Gaussian {
        amp: f64,
        center: f64,
        width: f64,
    },
    /// `amp * exp(rate * x)`
    Exp {
        amp: f64,
        rate: f64,
    },
    /// `amp * tanh((x - center) / scale)`
    Tanh {
        amp: f64,
        center: f64,
        scale: f64,
    },
    Sum(Vec<Smooth>),
    Product(Box<Smooth>, Box<Smooth>),
}

impl Smooth {
    pub fn constant(c: f64) -> Self {
        Smooth::Poly(vec![c])
    }

    pub fn zero() -> Self {
        Smooth::constant(0.0)
    }

    pub fn identity() -> Self {
        Smooth::Poly(vec![0.0, 1.0])
    }

    /// `e^{-x^2}`
    pub fn gaussian() -> Self {
        Smooth::Gaussian { amp: 1.0, center: 0.0, width: 1.0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Smooth::Poly(c) => poly::eval(c, x),
            Smooth::Gaussian { amp, center, width } => {
                let u = (x - center) / width;
                amp * (-u * u).exp()
            }
            Smooth::Exp { amp, rate } => amp * (rate * x).exp(),
            Smooth::Tanh { amp, center, scale } => amp * ((x - center) / scale).tanh(),
            Smooth::Sum(ts) => ts.iter().map(|t| t.eval(x)).sum(),
            Smooth::Product(a, b) => {
                let (fa, fb) = (a.eval(x), b.eval(x));
                // a decaying factor wins over a growing one far out
                if fa == 0.0 || fb == 0.0 {
                    0.0
                } else {
                    fa * fb
                }
            }
        }
    }

    /// `[f(x), f'(x), f''(x)]`
    pub fn jet(&self, x: f64) -> [f64; 3] {
        match self {
            Smooth::Poly(c) => {
                let d1 = poly::derivative(c);
                let d2 = poly::derivative(&d1);
                [poly::eval(c, x), poly::eval(&d1, x), poly::eval(&d2, x)]
            }
            Smooth::Gaussian { width, center, .. } => {
                let g = self.eval(x);
                let w2 = width * width;
                let s = x - center;
                [g, -2.0 * s / w2 * g, (4.0 * s * s / (w2 * w2) - 2.0 / w2) * g]
            }
            Smooth::Exp { amp, rate } => {
                let e = amp * (rate * x).exp();
                [e, rate * e, rate * rate * e]
            }
            Smooth::Tanh { amp, center, scale } => {
                let t = ((x - center) / scale).tanh();
                let sech2 = 1.0 - t * t;
                [amp * t, amp / scale * sech2, -2.0 * amp / (scale * scale) * t * sech2]
            }
            Smooth::Sum(ts) => ts.iter().fold([0.0; 3], |acc, t| {
                let j = t.jet(x);
                [acc[0] + j[0], acc[1] + j[1], acc[2] + j[2]]
            }),
            Smooth::Product(a, b) => {
                let (u, v) = (a.jet(x), b.jet(x));
                let m = |p: f64, q: f64| if p == 0.0 || q == 0.0 { 0.0 } else { p * q };
                [m(u[0], v[0]), m(u[1], v[0]) + m(u[0], v[1]), m(u[2], v[0]) + 2.0 * m(u[1], v[1]) + m(u[0], v[2])]
            }
        }
    }

    pub fn derivative(&self) -> Smooth {
        match self {
            Smooth::Poly(c) => Smooth::Poly(poly::derivative(c)),
            Smooth::Gaussian { amp, center, width } => {
                let w2 = width * width;
                Smooth::Product(
                    Box::new(Smooth::Poly(vec![2.0 * center / w2, -2.0 / w2])),
                    Box::new(Smooth::Gaussian { amp: *amp, center: *center, width: *width }),
                )
            }
            Smooth::Exp { amp, rate } => Smooth::Exp { amp: amp * rate, rate: *rate },
            Smooth::Tanh { amp, center, scale } => {
                // (amp/s)(1 - tanh^2)
                let k = amp / scale;
                Smooth::Sum(vec![
                    Smooth::constant(k),
                    Smooth::Product(
                        Box::new(Smooth::Tanh { amp: -k, center: *center, scale: *scale }),
                        Box::new(Smooth::Tanh { amp: 1.0, center: *center, scale: *scale }),
                    ),
                ])
            }
            Smooth::Sum(ts) => Smooth::sum(ts.iter().map(Smooth::derivative).collect()),
            Smooth::Product(a, b) => Smooth::add(&Smooth::mul(&a.derivative(), b), &Smooth::mul(a, &b.derivative())),
        }
    }

    /// `x -> f(-x)`
    pub fn reflect(&self) -> Smooth {
        match self {
            Smooth::Poly(c) => Smooth::Poly(poly::reflect(c)),
            Smooth::Gaussian { amp, center, width } => Smooth::Gaussian { amp: *amp, center: -center, width: *width },
            Smooth::Exp { amp, rate } => Smooth::Exp { amp: *amp, rate: -rate },
            Smooth::Tanh { amp, center, scale } => Smooth::Tanh { amp: -amp, center: -center, scale: *scale },
            Smooth::Sum(ts) => Smooth::Sum(ts.iter().map(Smooth::reflect).collect()),
            Smooth::Product(a, b) => Smooth::Product(Box::new(a.reflect()), Box::new(b.reflect())),
        }
    }

    pub fn scaled(&self, k: f64) -> Smooth {
        if k == 1.0 {
            return self.clone();
        }
        match self {
            Smooth::Poly(c) => Smooth::Poly(poly::scale(c, k)),
            Smooth::Gaussian { amp, center, width } => Smooth::Gaussian { amp: amp * k, center: *center, width: *width },
            Smooth::Exp { amp, rate } => Smooth::Exp { amp: amp * k, rate: *rate },
            Smooth::Tanh { amp, center, scale } => Smooth::Tanh { amp: amp * k, center: *center, scale: *scale },
            Smooth::Sum(ts) => Smooth::Sum(ts.iter().map(|t| t.scaled(k)).collect()),
            Smooth::Product(a, b) => Smooth::Product(Box::new(a.scaled(k)), b.clone()),
        }
    }

    /// `Some(c)` when the function is a constant polynomial.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Smooth::Poly(c) if poly::degree(c) == 0 => Some(c[0]),
            _ => None,
        }
    }

    pub fn as_poly(&self) -> Option<&[f64]> {
        match self {
            Smooth::Poly(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    /// Sum with light simplification (polynomials are combined, zeros dropped).
    pub fn add(a: &Smooth, b: &Smooth) -> Smooth {
        Smooth::sum(vec![a.clone(), b.clone()])
    }

    fn sum(terms: Vec<Smooth>) -> Smooth {
        let mut poly_acc: Option<Vec<f64>> = None;
        let mut rest = Vec::new();
        let mut flat = Vec::new();
        for t in terms {
            match t {
                Smooth::Sum(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        for t in flat {
            match t {
                Smooth::Poly(c) => {
                    poly_acc = Some(match poly_acc {
                        Some(acc) => poly::add(&acc, &c),
                        None => poly::trim(c),
                    })
                }
                other => rest.push(other),
            }
        }
        if let Some(p) = poly_acc {
            let p = Smooth::Poly(p);
            if !p.is_zero() || rest.is_empty() {
                rest.insert(0, p);
            }
        }
        match rest.len() {
            0 => Smooth::zero(),
            1 => rest.pop().unwrap(),
            _ => Smooth::Sum(rest),
        }
    }

    /// Product with light simplification.
    pub fn mul(a: &Smooth, b: &Smooth) -> Smooth {
        match (a, b) {
            (Smooth::Poly(p), Smooth::Poly(q)) => Smooth::Poly(poly::mul(p, q)),
            _ => {
                if let Some(k) = a.as_constant() {
                    if k == 0.0 {
                        Smooth::zero()
                    } else {
                        b.scaled(k)
                    }
                } else if let Some(k) = b.as_constant() {
                    if k == 0.0 {
                        Smooth::zero()
                    } else {
                        a.scaled(k)
                    }
                } else {
                    Smooth::Product(Box::new(a.clone()), Box::new(b.clone()))
                }
            }
        }
    }

    /// Faster-than-any-polynomial decay toward `sign * inf`.
    pub fn decays_rapidly(&self, sign: f64) -> bool {
        match self {
            Smooth::Poly(_) => self.is_zero(),
            Smooth::Gaussian { amp, width, .. } => *amp == 0.0 || *width != 0.0,
            Smooth::Exp { amp, rate } => *amp == 0.0 || rate * sign < 0.0,
            Smooth::Tanh { amp, .. } => *amp == 0.0,
            Smooth::Sum(ts) => ts.iter().all(|t| t.decays_rapidly(sign)),
            Smooth::Product(a, b) => {
                a.has_gaussian_decay()
                    || b.has_gaussian_decay()
                    || (a.decays_rapidly(sign) && b.polynomially_bounded(sign))
                    || (b.decays_rapidly(sign) && a.polynomially_bounded(sign))
            }
        }
    }

    fn has_gaussian_decay(&self) -> bool {
        match self {
            Smooth::Gaussian { .. } => true,
            Smooth::Sum(ts) => ts.iter().all(Smooth::has_gaussian_decay),
            Smooth::Product(a, b) => a.has_gaussian_decay() || b.has_gaussian_decay(),
            _ => self.is_zero(),
        }
    }

    fn polynomially_bounded(&self, sign: f64) -> bool {
        match self {
            Smooth::Exp { amp, rate } => *amp == 0.0 || rate * sign <= 0.0,
            Smooth::Sum(ts) => ts.iter().all(|t| t.polynomially_bounded(sign)),
            Smooth::Product(a, b) => a.polynomially_bounded(sign) && b.polynomially_bounded(sign),
            _ => true,
        }
    }

    /// Limit at `sign * inf`, if finite.
    pub fn limit(&self, sign: f64) -> Option<f64> {
        if self.decays_rapidly(sign) {
            return Some(0.0);
        }
        match self {
            Smooth::Poly(c) => (poly::degree(c) == 0).then(|| c[0]),
            Smooth::Gaussian { .. } => Some(0.0),
            Smooth::Exp { amp, rate } => (*rate == 0.0).then_some(*amp),
            Smooth::Tanh { amp, scale, .. } => Some(amp * sign * scale.signum()),
            Smooth::Sum(ts) => ts.iter().map(|t| t.limit(sign)).sum(),
            Smooth::Product(a, b) => Some(a.limit(sign)? * b.limit(sign)?),
        }
    }

    /// Evaluates, substituting limits at infinite arguments.
    pub fn eval_ext(&self, x: f64) -> Option<f64> {
        if x.is_finite() {
            Some(self.eval(x))
        } else {
            self.limit(x.signum())
        }
    }

    /// Interior critical points on the bounded open interval `(lo, hi)`,
    /// sorted. Exact for the primitive families; compound expressions fall
    /// back to a sign scan of the analytic derivative refined by bisection.
    pub fn critical_points(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::Unbounded(format!("critical points on ({lo}, {hi})")));
        }
        Ok(match self {
            Smooth::Poly(c) => poly::roots_in(&poly::derivative(c), lo, hi),
            Smooth::Gaussian { amp, center, .. } => {
                if *amp != 0.0 && *center > lo && *center < hi {
                    vec![*center]
                } else {
                    Vec::new()
                }
            }
            Smooth::Exp { .. } | Smooth::Tanh { .. } => Vec::new(),
            Smooth::Sum(_) | Smooth::Product(..) => self.scan_critical(lo, hi)?,
        })
    }

    fn scan_critical(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        const CELLS: usize = 2048;
        const MAX_TURNS: usize = 256;
        let d = |x: f64| self.jet(x)[1];
        let step = (hi - lo) / CELLS as f64;
        let mut out = Vec::new();
        let mut a = lo;
        let mut da = d(a);
        for i in 1..=CELLS {
            let b = if i == CELLS { hi } else { lo + step * i as f64 };
            let db = d(b);
            if da != 0.0 && db != 0.0 && da.signum() != db.signum() {
                let (mut l, mut r, mut dl) = (a, b, da);
                for _ in 0..100 {
                    let m = 0.5 * (l + r);
                    if m <= l || m >= r {
                        break;
                    }
                    let dm = d(m);
                    if dm == 0.0 {
                        l = m;
                        r = m;
                        break;
                    }
                    if dm.signum() == dl.signum() {
                        l = m;
                        dl = dm;
                    } else {
                        r = m;
                    }
                }
                out.push(0.5 * (l + r));
                if out.len() > MAX_TURNS {
                    return Err(Error::NotPiecewiseMonotone { lo, hi });
                }
            } else if db == 0.0 && i < CELLS {
                out.push(b);
            }
            a = b;
            if db != 0.0 {
                da = db;
            }
        }
        Ok(out)
    }
}

/// Serialized form: a `kind` tag plus named parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SmoothSpec {
    Const {
        value: f64,
    },
    Poly {
        coeffs: Vec<f64>,
    },
    Gaussian {
        #[serde(default = "one")]
        amp: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        width: f64,
    },
    Exp {
        #[serde(default = "one")]
        amp: f64,
        rate: f64,
    },
    Tanh {
        #[serde(default = "one")]
        amp: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Sum {
        terms: Vec<SmoothSpec>,
    },
    Product {
        factors: [Box<SmoothSpec>; 2],
    },
}

fn one() -> f64 {
    1.0
}

impl From<Smooth> for SmoothSpec {
    fn from(s: Smooth) -> Self {
        match s {
            Smooth::Poly(c) if poly::degree(&c) == 0 => SmoothSpec::Const { value: c[0] },
            Smooth::Poly(coeffs) => SmoothSpec::Poly { coeffs },
            Smooth::Gaussian { amp, center, width } => SmoothSpec::Gaussian { amp, center, width },
            Smooth::Exp { amp, rate } => SmoothSpec::Exp { amp, rate },
            Smooth::Tanh { amp, center, scale } => SmoothSpec::Tanh { amp, center, scale },
            Smooth::Sum(ts) => SmoothSpec::Sum { terms: ts.into_iter().map(Into::into).collect() },
            Smooth::Product(a, b) => SmoothSpec::Product { factors: [Box::new((*a).into()), Box::new((*b).into())] },
        }
    }
}

impl TryFrom<SmoothSpec> for Smooth {
    type Error = Error;

    fn try_from(s: SmoothSpec) -> Result<Self> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        let bad = |what: &str| Error::InvalidArgument(format!("non-finite or degenerate {what} parameters"));
        Ok(match s {
            SmoothSpec::Const { value } if value.is_finite() => Smooth::constant(value),
            SmoothSpec::Const { .. } => return Err(bad("const")),
            SmoothSpec::Poly { coeffs } if finite(&coeffs) && !coeffs.is_empty() => Smooth::Poly(poly::trim(coeffs)),
            SmoothSpec::Poly { .. } => return Err(bad("poly")),
            SmoothSpec::Gaussian { amp, center, width } if finite(&[amp, center, width]) && width != 0.0 => {
                Smooth::Gaussian { amp, center, width }
            }
            SmoothSpec::Gaussian { .. } => return Err(bad("gaussian")),
            SmoothSpec::Exp { amp, rate } if finite(&[amp, rate]) => Smooth::Exp { amp, rate },
            SmoothSpec::Exp { .. } => return Err(bad("exp")),
            SmoothSpec::Tanh { amp, center, scale } if finite(&[amp, center, scale]) && scale != 0.0 => Smooth::Tanh { amp, center, scale },
            SmoothSpec::Tanh { .. } => return Err(bad("tanh")),
            SmoothSpec::Sum { terms } => Smooth::Sum(terms.into_iter().map(Smooth::try_from).collect::<Result<_>>()?),
            SmoothSpec::Product { factors: [a, b] } => Smooth::Product(Box::new((*a).try_into()?), Box::new((*b).try_into()?)),
        })
    }
}

/// Named test functions with analytic derivatives.
///
/// `gaussian` is `e^{-x^2}`, `x-gaussian` is `x e^{-x^2}`, and
/// `hermite-gaussian-k` is `H_k(x) e^{-x^2/2}` with physicists' `H_k`.
pub fn test_function(name: &str) -> Result<Smooth> {
    let name = name.trim();
    match name {
        "gaussian" => Ok(Smooth::gaussian()),
        "x-gaussian" => Ok(Smooth::Product(Box::new(Smooth::identity()), Box::new(Smooth::gaussian()))),
        _ => {
            let k = name
                .strip_prefix("hermite-gaussian-")
                .and_then(|k| k.parse::<usize>().ok())
                .ok_or_else(|| Error::InvalidArgument(format!("unknown test function {name:?}")))?;
            if k > 40 {
                return Err(Error::InvalidArgument(format!("hermite order {k} too large")));
            }
            Ok(Smooth::Product(
                Box::new(Smooth::Poly(poly::hermite(k))),
                Box::new(Smooth::Gaussian { amp: 1.0, center: 0.0, width: std::f64::consts::SQRT_2 }),
            ))
        }
    }
}

/// Rejects functions that do not decay rapidly in both directions.
pub fn require_test_function(phi: &Smooth) -> Result<()> {
    if phi.decays_rapidly(1.0) && phi.decays_rapidly(-1.0) {
        Ok(())
    } else {
        Err(Error::NoDecay(format!("{phi:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: &Smooth, x: f64) {
        let h = 1e-5;
        let j = f.jet(x);
        let d1 = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
        let d2 = (f.eval(x + h) - 2.0 * f.eval(x) + f.eval(x - h)) / (h * h);
        assert!((j[1] - d1).abs() < 1e-6 * (1.0 + d1.abs()), "{f:?} f' at {x}: {} vs {d1}", j[1]);
        assert!((j[2] - d2).abs() < 1e-3 * (1.0 + d2.abs()), "{f:?} f'' at {x}: {} vs {d2}", j[2]);
        let sym = f.derivative().jet(x);
        assert!((sym[0] - j[1]).abs() < 1e-12 * (1.0 + j[1].abs()));
        assert!((sym[1] - j[2]).abs() < 1e-12 * (1.0 + j[2].abs()));
    }

    #[test]
    fn jets_match_finite_differences() {
        let fs = [
            Smooth::Poly(vec![1.0, -2.0, 0.5, 0.25]),
            Smooth::Gaussian { amp: 2.0, center: 0.3, width: 0.7 },
            Smooth::Exp { amp: -1.5, rate: 0.8 },
            Smooth::Tanh { amp: 0.5, center: -0.2, scale: 1.3 },
            test_function("x-gaussian").unwrap(),
            test_function("hermite-gaussian-3").unwrap(),
        ];
        for f in &fs {
            for x in [-1.7, -0.4, 0.0, 0.9, 2.2] {
                fd_check(f, x);
            }
        }
    }

    #[test]
    fn reflection_is_composition_with_negation() {
        let f = Smooth::Sum(vec![
            Smooth::Tanh { amp: 0.5, center: 0.4, scale: 2.0 },
            Smooth::Exp { amp: 1.0, rate: 0.3 },
            Smooth::Poly(vec![0.0, 1.0, 1.0]),
        ]);
        for x in [-2.0, -0.1, 0.7, 3.0] {
            assert!((f.reflect().eval(x) - f.eval(-x)).abs() < 1e-14);
        }
    }

    #[test]
    fn limits_and_decay() {
        assert_eq!(Smooth::gaussian().limit(1.0), Some(0.0));
        assert_eq!(Smooth::constant(3.0).limit(-1.0), Some(3.0));
        assert_eq!(Smooth::identity().limit(1.0), None);
        assert_eq!(Smooth::Tanh { amp: 2.0, center: 0.0, scale: 1.0 }.limit(-1.0), Some(-2.0));
        assert!(require_test_function(&test_function("hermite-gaussian-5").unwrap()).is_ok());
        assert!(require_test_function(&Smooth::Exp { amp: 1.0, rate: -1.0 }).is_err());
    }

    #[test]
    fn critical_points_of_families() {
        let g = Smooth::Gaussian { amp: 1.0, center: 0.25, width: 1.0 };
        assert_eq!(g.critical_points(0.0, 1.0).unwrap(), vec![0.25]);
        let p = Smooth::Poly(vec![0.0, 1.0, -1.0]); // x(1-x)
        let c = p.critical_points(0.0, 1.0).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0] - 0.5).abs() < 1e-15);
        let xg = test_function("x-gaussian").unwrap();
        let c = xg.critical_points(-2.0, 2.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((c[0] + r).abs() < 1e-12 && (c[1] - r).abs() < 1e-12, "{c:?}");
    }

    #[test]
    fn json_round_trip() {
        let f = Smooth::Sum(vec![Smooth::constant(2.0), test_function("hermite-gaussian-2").unwrap()]);
        let j = serde_json::to_string(&f).unwrap();
        assert!(j.contains(r#""kind":"const""#));
        let back: Smooth = serde_json::from_str(&j).unwrap();
        assert_eq!(back, f);
        let g: Smooth = serde_json::from_str(r#"{"kind":"gaussian"}"#).unwrap();
        assert_eq!(g, Smooth::gaussian());
        assert!(serde_json::from_str::<Smooth>(r#"{"kind":"gaussian","width":0}"#).is_err());
    }
}
