use crate::error::{Error, Result};
use crate::interval_topology::{Interval, Orientation};
use crate::piecewise::{test_function, PiecewiseFn};

/// Piecewise functions by name.
///
/// `H_L`, `H_R`, `sgn_L`, `sgn_R`, `sgn_twosided`, `heaviside_pair`
/// (`H_L(x) - H_L(-x)`), `chi:<interval>`, any test-function name, or a
/// JSON object (`{...}`, or `@path` to read one from a file).
pub fn named_function(name: &str) -> Result<PiecewiseFn> {
    let t = name.trim();
    if let Some(path) = t.strip_prefix('@') {
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{path}: {e}")))?;
        return from_json(&text);
    }
    if t.starts_with('{') {
        return from_json(t);
    }
    if let Some(iv) = t.strip_prefix("chi:") {
        return PiecewiseFn::indicator(&iv.parse::<Interval>()?);
    }
    let (l, r) = (Orientation::Left, Orientation::Right);
    match t.to_ascii_lowercase().replace('-', "_").as_str() {
        "h_l" => PiecewiseFn::heaviside(l),
        "h_r" => PiecewiseFn::heaviside(r),
        "sgn_l" => PiecewiseFn::sgn(l),
        "sgn_r" => PiecewiseFn::sgn(r),
        "sgn_twosided" | "sgn" => Ok(PiecewiseFn::sgn_twosided()),
        "heaviside_pair" => {
            let h = PiecewiseFn::heaviside(l)?;
            Ok(h.sub(&h.reflect()))
        }
        _ => test_function(t).map(PiecewiseFn::from_smooth).map_err(|_| Error::InvalidArgument(format!("unknown function {t:?}"))),
    }
}

fn from_json(text: &str) -> Result<PiecewiseFn> {
    serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("piecewise JSON: {e}")))
}
