//! Series and germ JSON I/O.
//!
//! Series are exchanged as index-annotated `[re, im]` coefficient
//! pairs: `[{"n": 2, "c": [0.1, 0.0]}, ...]`. An argument starting
//! with `@` is read from the named file.

use num_complex::Complex64;
use serde_json::{json, Value};
use siegel_core::error::{Error, Result};
use siegel_core::germs::PowerSeriesGerm;
use siegel_core::parse::parse_exact_real;
use siegel_core::scalar::RealScalar;
use siegel_core::series::Series;

pub fn read_arg(arg: &str) -> Result<String> {
    if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn coeff_pairs(v: &Value) -> Result<Vec<(usize, Complex64)>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected a JSON array of coefficient entries".into()))?;
    let mut out = Vec::with_capacity(arr.len());
    for entry in arr {
        let n = entry
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("coefficient entry missing index \"n\"".into()))?;
        let c = entry
            .get("c")
            .and_then(Value::as_array)
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::Parse("coefficient entry missing pair \"c\": [re, im]".into()))?;
        let re = c[0]
            .as_f64()
            .ok_or_else(|| Error::Parse("re part must be a number".into()))?;
        let im = c[1]
            .as_f64()
            .ok_or_else(|| Error::Parse("im part must be a number".into()))?;
        out.push((n as usize, Complex64::new(re, im)));
    }
    Ok(out)
}

/// Parses a conjugating series `z + sum c_n z^n` (the linear
/// coefficient is implicit and equals 1); entries with n < 2 are
/// rejected.
pub fn parse_conjugacy(arg: &str, m: usize) -> Result<Series> {
    let text = read_arg(arg)?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad series JSON: {e}")))?;
    let mut s = Series::identity(m);
    for (n, c) in coeff_pairs(&v)? {
        if n < 2 {
            return Err(Error::Parse(
                "conjugacy coefficients start at n = 2 (linear part is 1)".into(),
            ));
        }
        if n <= m {
            s.set_coeff(n, c);
        }
    }
    Ok(s)
}

/// Parses a germ: `{"alpha": "<exact real>", "coeffs": [...]}` with
/// coefficients from n = 2 up.
pub fn parse_germ(v: &Value) -> Result<PowerSeriesGerm> {
    let alpha_s = v
        .get("alpha")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("germ missing \"alpha\"".into()))?;
    let alpha = RealScalar::from_exact(parse_exact_real(alpha_s)?);
    let pairs = coeff_pairs(
        v.get("coeffs")
            .ok_or_else(|| Error::Parse("germ missing \"coeffs\"".into()))?,
    )?;
    let max_n = pairs.iter().map(|(n, _)| *n).max().unwrap_or(1);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); max_n.saturating_sub(1)];
    for (n, c) in pairs {
        if n < 2 {
            return Err(Error::Parse("germ coefficients start at n = 2".into()));
        }
        coeffs[n - 2] = c;
    }
    PowerSeriesGerm::new(alpha, coeffs)
}

pub fn parse_germ_list(arg: &str) -> Result<Vec<PowerSeriesGerm>> {
    let text = read_arg(arg)?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad germ JSON: {e}")))?;
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected a JSON array of germs".into()))?;
    arr.iter().map(parse_germ).collect()
}

/// Serializes series coefficients from `start` up as index-annotated
/// pairs, skipping exact zeros.
pub fn series_json(s: &Series, start: usize) -> Value {
    let mut out = Vec::new();
    for n in start..=s.order() {
        let c = s.coeff(n);
        if c != Complex64::new(0.0, 0.0) {
            out.push(json!({"n": n, "c": [c.re, c.im]}));
        }
    }
    Value::Array(out)
}

pub fn germ_json(g: &PowerSeriesGerm) -> Value {
    let mut coeffs = Vec::new();
    for n in 2..=g.order() {
        let c = g.coeff(n);
        if c != Complex64::new(0.0, 0.0) {
            coeffs.push(json!({"n": n, "c": [c.re, c.im]}));
        }
    }
    json!({
        "alpha": g.alpha().to_f64(),
        "lambda": [g.lambda().re, g.lambda().im],
        "coeffs": coeffs,
    })
}
