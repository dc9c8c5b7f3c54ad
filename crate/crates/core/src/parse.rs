//! Input syntax for exact reals.
//!
//! Accepted atoms: `m/n` rationals, `(p+q*sqrt(d))/r` surds, decimal
//! literals (read as exact rationals), bare `sqrt(d)` / `q*sqrt(d)`
//! terms, and the named shortcuts `golden`, `sqrt2m1`, `sqrt3m1`.
//! Atoms may be combined with top-level `+`/`-`.

use crate::error::{Error, Result};
use crate::surd::ExactReal;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Parses one exact real expression.
pub fn parse_exact_real(input: &str) -> Result<ExactReal> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut acc = ExactReal::zero();
    for (sign, chunk) in split_signed_chunks(&s)? {
        let term = parse_term(chunk)?;
        acc = if sign < 0 {
            acc.sub(&term)
        } else {
            acc.add(&term)
        };
    }
    Ok(acc)
}

/// Parses a comma-separated list of exact reals.
pub fn parse_exact_real_list(input: &str) -> Result<Vec<ExactReal>> {
    split_top_level(input, ',')
        .into_iter()
        .map(|s| parse_exact_real(s))
        .collect()
}

/// Parses a rational number given as `m/n`, a decimal literal, or an
/// integer. Used for configuration values such as exponents and
/// constants, which stay exact.
pub fn parse_rational(input: &str) -> Result<BigRational> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        return Ok(BigRational::new(n, d));
    }
    parse_decimal(&s)
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal literal {s:?}")));
        }
        let negative = int_part.starts_with('-');
        let int: BigInt = if int_part == "-" || int_part.is_empty() {
            BigInt::zero()
        } else {
            int_part
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal literal {s:?}")))?
        };
        let frac: BigInt = frac_part
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal literal {s:?}")))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mag = int.magnitude().clone() * scale.magnitude().clone() + frac.magnitude().clone();
        let val = BigRational::new(BigInt::from(mag), scale);
        Ok(if negative { -val } else { val })
    } else {
        let n: BigInt = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer literal {s:?}")))?;
        Ok(BigRational::from_integer(n))
    }
}

/// Splits `a+b-c` into signed chunks at depth-0 signs.
fn split_signed_chunks(s: &str) -> Result<Vec<(i8, &str)>> {
    let bytes = s.as_bytes();
    let mut chunks = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut sign: i8 = 1;
    let mut i = 0usize;
    while i < bytes.len() {
        match bytes[i] as char {
            '(' => depth += 1,
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::Parse("unbalanced parentheses".into()))?;
            }
            c @ ('+' | '-') if depth == 0 && i > start => {
                chunks.push((sign, &s[start..i]));
                sign = if c == '-' { -1 } else { 1 };
                start = i + 1;
            }
            '-' if depth == 0 && i == start => {
                sign = -sign;
                start = i + 1;
            }
            _ => {}
        }
        i += 1;
    }
    if depth != 0 {
        return Err(Error::Parse("unbalanced parentheses".into()));
    }
    if start >= s.len() {
        return Err(Error::Parse(format!("dangling sign in {s:?}")));
    }
    chunks.push((sign, &s[start..]));
    Ok(chunks)
}

/// Splits on a separator at paren depth 0.
pub fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn parse_term(s: &str) -> Result<ExactReal> {
    match s {
        "golden" => {
            // phi - 1 = (sqrt(5) - 1)/2
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            return Ok(ExactReal::sqrt_term(5, half.clone())?
                .sub(&ExactReal::from_rational(half)));
        }
        "sqrt2m1" => {
            return Ok(ExactReal::sqrt(2)?.sub(&ExactReal::one()));
        }
        "sqrt3m1" => {
            return Ok(ExactReal::sqrt(3)?.sub(&ExactReal::one()));
        }
        _ => {}
    }
    if let Some(rest) = s.strip_prefix('(') {
        // (p+q*sqrt(d))/r
        let close = find_matching(rest)?;
        let inner = &rest[..close];
        let tail = &rest[close + 1..];
        let r_str = tail
            .strip_prefix('/')
            .ok_or_else(|| Error::Parse(format!("expected /r after surd numerator in {s:?}")))?;
        let r: BigInt = r_str
            .parse()
            .map_err(|_| Error::Parse(format!("bad surd denominator {r_str:?}")))?;
        if r.is_zero() {
            return Err(Error::Parse("zero surd denominator".into()));
        }
        let num = parse_surd_numerator(inner)?;
        return Ok(num.mul_rational(&BigRational::new(BigInt::one(), r)));
    }
    if s.contains("sqrt(") {
        // q*sqrt(d) or sqrt(d)
        let (coeff, rest) = match s.split_once('*') {
            Some((c, rest)) => {
                let q: BigInt = c
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient in {s:?}")))?;
                (BigRational::from_integer(q), rest)
            }
            None => (BigRational::one(), s),
        };
        let d = parse_sqrt_radicand(rest)?;
        return Ok(ExactReal::sqrt_term(d, coeff)?);
    }
    Ok(ExactReal::from_rational(parse_rational(s)?))
}

/// Parses `p+q*sqrt(d)` or `p-q*sqrt(d)` (signs inside a surd form).
fn parse_surd_numerator(s: &str) -> Result<ExactReal> {
    let mut acc = ExactReal::zero();
    for (sign, chunk) in split_signed_chunks(s)? {
        let term = if chunk.contains("sqrt(") {
            let (coeff, rest) = match chunk.split_once('*') {
                Some((c, rest)) => {
                    let q: BigInt = c
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad surd coefficient {c:?}")))?;
                    (BigRational::from_integer(q), rest)
                }
                None => (BigRational::one(), chunk),
            };
            let d = parse_sqrt_radicand(rest)?;
            ExactReal::sqrt_term(d, coeff)?
        } else {
            let p: BigInt = chunk
                .parse()
                .map_err(|_| Error::Parse(format!("bad surd term {chunk:?}")))?;
            ExactReal::from_rational(BigRational::from_integer(p))
        };
        acc = if sign < 0 {
            acc.sub(&term)
        } else {
            acc.add(&term)
        };
    }
    Ok(acc)
}

fn parse_sqrt_radicand(s: &str) -> Result<u128> {
    let inner = s
        .strip_prefix("sqrt(")
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected sqrt(d), got {s:?}")))?;
    let d: u128 = inner
        .parse()
        .map_err(|_| Error::Parse(format!("bad radicand {inner:?}")))?;
    if d == 0 {
        return Err(Error::Parse("radicand must be positive".into()));
    }
    const MAX_RADICAND: u128 = 1 << 40;
    if d > MAX_RADICAND {
        return Err(Error::Parse(format!(
            "radicand {d} too large (limit 2^40)"
        )));
    }
    Ok(d)
}

/// Index of the parenthesis matching an already-consumed `(`.
fn find_matching(s: &str) -> Result<usize> {
    let mut depth = 1usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Ok(i);
                }
            }
            _ => {}
        }
    }
    Err(Error::Parse("unbalanced parentheses".into()))
}
