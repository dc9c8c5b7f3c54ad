//! Adaptive-precision real scalars.
//!
//! A [`RealScalar`] is a certified enclosure `[lo, hi]` of a real
//! number, optionally backed by an exact multiquadratic form. Exact
//! backing makes signs, comparisons and nearest-integer decisions
//! decidable; values produced by transcendental operations carry only
//! their enclosure and report indecision instead of guessing.

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::surd::ExactReal;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Default working precision for enclosures, in bits.
pub const DEFAULT_PRECISION_BITS: u32 = 128;
/// Default cap for precision escalation.
pub const DEFAULT_MAX_PRECISION_BITS: u32 = 4096;

/// A real number known through a certified enclosure, with an optional
/// exact source that supports refinement to any width.
#[derive(Clone, Debug)]
pub struct RealScalar {
    interval: Interval,
    source: Option<ExactReal>,
    precision_bits: u32,
}

impl RealScalar {
    pub fn from_exact(x: ExactReal) -> RealScalar {
        RealScalar::from_exact_bits(x, DEFAULT_PRECISION_BITS)
    }

    pub fn from_exact_bits(x: ExactReal, bits: u32) -> RealScalar {
        let interval = x.enclosure(bits);
        RealScalar {
            interval,
            source: Some(x),
            precision_bits: bits,
        }
    }

    pub fn from_rational(r: BigRational) -> RealScalar {
        RealScalar::from_exact(ExactReal::from_rational(r))
    }

    pub fn from_int(n: i64) -> RealScalar {
        RealScalar::from_exact(ExactReal::from_integer(n))
    }

    pub fn zero() -> RealScalar {
        RealScalar::from_int(0)
    }

    pub fn one() -> RealScalar {
        RealScalar::from_int(1)
    }

    /// Wraps a bare enclosure with no exact source.
    pub fn from_interval(interval: Interval, bits: u32) -> RealScalar {
        RealScalar {
            interval,
            source: None,
            precision_bits: bits,
        }
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn lo(&self) -> &Dyadic {
        self.interval.lo()
    }

    pub fn hi(&self) -> &Dyadic {
        self.interval.hi()
    }

    pub fn width(&self) -> Dyadic {
        self.interval.width()
    }

    pub fn source(&self) -> Option<&ExactReal> {
        self.source.as_ref()
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn to_f64(&self) -> f64 {
        self.interval.to_f64_mid()
    }

    fn bits_with(&self, rhs: &RealScalar) -> u32 {
        self.precision_bits.max(rhs.precision_bits)
    }

    /// Shrinks the enclosure below `target_width`. Requires an exact
    /// source unless the enclosure is already narrow enough.
    pub fn refine(&self, target_width: f64, max_bits: u32) -> Result<RealScalar> {
        let target = Dyadic::from_f64(target_width)
            .filter(|t| t.signum() > 0)
            .ok_or_else(|| Error::Domain("target width must be positive and finite".into()))?;
        if self.width() <= target {
            return Ok(self.clone());
        }
        let source = match &self.source {
            Some(s) => s,
            None => return Err(Error::PrecisionExhausted {
                bits: self.precision_bits,
            }),
        };
        let mut bits = self.precision_bits.max(32);
        loop {
            bits = bits.saturating_mul(2);
            if bits > max_bits {
                return Err(Error::PrecisionExhausted { bits: max_bits });
            }
            let interval = source.enclosure(bits);
            if interval.width() <= target {
                return Ok(RealScalar {
                    interval,
                    source: self.source.clone(),
                    precision_bits: bits,
                });
            }
        }
    }

    /// Returns a copy re-enclosed at the given precision (exact sources
    /// only; pass-through otherwise).
    pub fn at_bits(&self, bits: u32) -> RealScalar {
        match &self.source {
            Some(s) => RealScalar::from_exact_bits(s.clone(), bits),
            None => self.clone(),
        }
    }

    /// The true sign of the value. Exact-backed scalars are decided by
    /// the surd oracle and never report indecision.
    pub fn certified_sign(&self) -> Result<i8> {
        if let Some(s) = &self.source {
            return Ok(s.sign());
        }
        if self.interval.is_strictly_positive() {
            Ok(1)
        } else if self.interval.is_strictly_negative() {
            Ok(-1)
        } else if self.interval.lo().is_zero() && self.interval.hi().is_zero() {
            Ok(0)
        } else {
            Err(Error::UndecidableAtPrecision {
                bits: self.precision_bits,
                context: "sign of an enclosure straddling zero with no exact source".into(),
            })
        }
    }

    pub fn certified_cmp(&self, rhs: &RealScalar) -> Result<Ordering> {
        let diff = self.sub(rhs);
        Ok(match diff.certified_sign()? {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    /// Nearest integer with certified tie detection.
    pub fn nearest_integer(&self) -> Result<BigInt> {
        if let Some(s) = &self.source {
            return s.round_nearest();
        }
        let half = Dyadic::new(BigInt::one(), -1);
        let k = self.interval.mid().add(&half).floor_int();
        let kd = Dyadic::from_bigint(k.clone());
        if self.interval.lo() > &kd.sub(&half) && self.interval.hi() < &kd.add(&half) {
            Ok(k)
        } else {
            Err(Error::UndecidableAtPrecision {
                bits: self.precision_bits,
                context: "nearest integer of a wide enclosure".into(),
            })
        }
    }

    pub fn floor_int(&self) -> Result<BigInt> {
        if let Some(s) = &self.source {
            return Ok(s.floor_exact());
        }
        let f_lo = self.interval.lo().floor_int();
        let f_hi = self.interval.hi().floor_int();
        if f_lo == f_hi {
            Ok(f_lo)
        } else {
            Err(Error::UndecidableAtPrecision {
                bits: self.precision_bits,
                context: "floor of an enclosure spanning an integer".into(),
            })
        }
    }

    pub fn add(&self, rhs: &RealScalar) -> RealScalar {
        let bits = self.bits_with(rhs);
        match (&self.source, &rhs.source) {
            (Some(a), Some(b)) => RealScalar::from_exact_bits(a.add(b), bits),
            _ => RealScalar::from_interval(self.interval.add(&rhs.interval, bits), bits),
        }
    }

    pub fn sub(&self, rhs: &RealScalar) -> RealScalar {
        let bits = self.bits_with(rhs);
        match (&self.source, &rhs.source) {
            (Some(a), Some(b)) => RealScalar::from_exact_bits(a.sub(b), bits),
            _ => RealScalar::from_interval(self.interval.sub(&rhs.interval, bits), bits),
        }
    }

    pub fn neg(&self) -> RealScalar {
        RealScalar {
            interval: self.interval.neg(),
            source: self.source.as_ref().map(|s| s.neg()),
            precision_bits: self.precision_bits,
        }
    }

    pub fn abs(&self) -> RealScalar {
        RealScalar {
            interval: self.interval.abs(),
            source: self.source.as_ref().map(|s| s.abs()),
            precision_bits: self.precision_bits,
        }
    }

    pub fn mul(&self, rhs: &RealScalar) -> RealScalar {
        let bits = self.bits_with(rhs);
        if let (Some(a), Some(b)) = (&self.source, &rhs.source) {
            // radicand overflow is the only failure; fall back to the
            // (still certified) interval product
            if let Ok(p) = a.mul(b) {
                return RealScalar::from_exact_bits(p, bits);
            }
        }
        RealScalar::from_interval(self.interval.mul(&rhs.interval, bits), bits)
    }

    pub fn mul_rational(&self, r: &BigRational) -> RealScalar {
        let bits = self.precision_bits;
        match &self.source {
            Some(s) => RealScalar::from_exact_bits(s.mul_rational(r), bits),
            None => RealScalar::from_interval(self.interval.mul_rational(r, bits), bits),
        }
    }

    pub fn mul_bigint(&self, k: &BigInt) -> RealScalar {
        let bits = self.precision_bits;
        match &self.source {
            Some(s) => RealScalar::from_exact_bits(s.mul_bigint(k), bits),
            None => RealScalar::from_interval(self.interval.mul_bigint(k, bits), bits),
        }
    }

    pub fn div(&self, rhs: &RealScalar) -> Result<RealScalar> {
        let bits = self.bits_with(rhs);
        if let (Some(a), Some(b)) = (&self.source, &rhs.source) {
            if b.is_zero() {
                return Err(Error::Domain("division by certified zero".into()));
            }
            if let Ok(q) = a.div(b) {
                return Ok(RealScalar::from_exact_bits(q, bits));
            }
        }
        let mut divisor = rhs.clone();
        if divisor.interval.contains_zero() {
            match &rhs.source {
                Some(s) => {
                    if s.sign() == 0 {
                        return Err(Error::Domain("division by certified zero".into()));
                    }
                    // exact and nonzero: a finite refinement separates it from 0
                    let mut b = bits.max(64);
                    loop {
                        b = b.saturating_mul(2);
                        let enc = s.enclosure(b);
                        if !enc.contains_zero() {
                            divisor = RealScalar::from_interval(enc, b);
                            break;
                        }
                    }
                }
                None => {
                    return Err(Error::UndecidableAtPrecision {
                        bits: rhs.precision_bits,
                        context: "division by an enclosure straddling zero".into(),
                    })
                }
            }
        }
        Ok(RealScalar::from_interval(
            self.interval.div(&divisor.interval, bits),
            bits,
        ))
    }

    pub fn recip(&self) -> Result<RealScalar> {
        RealScalar::one().div(self)
    }

    /// `ln(1/x)` for a certified-positive value; interval-only result.
    pub fn ln_recip(&self, bits: u32) -> Result<RealScalar> {
        let x = self.positive_interval(bits)?;
        let l = x.ln(bits);
        Ok(RealScalar::from_interval(l.neg(), bits))
    }

    /// `ln(ln(e/x)) = ln(1 + ln(1/x))` for x in (0, 1); always positive there.
    pub fn loglog_e(&self, bits: u32) -> Result<RealScalar> {
        let x = self.positive_interval(bits)?;
        let t = x.ln(bits + 8).neg(); // ln(1/x) > 0 for x < 1
        let u = t.add(&Interval::one(), bits + 8);
        if !u.is_strictly_positive() {
            return Err(Error::Domain(
                "log log(e/x) requires x < e; got an enclosure with ln(e/x) <= 0".into(),
            ));
        }
        Ok(RealScalar::from_interval(u.ln(bits), bits))
    }

    pub fn exp(&self, bits: u32) -> RealScalar {
        RealScalar::from_interval(self.interval.exp(bits), bits)
    }

    /// A strictly positive enclosure of this value, refining from the
    /// exact source if necessary.
    fn positive_interval(&self, bits: u32) -> Result<Interval> {
        let mut enc = if self.precision_bits >= bits {
            self.interval.clone()
        } else {
            self.at_bits(bits).interval.clone()
        };
        if enc.is_strictly_positive() {
            return Ok(enc);
        }
        match &self.source {
            Some(s) => {
                if s.sign() <= 0 {
                    return Err(Error::Domain("expected a positive value".into()));
                }
                let mut b = bits.max(64);
                loop {
                    b = b.saturating_mul(2);
                    enc = s.enclosure(b);
                    if enc.is_strictly_positive() {
                        return Ok(enc);
                    }
                }
            }
            None => Err(Error::UndecidableAtPrecision {
                bits: self.precision_bits,
                context: "positivity of an enclosure touching zero".into(),
            }),
        }
    }
}

impl fmt::Display for RealScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (width {:.3e})",
            self.to_f64(),
            self.width().to_f64()
        )
    }
}

/// Configuration constants mirroring the unspecified universal
/// constants of the underlying estimates. These are configuration
/// values, never claimed ground truth.
#[derive(Clone, Debug)]
pub struct ConstantsConfig {
    /// Additive constant in the height function t.
    pub c_univ: BigRational,
    /// Additive constant in height bounds; auto-derived as 4*(c_univ+1)
    /// when not set explicitly.
    pub c_prime: BigRational,
    /// Prefactor of the radius bound.
    pub c_radius: BigRational,
}

impl ConstantsConfig {
    pub fn new(
        c_univ: BigRational,
        c_prime: Option<BigRational>,
        c_radius: BigRational,
    ) -> Result<ConstantsConfig> {
        if c_univ.is_negative() {
            return Err(Error::Domain("c_univ must be nonnegative".into()));
        }
        let derived = (&c_univ + BigRational::one()) * BigRational::from_integer(BigInt::from(4));
        let c_prime = c_prime.unwrap_or(derived);
        if c_prime.is_negative() {
            return Err(Error::Domain("c_prime must be nonnegative".into()));
        }
        if !c_radius.is_positive() {
            return Err(Error::Domain("c_radius must be positive".into()));
        }
        Ok(ConstantsConfig {
            c_univ,
            c_prime,
            c_radius,
        })
    }
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        ConstantsConfig::new(
            BigRational::zero(),
            None,
            BigRational::one(),
        )
        .expect("default constants are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sqrt2() -> RealScalar {
        RealScalar::from_exact(ExactReal::sqrt(2).unwrap())
    }

    #[test]
    fn refine_rational_is_exact() {
        let x = RealScalar::from_rational(rat(1, 2));
        let r = x.refine(1e-30, DEFAULT_MAX_PRECISION_BITS).unwrap();
        assert!(r.width().is_zero());
        assert_eq!(r.to_f64(), 0.5);
    }

    #[test]
    fn refine_sqrt2_to_width() {
        let x = sqrt2();
        let r = x.refine(1e-30, DEFAULT_MAX_PRECISION_BITS).unwrap();
        assert!(r.width().to_f64() <= 1e-30);
        // 1.41421356237309504880...
        assert!((r.to_f64() - 1.4142135623730951).abs() < 1e-15);
        // idempotence: refining again returns the same enclosure
        let r2 = r.refine(1e-30, DEFAULT_MAX_PRECISION_BITS).unwrap();
        assert_eq!(r.interval(), r2.interval());
    }

    #[test]
    fn refine_without_source_fails() {
        let x = RealScalar::from_interval(
            Interval::from_rational(&rat(1, 3), 16),
            16,
        );
        assert!(matches!(
            x.refine(1e-30, 4096),
            Err(Error::PrecisionExhausted { .. })
        ));
    }

    #[test]
    fn certified_signs() {
        let pos = RealScalar::from_interval(Interval::from_rational(&rat(3, 20), 64), 64);
        assert_eq!(pos.certified_sign().unwrap(), 1);
        // 2*sqrt(2) - 3 < 0 via the surd oracle
        let x = sqrt2().mul_rational(&rat(2, 1)).sub(&RealScalar::from_int(3));
        assert_eq!(x.certified_sign().unwrap(), -1);
        assert_eq!(RealScalar::zero().certified_sign().unwrap(), 0);
    }

    #[test]
    fn sign_stable_under_refinement() {
        let x = sqrt2().sub(&RealScalar::from_rational(rat(141421356, 100000000)));
        let s = x.certified_sign().unwrap();
        let refined = x.refine(1e-40, 1 << 20).unwrap();
        assert_eq!(refined.certified_sign().unwrap(), s);
    }

    #[test]
    fn nearest_integer_and_tie() {
        let phi = sqrt2().add(&RealScalar::from_rational(rat(1, 1)));
        assert_eq!(phi.nearest_integer().unwrap(), BigInt::from(2));
        let half = RealScalar::from_rational(rat(7, 2));
        assert!(matches!(
            half.nearest_integer(),
            Err(Error::ExactTie { .. })
        ));
    }

    #[test]
    fn div_exact_and_interval() {
        let a = sqrt2().sub(&RealScalar::one()); // sqrt2 - 1
        let q = RealScalar::one().div(&a).unwrap(); // sqrt2 + 1
        let expected = sqrt2().add(&RealScalar::one());
        assert_eq!(
            q.certified_cmp(&expected).unwrap(),
            Ordering::Equal
        );
    }

    #[test]
    fn ln_recip_golden() {
        // ln(1/(phi-1)) = ln(phi) = 0.481211825059603447497758913425...
        let phi_m1 = RealScalar::from_exact(
            ExactReal::sqrt(5)
                .unwrap()
                .sub(&ExactReal::from_integer(1))
                .mul_rational(&rat(1, 2)),
        );
        let l = phi_m1.ln_recip(128).unwrap();
        assert!((l.to_f64() - 0.4812118250596034).abs() < 1e-15);
        assert!(l.width().to_f64() < 1e-30);
    }

    #[test]
    fn constants_config_derivation() {
        let c = ConstantsConfig::default();
        assert_eq!(c.c_prime, rat(4, 1));
        let c2 = ConstantsConfig::new(rat(1, 2), None, BigRational::one()).unwrap();
        assert_eq!(c2.c_prime, rat(6, 1));
        assert!(ConstantsConfig::new(rat(-1, 2), None, BigRational::one()).is_err());
    }
}
