//! Exact arithmetic in real multiquadratic fields.
//!
//! An [`ExactReal`] is a finite sum `sum_r c_r * sqrt(r)` over squarefree
//! positive integer radicands `r` with rational coefficients (`r = 1`
//! is the rational part). Such sums are closed under field operations:
//! products of radicals reduce via `sqrt(r)*sqrt(s) = g*sqrt(rs/g^2)`
//! with `g = gcd(r, s)`, and inversion proceeds by conjugation, one
//! prime at a time.
//!
//! Since square roots of distinct squarefree integers are linearly
//! independent over the rationals, an element is zero exactly when all
//! coefficients vanish. This makes the sign of any nonzero element
//! decidable by enclosure refinement, which is what certifies every
//! comparison in the crate.

use crate::dyadic::{Dir, Dyadic};
use crate::error::{Error, Result};
use crate::interval::Interval;
use num_bigint::{BigInt, BigUint};
use num_integer::gcd;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// An exact element of a real multiquadratic field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactReal {
    terms: BTreeMap<u128, BigRational>,
}

/// Splits `d = s^2 * d0` with `d0` squarefree; returns `(d0, s)`.
fn squarefree_split(mut d: u128) -> (u128, u128) {
    let mut d0: u128 = 1;
    let mut s: u128 = 1;
    let mut p: u128 = 2;
    while p * p <= d {
        if d % p == 0 {
            let mut e = 0u32;
            while d % p == 0 {
                d /= p;
                e += 1;
            }
            for _ in 0..e / 2 {
                s *= p;
            }
            if e % 2 == 1 {
                d0 *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if d > 1 {
        d0 *= d;
    }
    (d0, s)
}

fn smallest_prime_factor(d: u128) -> u128 {
    if d % 2 == 0 {
        return 2;
    }
    let mut p: u128 = 3;
    while p * p <= d {
        if d % p == 0 {
            return p;
        }
        p += 2;
    }
    d
}

impl ExactReal {
    pub fn zero() -> ExactReal {
        ExactReal {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> ExactReal {
        ExactReal::from_integer(1)
    }

    pub fn from_integer(n: i64) -> ExactReal {
        ExactReal::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(r: BigRational) -> ExactReal {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(1u128, r);
        }
        ExactReal { terms }
    }

    /// The element `c * sqrt(d)` for `d > 0`, with automatic reduction of
    /// the square part of `d`.
    pub fn sqrt_term(d: u128, coeff: BigRational) -> Result<ExactReal> {
        if d == 0 {
            return Err(Error::Domain("sqrt(0) term not allowed".into()));
        }
        if coeff.is_zero() {
            return Ok(ExactReal::zero());
        }
        let (d0, s) = squarefree_split(d);
        let c = coeff * BigRational::from_integer(big_from_u128(s));
        let mut terms = BTreeMap::new();
        terms.insert(d0, c);
        Ok(ExactReal { terms })
    }

    /// `sqrt(d)` itself.
    pub fn sqrt(d: u128) -> Result<ExactReal> {
        ExactReal::sqrt_term(d, BigRational::one())
    }

    fn insert_term(terms: &mut BTreeMap<u128, BigRational>, rad: u128, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match terms.entry(rad) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&1))
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&1) {
                return Some(c.clone());
            }
        }
        None
    }

    /// Radicands with nonzero coefficients, excluding the rational part.
    pub fn radicands(&self) -> Vec<u128> {
        self.terms.keys().copied().filter(|&r| r != 1).collect()
    }

    pub fn add(&self, rhs: &ExactReal) -> ExactReal {
        let mut terms = self.terms.clone();
        for (r, c) in &rhs.terms {
            Self::insert_term(&mut terms, *r, c.clone());
        }
        ExactReal { terms }
    }

    pub fn neg(&self) -> ExactReal {
        ExactReal {
            terms: self.terms.iter().map(|(r, c)| (*r, -c)).collect(),
        }
    }

    pub fn sub(&self, rhs: &ExactReal) -> ExactReal {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &ExactReal) -> Result<ExactReal> {
        let mut terms = BTreeMap::new();
        for (r, cr) in &self.terms {
            for (s, cs) in &rhs.terms {
                let g = gcd(*r, *s);
                let (a, b) = (r / g, s / g);
                let rad = a.checked_mul(b).ok_or_else(|| {
                    Error::Domain("radicand overflow in surd multiplication".into())
                })?;
                let coeff = cr * cs * BigRational::from_integer(big_from_u128(g));
                Self::insert_term(&mut terms, rad, coeff);
            }
        }
        Ok(ExactReal { terms })
    }

    pub fn mul_rational(&self, r: &BigRational) -> ExactReal {
        if r.is_zero() {
            return ExactReal::zero();
        }
        ExactReal {
            terms: self.terms.iter().map(|(rad, c)| (*rad, c * r)).collect(),
        }
    }

    pub fn mul_bigint(&self, k: &BigInt) -> ExactReal {
        self.mul_rational(&BigRational::from_integer(k.clone()))
    }

    /// Multiplicative inverse by iterated conjugation.
    pub fn inv(&self) -> Result<ExactReal> {
        if self.is_zero() {
            return Err(Error::Domain("division by exact zero".into()));
        }
        if let Some(r) = self.as_rational() {
            return Ok(ExactReal::from_rational(r.recip()));
        }
        // pick a prime appearing under some radical and conjugate it away
        let rad = *self.terms.keys().find(|&&r| r != 1).expect("non-rational");
        let p = smallest_prime_factor(rad);
        let conj = ExactReal {
            terms: self
                .terms
                .iter()
                .map(|(r, c)| (*r, if r % p == 0 { -c } else { c.clone() }))
                .collect(),
        };
        let norm = self.mul(&conj)?;
        debug_assert!(
            norm.terms.keys().all(|r| r % p != 0),
            "conjugation must eliminate the prime"
        );
        conj.mul(&norm.inv()?)
    }

    pub fn div(&self, rhs: &ExactReal) -> Result<ExactReal> {
        self.mul(&rhs.inv()?)
    }

    pub fn abs(&self) -> ExactReal {
        if self.sign() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Certified enclosure with absolute width about `2^-bits` (or
    /// relative width about `2^-bits` for values of large magnitude).
    ///
    /// The working precision adapts to the coefficient magnitudes:
    /// orbit products routinely have huge, almost-cancelling
    /// coefficients, and a fixed working precision would lose exactly
    /// that many bits.
    pub fn enclosure(&self, bits: u32) -> Interval {
        if self.terms.is_empty() {
            return Interval::zero();
        }
        let mut excess: i64 = 0;
        for (r, c) in &self.terms {
            let r_bits = (128 - r.leading_zeros()) as i64;
            let mag = c.numer().bits() as i64 - c.denom().bits() as i64 + r_bits / 2 + 2;
            excess = excess.max(mag);
        }
        excess += (usize::BITS - self.terms.len().leading_zeros()) as i64 + 2;
        let work = bits + excess.clamp(0, u32::MAX as i64 / 2) as u32 + 8;
        let mut lo = Dyadic::zero();
        let mut hi = Dyadic::zero();
        for (r, c) in &self.terms {
            let (root_lo, root_hi) = if *r == 1 {
                (Dyadic::one(), Dyadic::one())
            } else {
                sqrt_bounds(*r, work)
            };
            let c_lo = Dyadic::from_rational(c, work, Dir::Down);
            let c_hi = Dyadic::from_rational(c, work, Dir::Up);
            let (t_lo, t_hi) = if c.is_negative() {
                (c_lo.mul(&root_hi), c_hi.mul(&root_lo))
            } else {
                (c_lo.mul(&root_lo), c_hi.mul(&root_hi))
            };
            lo = lo.add(&t_lo);
            hi = hi.add(&t_hi);
        }
        Interval::from_endpoints(lo.round_to(bits, Dir::Down), hi.round_to(bits, Dir::Up))
    }

    /// Exact sign. Zero is recognized symbolically, so the refinement
    /// loop below always terminates.
    pub fn sign(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        if let Some(r) = self.as_rational() {
            return if r.is_negative() { -1 } else { 1 };
        }
        let mut bits = 64;
        loop {
            let enc = self.enclosure(bits);
            if enc.is_strictly_positive() {
                return 1;
            }
            if enc.is_strictly_negative() {
                return -1;
            }
            bits *= 2;
        }
    }

    /// Exact comparison.
    pub fn cmp_exact(&self, rhs: &ExactReal) -> Ordering {
        match self.sub(rhs).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// Exact floor.
    pub fn floor_exact(&self) -> BigInt {
        if let Some(r) = self.as_rational() {
            return r.floor().to_integer();
        }
        let mut bits = 64;
        loop {
            let enc = self.enclosure(bits);
            let k = enc.lo().floor_int();
            let low = self.sub(&ExactReal::from_rational(BigRational::from_integer(
                k.clone(),
            )));
            let high = ExactReal::from_rational(BigRational::from_integer(k.clone() + 1)).sub(self);
            // self irrational here, so neither difference can be zero
            if low.sign() > 0 && high.sign() > 0 {
                return k;
            }
            bits *= 2;
        }
    }

    /// Nearest integer with certified tie detection. A certified
    /// half-integer value is an exact tie.
    pub fn round_nearest(&self) -> Result<BigInt> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if let Some(r) = self.as_rational() {
            let shifted = &r + &half;
            if shifted.is_integer() {
                return Err(Error::ExactTie {
                    context: format!("{} is a half-integer", r),
                });
            }
            return Ok(shifted.floor().to_integer());
        }
        let mut bits = 64;
        loop {
            let enc = self.enclosure(bits);
            let k = enc.mid().add(&Dyadic::new(BigInt::one(), -1)).floor_int();
            let k_rat = BigRational::from_integer(k.clone());
            let low = self.sub(&ExactReal::from_rational(&k_rat - &half));
            let high = ExactReal::from_rational(&k_rat + &half).sub(self);
            // an exactly half-integer irrational value is impossible, but
            // the guard keeps the contract uniform
            if low.is_zero() || high.is_zero() {
                return Err(Error::ExactTie {
                    context: "half-integer midpoint".into(),
                });
            }
            if low.sign() > 0 && high.sign() > 0 {
                return Ok(k);
            }
            bits *= 2;
        }
    }
}

fn big_from_u128(x: u128) -> BigInt {
    BigInt::from(x)
}

/// `sqrt(r)` enclosed between consecutive multiples of `2^-m`.
fn sqrt_bounds(r: u128, m: u32) -> (Dyadic, Dyadic) {
    let scaled: BigUint = BigUint::from(r) << (2 * m as u64);
    let s = scaled.sqrt();
    let lo = Dyadic::new(BigInt::from(s.clone()), -(m as i64));
    let hi = Dyadic::new(BigInt::from(s + 1u32), -(m as i64));
    (lo, hi)
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (r, c) in &self.terms {
            if first {
                if *r == 1 {
                    write!(f, "{}", c)?;
                } else {
                    write!(f, "{}*sqrt({})", c, r)?;
                }
                first = false;
            } else if *r == 1 {
                if c.is_negative() {
                    write!(f, " - {}", -c)?;
                } else {
                    write!(f, " + {}", c)?;
                }
            } else if c.is_negative() {
                write!(f, " - {}*sqrt({})", -c, r)?;
            } else {
                write!(f, " + {}*sqrt({})", c, r)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sqrt2m1() -> ExactReal {
        ExactReal::sqrt(2)
            .unwrap()
            .sub(&ExactReal::from_integer(1))
    }

    #[test]
    fn squarefree_reduction() {
        assert_eq!(squarefree_split(8), (2, 2));
        assert_eq!(squarefree_split(12), (3, 2));
        assert_eq!(squarefree_split(1), (1, 1));
        // 250001 = 89 * 53^2
        assert_eq!(squarefree_split(250001 * 4_000_000), (89, 106_000));
    }

    #[test]
    fn sqrt8_is_two_sqrt2() {
        let a = ExactReal::sqrt(8).unwrap();
        let b = ExactReal::sqrt(2).unwrap().mul_rational(&rat(2, 1));
        assert_eq!(a, b);
    }

    #[test]
    fn sign_of_2sqrt2_minus_3() {
        // 2*sqrt(2) = sqrt(8) < sqrt(9) = 3
        let x = ExactReal::sqrt_term(2, rat(2, 1))
            .unwrap()
            .sub(&ExactReal::from_integer(3));
        assert_eq!(x.sign(), -1);
    }

    #[test]
    fn field_ops_in_q_sqrt2() {
        // (sqrt(2)-1)(sqrt(2)+1) = 1
        let a = sqrt2m1();
        let b = ExactReal::sqrt(2)
            .unwrap()
            .add(&ExactReal::from_integer(1));
        assert_eq!(a.mul(&b).unwrap(), ExactReal::one());
        // 1/(sqrt(2)-1) = sqrt(2)+1
        assert_eq!(a.inv().unwrap(), b);
    }

    #[test]
    fn biquadratic_product_and_inverse() {
        // (sqrt(2)+sqrt(3))^2 = 5 + 2 sqrt(6)
        let x = ExactReal::sqrt(2).unwrap().add(&ExactReal::sqrt(3).unwrap());
        let sq = x.mul(&x).unwrap();
        let expected = ExactReal::from_integer(5)
            .add(&ExactReal::sqrt_term(6, rat(2, 1)).unwrap());
        assert_eq!(sq, expected);
        // x * x^{-1} = 1 in Q(sqrt2, sqrt3)
        let prod = x.mul(&x.inv().unwrap()).unwrap();
        assert_eq!(prod, ExactReal::one());
    }

    #[test]
    fn zero_detection_is_symbolic() {
        let x = ExactReal::sqrt(2)
            .unwrap()
            .add(&ExactReal::sqrt(3).unwrap())
            .sub(&ExactReal::sqrt(3).unwrap())
            .sub(&ExactReal::sqrt(2).unwrap());
        assert!(x.is_zero());
        assert_eq!(x.sign(), 0);
    }

    #[test]
    fn enclosure_contains_value() {
        let x = sqrt2m1();
        let enc = x.enclosure(100);
        // sqrt(2)-1 = 0.414213562373095048801688724209...
        assert!(enc.lo().to_f64() <= 0.41421356237309515);
        assert!(enc.hi().to_f64() >= 0.41421356237309503);
        assert!(enc.width().to_f64() < 1e-29);
    }

    #[test]
    fn floor_and_round() {
        let phi_minus_1 = ExactReal::sqrt(5)
            .unwrap()
            .sub(&ExactReal::from_integer(1))
            .mul_rational(&rat(1, 2));
        assert_eq!(phi_minus_1.floor_exact(), BigInt::zero());
        // 1/(phi-1) = phi = 1.618..., nearest integer 2
        let phi = phi_minus_1.inv().unwrap();
        assert_eq!(phi.round_nearest().unwrap(), BigInt::from(2));
    }

    #[test]
    fn round_tie_detected() {
        let x = ExactReal::from_rational(rat(5, 2));
        assert!(matches!(
            x.round_nearest(),
            Err(Error::ExactTie { .. })
        ));
        let y = ExactReal::from_rational(rat(7, 3));
        assert_eq!(y.round_nearest().unwrap(), BigInt::from(2));
    }

    #[test]
    fn gauss_image_example_exact() {
        // alpha = (sqrt2-1, sqrt3-1), pivot 1:
        // alpha2~ = |2*(sqrt2-1) - (sqrt3-1)| / (sqrt2-1) = 3+sqrt2-sqrt6-sqrt3
        let aw = sqrt2m1();
        let a2 = ExactReal::sqrt(3)
            .unwrap()
            .sub(&ExactReal::from_integer(1));
        let num = aw.mul_rational(&rat(2, 1)).sub(&a2);
        let image = num.div(&aw).unwrap();
        let expected = ExactReal::from_integer(3)
            .add(&ExactReal::sqrt(2).unwrap())
            .sub(&ExactReal::sqrt(6).unwrap())
            .sub(&ExactReal::sqrt(3).unwrap());
        assert_eq!(image, expected);
        assert_eq!(image.sign(), 1);
    }
}
