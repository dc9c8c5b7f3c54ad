//! Outward-rounded interval arithmetic on dyadic endpoints.
//!
//! Ring operations are computed exactly and then rounded outward to the
//! working precision. Transcendental endpoints (ln, exp, sin, cos, pi)
//! are delegated to `astro-float`, which guarantees correctly rounded
//! results for a requested rounding mode; we request `ToNegInf` /
//! `ToPosInf` per endpoint so every enclosure remains rigorous.

use crate::dyadic::{Dir, Dyadic};
use astro_float::{BigFloat, Consts, RoundingMode, Sign as AfSign};
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;

use std::cell::RefCell;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn to_bigfloat(d: &Dyadic) -> BigFloat {
    if d.is_zero() {
        return BigFloat::from_i8(0, 64);
    }
    let man = d.mantissa();
    let sign = if man.sign() == Sign::Minus {
        AfSign::Neg
    } else {
        AfSign::Pos
    };
    let words: Vec<u64> = man.magnitude().to_u64_digits();
    let p_bits = (words.len() * 64) as i64;
    // from_words: value = (integer of words / 2^p_bits) * 2^e
    let e = d.exponent() + p_bits;
    assert!(
        e >= i32::MIN as i64 && e <= i32::MAX as i64,
        "exponent out of range for transcendental evaluation"
    );
    BigFloat::from_words(&words, sign, e as i32)
}

fn from_bigfloat(b: &BigFloat) -> Dyadic {
    if b.is_zero() {
        return Dyadic::zero();
    }
    let (words, _n, sign, e, _inexact) = b
        .as_raw_parts()
        .expect("finite value expected from directed evaluation");
    let mut mag = num_bigint::BigUint::ZERO;
    for (i, w) in words.iter().enumerate() {
        mag |= num_bigint::BigUint::from(*w) << (64 * i);
    }
    let man = match sign {
        AfSign::Neg => -BigInt::from(mag),
        AfSign::Pos => BigInt::from(mag),
    };
    Dyadic::new(man, e as i64 - (words.len() * 64) as i64)
}

// astro-float's `Up`/`Down` are directed modes: an ulp is added whenever
// any nonzero bits are discarded (see round_mantissa), so they round
// toward +/- infinity rather than to nearest.
fn rm(dir: Dir) -> RoundingMode {
    match dir {
        Dir::Down => RoundingMode::Down,
        Dir::Up => RoundingMode::Up,
    }
}

fn ln_dir(x: &Dyadic, bits: u32, dir: Dir) -> Dyadic {
    assert!(x.signum() > 0, "ln of a nonpositive endpoint");
    CONSTS.with(|cc| {
        let b = to_bigfloat(x).ln(bits as usize, rm(dir), &mut cc.borrow_mut());
        from_bigfloat(&b)
    })
}

fn exp_dir(x: &Dyadic, bits: u32, dir: Dir) -> Dyadic {
    CONSTS.with(|cc| {
        let b = to_bigfloat(x).exp(bits as usize, rm(dir), &mut cc.borrow_mut());
        from_bigfloat(&b)
    })
}

fn sin_dir(x: &Dyadic, bits: u32, dir: Dir) -> Dyadic {
    CONSTS.with(|cc| {
        let b = to_bigfloat(x).sin(bits as usize, rm(dir), &mut cc.borrow_mut());
        from_bigfloat(&b)
    })
}

fn cos_dir(x: &Dyadic, bits: u32, dir: Dir) -> Dyadic {
    CONSTS.with(|cc| {
        let b = to_bigfloat(x).cos(bits as usize, rm(dir), &mut cc.borrow_mut());
        from_bigfloat(&b)
    })
}

/// Enclosure of pi at the given precision.
pub fn pi(bits: u32) -> Interval {
    CONSTS.with(|cc| {
        let lo = cc.borrow_mut().pi(bits as usize, RoundingMode::Down);
        let hi = cc.borrow_mut().pi(bits as usize, RoundingMode::Up);
        Interval::from_endpoints(from_bigfloat(&lo), from_bigfloat(&hi))
    })
}

/// A closed interval with dyadic endpoints; the represented real lies
/// inside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn from_endpoints(lo: Dyadic, hi: Dyadic) -> Interval {
        debug_assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(d: Dyadic) -> Interval {
        Interval {
            lo: d.clone(),
            hi: d,
        }
    }

    pub fn zero() -> Interval {
        Interval::point(Dyadic::zero())
    }

    pub fn one() -> Interval {
        Interval::point(Dyadic::one())
    }

    pub fn from_int(n: i64) -> Interval {
        Interval::point(Dyadic::from_int(n))
    }

    /// Directed two-sided conversion of a rational.
    pub fn from_rational(r: &BigRational, bits: u32) -> Interval {
        Interval {
            lo: Dyadic::from_rational(r, bits, Dir::Down),
            hi: Dyadic::from_rational(r, bits, Dir::Up),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.add(&self.hi).shift(-1)
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.lo.signum() > 0
    }

    pub fn is_strictly_negative(&self) -> bool {
        self.hi.signum() < 0
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    fn out(lo: Dyadic, hi: Dyadic, bits: u32) -> Interval {
        Interval {
            lo: lo.round_to(bits, Dir::Down),
            hi: hi.round_to(bits, Dir::Up),
        }
    }

    pub fn add(&self, rhs: &Interval, bits: u32) -> Interval {
        Interval::out(self.lo.add(&rhs.lo), self.hi.add(&rhs.hi), bits)
    }

    pub fn sub(&self, rhs: &Interval, bits: u32) -> Interval {
        Interval::out(self.lo.sub(&rhs.hi), self.hi.sub(&rhs.lo), bits)
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn abs(&self) -> Interval {
        if self.lo.signum() >= 0 {
            self.clone()
        } else if self.hi.signum() <= 0 {
            self.neg()
        } else {
            let m = self.lo.neg().max(self.hi.clone());
            Interval {
                lo: Dyadic::zero(),
                hi: m,
            }
        }
    }

    pub fn mul(&self, rhs: &Interval, bits: u32) -> Interval {
        let p1 = self.lo.mul(&rhs.lo);
        let p2 = self.lo.mul(&rhs.hi);
        let p3 = self.hi.mul(&rhs.lo);
        let p4 = self.hi.mul(&rhs.hi);
        let lo = p1.clone().min(p2.clone()).min(p3.clone()).min(p4.clone());
        let hi = p1.max(p2).max(p3).max(p4);
        Interval::out(lo, hi, bits)
    }

    /// Division; the divisor must not contain zero.
    pub fn div(&self, rhs: &Interval, bits: u32) -> Interval {
        assert!(
            !rhs.contains_zero(),
            "interval division by an interval containing zero"
        );
        let q1 = self.lo.div(&rhs.lo, bits + 2, Dir::Down);
        let q2 = self.lo.div(&rhs.hi, bits + 2, Dir::Down);
        let q3 = self.hi.div(&rhs.lo, bits + 2, Dir::Down);
        let q4 = self.hi.div(&rhs.hi, bits + 2, Dir::Down);
        let lo = q1.min(q2).min(q3).min(q4);
        let r1 = self.lo.div(&rhs.lo, bits + 2, Dir::Up);
        let r2 = self.lo.div(&rhs.hi, bits + 2, Dir::Up);
        let r3 = self.hi.div(&rhs.lo, bits + 2, Dir::Up);
        let r4 = self.hi.div(&rhs.hi, bits + 2, Dir::Up);
        let hi = r1.max(r2).max(r3).max(r4);
        Interval::out(lo, hi, bits)
    }

    pub fn recip(&self, bits: u32) -> Interval {
        Interval::one().div(self, bits)
    }

    pub fn mul_bigint(&self, k: &BigInt, bits: u32) -> Interval {
        let a = self.lo.mul_bigint(k);
        let b = self.hi.mul_bigint(k);
        if k.sign() == Sign::Minus {
            Interval::out(b, a, bits)
        } else {
            Interval::out(a, b, bits)
        }
    }

    pub fn mul_rational(&self, r: &BigRational, bits: u32) -> Interval {
        self.mul(&Interval::from_rational(r, bits + 4), bits)
    }

    /// Integer power for a nonnegative base.
    pub fn pow_int(&self, k: u64, bits: u32) -> Interval {
        assert!(
            self.lo.signum() >= 0,
            "pow_int base must be nonnegative"
        );
        if k == 0 {
            return Interval::one();
        }
        let lo = dir_pow(&self.lo, k, bits + 4, Dir::Down);
        let hi = dir_pow(&self.hi, k, bits + 4, Dir::Up);
        Interval::out(lo, hi, bits)
    }

    /// Rational power `self^(num/den)` for a strictly positive base,
    /// via exp((num/den) ln self) unless the exponent is an integer.
    pub fn pow_rational(&self, r: &BigRational, bits: u32) -> Interval {
        use num_traits::{One, ToPrimitive, Zero};
        if r.is_zero() {
            return Interval::one();
        }
        if r.denom().is_one() {
            if let Some(k) = r.numer().to_u64() {
                return self.pow_int(k, bits);
            }
        }
        let ln = self.ln(bits + 8);
        ln.mul_rational(r, bits + 8).exp(bits)
    }

    /// Natural logarithm; requires a strictly positive interval.
    pub fn ln(&self, bits: u32) -> Interval {
        assert!(self.is_strictly_positive(), "ln of nonpositive interval");
        Interval {
            lo: ln_dir(&self.lo, bits, Dir::Down),
            hi: ln_dir(&self.hi, bits, Dir::Up),
        }
    }

    pub fn exp(&self, bits: u32) -> Interval {
        Interval {
            lo: exp_dir(&self.lo, bits, Dir::Down),
            hi: exp_dir(&self.hi, bits, Dir::Up),
        }
    }

    /// Enclosure of sin over the (width-zero or small) interval; the
    /// endpoints are evaluated directed and hulled, and a derivative
    /// bound of 1 covers interior extrema.
    pub fn sin(&self, bits: u32) -> Interval {
        let a = sin_dir(&self.lo, bits, Dir::Down);
        let b = sin_dir(&self.lo, bits, Dir::Up);
        let c = sin_dir(&self.hi, bits, Dir::Down);
        let d = sin_dir(&self.hi, bits, Dir::Up);
        let w = self.width();
        let lo = a.min(c).sub(&w);
        let hi = b.max(d).add(&w);
        Interval::out(lo, hi, bits)
    }

    pub fn cos(&self, bits: u32) -> Interval {
        let a = cos_dir(&self.lo, bits, Dir::Down);
        let b = cos_dir(&self.lo, bits, Dir::Up);
        let c = cos_dir(&self.hi, bits, Dir::Down);
        let d = cos_dir(&self.hi, bits, Dir::Up);
        let w = self.width();
        let lo = a.min(c).sub(&w);
        let hi = b.max(d).add(&w);
        Interval::out(lo, hi, bits)
    }

    pub fn to_f64_mid(&self) -> f64 {
        self.mid().to_f64()
    }
}

fn dir_pow(base: &Dyadic, k: u64, bits: u32, dir: Dir) -> Dyadic {
    // binary exponentiation with per-step directed rounding; valid for
    // nonnegative bases because rounding is monotone there
    debug_assert!(base.signum() >= 0);
    if base.is_zero() {
        return Dyadic::zero();
    }
    let mut acc = Dyadic::one();
    let mut b = base.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.mul(&b).round_to(bits, dir);
        }
        b = b.mul(&b).round_to(bits, dir);
        k >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn ln_two_enclosure() {
        let two = Interval::from_int(2);
        let l = two.ln(128);
        // ln 2 = 0.693147180559945309417232121458...
        let num: BigInt = "693147180559945309417".parse().unwrap();
        let den: BigInt = "1000000000000000000000".parse().unwrap();
        let below = BigRational::new(num.clone(), den.clone());
        let above = BigRational::new(num + 1, den);
        assert!(l.lo().to_rational() < above);
        assert!(l.hi().to_rational() > below);
        assert!(l.width().to_f64() < 1e-35);
    }

    #[test]
    fn exp_one_enclosure() {
        let e = Interval::one().exp(128);
        // e = 2.718281828459045235360287471352...
        let num: BigInt = "27182818284590452353".parse().unwrap();
        let den: BigInt = "10000000000000000000".parse().unwrap();
        let lo = e.lo().to_rational();
        let hi = e.hi().to_rational();
        assert!(lo < BigRational::new(num.clone() + 1, den.clone()));
        assert!(hi > BigRational::new(num, den));
        assert!(e.width().to_f64() < 1e-35);
    }

    #[test]
    fn pi_enclosure() {
        let p = pi(160);
        assert!(p.lo().to_f64() <= 3.141592653589793);
        assert!(p.hi().to_f64() >= 3.141592653589793);
        assert!(p.width().to_f64() < 1e-40);
    }

    #[test]
    fn outward_mul_div_contain_truth() {
        // (1/3) * 3 and / 3 stay containing
        let third = Interval::from_rational(&rat(1, 3), 40);
        let three = Interval::from_int(3);
        let prod = third.mul(&three, 40);
        assert!(prod.lo().to_f64() <= 1.0 && 1.0 <= prod.hi().to_f64());
        let q = Interval::one().div(&three, 40);
        assert!(q.lo().to_rational() < rat(1, 3) && rat(1, 3) < q.hi().to_rational());
    }

    #[test]
    fn sin_cos_of_zero_and_pi() {
        let z = Interval::zero().sin(96);
        assert!(z.lo().signum() <= 0 && z.hi().signum() >= 0);
        let c = Interval::zero().cos(96);
        assert!(c.lo().to_f64() <= 1.0 && 1.0 <= c.hi().to_f64());
        let p = pi(96);
        let s = p.sin(96);
        assert!(s.lo().to_f64() <= 0.0 && 0.0 <= s.hi().to_f64());
        assert!(s.width().to_f64() < 1e-20);
    }

    #[test]
    fn pow_int_and_rational() {
        let two = Interval::from_int(2);
        let p10 = two.pow_int(10, 96);
        assert!(p10.lo().to_f64() <= 1024.0 && 1024.0 <= p10.hi().to_f64());
        let half = rat(1, 2);
        let r = two.pow_rational(&half, 96);
        let s2 = std::f64::consts::SQRT_2;
        assert!((r.lo().to_f64() - s2).abs() < 1e-15);
        assert!((r.hi().to_f64() - s2).abs() < 1e-15);
        assert!(r.width().to_f64() < 1e-20);
    }
}
