//! Exact dyadic rationals `m * 2^e` with directed rounding.
//!
//! These are the endpoints of every enclosure in the crate. Ring
//! operations (add, sub, mul, neg) are exact; division and conversion
//! from non-dyadic rationals round in a caller-chosen direction so that
//! intervals stay outward.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Rounding direction for inexact operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Down,
    Up,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Down => Dir::Up,
            Dir::Up => Dir::Down,
        }
    }
}

/// An exact dyadic rational `man * 2^exp`, canonicalized so that `man`
/// is odd or zero (zero has `exp == 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Dyadic {
        let mut d = Dyadic { man, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Dyadic {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Dyadic {
        Dyadic {
            man: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int(n: i64) -> Dyadic {
        Dyadic::new(BigInt::from(n), 0)
    }

    pub fn from_bigint(n: BigInt) -> Dyadic {
        Dyadic::new(n, 0)
    }

    /// Exact conversion of a finite f64 (every finite f64 is dyadic).
    pub fn from_f64(x: f64) -> Option<Dyadic> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_raw = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if exp_raw == 0 {
            (frac, -1074i64) // subnormal
        } else {
            (frac | (1 << 52), exp_raw - 1075)
        };
        Some(Dyadic::new(BigInt::from(sign) * BigInt::from(man), exp))
    }

    fn normalize(&mut self) {
        if self.man.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.man >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn signum(&self) -> i8 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// Number of significant bits of the mantissa.
    pub fn bit_length(&self) -> u64 {
        self.man.bits()
    }

    pub fn add(&self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(rhs.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &rhs.man << (rhs.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, rhs: &Dyadic) -> Dyadic {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    pub fn mul(&self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        Dyadic::new(&self.man * &rhs.man, self.exp + rhs.exp)
    }

    /// Multiplication by `2^k`.
    pub fn shift(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + k,
        }
    }

    pub fn mul_int(&self, k: i64) -> Dyadic {
        Dyadic::new(&self.man * BigInt::from(k), self.exp)
    }

    pub fn mul_bigint(&self, k: &BigInt) -> Dyadic {
        Dyadic::new(&self.man * k, self.exp)
    }

    /// Rounds to at most `bits` significant mantissa bits in direction `dir`
    /// (on the value, not the magnitude).
    pub fn round_to(&self, bits: u32, dir: Dir) -> Dyadic {
        let len = self.man.bits();
        if len <= bits as u64 {
            return self.clone();
        }
        let drop = len - bits as u64;
        let q = floor_shr(&self.man, drop);
        match dir {
            Dir::Down => Dyadic::new(q, self.exp + drop as i64),
            Dir::Up => {
                let back = &q << drop;
                if back == self.man {
                    Dyadic::new(q, self.exp + drop as i64)
                } else {
                    Dyadic::new(q + 1, self.exp + drop as i64)
                }
            }
        }
    }

    /// Directed division to `bits` significant bits.
    pub fn div(&self, rhs: &Dyadic, bits: u32, dir: Dir) -> Dyadic {
        assert!(!rhs.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // Scale the numerator so the integer quotient carries >= bits+1 bits.
        let la = self.man.bits() as i64;
        let lb = rhs.man.bits() as i64;
        let s = (bits as i64 + 2 + lb - la).max(0) as u64;
        let num = &self.man << s;
        let (q, r) = num.div_rem(&rhs.man);
        let exact = r.is_zero();
        let exp = self.exp - rhs.exp - s as i64;
        // div_rem truncates toward zero; fix up for the requested direction.
        let value_negative = (self.man.sign() == Sign::Minus) != (rhs.man.sign() == Sign::Minus);
        let q = match (dir, exact, value_negative) {
            (_, true, _) => q,
            (Dir::Down, false, true) => q - 1,
            (Dir::Down, false, false) => q,
            (Dir::Up, false, true) => q,
            (Dir::Up, false, false) => q + 1,
        };
        Dyadic::new(q, exp).round_to(bits, dir)
    }

    /// Directed conversion of an arbitrary rational.
    pub fn from_rational(r: &BigRational, bits: u32, dir: Dir) -> Dyadic {
        let num = Dyadic::from_bigint(r.numer().clone());
        let den = Dyadic::from_bigint(r.denom().clone());
        num.div(&den, bits, dir)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as u64)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Lossy conversion for reporting, rounded to nearest (half away
    /// from zero).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let len = self.man.bits();
        let keep = 54u64.min(len);
        let drop = len - keep;
        let top = floor_shr(&self.man.abs(), drop);
        let mut m = top.to_i64().expect("54-bit mantissa fits i64");
        let mut e = self.exp + drop as i64;
        if len > 53 {
            m = (m >> 1) + (m & 1);
            e += 1;
        }
        let sign = if self.man.sign() == Sign::Minus {
            -1.0
        } else {
            1.0
        };
        sign * m as f64 * (e as f64).exp2()
    }

    /// Floor of the value as an integer.
    pub fn floor_int(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as u64
        } else {
            floor_shr(&self.man, (-self.exp) as u64)
        }
    }

    /// Ceiling of the value as an integer.
    pub fn ceil_int(&self) -> BigInt {
        -((&self.neg()).floor_int())
    }

    /// Decimal rendering with directed rounding, suitable for reporting
    /// enclosure endpoints without losing containment.
    pub fn to_decimal_string(&self, digits: u32, dir: Dir) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        // value * 10^digits, rounded in `dir` to an integer
        let pow10 = BigInt::from(10u32).pow(digits);
        let scaled = self.mul_bigint(&pow10);
        let int = match dir {
            Dir::Down => scaled.floor_int(),
            Dir::Up => scaled.ceil_int(),
        };
        let neg = int.sign() == Sign::Minus;
        let mag = int.magnitude().to_string();
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        if mag.len() > digits as usize {
            let split = mag.len() - digits as usize;
            s.push_str(&mag[..split]);
            s.push('.');
            s.push_str(&mag[split..]);
        } else {
            s.push_str("0.");
            for _ in 0..(digits as usize - mag.len()) {
                s.push('0');
            }
            s.push_str(&mag);
        }
        // trim trailing zeros but keep at least one digit after the point
        while s.ends_with('0') && !s.ends_with(".0") {
            s.pop();
        }
        s
    }
}

/// Shift right rounding toward negative infinity.
fn floor_shr(n: &BigInt, k: u64) -> BigInt {
    if k == 0 {
        return n.clone();
    }
    if n.sign() != Sign::Minus {
        n >> k
    } else {
        // -(ceil(|n| / 2^k))
        let mag = n.magnitude();
        let q = mag >> k;
        let back: num_bigint::BigUint = &q << k;
        if &back == mag {
            -BigInt::from(q)
        } else {
            -BigInt::from(q + 1u32)
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Dyadic) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Dyadic) -> Ordering {
        let s = self.signum();
        let o = other.signum();
        if s != o {
            return s.cmp(&o);
        }
        if s == 0 {
            return Ordering::Equal;
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &other.man << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn normalization_and_eq() {
        assert_eq!(d(4, 0), d(1, 2));
        assert_eq!(d(0, 5), Dyadic::zero());
        assert_eq!(d(12, -2), d(3, 0));
    }

    #[test]
    fn ring_ops_exact() {
        let a = d(3, -2); // 0.75
        let b = d(5, -3); // 0.625
        assert_eq!(a.add(&b), d(11, -3)); // 1.375
        assert_eq!(a.sub(&b), d(1, -3)); // 0.125
        assert_eq!(a.mul(&b), d(15, -5)); // 0.46875
        assert_eq!(a.neg().signum(), -1);
    }

    #[test]
    fn directed_division() {
        // 1/3 is not dyadic: lo < 1/3 < hi and both near 1/3
        let one = Dyadic::one();
        let three = d(3, 0);
        let lo = one.div(&three, 20, Dir::Down);
        let hi = one.div(&three, 20, Dir::Up);
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        assert!(lo.to_rational() < third && third < hi.to_rational());
        let gap = hi.sub(&lo);
        assert!(gap.to_f64() < 1e-5);

        // negative numerator rounds the right way
        let mlo = one.neg().div(&three, 20, Dir::Down);
        let mhi = one.neg().div(&three, 20, Dir::Up);
        assert!(mlo.to_rational() < -third.clone() && -third < mhi.to_rational());
    }

    #[test]
    fn rounding_direction_on_negatives() {
        let x = d(-1025, -10); // -1.0009765625
        let down = x.round_to(4, Dir::Down);
        let up = x.round_to(4, Dir::Up);
        assert!(down <= x && x <= up);
        assert!(down < up);
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(d(7, -2).floor_int(), BigInt::from(1)); // 1.75
        assert_eq!(d(7, -2).ceil_int(), BigInt::from(2));
        assert_eq!(d(-7, -2).floor_int(), BigInt::from(-2));
        assert_eq!(d(-7, -2).ceil_int(), BigInt::from(-1));
        assert_eq!(d(8, -2).floor_int(), BigInt::from(2)); // exact 2
        assert_eq!(d(8, -2).ceil_int(), BigInt::from(2));
    }

    #[test]
    fn f64_roundtrip_moderate() {
        let x = d(123456789, -20);
        let f = x.to_f64();
        assert!((f - 123456789.0 / 1048576.0).abs() < 1e-9);
    }

    #[test]
    fn decimal_rendering() {
        let x = d(1, -1); // 0.5
        assert_eq!(x.to_decimal_string(3, Dir::Down), "0.5");
        let third_lo = Dyadic::one().div(&d(3, 0), 64, Dir::Down);
        let s = third_lo.to_decimal_string(6, Dir::Down);
        assert_eq!(s, "0.333333");
    }
}
