//! Dyadic rationals `m / 2^s`, the working number type of every certified
//! approximation in this crate.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `mantissa / 2^shift`, kept in lowest terms (odd mantissa, or zero with
/// shift 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    mantissa: BigInt,
    shift: u64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, shift: u64) -> Self {
        let mut d = Dyadic { mantissa, shift };
        d.reduce();
        d
    }

    pub fn zero() -> Self {
        Dyadic::default()
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n.into(), 0)
    }

    fn reduce(&mut self) {
        if self.mantissa.is_zero() {
            self.shift = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0).min(self.shift);
        if tz > 0 {
            self.mantissa >>= tz;
            self.shift -= tz;
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.sign() == Sign::Minus
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mantissa: self.mantissa.abs(), shift: self.shift }
    }

    /// Mantissa rescaled to denominator `2^shift`; `shift` must be at least
    /// `self.shift`.
    fn mantissa_at(&self, shift: u64) -> BigInt {
        debug_assert!(shift >= self.shift);
        &self.mantissa << (shift - self.shift)
    }

    /// `|self| > 2^exp`.
    pub fn abs_exceeds_pow2(&self, exp: i64) -> bool {
        if self.mantissa.is_zero() {
            return false;
        }
        // |m| / 2^s > 2^e  <=>  |m| > 2^(e+s)
        let target = exp + self.shift as i64;
        let mag = self.mantissa.magnitude();
        if target < 0 {
            return true;
        }
        let bits = mag.bits() as i64;
        match bits.cmp(&(target + 1)) {
            Ordering::Greater => true,
            Ordering::Less => false,
            // 2^target <= |m| < 2^(target+1): strictly greater unless a power of two
            Ordering::Equal => mag.trailing_zeros() != Some(target as u64),
        }
    }

    /// `self * 2^k`.
    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if k >= 0 {
            Dyadic::new(&self.mantissa << k as u64, self.shift)
        } else {
            Dyadic::new(self.mantissa.clone(), self.shift + (-k) as u64)
        }
    }

    pub fn floor(&self) -> BigInt {
        // arithmetic shift on BigInt rounds toward negative infinity
        &self.mantissa >> self.shift
    }

    pub fn ceil(&self) -> BigInt {
        -((-&self.mantissa) >> self.shift)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mantissa.clone(), BigInt::one() << self.shift)
    }

    /// Display-only conversion.
    pub fn to_f64(&self) -> f64 {
        let bits = self.mantissa.bits();
        if bits > 1000 {
            let drop = bits - 60;
            let m = (&self.mantissa >> drop).to_f64().unwrap_or(f64::NAN);
            return m * 2f64.powi(drop as i32 - self.shift as i32);
        }
        let m = self.mantissa.to_f64().unwrap_or(f64::NAN);
        m * 2f64.powf(-(self.shift as f64))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let s = self.shift.max(other.shift);
        self.mantissa_at(s).cmp(&other.mantissa_at(s))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let s = self.shift.max(rhs.shift);
        Dyadic::new(self.mantissa_at(s) + rhs.mantissa_at(s), s)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let s = self.shift.max(rhs.shift);
        Dyadic::new(self.mantissa_at(s) - rhs.mantissa_at(s), s)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, shift: self.shift }
    }
}

impl Mul<&BigInt> for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &BigInt) -> Dyadic {
        Dyadic::new(&self.mantissa * rhs, self.shift)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.shift + rhs.shift)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "{}/2^{}", self.mantissa, self.shift)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, s: u64) -> Dyadic {
        Dyadic::new(BigInt::from(m), s)
    }

    #[test]
    fn reduces_to_lowest_terms() {
        assert_eq!(d(12, 3), d(3, 1));
        assert_eq!(d(0, 9).shift(), 0);
        assert_eq!(d(8, 2), Dyadic::from_int(2));
    }

    #[test]
    fn ordering_and_arithmetic() {
        assert!(d(1, 1) < d(3, 2));
        assert!(d(-1, 1) < d(0, 0));
        assert_eq!(&d(1, 1) + &d(1, 2), d(3, 2));
        assert_eq!(&d(1, 1) - &d(3, 2), d(-1, 2));
        assert_eq!(&d(3, 2) * &BigInt::from(4), Dyadic::from_int(3));
    }

    #[test]
    fn pow2_threshold() {
        // 3/4 > 2^-1 but not > 2^0
        assert!(d(3, 2).abs_exceeds_pow2(-1));
        assert!(!d(3, 2).abs_exceeds_pow2(0));
        // exactly 2^-1 is not strictly greater
        assert!(!d(1, 1).abs_exceeds_pow2(-1));
        assert!(d(-5, 0).abs_exceeds_pow2(2));
        assert!(!Dyadic::zero().abs_exceeds_pow2(-1000));
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(d(-3, 1).floor(), BigInt::from(-2));
        assert_eq!(d(-3, 1).ceil(), BigInt::from(-1));
        assert_eq!(d(7, 2).ceil(), BigInt::from(2));
        assert_eq!(d(8, 0).ceil(), BigInt::from(8));
    }
}
