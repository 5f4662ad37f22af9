//! Arbitrary-precision integer with an inline machine-word fast path.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// An exact integer. Values that fit in an `i64` are always stored inline.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Int {
    Small(i64),
    Big(BigInt),
}

impl Default for Int {
    fn default() -> Int {
        Int::Small(0)
    }
}

impl Int {
    pub fn zero() -> Int {
        Int::Small(0)
    }

    pub fn one() -> Int {
        Int::Small(1)
    }

    fn from_big(b: BigInt) -> Int {
        match b.to_i64() {
            Some(v) => Int::Small(v),
            None => Int::Big(b),
        }
    }

    pub fn to_bigint(&self) -> BigInt {
        match self {
            Int::Small(v) => BigInt::from(*v),
            Int::Big(b) => b.clone(),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Int::Small(v) => Some(*v),
            Int::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Int::Small(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Int::Small(1))
    }

    pub fn is_minus_one(&self) -> bool {
        matches!(self, Int::Small(-1))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Int::Small(v) => *v < 0,
            Int::Big(b) => b.is_negative(),
        }
    }

    pub fn add_assign(&mut self, o: &Int) {
        if let (Int::Small(a), Int::Small(b)) = (&*self, o) {
            if let Some(s) = a.checked_add(*b) {
                *self = Int::Small(s);
                return;
            }
        }
        *self = Int::from_big(self.to_bigint() + o.to_bigint());
    }

    pub fn sub_assign(&mut self, o: &Int) {
        self.add_assign(&o.neg());
    }

    /// `self += a * b`.
    pub fn add_mul(&mut self, a: &Int, b: &Int) {
        if let (Int::Small(x), Int::Small(y), Int::Small(z)) = (&*self, a, b) {
            if let Some(s) = y.checked_mul(*z).and_then(|p| x.checked_add(p)) {
                *self = Int::Small(s);
                return;
            }
        }
        *self = Int::from_big(self.to_bigint() + a.to_bigint() * b.to_bigint());
    }

    pub fn mul(&self, o: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, o) {
            if let Some(p) = a.checked_mul(*b) {
                return Int::Small(p);
            }
        }
        Int::from_big(self.to_bigint() * o.to_bigint())
    }

    pub fn neg(&self) -> Int {
        match self {
            Int::Small(v) => match v.checked_neg() {
                Some(n) => Int::Small(n),
                None => Int::Big(-BigInt::from(*v)),
            },
            Int::Big(b) => Int::from_big(-b),
        }
    }

    pub fn abs(&self) -> Int {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Nonnegative gcd.
    pub fn gcd(&self, o: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, o) {
            if *a != i64::MIN && *b != i64::MIN {
                return Int::Small(a.gcd(b));
            }
        }
        Int::from_big(self.to_bigint().gcd(&o.to_bigint()))
    }

    /// Division that is known to be exact.
    pub fn div_exact(&self, d: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, d) {
            if let Some(q) = a.checked_div(*b) {
                debug_assert_eq!(a % b, 0);
                return Int::Small(q);
            }
        }
        let (q, r) = self.to_bigint().div_rem(&d.to_bigint());
        debug_assert!(r.is_zero());
        Int::from_big(q)
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Int {
        Int::Small(v)
    }
}

impl From<i32> for Int {
    fn from(v: i32) -> Int {
        Int::Small(v as i64)
    }
}

impl From<BigInt> for Int {
    fn from(b: BigInt) -> Int {
        Int::from_big(b)
    }
}

impl From<&BigInt> for Int {
    fn from(b: &BigInt) -> Int {
        Int::from_big(b.clone())
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Int::Small(v) => write!(f, "{v}"),
            Int::Big(b) => write!(f, "{b}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes() {
        let mut a = Int::from(i64::MAX);
        a.add_assign(&Int::one());
        assert!(matches!(a, Int::Big(_)));
        a.sub_assign(&Int::one());
        assert_eq!(a, Int::Small(i64::MAX));
    }

    #[test]
    fn mul_promotes_and_demotes() {
        let big = Int::from(1i64 << 40).mul(&Int::from(1i64 << 40));
        assert_eq!(big.to_bigint(), BigInt::from(1u128 << 80));
        assert_eq!(big.div_exact(&Int::from(1i64 << 40)), Int::Small(1 << 40));
    }

    #[test]
    fn add_mul_and_gcd() {
        let mut acc = Int::from(3);
        acc.add_mul(&Int::from(4), &Int::from(-5));
        assert_eq!(acc, Int::from(-17));
        assert_eq!(Int::from(-12).gcd(&Int::from(18)), Int::from(6));
        assert_eq!(Int::from(i64::MIN).neg().neg(), Int::Small(i64::MIN));
    }
}
