//! Exact rationals over any signed primitive integer.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_traits::{CheckedNeg, PrimInt, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Integer types a [`Rational`] can be built on.
pub trait RationalInt:
    PrimInt
    + Signed
    + CheckedNeg
    + Hash
    + fmt::Debug
    + fmt::Display
    + FromStr
    + Serialize
    + Send
    + Sync
    + 'static
{
}

impl<T> RationalInt for T where
    T: PrimInt
        + Signed
        + CheckedNeg
        + Hash
        + fmt::Debug
        + fmt::Display
        + FromStr
        + Serialize
        + Send
        + Sync
        + 'static
{
}

/// Reduced fraction with a positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational<I> {
    numer: I,
    denom: I,
}

fn gcd<I: RationalInt>(mut a: I, mut b: I) -> I {
    a = a.abs();
    b = b.abs();
    while !b.is_zero() {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl<I: RationalInt> Rational<I> {
    /// `None` when `denom` is zero or normalizing overflows.
    pub fn new(numer: I, denom: I) -> Option<Self> {
        if denom.is_zero() {
            return None;
        }
        let g = gcd(numer, denom);
        let (mut n, mut d) = (numer / g, denom / g);
        if d < I::zero() {
            n = CheckedNeg::checked_neg(&n)?;
            d = CheckedNeg::checked_neg(&d)?;
        }
        Some(Self { numer: n, denom: d })
    }

    pub fn from_int(n: I) -> Self {
        Self {
            numer: n,
            denom: I::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_int(I::zero())
    }

    pub fn numer(&self) -> I {
        self.numer
    }

    pub fn denom(&self) -> I {
        self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.denom.is_one()
    }

    pub fn checked_add(self, rhs: Self) -> Option<Self> {
        let g = gcd(self.denom, rhs.denom);
        let l = self.denom / g;
        let r = rhs.denom / g;
        let n = self.numer.checked_mul(&r)?.checked_add(&rhs.numer.checked_mul(&l)?)?;
        Self::new(n, self.denom.checked_mul(&r)?)
    }

    pub fn checked_neg(self) -> Option<Self> {
        Some(Self {
            numer: CheckedNeg::checked_neg(&self.numer)?,
            denom: self.denom,
        })
    }

    pub fn checked_sub(self, rhs: Self) -> Option<Self> {
        self.checked_add(rhs.checked_neg()?)
    }

    pub fn checked_mul(self, rhs: Self) -> Option<Self> {
        // cross-reduce first to keep intermediates small
        let g1 = gcd(self.numer, rhs.denom);
        let g2 = gcd(rhs.numer, self.denom);
        let (g1, g2) = (
            if g1.is_zero() { I::one() } else { g1 },
            if g2.is_zero() { I::one() } else { g2 },
        );
        let n = (self.numer / g1).checked_mul(&(rhs.numer / g2))?;
        let d = (self.denom / g2).checked_mul(&(rhs.denom / g1))?;
        Self::new(n, d)
    }

    /// `None` on division by zero or overflow.
    pub fn checked_div(self, rhs: Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let recip = Self::new(rhs.denom, rhs.numer)?;
        self.checked_mul(recip)
    }

    pub fn to_f64(&self) -> f64 {
        self.numer.to_f64().unwrap_or(f64::NAN) / self.denom.to_f64().unwrap_or(f64::NAN)
    }
}

impl<I: RationalInt> From<I> for Rational<I> {
    fn from(n: I) -> Self {
        Self::from_int(n)
    }
}

impl<I: RationalInt> Ord for Rational<I> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (
            self.numer.checked_mul(&other.denom),
            other.numer.checked_mul(&self.denom),
        ) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }
}

impl<I: RationalInt> PartialOrd for Rational<I> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! panicking_op {
    ($trait:ident, $method:ident, $checked:ident, $what:literal) => {
        impl<I: RationalInt> $trait for Rational<I> {
            type Output = Self;

            fn $method(self, rhs: Self) -> Self {
                self.$checked(rhs).expect($what)
            }
        }
    };
}

panicking_op!(Add, add, checked_add, "rational addition overflowed");
panicking_op!(Sub, sub, checked_sub, "rational subtraction overflowed");
panicking_op!(Mul, mul, checked_mul, "rational multiplication overflowed");
panicking_op!(Div, div, checked_div, "rational division by zero or overflow");

impl<I: RationalInt> fmt::Display for Rational<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom.is_one() {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

impl<I: RationalInt> fmt::Debug for Rational<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse rational from {0:?}")]
pub struct ParseRationalError(pub String);

impl<I: RationalInt> FromStr for Rational<I> {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n = n.trim().parse::<I>().map_err(|_| err())?;
                let d = d.trim().parse::<I>().map_err(|_| err())?;
                Self::new(n, d).ok_or_else(err)
            }
            None => s.parse::<I>().map(Self::from_int).map_err(|_| err()),
        }
    }
}

impl<I: RationalInt> Serialize for Rational<I> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de, I: RationalInt> Deserialize<'de> for Rational<I> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Q = Rational<i64>;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d).unwrap()
    }

    #[test]
    fn normalizes_sign_and_gcd() {
        let r = q(10, -14);
        assert_eq!((r.numer(), r.denom()), (-5, 7));
        assert_eq!(q(0, -3), Q::zero());
        assert!(Q::new(1, 0).is_none());
    }

    #[test]
    fn fraction_display_and_parse() {
        assert_eq!((Q::from(10) / Q::from(14)).to_string(), "5/7");
        assert_eq!("14/10".parse::<Q>().unwrap().to_string(), "7/5");
        assert_eq!("24".parse::<Q>().unwrap(), Q::from(24));
        assert!("1/0".parse::<Q>().is_err());
        assert!("x".parse::<Q>().is_err());
    }

    #[test]
    fn division_by_zero_is_none() {
        assert!(Q::from(3).checked_div(Q::zero()).is_none());
    }

    #[test]
    fn overflow_is_detected() {
        let big = Rational::<i8>::from_int(100);
        assert!(big.checked_mul(big).is_none());
        assert!(big.checked_add(big).is_none());
    }

    #[test]
    fn narrower_integers_work() {
        let a = Rational::<i32>::new(1, 3).unwrap();
        let b = Rational::<i32>::new(1, 6).unwrap();
        assert_eq!(a + b, Rational::<i32>::new(1, 2).unwrap());
    }

    proptest! {
        #[test]
        fn matches_num_rational(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
            use num_rational::Ratio;
            let (x, y) = (q(a, b), q(c, d));
            let (rx, ry) = (Ratio::new(a, b), Ratio::new(c, d));
            let same = |mine: Q, theirs: Ratio<i64>| {
                mine.numer() == *theirs.numer() && mine.denom() == *theirs.denom()
            };
            prop_assert!(same(x + y, rx + ry));
            prop_assert!(same(x - y, rx - ry));
            prop_assert!(same(x * y, rx * ry));
            if c != 0 {
                prop_assert!(same(x / y, rx / ry));
            }
            prop_assert_eq!(x.cmp(&y), rx.cmp(&ry));
        }
    }
}
