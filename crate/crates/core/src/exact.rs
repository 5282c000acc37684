//! Exact scalars: arbitrary-precision rationals and the quadratic extension
//! `Q(sqrt(rho))` for a single rational radicand.
//!
//! Every squared norm, inner product and threshold of the exact certificate
//! path lives here, so nothing in that path ever touches a float.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// `num/den`. Panics if `den == 0`; use [`Rational::try_new`] for checked input.
    pub fn new(num: i64, den: i64) -> Self {
        Self::try_new(num, den).expect("zero denominator")
    }

    pub fn try_new(num: i64, den: i64) -> Result<Self> {
        Self::from_bigints(BigInt::from(num), BigInt::from(den))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Multiplicative inverse; zero has none.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// -1, 0 or +1.
    pub fn signum(&self) -> i8 {
        match self.0.cmp(&BigRational::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    /// Integer power with non-negative exponent.
    pub fn pow(&self, exp: u32) -> Self {
        Rational(num_traits::pow(self.0.clone(), exp as usize))
    }

    /// True if this rational is the square of another rational.
    pub fn is_perfect_square(&self) -> bool {
        if self.0.is_negative() {
            return false;
        }
        let is_sq = |x: &BigInt| {
            let r = x.sqrt();
            &(&r * &r) == x
        };
        is_sq(self.numer()) && is_sq(self.denom())
    }

    /// Nearest double (correctly rounded by `num-rational`).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `"p/q"` or a bare integer `"p"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("not a rational: {s:?}"));
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        Rational::from_bigints(num, den)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// `a + b*sqrt(rho)` with rational `a`, `b` and a non-negative rational radicand.
///
/// Binary operations require equal radicands. Equality is componentwise,
/// which coincides with equality of the real numbers whenever `rho` is not a
/// rational square.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadExt {
    a: Rational,
    b: Rational,
    rho: Rational,
}

impl QuadExt {
    pub fn new(a: Rational, b: Rational, rho: Rational) -> Result<Self> {
        if rho.signum() < 0 {
            return Err(Error::InvalidArgument(format!("negative radicand {rho}")));
        }
        Ok(QuadExt { a, b, rho })
    }

    /// The rational `a` embedded with radicand `rho`.
    pub fn rational(a: Rational, rho: &Rational) -> Result<Self> {
        QuadExt::new(a, Rational::zero(), rho.clone())
    }

    pub fn zero(rho: &Rational) -> Result<Self> {
        QuadExt::rational(Rational::zero(), rho)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn rho(&self) -> &Rational {
        &self.rho
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// The rational value, if the radical part vanishes.
    pub fn to_rational(&self) -> Option<Rational> {
        self.b.is_zero().then(|| self.a.clone())
    }

    fn check_rho(&self, other: &QuadExt) -> Result<()> {
        if self.rho != other.rho {
            return Err(Error::RadicandMismatch {
                left: self.rho.to_string(),
                right: other.rho.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &QuadExt) -> Result<QuadExt> {
        self.check_rho(other)?;
        Ok(QuadExt {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            rho: self.rho.clone(),
        })
    }

    pub fn sub(&self, other: &QuadExt) -> Result<QuadExt> {
        self.check_rho(other)?;
        Ok(QuadExt {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
            rho: self.rho.clone(),
        })
    }

    /// `(a1 + b1 r)(a2 + b2 r) = (a1 a2 + b1 b2 rho) + (a1 b2 + a2 b1) r` with `r = sqrt(rho)`.
    pub fn mul(&self, other: &QuadExt) -> Result<QuadExt> {
        self.check_rho(other)?;
        let a = &self.a * &other.a + &(&self.b * &other.b) * &self.rho;
        let b = &self.a * &other.b + &other.a * &self.b;
        Ok(QuadExt {
            a,
            b,
            rho: self.rho.clone(),
        })
    }

    pub fn scale(&self, k: &Rational) -> QuadExt {
        QuadExt {
            a: &self.a * k,
            b: &self.b * k,
            rho: self.rho.clone(),
        }
    }

    /// Exact sign of `a + b*sqrt(rho)`.
    ///
    /// Mixed-sign parts are resolved by comparing `a^2` with `b^2 rho`.
    pub fn sign(&self) -> i8 {
        let sa = self.a.signum();
        let sb = if self.rho.is_zero() { 0 } else { self.b.signum() };
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let lhs = self.a.square();
        let rhs = &self.b.square() * &self.rho;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Exact order of two values sharing a radicand.
    pub fn cmp_exact(&self, other: &QuadExt) -> Result<Ordering> {
        Ok(match self.sub(other)?.sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64() + self.b.to_f64() * self.rho.to_f64().sqrt()
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt {
            a: -&self.a,
            b: -&self.b,
            rho: self.rho.clone(),
        }
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.a, self.b, self.rho)
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for QuadExt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("not a quadratic value: {s:?}"));
        let (a, rest) = s.split_once(" + ").ok_or_else(bad)?;
        let (b, rest) = rest.split_once("*sqrt(").ok_or_else(bad)?;
        let rho = rest.strip_suffix(')').ok_or_else(bad)?;
        QuadExt::new(a.parse()?, b.parse()?, rho.parse()?)
    }
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuadExt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: Rational, b: Rational, rho: Rational) -> QuadExt {
        QuadExt::new(a, b, rho).unwrap()
    }

    #[test]
    fn rational_arithmetic() {
        assert_eq!(Rational::new(1, 2) + Rational::new(1, 3), Rational::new(5, 6));
        assert_eq!(Rational::new(2, 3) * Rational::new(3, 2), Rational::one());
        assert_eq!(-Rational::new(2, 3), Rational::new(-2, 3));
        assert_eq!(Rational::new(-4, 6).inv().unwrap(), Rational::new(-3, 2));
        assert_eq!(Rational::zero().inv(), Err(Error::DivisionByZero));
        assert_eq!(Rational::try_new(1, 0), Err(Error::DivisionByZero));
    }

    #[test]
    fn rational_is_reduced_with_positive_denominator() {
        let r = Rational::new(6, -4);
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(Rational::new(18, 6561).to_string(), "2/729");
        assert_eq!(Rational::from_integer(3).to_string(), "3/1");
    }

    #[test]
    fn rational_parse_and_serde() {
        assert_eq!("2/49".parse::<Rational>().unwrap(), Rational::new(2, 49));
        assert_eq!("-7".parse::<Rational>().unwrap(), Rational::from_integer(-7));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x/2".parse::<Rational>().is_err());
        let json = serde_json::to_string(&Rational::new(2, 49)).unwrap();
        assert_eq!(json, "\"2/49\"");
        let back: Rational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, Rational::new(2, 49));
    }

    #[test]
    fn perfect_squares() {
        assert!(Rational::new(4, 9).is_perfect_square());
        assert!(!Rational::new(5, 7).is_perfect_square());
        assert!(!Rational::new(-4, 9).is_perfect_square());
    }

    #[test]
    fn quad_mul_examples() {
        let rho = Rational::new(5, 7);
        let r = q(Rational::zero(), Rational::one(), rho.clone());
        assert_eq!(
            r.mul(&r).unwrap(),
            q(Rational::new(5, 7), Rational::zero(), rho.clone())
        );

        let one = QuadExt::rational(Rational::one(), &rho).unwrap();
        let x = q(Rational::new(3, 4), Rational::new(-2, 5), rho.clone());
        assert_eq!(one.mul(&x).unwrap(), x);

        let half = Rational::new(1, 2);
        let u = q(Rational::one(), Rational::one(), half.clone());
        let v = q(Rational::one(), -Rational::one(), half.clone());
        assert_eq!(u.mul(&v).unwrap(), q(half.clone(), Rational::zero(), half));
    }

    #[test]
    fn quad_mismatched_radicands() {
        let x = q(Rational::one(), Rational::one(), Rational::new(1, 2));
        let y = q(Rational::one(), Rational::one(), Rational::new(1, 3));
        assert!(matches!(x.mul(&y), Err(Error::RadicandMismatch { .. })));
        assert!(matches!(x.add(&y), Err(Error::RadicandMismatch { .. })));
    }

    #[test]
    fn quad_sign_examples() {
        let half = Rational::new(1, 2);
        assert_eq!(q(Rational::from(-1), Rational::one(), half.clone()).sign(), -1);
        assert_eq!(QuadExt::zero(&Rational::new(5, 7)).unwrap().sign(), 0);
        assert_eq!(q(Rational::from(-1), Rational::from(2), half.clone()).sign(), 1);
        // a^2 == b^2 rho with opposite signs is exactly zero.
        assert_eq!(q(Rational::from(-1), Rational::one(), Rational::one()).sign(), 0);
    }

    #[test]
    fn quad_display_roundtrip() {
        let x = q(Rational::new(1, 7), Rational::new(-1, 6), Rational::new(5, 7));
        assert_eq!(x.to_string(), "1/7 + -1/6*sqrt(5/7)");
        assert_eq!(x.to_string().parse::<QuadExt>().unwrap(), x);
    }

    #[test]
    fn negative_radicand_rejected() {
        assert!(QuadExt::new(Rational::one(), Rational::one(), Rational::new(-1, 2)).is_err());
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| Rational::new(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn field_axioms(x in small_rational(), y in small_rational(), z in small_rational()) {
            prop_assert_eq!((&x + &y) + z.clone(), &x + &(&y + &z));
            prop_assert_eq!((&x * &y) * z.clone(), &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&x + &(-&x), Rational::zero());
            if !x.is_zero() {
                prop_assert_eq!(&x * &x.inv().unwrap(), Rational::one());
            }
        }

        #[test]
        fn sign_agrees_with_float(
            a in small_rational(),
            b in small_rational(),
            rho in (0i64..1000, 1i64..1000).prop_map(|(n, d)| Rational::new(n, d)),
        ) {
            let x = QuadExt::new(a, b, rho).unwrap();
            let f = x.to_f64();
            if f.abs() > 1e-6 {
                prop_assert_eq!(x.sign(), if f > 0.0 { 1 } else { -1 });
            }
        }
    }
}
