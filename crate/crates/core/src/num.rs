//! Non-negative arbitrary-precision rationals.
//!
//! Every correctness-critical quantity in this crate (partition functions,
//! encoding thresholds, potential entries) is carried as an [`ExactNumber`]
//! so that equality checks and floor operations are exact. Values are kept
//! in lowest terms with a positive denominator; negative values are rejected
//! at every construction site.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumError {
    #[error("value must be non-negative, got {0}")]
    Negative(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse `{0}` as a non-negative rational")]
    Parse(String),
}

/// A non-negative rational with arbitrary-precision numerator and denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactNumber(BigRational);

impl ExactNumber {
    pub fn zero() -> Self {
        ExactNumber(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactNumber(BigRational::one())
    }

    pub fn from_u64(n: u64) -> Self {
        ExactNumber(BigRational::from_integer(BigInt::from(n)))
    }

    /// `numer / denom`, both as machine integers. Panics if `denom` is zero.
    pub fn ratio(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "denominator must be nonzero");
        ExactNumber(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_biguint(n: BigUint) -> Self {
        ExactNumber(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn try_from_rational(r: BigRational) -> Result<Self, NumError> {
        if r.is_negative() {
            Err(NumError::Negative(r.to_string()))
        } else {
            Ok(ExactNumber(r))
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigUint {
        self.0
            .floor()
            .to_integer()
            .to_biguint()
            .expect("non-negative invariant")
    }

    /// Multiplicative inverse. Errors on zero.
    pub fn recip(&self) -> Result<Self, NumError> {
        if self.is_zero() {
            Err(NumError::DivisionByZero)
        } else {
            Ok(ExactNumber(self.0.recip()))
        }
    }

    /// Non-negative integer power; `x^0 = 1` including for zero.
    pub fn pow(&self, exp: u32) -> Self {
        if exp == 0 {
            return ExactNumber::one();
        }
        let mut acc = self.clone();
        for _ in 1..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, NumError> {
        if rhs.is_zero() {
            Err(NumError::DivisionByZero)
        } else {
            Ok(ExactNumber(&self.0 / &rhs.0))
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0
            .to_f64()
            .unwrap_or_else(|| self.numer().to_f64().unwrap_or(f64::INFINITY) / self.denom().to_f64().unwrap_or(1.0))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }
}

impl Add for &ExactNumber {
    type Output = ExactNumber;
    fn add(self, rhs: &ExactNumber) -> ExactNumber {
        ExactNumber(&self.0 + &rhs.0)
    }
}

impl Mul for &ExactNumber {
    type Output = ExactNumber;
    fn mul(self, rhs: &ExactNumber) -> ExactNumber {
        ExactNumber(&self.0 * &rhs.0)
    }
}

impl Div for &ExactNumber {
    type Output = ExactNumber;
    fn div(self, rhs: &ExactNumber) -> ExactNumber {
        assert!(!rhs.is_zero(), "division by zero");
        ExactNumber(&self.0 / &rhs.0)
    }
}

impl AddAssign<&ExactNumber> for ExactNumber {
    fn add_assign(&mut self, rhs: &ExactNumber) {
        self.0 += &rhs.0;
    }
}

impl MulAssign<&ExactNumber> for ExactNumber {
    fn mul_assign(&mut self, rhs: &ExactNumber) {
        self.0 *= &rhs.0;
    }
}

impl fmt::Display for ExactNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Accepts `a/b` rationals, plain integers, and decimal literals like `0.25`.
impl FromStr for ExactNumber {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let parse_err = || NumError::Parse(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let numer: BigInt = n.trim().parse().map_err(|_| parse_err())?;
            let denom: BigInt = d.trim().parse().map_err(|_| parse_err())?;
            if denom.is_zero() {
                return Err(NumError::DivisionByZero);
            }
            return Self::try_from_rational(BigRational::new(numer, denom));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let int_part = if int_part.is_empty() { "0" } else { int_part };
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(parse_err());
            }
            let whole: BigInt = int_part.parse().map_err(|_| parse_err())?;
            let frac: BigInt = frac_part.parse().map_err(|_| parse_err())?;
            let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
            let numer = whole * &scale + if s.starts_with('-') { -frac } else { frac };
            return Self::try_from_rational(BigRational::new(numer, scale));
        }
        let n: BigInt = s.parse().map_err(|_| parse_err())?;
        Self::try_from_rational(BigRational::from_integer(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(s: &str) -> ExactNumber {
        s.parse().unwrap()
    }

    #[test]
    fn parse_forms() {
        assert_eq!(x("3"), ExactNumber::from_u64(3));
        assert_eq!(x("6/4"), ExactNumber::ratio(3, 2));
        assert_eq!(x("0.25"), ExactNumber::ratio(1, 4));
        assert_eq!(x("2.5"), ExactNumber::ratio(5, 2));
        assert_eq!(x(" 10/5 "), ExactNumber::from_u64(2));
    }

    #[test]
    fn parse_rejects_negative_and_garbage() {
        assert!(matches!("-1".parse::<ExactNumber>(), Err(NumError::Negative(_))));
        assert!(matches!("-1/2".parse::<ExactNumber>(), Err(NumError::Negative(_))));
        assert!("1/0".parse::<ExactNumber>().is_err());
        assert!("a/b".parse::<ExactNumber>().is_err());
        assert!("1.2.3".parse::<ExactNumber>().is_err());
    }

    #[test]
    fn display_lowest_terms() {
        assert_eq!(x("6/4").to_string(), "3/2");
        assert_eq!(x("8/4").to_string(), "2");
        assert_eq!(ExactNumber::zero().to_string(), "0");
    }

    #[test]
    fn floor_and_pow() {
        assert_eq!(x("25/8").floor(), BigUint::from(3u32));
        assert_eq!(x("7").floor(), BigUint::from(7u32));
        assert_eq!(x("1/2").pow(3), x("1/8"));
        assert_eq!(x("0").pow(0), x("1"));
    }

    #[test]
    fn arithmetic() {
        let a = x("3/4");
        let b = x("1/4");
        assert_eq!(&a + &b, x("1"));
        assert_eq!(&a * &b, x("3/16"));
        assert_eq!(a.checked_div(&b).unwrap(), x("3"));
        assert!(b.checked_div(&ExactNumber::zero()).is_err());
        assert_eq!(x("2/3").recip().unwrap(), x("3/2"));
        assert!(ExactNumber::zero().recip().is_err());
    }
}
