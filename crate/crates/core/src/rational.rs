//! Exact rational scalars and their canonical text form.
//!
//! Everything in this crate is computed over `Ratio<i128>`. The text form is
//! `p/q` with `q > 0` and `gcd(p, q) = 1`, or just `p` when `q = 1`; it is the
//! only numeric representation that ever reaches JSON output.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = Ratio<i128>;

/// `n / d`, reduced.
pub fn rat(n: i128, d: i128) -> Rational {
    Ratio::new(n, d)
}

pub fn int(n: i128) -> Rational {
    Ratio::from_integer(n)
}

pub fn is_integer(x: &Rational) -> bool {
    x.is_integer()
}

/// Integer value of `x` if it has denominator one.
pub fn as_integer(x: &Rational) -> Option<i128> {
    x.is_integer().then(|| x.to_integer())
}

pub fn floor_int(x: &Rational) -> i128 {
    x.floor().to_integer()
}

pub fn ceil_int(x: &Rational) -> i128 {
    x.ceil().to_integer()
}

pub fn sign(x: &Rational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let invalid = || ParseRationalError::Invalid(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: i128 = num.parse().map_err(|_| invalid())?;
    let d: i128 = den.parse().map_err(|_| invalid())?;
    if d.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(s.to_string()));
    }
    Ok(Ratio::new(n, d))
}

/// Canonical `p/q` text of a rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalText(pub Rational);

impl fmt::Display for RationalText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.0;
        if x.denom().is_one() {
            write!(f, "{}", x.numer())
        } else {
            write!(f, "{}/{}", x.numer(), x.denom())
        }
    }
}

impl FromStr for RationalText {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational(s).map(RationalText)
    }
}

impl Serialize for RationalText {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RationalText {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for the canonical text of a rational.
pub fn text(x: &Rational) -> String {
    RationalText(*x).to_string()
}

/// Greatest common divisor of two integers given as rationals; `None` if either is not integral.
pub fn integer_gcd(x: &Rational, y: &Rational) -> Option<i128> {
    Some(as_integer(x)?.gcd(&as_integer(y)?))
}
