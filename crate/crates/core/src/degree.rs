//! Exact truth degrees in `[0, 1]`.
//!
//! Degrees are rationals backed by arbitrary precision integers, so that
//! complements, minima and maxima never round and strict/non-strict
//! comparisons stay exact.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegreeError {
    #[error("degree {0} is outside [0, 1]")]
    OutOfRange(String),
    #[error("malformed degree literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// A truth degree: an exact rational in `[0, 1]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Degree(BigRational);

impl Degree {
    pub fn zero() -> Self {
        Degree(BigRational::zero())
    }

    pub fn one() -> Self {
        Degree(BigRational::one())
    }

    pub fn half() -> Self {
        Self::ratio(1, 2)
    }

    /// Builds `numer / denom`.
    ///
    /// Panics if the value is outside `[0, 1]` or `denom` is zero; use
    /// [`Degree::try_from_ratio`] for unchecked input.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Self::try_from_ratio(BigRational::new(numer.into(), denom.into()))
            .expect("degree literal outside [0, 1]")
    }

    pub fn try_from_ratio(value: BigRational) -> Result<Self, DegreeError> {
        if value.is_negative() || value > BigRational::one() {
            return Err(DegreeError::OutOfRange(format_rational(&value)));
        }
        Ok(Degree(value))
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// `1 - self`.
    pub fn complement(&self) -> Self {
        Degree(BigRational::one() - &self.0)
    }

    /// Arithmetic mean of two degrees.
    pub fn midpoint(&self, other: &Degree) -> Self {
        Degree((&self.0 + &other.0) / BigRational::from_integer(BigInt::from(2)))
    }

    /// `self + delta`, which must stay within `[0, 1]`.
    pub fn checked_add(&self, delta: &BigRational) -> Option<Self> {
        Self::try_from_ratio(&self.0 + delta).ok()
    }

    /// `self - delta`, which must stay within `[0, 1]`.
    pub fn checked_sub(&self, delta: &BigRational) -> Option<Self> {
        Self::try_from_ratio(&self.0 - delta).ok()
    }

    /// Renders the degree as a `p/q` fraction (`0` and `1` stay bare).
    pub fn to_fraction_string(&self) -> String {
        if self.0.is_integer() {
            self.0.numer().to_string()
        } else {
            format!("{}/{}", self.0.numer(), self.0.denom())
        }
    }

    /// Parses a decimal (`0.75`, `1`, `1.0`) or fraction (`3/4`) literal.
    pub fn parse(text: &str) -> Result<Self, DegreeError> {
        Self::try_from_ratio(parse_rational(text)?)
    }
}

fn parse_rational(text: &str) -> Result<BigRational, DegreeError> {
    let malformed = || DegreeError::Malformed(text.to_string());
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if let Some((numer, denom)) = text.split_once('/') {
        if !digits(numer) || !digits(denom) {
            return Err(malformed());
        }
        let numer = BigInt::from_str(numer).map_err(|_| malformed())?;
        let denom = BigInt::from_str(denom).map_err(|_| malformed())?;
        if denom.is_zero() {
            return Err(DegreeError::ZeroDenominator(text.to_string()));
        }
        return Ok(BigRational::new(numer, denom));
    }
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if !digits(int_part) || !(frac_part.is_empty() || digits(frac_part)) {
        return Err(malformed());
    }
    if text.ends_with('.') {
        return Err(malformed());
    }
    let numer = BigInt::from_str(&format!("{int_part}{frac_part}")).map_err(|_| malformed())?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    Ok(BigRational::new(numer, denom))
}

/// Exact decimal expansion when the denominator only has factors 2 and 5,
/// otherwise `p/q`.
fn format_rational(value: &BigRational) -> String {
    if value.is_integer() {
        return value.numer().to_string();
    }
    let mut denom = value.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&denom % &two).is_zero() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    if !denom.is_one() {
        return format!("{}/{}", value.numer(), value.denom());
    }
    let places = twos.max(fives);
    let scaled = value * BigRational::from_integer(num_traits::pow(BigInt::from(10), places));
    let scaled = scaled.to_integer();
    let negative = scaled.is_negative();
    let mut digits = scaled.abs().to_string();
    if digits.len() <= places {
        digits = format!("{}{}", "0".repeat(places + 1 - digits.len()), digits);
    }
    let split = digits.len() - places;
    let mut out = format!("{}.{}", &digits[..split], &digits[split..]);
    while out.ends_with('0') {
        out.pop();
    }
    if negative {
        out.insert(0, '-');
    }
    out
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl fmt::Debug for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Degree({self})")
    }
}

impl FromStr for Degree {
    type Err = DegreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Degree::parse(s)
    }
}

impl serde::Serialize for Degree {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_fraction_string())
    }
}

impl<'de> serde::Deserialize<'de> for Degree {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = <String as serde::Deserialize>::deserialize(deserializer)?;
        Degree::parse(&text).map_err(serde::de::Error::custom)
    }
}
