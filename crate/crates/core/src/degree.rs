//! Exact truth degrees in the unit interval.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Maximum number of fractional digits accepted (and emitted) in decimal form.
pub const MAX_FRACTION_DIGITS: usize = 9;

/// A truth degree: an exact rational number in `[0, 1]`.
///
/// All comparisons are exact. Degrees are written either as decimals with at
/// most nine fractional digits (`0.6`, `1`) or as fractions (`2/3`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Degree(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DegreeError {
    #[error("malformed degree `{0}`")]
    Malformed(String),
    #[error("degree `{0}` has more than {MAX_FRACTION_DIGITS} fractional digits")]
    TooPrecise(String),
    #[error("degree `{0}` lies outside [0, 1]")]
    OutOfRange(String),
}

impl Degree {
    pub fn zero() -> Self {
        Degree(BigRational::zero())
    }

    pub fn one() -> Self {
        Degree(BigRational::one())
    }

    /// Builds `numer / denom`, rejecting values outside the unit interval.
    pub fn from_ratio(numer: i64, denom: i64) -> Result<Self, DegreeError> {
        if denom == 0 {
            return Err(DegreeError::Malformed(format!("{numer}/{denom}")));
        }
        Self::from_rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_rational(value: BigRational) -> Result<Self, DegreeError> {
        if value.is_negative() || value > BigRational::one() {
            return Err(DegreeError::OutOfRange(value.to_string()));
        }
        Ok(Degree(value))
    }

    /// Clamps an arbitrary rational into `[0, 1]`.
    pub(crate) fn clamped(value: BigRational) -> Self {
        if value.is_negative() {
            Degree::zero()
        } else if value > BigRational::one() {
            Degree::one()
        } else {
            Degree(value)
        }
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Lossy conversion for display or plotting only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering if the value terminates within nine digits.
    fn decimal_string(&self) -> Option<String> {
        let denom = self.0.denom();
        let mut reduced = denom.clone();
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        let mut twos = 0usize;
        let mut fives = 0usize;
        while reduced.is_multiple_of(&two) {
            reduced /= &two;
            twos += 1;
        }
        while reduced.is_multiple_of(&five) {
            reduced /= &five;
            fives += 1;
        }
        if !reduced.is_one() {
            return None;
        }
        let digits = twos.max(fives);
        if digits > MAX_FRACTION_DIGITS {
            return None;
        }
        let scale = num_traits::pow(BigInt::from(10), digits);
        let scaled = self.0.numer() * &scale / denom;
        let (int_part, frac_part) = scaled.div_rem(&scale);
        if digits == 0 {
            return Some(int_part.to_string());
        }
        let frac = format!("{:0>width$}", frac_part.to_string(), width = digits);
        Some(format!("{int_part}.{frac}"))
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.decimal_string() {
            Some(s) => f.write_str(&s),
            None => write!(f, "{}/{}", self.0.numer(), self.0.denom()),
        }
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
        let text = s.trim();
        let malformed = || DegreeError::Malformed(text.to_string());
        if text.is_empty() {
            return Err(malformed());
        }
        let value = if let Some((n, d)) = text.split_once('/') {
            if !is_digits(n) || !is_digits(d) {
                return Err(malformed());
            }
            let n: BigInt = n.parse().map_err(|_| malformed())?;
            let d: BigInt = d.parse().map_err(|_| malformed())?;
            if d.is_zero() {
                return Err(malformed());
            }
            BigRational::new(n, d)
        } else {
            let (int_part, frac_part) = match text.split_once('.') {
                Some((i, f)) => (i, f),
                None => (text, ""),
            };
            if !is_digits(int_part) || (text.contains('.') && !is_digits(frac_part)) {
                return Err(malformed());
            }
            if frac_part.len() > MAX_FRACTION_DIGITS {
                return Err(DegreeError::TooPrecise(text.to_string()));
            }
            let digits = format!("{int_part}{frac_part}");
            let numer: BigInt = digits.parse().map_err(|_| malformed())?;
            let denom = num_traits::pow(BigInt::from(10), frac_part.len());
            BigRational::new(numer, denom)
        };
        if value > BigRational::one() {
            return Err(DegreeError::OutOfRange(text.to_string()));
        }
        Ok(Degree(value))
    }
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Shorthand used throughout tests and examples: `deg("0.6")`.
///
/// Panics on malformed input; meant for literals only.
pub fn deg(text: &str) -> Degree {
    text.parse().unwrap_or_else(|e| panic!("invalid degree literal {text:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(deg("0.6"), Degree::from_ratio(3, 5).unwrap());
        assert_eq!(deg("2/3"), Degree::from_ratio(2, 3).unwrap());
        assert_eq!(deg("1"), Degree::one());
        assert_eq!(deg("0"), Degree::zero());
        assert_eq!(deg("1.000"), Degree::one());
    }

    #[test]
    fn rejects_bad_degrees() {
        assert!(matches!("1.5".parse::<Degree>(), Err(DegreeError::OutOfRange(_))));
        assert!(matches!("4/3".parse::<Degree>(), Err(DegreeError::OutOfRange(_))));
        assert!(matches!("-0.1".parse::<Degree>(), Err(DegreeError::Malformed(_))));
        assert!(matches!("0.1234567891".parse::<Degree>(), Err(DegreeError::TooPrecise(_))));
        assert!("1/0".parse::<Degree>().is_err());
        assert!(".5".parse::<Degree>().is_err());
        assert!("abc".parse::<Degree>().is_err());
    }

    #[test]
    fn display_format_rule() {
        assert_eq!(deg("0.6").to_string(), "0.6");
        assert_eq!(deg("2/3").to_string(), "2/3");
        assert_eq!(deg("4/8").to_string(), "0.5");
        assert_eq!(deg("0.81").to_string(), "0.81");
        assert_eq!(Degree::one().to_string(), "1");
        assert_eq!(Degree::zero().to_string(), "0");
        assert_eq!(deg("0.05").to_string(), "0.05");
        // 1/1024 needs ten digits, so it stays a fraction
        assert_eq!(deg("1/1024").to_string(), "1/1024");
    }

    #[test]
    fn ordering_is_exact() {
        assert!(deg("1/3") < deg("0.333333334"));
        assert!(deg("1/3") > deg("0.333333333"));
    }
}
