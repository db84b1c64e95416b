//! Exact rational arithmetic for costs and flows.
//!
//! Every cost and flow quantity in the crate is a [`Rational`]; linear costs
//! may additionally be [`Cost::Infinite`], which marks a forbidden edge.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Builds `num/den` in canonical form. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_u64(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q` or a plain integer. Rejects zero denominators and decimals.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p).ok()?;
            let q = BigInt::from_str(q).ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => BigInt::from_str(s).ok().map(Rational::from_integer),
    }
}

/// Formats as `p/q`, or as a bare integer when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Converts an exact integer-valued rational to `u64`, if it is one.
pub fn to_u64(r: &Rational) -> Option<u64> {
    if !r.is_integer() || r.is_negative() {
        return None;
    }
    u64::try_from(r.to_integer()).ok()
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// A nonnegative rational cost, or `Infinite` for a forbidden edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cost {
    Finite(Rational),
    Infinite,
}

impl Cost {
    pub fn zero() -> Self {
        Cost::Finite(Rational::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Cost::Infinite)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Cost::Finite(r) => Some(r),
            Cost::Infinite => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Cost::Finite(r) if r.is_zero())
    }
}

impl From<Rational> for Cost {
    fn from(r: Rational) -> Self {
        Cost::Finite(r)
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a.cmp(b),
            (Cost::Finite(_), Cost::Infinite) => Ordering::Less,
            (Cost::Infinite, Cost::Finite(_)) => Ordering::Greater,
            (Cost::Infinite, Cost::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(r) => write!(f, "{r}"),
            Cost::Infinite => f.write_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/5"), Some(ratio(6, 5)));
        assert_eq!(parse_rational("12/10"), Some(ratio(6, 5)));
        assert_eq!(parse_rational("-3"), Some(int(-3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("0.5"), None);
        assert_eq!(parse_rational(""), None);
        assert_eq!(format_rational(&ratio(4, 2)), "2");
        assert_eq!(format_rational(&ratio(-7, 14)), "-1/2");
    }

    #[test]
    fn infinity_orders_last() {
        assert!(Cost::Infinite > Cost::Finite(int(1_000_000)));
        assert!(Cost::zero() < Cost::Finite(ratio(1, 3)));
        assert_eq!(Cost::Infinite.to_string(), "inf");
    }

    #[test]
    fn lcm_of_denominators() {
        let v = [ratio(1, 4), ratio(5, 6), int(3)];
        assert_eq!(common_denominator(&v), BigInt::from(12));
    }
}
