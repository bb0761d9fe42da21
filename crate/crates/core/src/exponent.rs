//! Lebesgue exponents `p ∈ [1, ∞]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, FhcError, Result};

/// An exponent `p ∈ [1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return invalid(format!("exponent must lie in [1, inf], got {p}"));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// `p` as a float, `f64::INFINITY` for `p = ∞`.
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// The conjugate exponent `p'` with `1/p + 1/p' = 1`.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Infinity => 0.0,
            Exponent::Finite(p) => 1.0 / p,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinity => f.write_str("inf"),
            Exponent::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Exponent {
    type Err = FhcError;

    /// Accepts `inf`, `∞`, decimals and simple fractions such as `3/2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "Inf" | "∞") {
            return Ok(Exponent::Infinity);
        }
        let value = match s.split_once('/') {
            Some((num, den)) => {
                let num: f64 = num.trim().parse().map_err(|_| bad(s))?;
                let den: f64 = den.trim().parse().map_err(|_| bad(s))?;
                num / den
            }
            None => s.parse().map_err(|_| bad(s))?,
        };
        Exponent::finite(value)
    }
}

fn bad(s: &str) -> FhcError {
    FhcError::InvalidArgument(format!("cannot parse exponent {s:?}"))
}

impl TryFrom<String> for Exponent {
    type Error = FhcError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Exponent> for String {
    fn from(p: Exponent) -> String {
        p.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("3/2".parse::<Exponent>().unwrap(), Exponent::Finite(1.5));
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::Finite(2.0));
        assert!("0.5".parse::<Exponent>().is_err());
        assert!("x".parse::<Exponent>().is_err());
    }

    #[test]
    fn conjugates() {
        assert_eq!(Exponent::Infinity.conjugate(), Exponent::Finite(1.0));
        assert_eq!(Exponent::Finite(1.0).conjugate(), Exponent::Infinity);
        assert_eq!(Exponent::Finite(1.5).conjugate(), Exponent::Finite(3.0));
        assert_eq!(Exponent::Finite(2.0).conjugate(), Exponent::Finite(2.0));
    }
}
