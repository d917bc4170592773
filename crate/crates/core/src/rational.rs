//! Exact rational scalars and their extension by ±∞.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

pub use num_rational::BigRational as Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, a plain integer, or a finite decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ParseRationalError(s.to_string()));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if t.contains('/') || frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRationalError(s.to_string()));
        }
        let neg = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| ParseRationalError(s.to_string()))?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_part = BigInt::from_str(frac).map_err(|_| ParseRationalError(s.to_string()))?;
        let magnitude = int_part.abs() * &scale + frac_part;
        let num = if neg { -magnitude } else { magnitude };
        return Ok(Rational::new(num, scale));
    }
    let r = Rational::from_str(t).map_err(|_| ParseRationalError(s.to_string()))?;
    Ok(r)
}

/// Renders as `"p"` or `"p/q"`; the output always parses back with [`parse_rational`].
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// A rational number or one of the two infinities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtRational {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl ExtRational {
    pub fn zero() -> Self {
        ExtRational::Finite(Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtRational::Finite(r) if r.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            _ => None,
        }
    }

    /// `self + other`; `+∞ + −∞` has no value and yields `None`.
    pub fn checked_add(&self, other: &ExtRational) -> Option<ExtRational> {
        use ExtRational::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Some(Finite(a + b)),
            (PosInf, NegInf) | (NegInf, PosInf) => None,
            (PosInf, _) | (_, PosInf) => Some(PosInf),
            (NegInf, _) | (_, NegInf) => Some(NegInf),
        }
    }

    /// Scales by a finite rational. `0 · ±∞` is taken to be 0.
    pub fn scale(&self, k: &Rational) -> ExtRational {
        use ExtRational::*;
        match self {
            Finite(a) => Finite(a * k),
            _ if k.is_zero() => ExtRational::zero(),
            PosInf if k.is_positive() => PosInf,
            PosInf => NegInf,
            NegInf if k.is_positive() => NegInf,
            NegInf => PosInf,
        }
    }

    /// Quotient with `a/0 = ±∞` by the sign of `a`. `0/0` and `∞/∞` have no value.
    pub fn checked_div(&self, other: &ExtRational) -> Option<ExtRational> {
        use ExtRational::*;
        match (self, other) {
            (Finite(a), Finite(b)) if b.is_zero() => {
                if a.is_zero() {
                    None
                } else if a.is_positive() {
                    Some(PosInf)
                } else {
                    Some(NegInf)
                }
            }
            (Finite(a), Finite(b)) => Some(Finite(a / b)),
            (Finite(_), _) => Some(ExtRational::zero()),
            (_, Finite(b)) => Some(self.scale(&b.signum())),
            _ => None,
        }
    }
}

impl From<Rational> for ExtRational {
    fn from(r: Rational) -> Self {
        ExtRational::Finite(r)
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtRational::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (PosInf, _) | (_, NegInf) => Ordering::Greater,
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::NegInf => f.write_str("-inf"),
            ExtRational::PosInf => f.write_str("inf"),
            ExtRational::Finite(r) => f.write_str(&format_rational(r)),
        }
    }
}
