//! Exact rational scalars and the extended real line.
//!
//! All quantities carried by distributions, intervals and maps are
//! arbitrary-precision rationals. Computations that pass through an
//! irrational quadratic root degrade to an f64 carried by [`Value`], so the
//! exactness of every reported number is tracked explicitly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Exact rational number in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Shorthand constructor from machine integers.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact conversion of a finite f64 (every finite float is a dyadic rational).
pub fn rat_from_f64(x: f64) -> Option<Rational> {
    BigRational::from_f64(x)
}

pub fn rat_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Renders `p/q`, or just `p` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p/q`, integer, or decimal strings (optionally with an exponent).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidRational(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let numer = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let denom = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if denom.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(numer, denom));
    }
    // Decimal form: [sign] digits [. digits] [e|E [sign] digits]
    let (mantissa, exp10) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, i64::from_str(e).map_err(|_| bad())?),
        None => (s, 0i64),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!(
        "{}{}",
        if int_part.is_empty() { "0" } else { int_part },
        frac_part
    );
    let numer = BigInt::from_str(&digits).map_err(|_| bad())?;
    let shift = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        Rational::from_integer(numer * ten.pow(shift as u32))
    } else {
        Rational::new(numer, ten.pow((-shift) as u32))
    })
}

/// The extended real line `R ∪ {−∞, +∞}` with its total order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtReal {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl ExtReal {
    pub fn finite(q: Rational) -> Self {
        ExtReal::Finite(q)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            ExtReal::Finite(q) => Some(q),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(q) => rat_to_f64(q),
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn parse(s: &str) -> Result<ExtReal> {
        match s.trim() {
            "-inf" | "-Inf" | "-INF" => Ok(ExtReal::NegInf),
            "+inf" | "inf" | "Inf" | "INF" | "+Inf" => Ok(ExtReal::PosInf),
            other => Ok(ExtReal::Finite(parse_rational(other)?)),
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(q) => write!(f, "{}", format_rational(q)),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}

/// A computed number that is either exactly rational or approximate.
///
/// Approximation enters only through irrational quadratic roots; the flag
/// propagates so that a result is reported exact only when nothing on its
/// path was rounded.
#[derive(Clone, Debug)]
pub enum Value {
    Exact(Rational),
    Approx(f64),
}

impl Value {
    pub fn zero() -> Self {
        Value::Exact(Rational::zero())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => rat_to_f64(q),
            Value::Approx(x) => *x,
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::Approx(self.to_f64() + other.to_f64()),
        }
    }

    pub fn neg(&self) -> Value {
        match self {
            Value::Exact(q) => Value::Exact(-q),
            Value::Approx(x) => Value::Approx(-x),
        }
    }

    pub fn abs(&self) -> Value {
        match self {
            Value::Exact(q) => Value::Exact(q.abs()),
            Value::Approx(x) => Value::Approx(x.abs()),
        }
    }

    /// Equality of exact values; approximate values compare within `tol`.
    pub fn approx_eq(&self, other: &Value, tol: f64) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= tol,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(q) => write!(f, "{}", format_rational(q)),
            Value::Approx(x) => write!(f, "{:.15}", x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("5").unwrap(), rat_int(5));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("2e3").unwrap(), rat_int(2000));
        assert_eq!(parse_rational("1.5e-1").unwrap(), rat(3, 20));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn arithmetic_is_exact() {
        let p = rat(1, 3);
        let r = rat(2, 7);
        assert_eq!(&(&p + &r) - &r, p);
    }

    #[test]
    fn ext_real_order() {
        assert!(ExtReal::NegInf < ExtReal::finite(rat_int(-1000)));
        assert!(ExtReal::finite(rat_int(1000)) < ExtReal::PosInf);
        assert_eq!(ExtReal::parse("-inf").unwrap(), ExtReal::NegInf);
        assert_eq!(
            ExtReal::parse("1/2").unwrap(),
            ExtReal::finite(rat(1, 2))
        );
    }

    #[test]
    fn format_round_trips() {
        for s in ["3/4", "-5", "0", "22/7"] {
            let q = parse_rational(s).unwrap();
            assert_eq!(format_rational(&q), *s);
        }
    }
}
