//! Extended positive exponents with exact rational arithmetic where possible.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A value in `(0, ∞]`.
///
/// Rational inputs stay exact so that comparisons such as `p = q` or `r = 1`
/// are decided without rounding; other finite values are carried as `f64`.
#[derive(Clone, Debug)]
pub enum Exponent {
    Rational(BigRational),
    Real(f64),
    Infinity,
}

impl Exponent {
    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidInput("exponent with zero denominator".into()));
        }
        let r = BigRational::new(BigInt::from(num), BigInt::from(den));
        Self::from_rational(r)
    }

    pub fn int(n: i64) -> Self {
        Self::ratio(n, 1).expect("integer exponent must be positive")
    }

    pub fn from_rational(r: BigRational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::InvalidInput(format!("exponent {r} is not positive")));
        }
        Ok(Exponent::Rational(r))
    }

    /// Finite positive reals become `Real`, `+∞` becomes `Infinity`.
    pub fn real(x: f64) -> Result<Self> {
        if x == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if x.is_finite() && x > 0.0 {
            Ok(Exponent::Real(x))
        } else {
            Err(Error::InvalidInput(format!("exponent {x} is not in (0, inf]")))
        }
    }

    pub fn infinity() -> Self {
        Exponent::Infinity
    }

    pub fn one() -> Self {
        Exponent::Rational(BigRational::one())
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Exponent::Infinity)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn is_one(&self) -> bool {
        match self {
            Exponent::Rational(r) => r.is_one(),
            Exponent::Real(x) => *x == 1.0,
            Exponent::Infinity => false,
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Exponent::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Exponent::Real(x) => *x,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// `1/p` as a float; `0` for `p = ∞`.
    pub fn recip(&self) -> f64 {
        match self {
            Exponent::Rational(r) => r.recip().to_f64().unwrap_or(f64::NAN),
            Exponent::Real(x) => 1.0 / x,
            Exponent::Infinity => 0.0,
        }
    }

    /// `1/p` exactly, when `p` is rational or infinite.
    pub fn recip_exact(&self) -> Option<BigRational> {
        match self {
            Exponent::Rational(r) => Some(r.recip()),
            Exponent::Real(_) => None,
            Exponent::Infinity => Some(BigRational::zero()),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Exponent::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Builds an exponent from its reciprocal: `0 ↦ ∞`.
    fn from_recip_rational(r: BigRational) -> Self {
        if r.is_zero() {
            Exponent::Infinity
        } else {
            Exponent::Rational(r.recip())
        }
    }

    fn from_recip_f64(r: f64) -> Self {
        if r == 0.0 {
            Exponent::Infinity
        } else {
            Exponent::Real(1.0 / r)
        }
    }

    /// `self / other`, with `∞ / finite = ∞`. Dividing by `∞` is rejected.
    pub fn div(&self, other: &Exponent) -> Result<Exponent> {
        match (self, other) {
            (_, Exponent::Infinity) => Err(Error::InvalidInput("division by an infinite exponent".into())),
            (Exponent::Infinity, _) => Ok(Exponent::Infinity),
            (Exponent::Rational(a), Exponent::Rational(b)) => Ok(Exponent::Rational(a / b)),
            (a, b) => Exponent::real(a.value() / b.value()),
        }
    }

    fn cmp_exp(&self, other: &Exponent) -> Ordering {
        match (self, other) {
            (Exponent::Infinity, Exponent::Infinity) => Ordering::Equal,
            (Exponent::Infinity, _) => Ordering::Greater,
            (_, Exponent::Infinity) => Ordering::Less,
            (Exponent::Rational(a), Exponent::Rational(b)) => a.cmp(b),
            (a, b) => a.value().partial_cmp(&b.value()).unwrap_or(Ordering::Equal),
        }
    }

    pub fn min<'a>(&'a self, other: &'a Exponent) -> &'a Exponent {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_exp(other) == Ordering::Equal
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_exp(other))
    }
}

impl From<i64> for Exponent {
    fn from(n: i64) -> Self {
        Exponent::int(n)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Exponent::Real(x) => write!(f, "{x}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// The conjugate exponent: `p/(1-p)` below 1, `∞` at 1, `p/(p-1)` above 1,
/// and `1` at `∞`.
pub fn dual_exponent(p: &Exponent) -> Exponent {
    match p {
        Exponent::Infinity => Exponent::one(),
        Exponent::Rational(r) => {
            let one = BigRational::one();
            match r.cmp(&one) {
                Ordering::Equal => Exponent::Infinity,
                Ordering::Less => Exponent::Rational(r / (&one - r)),
                Ordering::Greater => Exponent::Rational(r / (r - &one)),
            }
        }
        Exponent::Real(x) => {
            let x = *x;
            if x == 1.0 {
                Exponent::Infinity
            } else if x < 1.0 {
                Exponent::Real(x / (1.0 - x))
            } else {
                Exponent::Real(x / (x - 1.0))
            }
        }
    }
}

/// `p → q`: `1/(p→q) = 1/q - 1/p` when `q < p`, and `∞` when `q ≥ p`.
pub fn arrow(p: &Exponent, q: &Exponent) -> Exponent {
    if q >= p {
        return Exponent::Infinity;
    }
    match (p.recip_exact(), q.recip_exact()) {
        (Some(rp), Some(rq)) => Exponent::from_recip_rational(rq - rp),
        _ => Exponent::from_recip_f64(q.recip() - p.recip()),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RatioRecord {
    num: i64,
    den: i64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ExponentRecord {
    Ratio(RatioRecord),
    Text(String),
    Number(f64),
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Rational(r) => match (r.numer().to_i64(), r.denom().to_i64()) {
                (Some(num), Some(den)) => RatioRecord { num, den }.serialize(s),
                _ => s.serialize_str(&self.to_string()),
            },
            Exponent::Real(x) => s.serialize_f64(*x),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rec = ExponentRecord::deserialize(d)?;
        let out = match rec {
            ExponentRecord::Ratio(RatioRecord { num, den }) => Exponent::ratio(num, den),
            ExponentRecord::Text(t) => parse_exponent(&t),
            ExponentRecord::Number(x) => {
                if x.fract() == 0.0 && x.abs() < 1e15 {
                    Exponent::ratio(x as i64, 1)
                } else {
                    Exponent::real(x)
                }
            }
        };
        out.map_err(D::Error::custom)
    }
}

/// Parses `"inf"`, `"3"`, `"1/2"` or a decimal.
pub fn parse_exponent(text: &str) -> Result<Exponent> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("inf") || t == "∞" {
        return Ok(Exponent::Infinity);
    }
    if let Some((a, b)) = t.split_once('/') {
        let num: i64 = a.trim().parse().map_err(|_| Error::InvalidInput(format!("bad exponent '{text}'")))?;
        let den: i64 = b.trim().parse().map_err(|_| Error::InvalidInput(format!("bad exponent '{text}'")))?;
        return Exponent::ratio(num, den);
    }
    if let Ok(n) = t.parse::<i64>() {
        return Exponent::ratio(n, 1);
    }
    let x: f64 = t.parse().map_err(|_| Error::InvalidInput(format!("bad exponent '{text}'")))?;
    Exponent::real(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Exponent {
        Exponent::ratio(n, d).unwrap()
    }

    #[test]
    fn dual_table() {
        assert_eq!(dual_exponent(&q(2, 1)), q(2, 1));
        assert!(dual_exponent(&q(1, 1)).is_infinite());
        assert_eq!(dual_exponent(&q(1, 2)), q(1, 1));
        assert_eq!(dual_exponent(&Exponent::Infinity), q(1, 1));
        assert_eq!(dual_exponent(&q(3, 1)), q(3, 2));
    }

    #[test]
    fn arrow_examples() {
        assert_eq!(arrow(&q(2, 1), &q(1, 1)), q(2, 1));
        assert!(arrow(&q(1, 1), &q(2, 1)).is_infinite());
        assert_eq!(arrow(&q(3, 1), &q(1, 1)), q(3, 2));
        assert!(arrow(&q(2, 1), &q(2, 1)).is_infinite());
        assert_eq!(arrow(&Exponent::Infinity, &q(2, 1)), q(2, 1));
    }

    #[test]
    fn real_and_rational_compare() {
        assert!(Exponent::Real(0.5) == q(1, 2));
        assert!(Exponent::Real(0.4) < q(1, 2));
        assert!(q(7, 1) < Exponent::Infinity);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_exponent("1/2").unwrap(), q(1, 2));
        assert!(parse_exponent("inf").unwrap().is_infinite());
        assert_eq!(parse_exponent("0.25").unwrap(), q(1, 4));
        assert!(parse_exponent("-1").is_err());
    }

    #[test]
    fn serde_round_trip() {
        let e: Exponent = serde_json::from_str(r#"{"num":1,"den":2}"#).unwrap();
        assert_eq!(e, q(1, 2));
        let e: Exponent = serde_json::from_str(r#""inf""#).unwrap();
        assert!(e.is_infinite());
        assert_eq!(serde_json::to_string(&q(3, 4)).unwrap(), r#"{"num":3,"den":4}"#);
        assert!(serde_json::from_str::<Exponent>(r#"{"num":1,"den":2,"x":1}"#).is_err());
    }
}
