//! Config records for function families.

use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Interval, RealFun, Table};
use crate::error::{Error, Result};

/// A nonnegative extended real; `"inf"` in JSON for `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtReal(pub f64);

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(ExtReal(x)),
            Raw::Text(t) if t.eq_ignore_ascii_case("inf") => Ok(ExtReal(f64::INFINITY)),
            Raw::Text(t) => Err(D::Error::custom(format!("expected a number or \"inf\", got \"{t}\""))),
        }
    }
}

/// Function-family record, e.g. `{"family":"power","c":1,"alpha":-0.5}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunSpec {
    /// The zero function.
    Zero,
    Power {
        c: f64,
        alpha: f64,
    },
    Powerlog {
        c: f64,
        alpha: f64,
        beta: f64,
    },
    Exp {
        c: f64,
        #[serde(default)]
        alpha: f64,
        gamma: f64,
    },
    Indicator {
        lo: ExtReal,
        hi: ExtReal,
    },
    Table {
        log_t: Vec<f64>,
        values: Vec<f64>,
    },
    Product {
        parts: Vec<FunSpec>,
    },
    Sum {
        parts: Vec<FunSpec>,
    },
    Powerof {
        parts: Vec<FunSpec>,
        exponent: f64,
    },
}

impl FunSpec {
    /// Builds the function, validating family parameters.
    pub fn build(&self) -> Result<RealFun> {
        let finite = |name: &str, x: f64| -> Result<()> {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{name} must be finite")))
            }
        };
        let positive = |x: f64| -> Result<()> {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("coefficient c = {x} must be positive")))
            }
        };
        match self {
            FunSpec::Zero => Ok(RealFun::zero()),
            FunSpec::Power { c, alpha } => {
                positive(*c)?;
                finite("alpha", *alpha)?;
                Ok(RealFun::power(*c, *alpha))
            }
            FunSpec::Powerlog { c, alpha, beta } => {
                positive(*c)?;
                finite("alpha", *alpha)?;
                finite("beta", *beta)?;
                Ok(RealFun::powerlog(*c, *alpha, *beta))
            }
            FunSpec::Exp { c, alpha, gamma } => {
                positive(*c)?;
                finite("alpha", *alpha)?;
                finite("gamma", *gamma)?;
                Ok(RealFun::exp_family(*c, *alpha, *gamma))
            }
            FunSpec::Indicator { lo, hi } => RealFun::indicator(lo.0, hi.0),
            FunSpec::Table { log_t, values } => RealFun::table(log_t.clone(), values.clone()),
            FunSpec::Product { parts } => {
                if parts.is_empty() {
                    return Err(Error::InvalidInput("product needs at least one part".into()));
                }
                Ok(RealFun::product(parts.iter().map(|p| p.build()).collect::<Result<_>>()?))
            }
            FunSpec::Sum { parts } => {
                if parts.is_empty() {
                    return Err(Error::InvalidInput("sum needs at least one part".into()));
                }
                Ok(RealFun::sum(parts.iter().map(|p| p.build()).collect::<Result<_>>()?))
            }
            FunSpec::Powerof { parts, exponent } => {
                if parts.len() != 1 {
                    return Err(Error::InvalidInput("powerof takes exactly one part".into()));
                }
                finite("exponent", *exponent)?;
                Ok(parts[0].build()?.powf(*exponent))
            }
        }
    }
}

pub(super) fn to_spec(f: &RealFun) -> Option<FunSpec> {
    Some(match f {
        RealFun::Power { c, .. } if *c == 0.0 => FunSpec::Zero,
        RealFun::Power { c, alpha } => FunSpec::Power { c: *c, alpha: *alpha },
        RealFun::PowerLog { c, alpha, beta } => FunSpec::Powerlog { c: *c, alpha: *alpha, beta: *beta },
        RealFun::Exp { c, alpha, gamma } => FunSpec::Exp { c: *c, alpha: *alpha, gamma: *gamma },
        RealFun::Indicator(Interval { lo, hi }) => FunSpec::Indicator { lo: ExtReal(*lo), hi: ExtReal(*hi) },
        RealFun::Table(tab) => table_spec(tab),
        RealFun::Product(parts) => FunSpec::Product { parts: parts.iter().map(to_spec).collect::<Option<_>>()? },
        RealFun::Sum(parts) => FunSpec::Sum { parts: parts.iter().map(to_spec).collect::<Option<_>>()? },
        RealFun::PowerOf(inner, e) => FunSpec::Powerof { parts: vec![to_spec(inner)?], exponent: *e },
        RealFun::Labeled(_, inner) => to_spec(inner)?,
        RealFun::Node(_) => return None,
    })
}

fn table_spec(tab: &Arc<Table>) -> FunSpec {
    FunSpec::Table { log_t: tab.points().to_vec(), values: tab.values() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_records() {
        let f: FunSpec = serde_json::from_str(r#"{"family":"power","c":1,"alpha":-0.5}"#).unwrap();
        assert_eq!(f, FunSpec::Power { c: 1.0, alpha: -0.5 });
        let g: FunSpec = serde_json::from_str(r#"{"family":"indicator","lo":1,"hi":"inf"}"#).unwrap();
        assert!(g.build().unwrap().eval(5.0) == 1.0);
        let h: FunSpec = serde_json::from_str(
            r#"{"family":"product","parts":[{"family":"exp","c":1,"alpha":0,"gamma":-1},{"family":"powerof","parts":[{"family":"power","c":4,"alpha":2}],"exponent":0.5}]}"#,
        )
        .unwrap();
        let f = h.build().unwrap();
        assert!((f.eval(3.0) - 6.0 * (-3f64).exp()).abs() < 1e-14);
        let z: FunSpec = serde_json::from_str(r#"{"family":"zero"}"#).unwrap();
        assert!(z.build().unwrap().is_zero());
        assert_eq!(RealFun::zero().to_spec(), Some(FunSpec::Zero));
    }

    #[test]
    fn rejects_unknown_fields_and_bad_values() {
        assert!(serde_json::from_str::<FunSpec>(r#"{"family":"power","c":1,"alpha":0,"beta":2}"#).is_err());
        assert!(serde_json::from_str::<FunSpec>(r#"{"family":"cosine","c":1}"#).is_err());
        let bad: FunSpec = serde_json::from_str(r#"{"family":"power","c":-1,"alpha":0}"#).unwrap();
        assert!(bad.build().is_err());
    }

    #[test]
    fn round_trip() {
        let f = RealFun::product(vec![RealFun::power(2.0, 1.0), RealFun::indicator(1.0, 3.0).unwrap()]);
        let s = f.to_spec().unwrap();
        let g = s.build().unwrap();
        assert_eq!(f.eval(2.0), g.eval(2.0));
    }
}
