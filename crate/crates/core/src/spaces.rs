//! Cesàro and Copson quasi-norms with two or three nested levels.
//!
//! `Ces_{p,q}(u, v)`: `‖ ‖f‖_{p,v,(0,t)} ‖_{q,u,(0,∞)}`; `Cop` uses `(t, ∞)`
//! for the inner norm. The three-parameter spaces nest one level deeper with
//! weights listed outermost first: `Ces_{p,q,r}(u, v, w)` is
//! `‖ ‖ ‖f‖_{p,w,(0,·)} ‖_{q,v,(0,·)} ‖_{r,u,(0,∞)}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::Exponent;
use crate::realfun::logmath::{ln_pow, NEG_INF};
use crate::realfun::{FunSpec, Grid, QuadratureConfig, RealFun, Sampled};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Ces,
    Cop,
}

/// Space descriptor. `exponents` are innermost first, `weights` outermost first.
#[derive(Clone, Debug, Deserialize)]
#[serde(try_from = "SpaceRecord")]
pub struct SpaceSpec {
    pub kind: SpaceKind,
    pub exponents: Vec<Exponent>,
    pub weights: Vec<RealFun>,
}

impl SpaceSpec {
    pub fn new(kind: SpaceKind, exponents: Vec<Exponent>, weights: Vec<RealFun>) -> Result<Self> {
        if exponents.len() != weights.len() || !(2..=3).contains(&exponents.len()) {
            return Err(Error::SpecInvalid(format!(
                "a space needs 2 or 3 exponents and as many weights, got {} and {}",
                exponents.len(),
                weights.len()
            )));
        }
        Ok(SpaceSpec { kind, exponents, weights })
    }

    /// `Ces_{p,q}(u, v)`.
    pub fn ces(p: Exponent, q: Exponent, u: RealFun, v: RealFun) -> Self {
        SpaceSpec { kind: SpaceKind::Ces, exponents: vec![p, q], weights: vec![u, v] }
    }

    /// `Cop_{p,q}(u, v)`.
    pub fn cop(p: Exponent, q: Exponent, u: RealFun, v: RealFun) -> Self {
        SpaceSpec { kind: SpaceKind::Cop, exponents: vec![p, q], weights: vec![u, v] }
    }

    /// `Ces_{p,q,r}(u, v, w)`.
    pub fn ces3(p: Exponent, q: Exponent, r: Exponent, u: RealFun, v: RealFun, w: RealFun) -> Self {
        SpaceSpec { kind: SpaceKind::Ces, exponents: vec![p, q, r], weights: vec![u, v, w] }
    }

    /// `Cop_{p,q,r}(u, v, w)`.
    pub fn cop3(p: Exponent, q: Exponent, r: Exponent, u: RealFun, v: RealFun, w: RealFun) -> Self {
        SpaceSpec { kind: SpaceKind::Cop, exponents: vec![p, q, r], weights: vec![u, v, w] }
    }

    pub fn arity(&self) -> usize {
        self.exponents.len()
    }

    /// Weight of nesting level `i`, counted from the innermost level.
    pub fn level_weight(&self, i: usize) -> &RealFun {
        &self.weights[self.arity() - 1 - i]
    }

    /// Readable name, e.g. `ces_{1/2,inf}(ω1, v)`.
    pub fn describe(&self) -> String {
        let k = match self.kind {
            SpaceKind::Ces => "ces",
            SpaceKind::Cop => "cop",
        };
        let e: Vec<String> = self.exponents.iter().map(|x| x.to_string()).collect();
        let w: Vec<String> = self.weights.iter().map(|x| x.recipe()).collect();
        format!("{k}_{{{}}}({})", e.join(","), w.join(", "))
    }

    /// Every function whose jumps and exponential rates shape the grid.
    pub fn funs(&self) -> Vec<&RealFun> {
        self.weights.iter().collect()
    }

    /// Ω-class gate of the two-parameter definition.
    pub fn check(&self, cfg: &QuadratureConfig) -> Result<()> {
        if self.arity() != 2 {
            return Ok(());
        }
        let dual = self.kind == SpaceKind::Cop;
        let rep = check_omega(&self.weights[0], &self.exponents[1], dual, cfg);
        if rep.ok {
            Ok(())
        } else {
            let class = if dual { "dual-Omega" } else { "Omega" };
            Err(Error::SpecInvalid(format!(
                "outer weight {} is not in {class}_{}: fails at t = {:?}",
                self.weights[0].recipe(),
                self.exponents[1],
                rep.failing
            )))
        }
    }
}

/// JSON form of a [`SpaceSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceRecord {
    pub kind: SpaceKind,
    pub exponents: Vec<Exponent>,
    pub weights: Vec<FunSpec>,
}

impl TryFrom<SpaceRecord> for SpaceSpec {
    type Error = Error;

    fn try_from(r: SpaceRecord) -> Result<Self> {
        let weights = r.weights.iter().map(|w| w.build()).collect::<Result<Vec<_>>>()?;
        SpaceSpec::new(r.kind, r.exponents, weights)
    }
}

impl SpaceSpec {
    /// `None` if some weight is an opaque evaluator.
    pub fn to_record(&self) -> Option<SpaceRecord> {
        Some(SpaceRecord {
            kind: self.kind,
            exponents: self.exponents.clone(),
            weights: self.weights.iter().map(|w| w.to_spec()).collect::<Option<_>>()?,
        })
    }
}

impl Serialize for SpaceSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        self.to_record()
            .ok_or_else(|| S::Error::custom("space has a weight without a config form"))?
            .serialize(s)
    }
}

/// The nested norm on a fixed grid with pre-sampled weights.
#[derive(Clone, Debug)]
pub struct PreparedSpace {
    pub kind: SpaceKind,
    /// Innermost first.
    exps: Vec<Exponent>,
    /// Innermost first.
    weights: Vec<Sampled>,
}

impl PreparedSpace {
    pub fn new(spec: &SpaceSpec, grid: &Grid) -> Self {
        let n = spec.arity();
        PreparedSpace {
            kind: spec.kind,
            exps: spec.exponents.clone(),
            weights: (0..n).map(|i| grid.sample(spec.level_weight(i))).collect(),
        }
    }

    /// `ln ‖f‖` for `f` sampled on the same grid.
    pub fn ln_norm(&self, f: &Sampled, grid: &Grid) -> f64 {
        ln_nested(self.kind, &self.exps, &self.weights, f, grid)
    }
}

/// Nested norm with exponents and weights listed innermost first.
pub fn ln_nested(kind: SpaceKind, exps: &[Exponent], weights: &[Sampled], f: &Sampled, grid: &Grid) -> f64 {
    let levels = exps.len();
    let mut prof = f.clone();
    for i in 0..levels {
        let integrand = prof.mul(&weights[i]);
        let e = &exps[i];
        if i + 1 == levels {
            return if e.is_infinite() {
                integrand.total_sup(grid)
            } else {
                let v = e.value();
                ln_pow(integrand.pow(v).total_integral(grid), 1.0 / v)
            };
        }
        prof = if e.is_infinite() {
            match kind {
                SpaceKind::Ces => integrand.running_sup_head(grid).0,
                SpaceKind::Cop => integrand.running_sup_tail(grid).0,
            }
        } else {
            let v = e.value();
            let p = integrand.pow(v);
            let c = match kind {
                SpaceKind::Ces => p.cumulative_head(grid).0,
                SpaceKind::Cop => p.cumulative_tail(grid).0,
            };
            c.pow(1.0 / v)
        };
    }
    NEG_INF
}

/// `ln ‖f‖` without the Ω gate; any arity from 1 to 3.
pub fn ln_norm_unchecked(spec: &SpaceSpec, f: &RealFun, cfg: &QuadratureConfig) -> f64 {
    if f.is_zero() {
        return NEG_INF;
    }
    let mut funs = spec.funs();
    funs.push(f);
    let grid = Grid::for_funs(cfg, &funs);
    let prepared = PreparedSpace::new(spec, &grid);
    prepared.ln_norm(&grid.sample(f), &grid)
}

/// Two-parameter Cesàro or Copson quasi-norm.
pub fn space_norm(spec: &SpaceSpec, f: &RealFun, cfg: &QuadratureConfig) -> Result<f64> {
    if spec.arity() != 2 {
        return Err(Error::SpecInvalid(format!("space_norm expects 2 parameters, got {}", spec.arity())));
    }
    cfg.validate()?;
    spec.check(cfg)?;
    Ok(ln_norm_unchecked(spec, f, cfg).exp())
}

/// Three-parameter Cesàro or Copson quasi-norm.
pub fn space_norm3(spec: &SpaceSpec, f: &RealFun, cfg: &QuadratureConfig) -> Result<f64> {
    if spec.arity() != 3 {
        return Err(Error::SpecInvalid(format!("space_norm3 expects 3 parameters, got {}", spec.arity())));
    }
    cfg.validate()?;
    Ok(ln_norm_unchecked(spec, f, cfg).exp())
}

/// Outcome of a sampled Ω-class check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaReport {
    pub ok: bool,
    /// Up to ten sample points where the tail (or head) norm is 0 or ∞.
    pub failing: Vec<f64>,
    pub checked: usize,
}

/// Samples `t ↦ ‖u‖_{q,(t,∞)}` (or `‖u‖_{q,(0,t)}` when `dual`) on the
/// working grid and reports where it is not in `(0, ∞)`.
///
/// For `q = ∞` the tail (head) essential supremum is checked instead.
pub fn check_omega(u: &RealFun, q: &Exponent, dual: bool, cfg: &QuadratureConfig) -> OmegaReport {
    let grid = Grid::for_funs(cfg, &[u]);
    let s = grid.sample(u);
    let prof = if q.is_infinite() {
        if dual {
            s.running_sup_head(&grid).0
        } else {
            s.running_sup_tail(&grid).0
        }
    } else {
        let p = s.pow(q.value());
        if dual {
            p.cumulative_head(&grid).0
        } else {
            p.cumulative_tail(&grid).0
        }
    };
    let stride = (cfg.sup_grid / 4).max(1);
    let mut failing = Vec::new();
    let mut checked = 0;
    let n = grid.n_panels();
    for k in (0..=n).step_by(stride).chain(std::iter::once(n)) {
        checked += 1;
        let v = if dual { prof.right[k] } else { prof.left[k] };
        if !v.is_finite() && failing.len() < 10 {
            failing.push(grid.nodes_t()[k]);
        }
    }
    OmegaReport { ok: failing.is_empty(), failing, checked }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Exponent {
        Exponent::int(1)
    }

    #[test]
    fn omega_examples() {
        let cfg = QuadratureConfig::default();
        let e = RealFun::exp_family(1.0, 0.0, -1.0);
        assert!(check_omega(&e, &Exponent::int(2), false, &cfg).ok);
        assert!(!check_omega(&RealFun::one(), &one(), false, &cfg).ok);
        assert!(check_omega(&RealFun::one(), &one(), true, &cfg).ok);
    }

    #[test]
    fn ces_example() {
        let cfg = QuadratureConfig::default();
        let spec = SpaceSpec::ces(one(), one(), RealFun::exp_family(1.0, 0.0, -1.0), RealFun::one());
        let v = space_norm(&spec, &RealFun::one(), &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
        assert_eq!(space_norm(&spec, &RealFun::zero(), &cfg).unwrap(), 0.0);
    }

    #[test]
    fn three_levels() {
        let cfg = QuadratureConfig::default();
        let e = RealFun::exp_family(1.0, 0.0, -1.0);
        let spec = SpaceSpec::ces3(one(), one(), one(), e, RealFun::one(), RealFun::one());
        let v = space_norm3(&spec, &RealFun::one(), &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
        let f = RealFun::indicator(0.0, 2.0).unwrap();
        let inf = Exponent::infinity();
        let mid = RealFun::indicator(0.0, 3.0).unwrap();
        let spec = SpaceSpec::ces3(one(), one(), inf, RealFun::one(), mid, RealFun::one());
        let v = space_norm3(&spec, &f, &cfg).unwrap();
        assert!((v - 4.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn serde_round_trip() {
        let json = r#"{"kind":"cop","exponents":["1/2",{"num":3,"den":1}],
            "weights":[{"family":"power","c":1,"alpha":-2},{"family":"power","c":1,"alpha":0}]}"#;
        let spec: SpaceSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.kind, SpaceKind::Cop);
        assert_eq!(spec.exponents[1], Exponent::int(3));
        let back: SpaceSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back.to_record(), spec.to_record());
        assert!(serde_json::from_str::<SpaceSpec>(r#"{"kind":"ces","exponents":[1],"weights":[]}"#).is_err());
    }

    #[test]
    fn rejects_bad_outer_weight() {
        let cfg = QuadratureConfig::default();
        let spec = SpaceSpec::ces(one(), one(), RealFun::one(), RealFun::one());
        assert!(matches!(space_norm(&spec, &RealFun::one(), &cfg), Err(Error::SpecInvalid(_))));
    }
}
