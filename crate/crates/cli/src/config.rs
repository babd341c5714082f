//! Config records read from `--config` files. Unknown fields are rejected.

use serde::Deserialize;

use cesmul_core::exponents::Exponent;
use cesmul_core::gluing::{GlueGenerator, GlueRecord, LemmaId};
use cesmul_core::multiplier::ProblemRecord;
use cesmul_core::realfun::FunSpec;
use cesmul_core::spaces::SpaceRecord;
use cesmul_core::QuadratureConfig;

/// Quadrature overrides shared by every command.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(rename = "S")]
    pub s: Option<f64>,
    pub panels: Option<usize>,
    pub rel_tol: Option<f64>,
    pub sup_grid: Option<usize>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn quadrature(&self) -> QuadratureConfig {
        let d = QuadratureConfig::default();
        QuadratureConfig {
            domain_cut: self.s.unwrap_or(d.domain_cut),
            panels: self.panels.unwrap_or(d.panels),
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            sup_grid: self.sup_grid.unwrap_or(d.sup_grid),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

/// Brute-force search settings.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSettings {
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    /// Points per decade of the search grid.
    #[serde(default = "default_oracle_grid")]
    pub sup_grid: usize,
}

fn default_budget() -> usize {
    600
}

fn default_rounds() -> usize {
    5
}

fn default_oracle_grid() -> usize {
    32
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings { budget: default_budget(), rounds: default_rounds(), sup_grid: default_oracle_grid() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub space: SpaceRecord,
    pub f: FunSpec,
    #[serde(default)]
    pub cfg: Overrides,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultConfig {
    pub r: Exponent,
    pub p: Exponent,
    pub q: Exponent,
    pub u: FunSpec,
    pub w: FunSpec,
    pub v: FunSpec,
    pub f: FunSpec,
    #[serde(default)]
    pub cfg: Overrides,
    #[serde(default)]
    pub oracle: OracleSettings,
}

impl MultConfig {
    pub fn record(&self) -> ProblemRecord {
        ProblemRecord {
            r: self.r.clone(),
            p: self.p.clone(),
            q: self.q.clone(),
            u: self.u.clone(),
            w: self.w.clone(),
            v: self.v.clone(),
            f: self.f.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceConfig {
    pub p1: Exponent,
    pub q1: Exponent,
    pub p2: Exponent,
    pub q2: Exponent,
    pub u1: FunSpec,
    pub v1: FunSpec,
    pub u2: FunSpec,
    pub v2: FunSpec,
    pub f: FunSpec,
    #[serde(default)]
    pub cfg: Overrides,
    #[serde(default)]
    pub oracle: OracleSettings,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlueConfig {
    /// A single instance; when absent a seeded suite is run.
    pub instance: Option<GlueRecord>,
    pub lemmas: Option<Vec<LemmaId>>,
    pub n: Option<usize>,
    pub generator: Option<GlueGenerator>,
    #[serde(default)]
    pub cfg: Overrides,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub source: SpaceRecord,
    pub target: SpaceRecord,
    pub f: FunSpec,
    #[serde(default)]
    pub cfg: Overrides,
    #[serde(default)]
    pub oracle: OracleSettings,
}
