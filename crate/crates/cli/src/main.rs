//! `cesmul`: batch front-end for cesmul-core.
//!
//! Exit codes: 0 on success, 2 on a config or schema error, 3 on a
//! numerical failure.

mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use cesmul_core::exec;
use cesmul_core::gluing::{self, GlueInstance, LemmaId};
use cesmul_core::multiplier::{characterize, reduce_problem, CharacterizationResult, ThreeWeightProblem};
use cesmul_core::oracle::{enrich_search, CandidateFamily, OracleProblem, OracleResult};
use cesmul_core::realfun::FunSpec;
use cesmul_core::suite;
use cesmul_core::{space_norm, space_norm3, Error, QuadratureConfig, RealFun, SpaceSpec, Weight};

use config::{GlueConfig, MultConfig, NormConfig, OracleConfig, OracleSettings, ReduceConfig};
use report::{num, Format, Report};

#[derive(Parser, Debug)]
#[command(name = "cesmul", version, about = "Cesàro/Copson quasi-norms and multiplier norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quasi-norm of f in a Cesàro or Copson space.
    Norm(Common),
    /// Closed-form multiplier norm M(Cop_r(u), Ces_{p,q}(w, v)).
    Mult {
        #[command(flatten)]
        common: Common,
        /// Also run the brute-force search and report its lower bound.
        #[arg(long)]
        oracle: bool,
    },
    /// Four-weight problem reduced to three weights, then characterized.
    Reduce {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        oracle: bool,
    },
    /// Gluing lemma functionals: one instance or a seeded suite.
    Glue {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        /// Instances per lemma.
        #[arg(long)]
        n: Option<usize>,
        /// Restrict to one lemma, e.g. SUP_INT.
        #[arg(long)]
        lemma: Option<String>,
    },
    /// Seeded property suite with a pass/fail table.
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Fewer instances and no oracle cross-checks.
        #[arg(long)]
        quick: bool,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force multiplier lower bound only.
    Oracle(Common),
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::SpecInvalid(_) | Error::InvalidInput(_) | Error::UnsupportedRegime { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read_config<T: DeserializeOwned>(path: Option<&Path>) -> CliResult<(T, Value)> {
    let path = path.ok_or_else(|| CliError::Config("--config is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let typed = serde_json::from_value(raw.clone()).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok((typed, raw))
}

fn coarser(cfg: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig { panels: (cfg.panels / 2).max(16), sup_grid: (cfg.sup_grid / 2).max(8), ..cfg.clone() }
}

/// Relative change of a value when the grids are halved.
fn error_estimate(fine: f64, coarse: f64) -> f64 {
    if fine == coarse {
        0.0
    } else {
        ((fine - coarse) / fine).abs()
    }
}

fn quadrature_block(cfg: &QuadratureConfig, estimate: f64) -> Value {
    json!({
        "S": cfg.domain_cut,
        "panels": cfg.panels,
        "rel_tol": cfg.rel_tol,
        "sup_grid": cfg.sup_grid,
        "error_estimate": num(estimate),
    })
}

fn run_norm(common: &Common) -> CliResult<Report> {
    let (c, raw): (NormConfig, Value) = read_config(common.config.as_deref())?;
    let spec = SpaceSpec::try_from(c.space.clone())?;
    let f = c.f.build()?;
    let cfg = c.cfg.quadrature();
    let eval = |cfg: &QuadratureConfig| match spec.arity() {
        2 => space_norm(&spec, &f, cfg),
        _ => space_norm3(&spec, &f, cfg),
    };
    let value = eval(&cfg)?;
    let coarse = eval(&coarser(&cfg))?;
    let mut rep = Report::new("norm", raw);
    rep.set("space", json!(spec.describe()));
    rep.set("value", num(value));
    rep.set("quadrature", quadrature_block(&cfg, error_estimate(value, coarse)));
    rep.rows(vec!["quantity".into(), "value".into()], vec![vec!["norm".into(), report::fmt(value)]]);
    Ok(rep)
}

fn oracle_block(o: &OracleResult, settings: &OracleSettings, seed: u64) -> Value {
    json!({
        "lower_bound": num(o.lower_bound),
        "argmax": o.argmax,
        "evaluated": o.evaluated,
        "skipped": o.skipped,
        "budget": settings.budget,
        "rounds": settings.rounds,
        "seed": seed,
    })
}

fn run_oracle_search(
    f: &RealFun,
    source: SpaceSpec,
    target: SpaceSpec,
    settings: &OracleSettings,
    seed: u64,
    cfg: &QuadratureConfig,
) -> CliResult<OracleResult> {
    let ocfg = QuadratureConfig { sup_grid: settings.sup_grid, ..cfg.clone() };
    ocfg.validate()?;
    let fam = CandidateFamily::standard(&source, settings.budget, seed, &ocfg);
    if fam.candidates.is_empty() {
        return Err(Error::EmptyFamily.into());
    }
    let op = OracleProblem { f: f.clone(), source, target };
    Ok(enrich_search(&fam, &op, settings.rounds, &ocfg).1)
}

fn characterization_report(rep: &mut Report, res: &CharacterizationResult, cfg: &QuadratureConfig, coarse: f64) {
    rep.set("regime", json!(res.regime.tag()));
    rep.set("value", num(res.value));
    let terms: Vec<Value> = res
        .terms
        .iter()
        .map(|t| {
            json!({
                "name": t.name,
                "space": t.space,
                "coefficient": num(t.coefficient),
                "norm": num(t.norm),
                "value": num(t.value),
            })
        })
        .collect();
    rep.set("terms", Value::Array(terms));
    let omegas: Vec<Value> = res.omegas.iter().map(|o| json!({"name": o.name, "recipe": o.recipe})).collect();
    rep.set("omegas", Value::Array(omegas));
    rep.set("warnings", json!(res.warnings));
    rep.set("quadrature", quadrature_block(cfg, error_estimate(res.value, coarse)));
    let mut rows: Vec<Vec<String>> = res
        .terms
        .iter()
        .map(|t| vec![t.name.clone(), t.space.clone(), report::fmt(t.coefficient), report::fmt(t.norm), report::fmt(t.value)])
        .collect();
    rows.push(vec!["total".into(), String::new(), String::new(), String::new(), report::fmt(res.value)]);
    rep.rows(
        ["term", "space", "coefficient", "norm", "value"].iter().map(|s| s.to_string()).collect(),
        rows,
    );
}

fn run_mult(common: &Common, with_oracle: bool) -> CliResult<Report> {
    let (c, raw): (MultConfig, Value) = read_config(common.config.as_deref())?;
    let prob = ThreeWeightProblem::try_from(&c.record())?;
    let cfg = c.cfg.quadrature();
    let res = characterize(&prob, &cfg)?;
    let coarse = characterize(&prob, &coarser(&cfg))?.value;
    let mut rep = Report::new("mult", raw);
    characterization_report(&mut rep, &res, &cfg, coarse);
    if with_oracle {
        let o = run_oracle_search(&prob.f, prob.source_space(), prob.target_space(), &c.oracle, c.cfg.seed(), &cfg)?;
        rep.set("oracle", oracle_block(&o, &c.oracle, c.cfg.seed()));
        rep.push_row(vec!["oracle_lower_bound".into(), String::new(), String::new(), String::new(), report::fmt(o.lower_bound)]);
    }
    Ok(rep)
}

fn run_reduce(common: &Common, with_oracle: bool) -> CliResult<Report> {
    let (c, raw): (ReduceConfig, Value) = read_config(common.config.as_deref())?;
    let w = |s: &FunSpec| -> CliResult<Weight> { Ok(Weight::new(s.build()?)?) };
    let (u1, v1, u2, v2) = (w(&c.u1)?, w(&c.v1)?, w(&c.u2)?, w(&c.v2)?);
    let f = c.f.build()?;
    let red = reduce_problem(&c.p1, &c.q1, &c.p2, &c.q2, &u1, &v1, &u2, &v2, &f)?;
    let cfg = c.cfg.quadrature();
    let res = characterize(&red.problem, &cfg)?;
    let coarse = characterize(&red.problem, &coarser(&cfg))?.value;
    let mut rep = Report::new("reduce", raw);
    rep.set(
        "reduced",
        json!({
            "r": red.problem.r,
            "p": red.problem.p,
            "q": red.problem.q,
            "u": red.problem.u.fun().recipe(),
            "w": red.problem.w.fun().recipe(),
            "v": red.problem.v.fun().recipe(),
            "f": red.problem.f.recipe(),
        }),
    );
    characterization_report(&mut rep, &res, &cfg, coarse);
    let four = res.value.powf(red.outer_power);
    rep.set("outer_power", num(red.outer_power));
    rep.set("four_weight_value", num(four));
    rep.push_row(vec!["four_weight_value".into(), String::new(), String::new(), String::new(), report::fmt(four)]);
    if with_oracle {
        let source = SpaceSpec::cop(c.p1.clone(), c.q1.clone(), u1.fun().clone(), v1.fun().clone());
        let target = SpaceSpec::ces(c.p2.clone(), c.q2.clone(), u2.fun().clone(), v2.fun().clone());
        let o = run_oracle_search(&f, source, target, &c.oracle, c.cfg.seed(), &cfg)?;
        rep.set("oracle", oracle_block(&o, &c.oracle, c.cfg.seed()));
        rep.push_row(vec!["oracle_lower_bound".into(), String::new(), String::new(), String::new(), report::fmt(o.lower_bound)]);
    }
    Ok(rep)
}

fn parse_lemma(s: &str) -> CliResult<LemmaId> {
    LemmaId::ALL
        .into_iter()
        .find(|l| l.name().eq_ignore_ascii_case(s))
        .ok_or_else(|| CliError::Config(format!("unknown lemma {s}")))
}

fn run_glue(common: &Common, seed: Option<u64>, n: Option<usize>, lemma: Option<&str>) -> CliResult<Report> {
    let (c, raw): (GlueConfig, Value) = match common.config.as_deref() {
        Some(p) => read_config(Some(p))?,
        None => (GlueConfig::default(), Value::Null),
    };
    let o = &c.cfg;
    let cfg = if o.s.is_none() && o.panels.is_none() && o.rel_tol.is_none() && o.sup_grid.is_none() {
        gluing::suite_config()
    } else {
        o.quadrature()
    };
    let mut rep = Report::new("glue", raw);
    let header: Vec<String> = ["lemma", "seed", "exps", "lhs", "rhs", "ratio", "passed"].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    let mut results = Vec::new();
    let mut push = |lemma: LemmaId, s: Option<u64>, inst: &GlueInstance, r: gluing::GlueResult| {
        let passed = r.terms_dominated(8.0) && r.within(1e-2, 1e2);
        let ratio = r.ratio.map(num).unwrap_or(Value::Null);
        rows.push(vec![
            lemma.name().to_string(),
            s.map(|s| s.to_string()).unwrap_or_default(),
            inst.exps.iter().map(|e| format!("{e:.6}")).collect::<Vec<_>>().join(" "),
            report::fmt(r.lhs),
            report::fmt(r.rhs),
            r.ratio.map(report::fmt).unwrap_or_default(),
            passed.to_string(),
        ]);
        results.push(json!({
            "lemma": lemma.name(),
            "seed": s,
            "exps": inst.exps,
            "lhs": num(r.lhs),
            "rhs_terms": r.rhs_terms.iter().map(|x| num(*x)).collect::<Vec<_>>(),
            "rhs": num(r.rhs),
            "ratio": ratio,
            "passed": passed,
        }));
    };
    if let Some(rec) = &c.instance {
        let inst = GlueInstance::from_record(rec)?;
        let r = gluing::glue_eval(&inst, &cfg)?;
        push(inst.lemma, None, &inst, r);
    } else {
        let seed = seed.or(c.cfg.seed).unwrap_or(0);
        let n = n.or(c.n).unwrap_or(100);
        let lemmas = match lemma {
            Some(l) => vec![parse_lemma(l)?],
            None => c.lemmas.clone().unwrap_or_else(|| LemmaId::ALL.to_vec()),
        };
        let gen = c.generator.clone().unwrap_or_default();
        for l in lemmas {
            for (i, (inst, r)) in gluing::glue_suite(l, n, seed, &gen, &cfg).into_iter().enumerate() {
                push(l, Some(gluing::instance_seed(seed, l, i)), &inst, r?);
            }
        }
    }
    let passed = results.iter().filter(|r| r["passed"] == json!(true)).count();
    rep.set("results", Value::Array(results));
    rep.set("passed", json!(passed));
    rep.set("quadrature", quadrature_block(&cfg, 0.0));
    rep.rows(header, rows);
    Ok(rep)
}

fn run_verify(seed: u64, quick: bool) -> Report {
    let rows = suite::verify(seed, quick);
    let mut rep = Report::new("verify", json!({"seed": seed, "quick": quick}));
    let passed = rows.iter().filter(|r| r.passed).count();
    rep.set("passed", json!(passed));
    rep.set("failed", json!(rows.len() - passed));
    rep.set("table", serde_json::to_value(&rows).expect("rows serialize"));
    rep.rows(
        ["check", "seed", "passed", "detail"].iter().map(|s| s.to_string()).collect(),
        rows.iter().map(|r| vec![r.check.clone(), r.seed.to_string(), r.passed.to_string(), r.detail.clone()]).collect(),
    );
    rep
}

fn run_oracle(common: &Common) -> CliResult<Report> {
    let (c, raw): (OracleConfig, Value) = read_config(common.config.as_deref())?;
    let source = SpaceSpec::try_from(c.source.clone())?;
    let target = SpaceSpec::try_from(c.target.clone())?;
    let f = c.f.build()?;
    let cfg = c.cfg.quadrature();
    cfg.validate()?;
    source.check(&cfg)?;
    let o = run_oracle_search(&f, source, target, &c.oracle, c.cfg.seed(), &cfg)?;
    let mut rep = Report::new("oracle", raw);
    rep.set("oracle", oracle_block(&o, &c.oracle, c.cfg.seed()));
    rep.set("value", num(o.lower_bound));
    rep.rows(
        vec!["quantity".into(), "value".into()],
        vec![
            vec!["lower_bound".into(), report::fmt(o.lower_bound)],
            vec!["evaluated".into(), o.evaluated.to_string()],
            vec!["skipped".into(), o.skipped.to_string()],
        ],
    );
    Ok(rep)
}

fn emit(rep: &Report, format: FormatArg, out: Option<&Path>) -> CliResult<()> {
    let fmt = match format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let text = rep.render(fmt);
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("CESMUL_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        exec::init_threads(n);
    }
    let outcome = match &cli.command {
        Command::Norm(c) => run_norm(c).and_then(|r| emit(&r, c.format, c.out.as_deref())),
        Command::Mult { common, oracle } => {
            run_mult(common, *oracle).and_then(|r| emit(&r, common.format, common.out.as_deref()))
        }
        Command::Reduce { common, oracle } => {
            run_reduce(common, *oracle).and_then(|r| emit(&r, common.format, common.out.as_deref()))
        }
        Command::Glue { common, seed, n, lemma } => run_glue(common, *seed, *n, lemma.as_deref())
            .and_then(|r| emit(&r, common.format, common.out.as_deref())),
        Command::Verify { seed, quick, format, out } => emit(&run_verify(*seed, *quick), *format, out.as_deref()),
        Command::Oracle(c) => run_oracle(c).and_then(|r| emit(&r, c.format, c.out.as_deref())),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Config(m) => eprintln!("config error: {m}"),
                CliError::Numeric(m) => eprintln!("numerical failure: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}
