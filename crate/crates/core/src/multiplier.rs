//! Closed-form multiplier norms `M(Cop_r(u), Ces_{p,q}(w, v))`.
//!
//! [`classify_regime`] picks the characterization that covers `(p, q, r)`,
//! [`characterize`] builds the weights it needs and sums the norms of `f` in
//! the resulting spaces. Equalities of spaces are realized as sums of norms.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::exponents::{arrow, dual_exponent, Exponent};
use crate::operators::{big_v, is_admissible, is_nondegenerate, op_a, op_a_star, running_sup, stieltjes_density, Direction};
use crate::realfun::logmath::{ln_mul, ln_pow, NEG_INF, POS_INF};
use crate::realfun::{
    ln_integrate, FunSpec, FunctionNode, Grid, Interval, QuadratureConfig, RealFun, Sampled, Weight,
};
use crate::spaces::{check_omega, PreparedSpace, SpaceKind, SpaceSpec};

/// Which characterization applies to `(p, q, r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeCase {
    T1,
    T2i,
    T2ii,
    T3i,
    T3ii,
    T4i,
    T4ii,
    T5i,
    T5ii,
    T5iii,
    T5iv,
    T6,
    T7i,
    T7ii,
    #[serde(rename = "UNSUPPORTED")]
    Unsupported,
}

impl RegimeCase {
    pub const ALL: [RegimeCase; 14] = [
        RegimeCase::T1,
        RegimeCase::T2i,
        RegimeCase::T2ii,
        RegimeCase::T3i,
        RegimeCase::T3ii,
        RegimeCase::T4i,
        RegimeCase::T4ii,
        RegimeCase::T5i,
        RegimeCase::T5ii,
        RegimeCase::T5iii,
        RegimeCase::T5iv,
        RegimeCase::T6,
        RegimeCase::T7i,
        RegimeCase::T7ii,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            RegimeCase::T1 => "T1",
            RegimeCase::T2i => "T2i",
            RegimeCase::T2ii => "T2ii",
            RegimeCase::T3i => "T3i",
            RegimeCase::T3ii => "T3ii",
            RegimeCase::T4i => "T4i",
            RegimeCase::T4ii => "T4ii",
            RegimeCase::T5i => "T5i",
            RegimeCase::T5ii => "T5ii",
            RegimeCase::T5iii => "T5iii",
            RegimeCase::T5iv => "T5iv",
            RegimeCase::T6 => "T6",
            RegimeCase::T7i => "T7i",
            RegimeCase::T7ii => "T7ii",
            RegimeCase::Unsupported => "UNSUPPORTED",
        }
    }
}

impl std::fmt::Display for RegimeCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Dispatch on the exponents alone. Earlier families take precedence where
/// hypotheses overlap (`r = 1`, `p < 1 < q` is handled by `T2`).
pub fn classify_regime(p: &Exponent, q: &Exponent, r: &Exponent) -> RegimeCase {
    if p.is_infinite() || q.is_infinite() || r.is_infinite() {
        return RegimeCase::Unsupported;
    }
    let one = Exponent::one();
    if r.is_one() && p == q && *p <= one {
        return RegimeCase::T1;
    }
    if r.is_one() && *p <= one && p != q {
        return if *q >= one { RegimeCase::T2i } else { RegimeCase::T2ii };
    }
    if !r.is_one() && p == q && *p <= one {
        return if r <= p { RegimeCase::T3i } else { RegimeCase::T3ii };
    }
    if *p < one {
        if r <= p && p < q {
            return if *q >= one { RegimeCase::T4i } else { RegimeCase::T4ii };
        }
        if p < r && p < q {
            let q_ge_1 = *q >= one;
            return match (q_ge_1, r <= q) {
                (true, true) => RegimeCase::T5i,
                (true, false) => RegimeCase::T5ii,
                (false, true) => RegimeCase::T5iii,
                (false, false) => RegimeCase::T5iv,
            };
        }
        return RegimeCase::Unsupported;
    }
    if p.is_one() {
        if *r < one && *q > one {
            return RegimeCase::T6;
        }
        if *r > one && *q > one {
            return if r <= q { RegimeCase::T7i } else { RegimeCase::T7ii };
        }
    }
    RegimeCase::Unsupported
}

/// Source `Cop_r(u)`, target `Ces_{p,q}(w, v)` and a candidate multiplier `f`.
#[derive(Clone, Debug)]
pub struct ThreeWeightProblem {
    pub r: Exponent,
    pub u: Weight,
    pub p: Exponent,
    pub q: Exponent,
    pub w: Weight,
    pub v: Weight,
    pub f: RealFun,
}

impl ThreeWeightProblem {
    /// `Cop_r(u) = Cop_{1,r}(u, 1)`.
    pub fn source_space(&self) -> SpaceSpec {
        SpaceSpec::cop(Exponent::one(), self.r.clone(), self.u.fun().clone(), RealFun::one())
    }

    pub fn target_space(&self) -> SpaceSpec {
        SpaceSpec::ces(self.p.clone(), self.q.clone(), self.w.fun().clone(), self.v.fun().clone())
    }

    pub fn regime(&self) -> RegimeCase {
        classify_regime(&self.p, &self.q, &self.r)
    }

    pub fn with_f(&self, f: RealFun) -> Self {
        ThreeWeightProblem { f, ..self.clone() }
    }

    pub fn to_record(&self) -> Option<ProblemRecord> {
        Some(ProblemRecord {
            r: self.r.clone(),
            p: self.p.clone(),
            q: self.q.clone(),
            u: self.u.to_spec()?,
            w: self.w.to_spec()?,
            v: self.v.to_spec()?,
            f: self.f.to_spec()?,
        })
    }
}

/// JSON form of a [`ThreeWeightProblem`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemRecord {
    pub r: Exponent,
    pub p: Exponent,
    pub q: Exponent,
    pub u: FunSpec,
    pub w: FunSpec,
    pub v: FunSpec,
    pub f: FunSpec,
}

impl TryFrom<&ProblemRecord> for ThreeWeightProblem {
    type Error = Error;

    fn try_from(rec: &ProblemRecord) -> Result<Self> {
        Ok(ThreeWeightProblem {
            r: rec.r.clone(),
            p: rec.p.clone(),
            q: rec.q.clone(),
            u: Weight::new(rec.u.build()?)?,
            w: Weight::new(rec.w.build()?)?,
            v: Weight::new(rec.v.build()?)?,
            f: rec.f.build()?,
        })
    }
}

/// One additive piece of the characterized norm.
#[derive(Clone, Debug, Serialize)]
pub struct Term {
    pub name: String,
    /// Space whose norm of `f` is taken, with weight recipes.
    pub space: String,
    /// Multiplies the norm; `‖u‖_r^{-1}` for the boundary term, else 1.
    pub coefficient: f64,
    pub norm: f64,
    /// `coefficient · norm`, with `0 · ∞ = 0`.
    pub value: f64,
}

/// A constructed weight and its recipe.
#[derive(Clone, Debug, Serialize)]
pub struct Omega {
    pub name: String,
    pub recipe: String,
    #[serde(skip)]
    pub weight: Weight,
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterizationResult {
    pub value: f64,
    pub regime: RegimeCase,
    pub terms: Vec<Term>,
    pub omegas: Vec<Omega>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
enum TermShape {
    /// `‖f · ω‖_e`.
    Lebesgue(Exponent, RealFun),
    Nested(SpaceSpec),
}

#[derive(Clone, Debug)]
struct TermPlan {
    name: String,
    shape: TermShape,
    ln_coef: f64,
}

impl TermPlan {
    fn describe(&self) -> String {
        match &self.shape {
            TermShape::Lebesgue(e, w) => format!("L_{{{e}}}({})", w.recipe()),
            TermShape::Nested(s) => s.describe(),
        }
    }

    fn funs(&self) -> Vec<&RealFun> {
        match &self.shape {
            TermShape::Lebesgue(_, w) => vec![w],
            TermShape::Nested(s) => s.funs(),
        }
    }

    fn ln_norm(&self, f: &Sampled, grid: &Grid) -> f64 {
        match &self.shape {
            TermShape::Lebesgue(e, w) => {
                let g = f.mul(&grid.sample(w));
                if e.is_infinite() {
                    g.total_sup(grid)
                } else {
                    let v = e.value();
                    ln_pow(g.pow(v).total_integral(grid), 1.0 / v)
                }
            }
            TermShape::Nested(s) => PreparedSpace::new(s, grid).ln_norm(f, grid),
        }
    }
}

struct Plan {
    terms: Vec<TermPlan>,
    omegas: Vec<Omega>,
    notes: Vec<String>,
}

struct Builder<'a> {
    prob: &'a ThreeWeightProblem,
    cfg: &'a QuadratureConfig,
    omegas: Vec<Omega>,
}

impl Builder<'_> {
    fn keep(&mut self, name: &str, w: Result<Weight>) -> Result<RealFun> {
        let w = w.map_err(|e| match e {
            Error::DegenerateOperator(m) => Error::DegenerateOperator(format!("{name}: {m}")),
            other => other,
        })?;
        self.omegas.push(Omega { name: name.into(), recipe: w.recipe(), weight: w.clone() });
        Ok(w.into_fun())
    }

    fn a(&self, q: &Exponent, p: &Exponent) -> Result<Weight> {
        op_a(self.prob.u.fun(), q, p, self.cfg)
    }

    fn a_star_w(&self, q: &Exponent, p: &Exponent) -> Result<Weight> {
        op_a_star(self.prob.w.fun(), q, p, self.cfg)
    }

    /// `[A*_{ρ,ρ}(ω₂)]^{ρ/(q→p)} · ω₂^{ρ/(r→q)}` with `ω₂ = A_{r,p}(u)`.
    fn mixed(&self, omega2: &RealFun, rho: &Exponent) -> Result<Weight> {
        let pr = &self.prob;
        let qp = arrow(&pr.q, &pr.p);
        let rq = arrow(&pr.r, &pr.q);
        let tail = op_a_star(omega2, rho, rho, self.cfg)?;
        let f = RealFun::product(vec![
            tail.into_fun().powf(rho.value() / qp.value()),
            omega2.powf(rho.value() / rq.value()),
        ]);
        Ok(Weight::unchecked(f))
    }
}

fn ces(exps: Vec<Exponent>, weights: Vec<RealFun>) -> TermShape {
    TermShape::Nested(SpaceSpec { kind: SpaceKind::Ces, exponents: exps, weights })
}

fn term(name: &str, shape: TermShape) -> TermPlan {
    TermPlan { name: name.into(), shape, ln_coef: 0.0 }
}

/// `ln ‖u‖_{r,(0,∞)}`.
fn ln_u_norm(prob: &ThreeWeightProblem, cfg: &QuadratureConfig) -> Result<f64> {
    let rv = prob.r.value();
    let li = ln_integrate(&prob.u.powf(rv), &Interval::positive(), cfg)?;
    Ok(ln_pow(li, 1.0 / rv))
}

fn boundary(name: &str, shape: TermShape, ln_u: f64) -> TermPlan {
    TermPlan { name: name.into(), shape, ln_coef: -ln_u }
}

fn plan(case: RegimeCase, prob: &ThreeWeightProblem, cfg: &QuadratureConfig) -> Result<Plan> {
    use RegimeCase::*;
    let mut b = Builder { prob, cfg, omegas: Vec::new() };
    let mut notes = Vec::new();
    let (p, q, r) = (&prob.p, &prob.q, &prob.r);
    let v = prob.v.fun().clone();
    let pd = dual_exponent(p);
    let qd = dual_exponent(q);
    let inf = Exponent::infinity;
    let one = Exponent::one;
    let rho = arrow(r, p);
    let rq = arrow(r, q);
    let ln_u = || ln_u_norm(prob, cfg);
    let terms = match case {
        T1 => {
            let om = b.keep("ω", Ok(Weight::unchecked(RealFun::product(vec![
                b.a(&one(), &one())?.into_fun(),
                b.a_star_w(p, p)?.into_fun(),
                v.clone(),
            ]))))?;
            vec![term("L_p'(ω)", TermShape::Lebesgue(pd, om))]
        }
        T2i | T2ii => {
            let (o1, e) = if case == T2i {
                notes.push("note: ω1 = A*_{q,q}(w), the operator index used in the derivation".to_string());
                (b.keep("ω1", b.a_star_w(q, q))?, inf())
            } else {
                (b.keep("ω1", b.a_star_w(q, &one()))?, qd.clone())
            };
            let o2 = b.keep("ω2", b.a(&one(), &one()).map(|a| Weight::unchecked(a.mul(&v))))?;
            vec![term("ces(ω1, ω2)", ces(vec![pd, e], vec![o1, o2]))]
        }
        T3i => {
            let o1 = b.keep("ω1", b.a(r, r))?;
            let o2 = b.keep("ω2", b.a_star_w(p, p).map(|a| Weight::unchecked(a.mul(&v))))?;
            vec![term("ces(ω1, ω2)", ces(vec![pd, inf()], vec![o1, o2]))]
        }
        T3ii => {
            notes.push("note: boundary term weighted by ‖u‖_r^{-1}".to_string());
            let o1 = b.keep("ω1", b.a(r, p))?;
            let o2 = b.keep("ω2", b.a_star_w(p, p).map(|a| Weight::unchecked(a.mul(&v))))?;
            vec![
                term("ces(ω1, ω2)", ces(vec![pd.clone(), rho.clone()], vec![o1, o2.clone()])),
                boundary("‖u‖^-1 L_p'(ω2)", TermShape::Lebesgue(pd, o2), ln_u()?),
            ]
        }
        T4i | T4ii => {
            let arr = b.a(r, r)?.into_fun();
            let o1 = b.keep("ω1", b.a_star_w(q, q).map(|a| Weight::unchecked(arr.mul(&a))))?;
            let mut t = vec![term("ces(ω1, v)", ces(vec![pd.clone(), inf()], vec![o1, v.clone()]))];
            if case == T4ii {
                let o2 = b.keep("ω2", Ok(Weight::unchecked(arr)))?;
                let o3 = b.keep("ω3", b.a_star_w(q, &one()))?;
                t.push(term("ces(ω2, ω3, v)", ces(vec![pd, qd, inf()], vec![o2, o3, v.clone()])));
            }
            t
        }
        T5i | T5ii | T5iii | T5iv => {
            let ln_u = ln_u()?;
            let o2 = b.keep("ω2", b.a(r, p))?;
            match case {
                T5i => {
                    let o1 = b.keep("ω1", b.a_star_w(q, q))?;
                    let tail = op_a_star(&o2, &rho, &rho, cfg)?.into_fun();
                    let o3 = b.keep("ω3", Ok(Weight::unchecked(tail.mul(&o1))))?;
                    vec![
                        term("ces(ω1, ω2, v)", ces(vec![pd.clone(), rho.clone(), inf()], vec![o1.clone(), o2, v.clone()])),
                        term("ces(ω3, v)", ces(vec![pd.clone(), inf()], vec![o3, v.clone()])),
                        boundary("‖u‖^-1 ces(ω1, v)", ces(vec![pd, inf()], vec![o1, v.clone()]), ln_u),
                    ]
                }
                T5ii => {
                    notes.push(
                        "note: second term is ces_{p',∞,r→q}(ω4, ω3, v) and the boundary term uses ω3 = A*_{q,q}(w)"
                            .to_string(),
                    );
                    let o1 = b.keep("ω1", b.a_star_w(q, r))?;
                    let o3 = b.keep("ω3", b.a_star_w(q, q))?;
                    let o4 = b.keep("ω4", b.mixed(&o2, &rho))?;
                    vec![
                        term("ces(ω1, ω2, v)", ces(vec![pd.clone(), rho.clone(), rq.clone()], vec![o1, o2, v.clone()])),
                        term("ces(ω4, ω3, v)", ces(vec![pd.clone(), inf(), rq], vec![o4, o3.clone(), v.clone()])),
                        boundary("‖u‖^-1 ces(ω3, v)", ces(vec![pd, inf()], vec![o3, v.clone()]), ln_u),
                    ]
                }
                T5iii => {
                    notes.push("note: the ‖u‖ = ∞ branch is read as ‖u‖_{r,(0,∞)} = ∞".to_string());
                    let o1 = b.keep("ω1", b.a_star_w(q, q))?;
                    let o3 = b.keep("ω3", op_a_star(&o2, &rho, &rho, cfg))?;
                    let o4 = b.keep("ω4", b.a_star_w(q, &one()))?;
                    vec![
                        term("ces(ω1, ω2, v)", ces(vec![pd.clone(), rho.clone(), inf()], vec![o1, o2, v.clone()])),
                        term("ces(ω3, ω4, v)", ces(vec![pd.clone(), qd.clone(), inf()], vec![o3, o4.clone(), v.clone()])),
                        boundary("‖u‖^-1 ces(ω4, v)", ces(vec![pd, qd], vec![o4, v.clone()]), ln_u),
                    ]
                }
                _ => {
                    let o1 = b.keep("ω1", b.a_star_w(q, r))?;
                    let o3 = b.keep("ω3", b.mixed(&o2, &rho))?;
                    let o4 = b.keep("ω4", b.a_star_w(q, &one()))?;
                    vec![
                        term("ces(ω1, ω2, v)", ces(vec![pd.clone(), rho.clone(), rq.clone()], vec![o1, o2, v.clone()])),
                        term("ces(ω3, ω4, v)", ces(vec![pd.clone(), qd.clone(), rq], vec![o3, o4.clone(), v.clone()])),
                        boundary("‖u‖^-1 ces(ω4, v)", ces(vec![pd, qd], vec![o4, v.clone()]), ln_u),
                    ]
                }
            }
        }
        T6 => {
            let arr = b.a(r, r)?.into_fun();
            let om = b.keep("ω", b.a_star_w(q, q).map(|a| Weight::unchecked(RealFun::product(vec![arr, a.into_fun(), v.clone()]))))?;
            vec![term("L_∞(ω)", TermShape::Lebesgue(inf(), om))]
        }
        T7i | T7ii => {
            let ln_u = ln_u()?;
            let o2 = b.keep("ω2", b.a(r, &one()))?;
            let wq = b.a_star_w(q, q)?.into_fun();
            let edge = b.keep("ω_b", Ok(Weight::unchecked(wq.mul(&v))))?;
            let last = boundary("‖u‖^-1 L_∞(ω_b)", TermShape::Lebesgue(inf(), edge), ln_u);
            if case == T7i {
                notes.push("note: ω3(x) = v(x) · sup_{t>x} A*_{r',r'}(A_{r,1}(u))(t) · A*_{q,q}(w)(t)".to_string());
                let o1 = b.keep("ω1", Ok(Weight::unchecked(wq.clone())))?;
                let tail = op_a_star(&o2, &rho, &rho, cfg)?.into_fun();
                let sup = running_sup(&tail.mul(&wq), Direction::Tail, cfg);
                let o3 = b.keep("ω3", Ok(Weight::unchecked(sup.mul(&v))))?;
                vec![
                    term("ces(ω1, ω2, v)", ces(vec![inf(), rho.clone(), inf()], vec![o1, o2, v.clone()])),
                    term("L_∞(ω3)", TermShape::Lebesgue(inf(), o3)),
                    last,
                ]
            } else {
                let o1 = b.keep("ω1", b.a_star_w(q, r))?;
                let o3 = b.keep("ω3", b.mixed(&o2, &rho))?;
                let o4 = b.keep("ω4", Ok(Weight::unchecked(wq)))?;
                vec![
                    term("ces(ω1, ω2, v)", ces(vec![inf(), rho.clone(), rq.clone()], vec![o1, o2, v.clone()])),
                    term("ces(ω3, ω4, v)", ces(vec![inf(), inf(), rq], vec![o3, o4, v.clone()])),
                    last,
                ]
            }
        }
        Unsupported => unreachable!(),
    };
    Ok(Plan { terms, omegas: b.omegas, notes })
}

fn unsupported(prob: &ThreeWeightProblem) -> Error {
    Error::UnsupportedRegime { p: prob.p.to_string(), q: prob.q.to_string(), r: prob.r.to_string() }
}

/// Closed-form multiplier norm with its term decomposition.
///
/// Hypothesis failures are reported in `warnings`; they do not abort.
pub fn characterize(prob: &ThreeWeightProblem, cfg: &QuadratureConfig) -> Result<CharacterizationResult> {
    cfg.validate()?;
    let case = prob.regime();
    if case == RegimeCase::Unsupported {
        return Err(unsupported(prob));
    }
    let mut warnings = hypothesis_check(case, prob, cfg);
    let plan = plan(case, prob, cfg)?;
    warnings.extend(plan.notes);
    let terms = evaluate_terms(&plan.terms, &prob.f, &[prob.u.fun(), prob.v.fun(), prob.w.fun()], cfg);
    for o in &plan.omegas {
        warnings.extend(o.weight.warnings());
    }
    warnings.dedup();
    let value = terms.iter().map(|t| t.value).sum();
    Ok(CharacterizationResult { value, regime: case, terms, omegas: plan.omegas, warnings })
}

fn evaluate_terms(plans: &[TermPlan], f: &RealFun, extra: &[&RealFun], cfg: &QuadratureConfig) -> Vec<Term> {
    let mut funs: Vec<&RealFun> = vec![f];
    funs.extend_from_slice(extra);
    for t in plans {
        funs.extend(t.funs());
    }
    let grid = Grid::for_funs(cfg, &funs);
    let fs = if f.is_zero() { None } else { Some(grid.sample(f)) };
    exec::par_map(plans, |t| {
        let ln_norm = match &fs {
            Some(fs) => t.ln_norm(fs, &grid),
            None => NEG_INF,
        };
        Term {
            name: t.name.clone(),
            space: t.describe(),
            coefficient: t.ln_coef.exp(),
            norm: ln_norm.exp(),
            value: ln_mul(t.ln_coef, ln_norm).exp(),
        }
    })
}

/// Four-weight problem `M(Cop_{p1,q1}(u1, v1), Ces_{p2,q2}(u2, v2))` rewritten
/// as a three-weight problem for `f^{p1}`; the value of the latter raised to
/// `outer_power = 1/p1` is the value of the former.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub problem: ThreeWeightProblem,
    pub outer_power: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn reduce_problem(
    p1: &Exponent,
    q1: &Exponent,
    p2: &Exponent,
    q2: &Exponent,
    u1: &Weight,
    v1: &Weight,
    u2: &Weight,
    v2: &Weight,
    f: &RealFun,
) -> Result<Reduction> {
    for (name, e) in [("p1", p1), ("q1", q1), ("p2", p2), ("q2", q2)] {
        if e.is_infinite() {
            return Err(Error::InvalidInput(format!("{name} must be finite")));
        }
    }
    let a = p1.value();
    let power = |w: &Weight| if p1.is_one() { w.fun().clone() } else { w.powf(a) };
    let v = if p1.is_one() {
        RealFun::product(vec![v1.powf(-1.0), v2.fun().clone()])
    } else {
        RealFun::product(vec![v1.powf(-a), v2.powf(a)])
    };
    let problem = ThreeWeightProblem {
        r: q1.div(p1)?,
        p: p2.div(p1)?,
        q: q2.div(p1)?,
        u: Weight::unchecked(power(u1)),
        w: Weight::unchecked(power(u2)),
        v: Weight::unchecked(v),
        f: if p1.is_one() { f.clone() } else { f.powf(a) },
    };
    Ok(Reduction { problem, outer_power: 1.0 / a })
}

/// Grid density used for the hypothesis functions.
fn coarse(cfg: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig { sup_grid: cfg.sup_grid.min(16), ..cfg.clone() }
}

/// The `t`-grid of `φ` extends past the window the checks sample in `x`.
fn phi_cfg(cfg: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig { domain_cut: cfg.domain_cut + 10.0, ..coarse(cfg) }
}

/// `φ₁` or `φ₂`, tabulated in `t` and evaluated in `x` by a full scan.
#[derive(Debug)]
struct PhiNode {
    big_v: RealFun,
    grid: Grid,
    ln_vt: Sampled,
    /// `ln ‖u‖_{r,(0,t)}^{-1}` for `φ₁`, the Stieltjes density for `φ₂`.
    ln_m: Sampled,
    /// `None` for the supremum `φ₁`, `Some(ρ)` for `φ₂`.
    rho: Option<f64>,
    label: String,
}

impl FunctionNode for PhiNode {
    fn ln_eval(&self, x: f64) -> f64 {
        let lx = self.big_v.ln_eval(x);
        if lx == NEG_INF {
            return NEG_INF;
        }
        // ln[𝒱(x,t) V(t)] = lx + lt - ln(V(x) + V(t))
        let kernel = |lt: f64| {
            if lt == NEG_INF {
                return NEG_INF;
            }
            if lx == POS_INF {
                return lt;
            }
            if lt == POS_INF {
                return lx;
            }
            let m = lx.max(lt);
            lx + lt - (m + ((lx - m).exp() + (lt - m).exp()).ln())
        };
        match self.rho {
            None => self.ln_vt.zip(&self.ln_m, |lt, lm| ln_mul(kernel(lt), lm)).total_sup(&self.grid),
            Some(rho) => {
                let g = self.ln_vt.zip(&self.ln_m, |lt, lm| ln_mul(ln_pow(kernel(lt), rho), lm));
                ln_pow(g.total_integral(&self.grid), 1.0 / rho)
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.big_v.breakpoints()
    }

    fn recipe(&self) -> String {
        self.label.clone()
    }

    fn exp_rate(&self) -> f64 {
        self.big_v.exp_rate()
    }
}

/// `φ₁(x) = sup_t 𝒱(x,t) V(t) ‖u‖_{r,(0,t)}^{-1}`.
pub fn phi1(prob: &ThreeWeightProblem, cfg: &QuadratureConfig) -> RealFun {
    let cfg = phi_cfg(cfg);
    let bv = big_v(prob.v.fun(), &prob.p, &cfg).into_fun();
    let rv = prob.r.value();
    let head = crate::operators::running_integral(&prob.u.powf(rv), Direction::Head, &cfg);
    let grid = Grid::for_funs(&cfg, &[&bv, prob.u.fun()]);
    let ln_vt = grid.sample(&bv);
    let ln_m = grid.sample(&head).map(|l| ln_pow(l, -1.0 / rv));
    RealFun::node(Arc::new(PhiNode { big_v: bv, grid, ln_vt, ln_m, rho: None, label: "φ1".into() }))
}

/// `φ₂(x) = (∫ [𝒱(x,t) V(t)]^ρ d(-‖u‖_{r,(0,t)}^{-ρ}))^{1/ρ}`, `ρ = r→p`.
pub fn phi2(prob: &ThreeWeightProblem, cfg: &QuadratureConfig) -> Result<RealFun> {
    let cfg = phi_cfg(cfg);
    let bv = big_v(prob.v.fun(), &prob.p, &cfg).into_fun();
    let rho = arrow(&prob.r, &prob.p);
    let dens = stieltjes_density(prob.u.fun(), &prob.r, &prob.p, &cfg)?;
    let grid = Grid::for_funs(&cfg, &[&bv, prob.u.fun()]);
    let ln_vt = grid.sample(&bv);
    let ln_m = grid.sample(dens.fun());
    Ok(RealFun::node(Arc::new(PhiNode {
        big_v: bv,
        grid,
        ln_vt,
        ln_m,
        rho: Some(rho.value()),
        label: "φ2".into(),
    })))
}

/// Hypotheses of the characterization for `case`, as warnings.
pub fn hypothesis_check(case: RegimeCase, prob: &ThreeWeightProblem, cfg: &QuadratureConfig) -> Vec<String> {
    use RegimeCase::*;
    let mut out = Vec::new();
    if case == Unsupported {
        out.push(format!("{}", unsupported(prob)));
        return out;
    }
    let ccfg = coarse(cfg);
    let cu = check_omega(prob.u.fun(), &prob.r, true, &ccfg);
    if !cu.ok {
        out.push(format!("u is not in dual-Omega_{}: head norm degenerate at t = {:?}", prob.r, cu.failing));
    }
    let cw = check_omega(prob.w.fun(), &prob.q, false, &ccfg);
    if !cw.ok {
        out.push(format!("w is not in Omega_{}: tail norm degenerate at t = {:?}", prob.q, cw.failing));
    }
    let phi = match case {
        T4i | T4ii => Some(Ok(phi1(prob, cfg))),
        T5i | T5ii | T5iii | T5iv => Some(phi2(prob, cfg)),
        _ => None,
    };
    if let Some(phi) = phi {
        let bv = big_v(prob.v.fun(), &prob.p, &ccfg).into_fun();
        let adm = is_admissible(&bv, &ccfg);
        if !adm.ok {
            out.push(format!("V is not admissible: {}", adm.detail));
        }
        let pd = dual_exponent(&prob.p);
        let big_u = bv.powf(1.0 / pd.value());
        let name = if matches!(case, T4i | T4ii) { "φ1" } else { "φ2" };
        match phi {
            Ok(phi) => {
                let rep = is_nondegenerate(&phi, &big_u, &ccfg);
                if !rep.quasiconcave.ok {
                    out.push(format!("{name} is not V^(1/p')-quasiconcave: {}", rep.quasiconcave.detail));
                }
                let what = ["φ(0+) = 0", "φ(∞) = ∞", "φ/U(∞) = 0", "U/φ(0+) = 0"];
                for (l, w) in rep.limits.iter().zip(what) {
                    if l.verdict != crate::operators::Limit::Zero {
                        out.push(format!("{name} degenerate: {w} fails ({:?})", l.verdict));
                    }
                }
            }
            Err(e) => out.push(format!("{name} could not be built: {e}")),
        }
    }
    if matches!(case, T7i | T7ii) {
        let bps: Vec<f64> = prob.v.breakpoints().into_iter().filter(|b| *b > 0.0 && b.is_finite()).collect();
        if !bps.is_empty() {
            out.push(format!("v may be discontinuous at {bps:?}"));
        }
        // Finite tails of both w^q and w^{-q'} are incompatible (Hölder on
        // (x, y), y → ∞), so the gate is checked on heads.
        let qd = dual_exponent(&prob.q).value();
        let winv = prob.w.powf(-qd);
        let bad: Vec<f64> = [1e-3, 1e-1, 1.0, 1e1, 1e3]
            .into_iter()
            .filter(|x| {
                let l = ln_integrate(&winv, &Interval::head(*x), &ccfg).unwrap_or(f64::NAN);
                !l.is_finite()
            })
            .collect();
        if !bad.is_empty() {
            out.push(format!("‖w^-1‖_{{q',(0,x)}} is not in (0, ∞) at x = {bad:?}"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(n: i64, d: i64) -> Exponent {
        Exponent::ratio(n, d).unwrap()
    }

    fn t6(f: RealFun) -> ThreeWeightProblem {
        ThreeWeightProblem {
            r: ex(1, 2),
            u: Weight::new(RealFun::one()).unwrap(),
            p: Exponent::one(),
            q: Exponent::int(2),
            w: Weight::new(RealFun::exp_family(1.0, 0.0, -1.0)).unwrap(),
            v: Weight::new(RealFun::one()).unwrap(),
            f,
        }
    }

    #[test]
    fn classify_examples() {
        let one = Exponent::one();
        assert_eq!(classify_regime(&one, &one, &one), RegimeCase::T1);
        assert_eq!(classify_regime(&ex(1, 2), &Exponent::int(2), &ex(1, 2)), RegimeCase::T4i);
        assert_eq!(classify_regime(&Exponent::int(2), &Exponent::int(3), &one), RegimeCase::Unsupported);
        assert_eq!(classify_regime(&one, &Exponent::int(2), &ex(1, 2)), RegimeCase::T6);
        assert_eq!(classify_regime(&one, &Exponent::int(3), &Exponent::int(2)), RegimeCase::T7i);
        assert_eq!(classify_regime(&one, &Exponent::int(2), &Exponent::int(3)), RegimeCase::T7ii);
        assert_eq!(classify_regime(&ex(1, 2), &ex(1, 2), &Exponent::int(2)), RegimeCase::T3ii);
    }

    #[test]
    fn t6_value() {
        let cfg = QuadratureConfig::default();
        let f = RealFun::exp_family(1.0, 2.0, 1.0);
        let res = characterize(&t6(f), &cfg).unwrap();
        assert_eq!(res.regime, RegimeCase::T6);
        let want = std::f64::consts::FRAC_1_SQRT_2;
        assert!(((res.value - want) / want).abs() < 1e-4, "{}", res.value);
    }

    #[test]
    fn zero_and_scaling() {
        let cfg = QuadratureConfig::default();
        let res = characterize(&t6(RealFun::zero()), &cfg).unwrap();
        assert_eq!(res.value, 0.0);
        let f = RealFun::exp_family(1.0, 2.0, 1.0);
        let base = characterize(&t6(f.clone()), &cfg).unwrap().value;
        let mut prob = t6(f);
        prob.u = Weight::new(RealFun::constant(3.0)).unwrap();
        let scaled = characterize(&prob, &cfg).unwrap().value;
        assert!((scaled * 3.0 / base - 1.0).abs() < 1e-6);
    }

    #[test]
    fn reduce_example() {
        let w = |f: RealFun| Weight::new(f).unwrap();
        let red = reduce_problem(
            &Exponent::int(2),
            &Exponent::int(4),
            &Exponent::one(),
            &Exponent::int(2),
            &w(RealFun::one()),
            &w(RealFun::power(1.0, 1.0)),
            &w(RealFun::exp_family(1.0, 0.0, -1.0)),
            &w(RealFun::one()),
            &RealFun::one(),
        )
        .unwrap();
        assert_eq!(red.problem.r, Exponent::int(2));
        assert_eq!(red.problem.p, ex(1, 2));
        assert_eq!(red.problem.q, Exponent::one());
        assert_eq!(red.outer_power, 0.5);
        assert!((red.problem.v.eval(4.0) - 1.0 / 16.0).abs() < 1e-12);
        assert!((red.problem.w.eval(1.0) - (-2.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn hypothesis_examples() {
        let cfg = QuadratureConfig::default();
        let w = |f: RealFun| Weight::new(f).unwrap();
        let prob = ThreeWeightProblem {
            r: ex(1, 4),
            u: w(RealFun::one()),
            p: ex(1, 2),
            q: Exponent::int(2),
            w: w(RealFun::exp_family(1.0, 0.0, -1.0)),
            v: w(RealFun::one()),
            f: RealFun::one(),
        };
        let bv = big_v(prob.v.fun(), &prob.p, &cfg);
        assert!(is_admissible(bv.fun(), &cfg).ok);
        let mut bounded = prob.clone();
        bounded.v = w(RealFun::exp_family(1.0, 0.0, -1.0));
        let warns = hypothesis_check(RegimeCase::T4i, &bounded, &cfg);
        assert!(warns.iter().any(|m| m.contains("admissible")), "{warns:?}");
    }
}
