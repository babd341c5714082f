//! Weight transforms: `A_{q,p}`, `A*_{q,p}`, `V`, `𝒱`, `𝒜`, fundamental
//! functions, and sampled checks for quasiconcavity, admissibility and
//! non-degeneracy.
//!
//! Transforms return lazily evaluated weights. Power and exponential inputs
//! map to closed forms; anything else becomes a [`RunningNode`] that tabulates
//! its running integral (or supremum) once on first use.

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{arrow, dual_exponent, Exponent};
use crate::realfun::logmath::{ln_add, ln_of, ln_pow, NEG_INF, POS_INF};
use crate::realfun::{
    ln_esssup, ln_integrate, FunctionNode, Grid, Interval, QuadratureConfig, RealFun, Sampled, Weight, GL_N,
};

/// Side of `x` a running norm looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `(0, x)`.
    Head,
    /// `(x, ∞)`.
    Tail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Running {
    Integral,
    Sup,
}

#[derive(Debug)]
struct Memo {
    grid: Grid,
    g: Sampled,
    acc: Sampled,
}

/// `x ↦ ∫ g` or `x ↦ esssup g` over `(0, x)` or `(x, ∞)`.
#[derive(Debug)]
pub struct RunningNode {
    g: RealFun,
    dir: Direction,
    kind: Running,
    hint: bool,
    cfg: QuadratureConfig,
    label: String,
    memo: OnceLock<Memo>,
}

impl RunningNode {
    fn new(g: RealFun, dir: Direction, kind: Running, cfg: &QuadratureConfig) -> Self {
        let hint = kind == Running::Integral && g.ln_integral_hint(1.0, 2.0).is_some();
        let what = match kind {
            Running::Integral => "∫",
            Running::Sup => "sup",
        };
        let side = match dir {
            Direction::Head => "(0,x)",
            Direction::Tail => "(x,∞)",
        };
        let label = format!("{what}_{side} {}", g.recipe());
        RunningNode { g, dir, kind, hint, cfg: cfg.clone(), label, memo: OnceLock::new() }
    }

    fn memo(&self) -> &Memo {
        self.memo.get_or_init(|| {
            let grid = Grid::for_funs(&self.cfg, &[&self.g]);
            let g = grid.sample(&self.g);
            let acc = match (self.kind, self.dir) {
                (Running::Integral, Direction::Head) => g.cumulative_head(&grid).0,
                (Running::Integral, Direction::Tail) => g.cumulative_tail(&grid).0,
                (Running::Sup, Direction::Head) => g.running_sup_head(&grid).0,
                (Running::Sup, Direction::Tail) => g.running_sup_tail(&grid).0,
            };
            Memo { grid, g, acc }
        })
    }

    fn interval(&self, t: f64) -> Interval {
        match self.dir {
            Direction::Head => Interval::head(t),
            Direction::Tail => Interval::tail(t),
        }
    }

    fn fallback(&self, t: f64) -> f64 {
        let iv = self.interval(t);
        match self.kind {
            Running::Integral => ln_integrate(&self.g, &iv, &self.cfg).unwrap_or(f64::NAN),
            Running::Sup => ln_esssup(&self.g, &iv, &self.cfg),
        }
    }
}

impl FunctionNode for RunningNode {
    fn ln_eval(&self, t: f64) -> f64 {
        if self.hint {
            let v = match self.dir {
                Direction::Head => self.g.ln_primitive_hint(t),
                Direction::Tail => self.g.ln_tail_hint(t),
            };
            if let Some(v) = v {
                return v;
            }
        }
        let m = self.memo();
        let Some(k) = m.grid.locate(t) else {
            return self.fallback(t);
        };
        let s = t.ln();
        match (self.kind, self.dir) {
            (Running::Integral, Direction::Head) => ln_add(m.acc.right[k], m.g.ln_split_panel(&m.grid, k, t).0),
            (Running::Integral, Direction::Tail) => ln_add(m.acc.left[k + 1], m.g.ln_split_panel(&m.grid, k, t).1),
            (Running::Sup, Direction::Head) => {
                let mut v = m.acc.right[k].max(self.g.ln_eval(t));
                for j in 0..GL_N {
                    if m.grid.gl_s(k, j) < s {
                        v = v.max(m.g.inner[k][j]);
                    }
                }
                v
            }
            (Running::Sup, Direction::Tail) => {
                let mut v = m.acc.left[k + 1].max(self.g.ln_eval(t));
                for j in 0..GL_N {
                    if m.grid.gl_s(k, j) > s {
                        v = v.max(m.g.inner[k][j]);
                    }
                }
                v
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.g.breakpoints()
    }

    fn recipe(&self) -> String {
        self.label.clone()
    }

    fn exp_rate(&self) -> f64 {
        self.g.exp_rate()
    }

    fn warnings(&self) -> Vec<String> {
        self.g.warnings()
    }
}

/// `x ↦ ∫_0^x g` (head) or `∫_x^∞ g` (tail).
pub fn running_integral(g: &RealFun, dir: Direction, cfg: &QuadratureConfig) -> RealFun {
    if let Some(f) = closed_running_integral(g, dir) {
        return f;
    }
    RealFun::node(Arc::new(RunningNode::new(g.clone(), dir, Running::Integral, cfg)))
}

/// `x ↦ esssup_{(0,x)} g` (head) or `esssup_{(x,∞)} g` (tail).
pub fn running_sup(g: &RealFun, dir: Direction, cfg: &QuadratureConfig) -> RealFun {
    RealFun::node(Arc::new(RunningNode::new(g.clone(), dir, Running::Sup, cfg)))
}

fn strip(g: &RealFun) -> &RealFun {
    match g {
        RealFun::Labeled(_, inner) => strip(inner),
        other => other,
    }
}

/// Closed forms for `c t^α` and `c e^{γt}` (γ < 0, tail only).
fn closed_running_integral(g: &RealFun, dir: Direction) -> Option<RealFun> {
    match (strip(g), dir) {
        (RealFun::Power { c, alpha }, Direction::Head) if alpha + 1.0 > 0.0 => {
            Some(RealFun::power(c / (alpha + 1.0), alpha + 1.0))
        }
        (RealFun::Power { c, alpha }, Direction::Tail) if alpha + 1.0 < 0.0 => {
            Some(RealFun::power(c / -(alpha + 1.0), alpha + 1.0))
        }
        (RealFun::Exp { c, alpha, gamma }, Direction::Tail) if *alpha == 0.0 && *gamma < 0.0 => {
            Some(RealFun::exp_family(c / -gamma, 0.0, *gamma))
        }
        _ => None,
    }
}

fn finite_pair(q: &Exponent, p: &Exponent) -> Result<(f64, f64)> {
    if q.is_infinite() || p.is_infinite() {
        return Err(Error::InvalidInput(format!("operator indices must be finite, got q = {q}, p = {p}")));
    }
    Ok((q.value(), p.value()))
}

/// Probes a running integral across the working window; `Err` if it is `0`
/// or `∞` at every probe.
fn probe(h: &RealFun, u: &RealFun, what: &str, cfg: &QuadratureConfig) -> Result<()> {
    let (lo, hi) = cfg.window(&[u]);
    let mut any = false;
    for i in 0..=24 {
        let t = (lo + (hi - lo) * i as f64 / 24.0).exp();
        let v = h.ln_eval(t);
        if v.is_finite() {
            any = true;
            break;
        }
    }
    if any {
        Ok(())
    } else {
        Err(Error::DegenerateOperator(format!("{what} of {} is 0 or ∞ on the whole window", u.recipe())))
    }
}

/// `A_{q,p}(u)(x) = (∫_0^x u^q)^{-1/p} · u(x)^{(q-p)/p}`.
pub fn op_a(u: &RealFun, q: &Exponent, p: &Exponent, cfg: &QuadratureConfig) -> Result<Weight> {
    let (qv, pv) = finite_pair(q, p)?;
    let head = running_integral(&u.powf(qv), Direction::Head, cfg);
    probe(&head, u, "∫_0^x u^q", cfg)?;
    let f = RealFun::product(vec![head.powf(-1.0 / pv), u.powf((qv - pv) / pv)]);
    Ok(Weight::unchecked(f.labeled(&format!("A[{q},{p}]({})", short(u)))))
}

/// `A*_{q,p}(u)(x) = (∫_x^∞ u^q)^{1/p} · u(x)^{(p-q)/p}`.
pub fn op_a_star(u: &RealFun, q: &Exponent, p: &Exponent, cfg: &QuadratureConfig) -> Result<Weight> {
    let (qv, pv) = finite_pair(q, p)?;
    let tail = running_integral(&u.powf(qv), Direction::Tail, cfg);
    probe(&tail, u, "∫_x^∞ u^q", cfg)?;
    let f = RealFun::product(vec![tail.powf(1.0 / pv), u.powf((pv - qv) / pv)]);
    Ok(Weight::unchecked(f.labeled(&format!("A*[{q},{p}]({})", short(u)))))
}

fn short(u: &RealFun) -> String {
    let r = u.recipe();
    if r.chars().count() > 60 {
        "·".into()
    } else {
        r
    }
}

/// `V(x) = ‖v‖_{p′,(0,x)}`.
pub fn big_v(v: &RealFun, p: &Exponent, cfg: &QuadratureConfig) -> Weight {
    let pd = dual_exponent(p);
    let f = if pd.is_infinite() {
        match strip(v) {
            RealFun::Power { c, alpha } if *alpha >= 0.0 => RealFun::power(*c, *alpha),
            _ => running_sup(v, Direction::Head, cfg),
        }
    } else {
        let e = pd.value();
        running_integral(&v.powf(e), Direction::Head, cfg).powf(1.0 / e)
    };
    Weight::unchecked(f.labeled(&format!("V[{pd}]({})", short(v))))
}

/// `𝒱(x, t) = V(x) / (V(x) + V(t))`, with `𝒱(x, x) = 1/2`.
pub fn cal_v(big_v: &RealFun, x: f64, t: f64) -> f64 {
    ratio_kernel(big_v.ln_eval(x), big_v.ln_eval(t))
}

fn ratio_kernel(la: f64, lb: f64) -> f64 {
    if la == lb {
        return 0.5;
    }
    if la == NEG_INF {
        return 0.0;
    }
    if lb == NEG_INF || la == POS_INF {
        return 1.0;
    }
    if lb == POS_INF {
        return 0.0;
    }
    1.0 / (1.0 + (lb - la).exp())
}

/// `𝒜(x, t) = a(x) / (a(x) + a(t))` for a non-decreasing `a`.
#[derive(Clone, Debug)]
pub struct KernelA {
    a: Weight,
}

impl KernelA {
    /// Checks that `a` is positive and non-decreasing on the sample grid.
    pub fn new(a: Weight, cfg: &QuadratureConfig) -> Result<Self> {
        let grid = Grid::for_funs(cfg, &[a.fun()]);
        let s = grid.sample(a.fun());
        let vals: Vec<f64> = s.left.iter().zip(&s.right).flat_map(|(l, r)| [*l, *r]).collect();
        for w in vals.windows(2) {
            if !w[0].is_finite() || w[1] < w[0] - 1e-12 * w[0].abs().max(1.0) {
                return Err(Error::InvalidInput(format!("kernel weight {} is not non-decreasing", a.recipe())));
            }
        }
        Ok(KernelA { a })
    }

    pub fn weight(&self) -> &Weight {
        &self.a
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        ratio_kernel(self.a.ln_eval(x), self.a.ln_eval(t))
    }
}

pub fn kernel_a(a: &KernelA, x: f64, t: f64) -> f64 {
    a.eval(x, t)
}

/// An admissible `U` and a representation density `w`.
#[derive(Clone, Debug)]
pub struct FundamentalSpec {
    pub big_u: RealFun,
    pub w: RealFun,
}

#[derive(Debug)]
struct KernelIntegrand {
    w: RealFun,
    big_u: RealFun,
    ln_ut: f64,
}

impl FunctionNode for KernelIntegrand {
    fn ln_eval(&self, tau: f64) -> f64 {
        let lw = self.w.ln_eval(tau);
        if lw == NEG_INF {
            return NEG_INF;
        }
        lw - ln_add(self.big_u.ln_eval(tau), self.ln_ut)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.w.breakpoints();
        b.extend(self.big_u.breakpoints());
        b
    }

    fn recipe(&self) -> String {
        "w/(U+U(t))".into()
    }

    fn exp_rate(&self) -> f64 {
        self.w.exp_rate().max(self.big_u.exp_rate())
    }
}

/// `φ(t) = U(t) ∫_0^∞ w(τ) dτ / (U(τ) + U(t))`.
pub fn fundamental_function(spec: &FundamentalSpec, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if spec.w.is_zero() {
        return Ok(0.0);
    }
    let ln_ut = spec.big_u.ln_eval(t);
    let g = RealFun::node(Arc::new(KernelIntegrand { w: spec.w.clone(), big_u: spec.big_u.clone(), ln_ut }));
    let li = ln_integrate(&g, &Interval::positive(), cfg)?;
    if li == POS_INF || li.is_nan() {
        return Err(Error::DivergentRepresentation { t });
    }
    Ok((ln_ut + li).exp())
}

/// Result of a sampled check, with the sample points that decided it.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub ok: bool,
    pub detail: String,
    /// `(t, value)` pairs; violations when `ok` is false.
    pub witnesses: Vec<(f64, f64)>,
}

fn node_values(f: &RealFun, cfg: &QuadratureConfig, extra: &[&RealFun]) -> (Vec<f64>, Vec<f64>) {
    let mut funs = vec![f];
    funs.extend_from_slice(extra);
    let grid = Grid::for_funs(cfg, &funs);
    let ts = grid.nodes_t().to_vec();
    let vals = ts.iter().map(|t| f.ln_eval(*t)).collect();
    (ts, vals)
}

const MONO_TOL: f64 = 1e-9;

fn monotone_violations(ts: &[f64], ln_vals: &[f64], increasing: bool) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for k in 1..ln_vals.len() {
        let (a, b) = (ln_vals[k - 1], ln_vals[k]);
        let bad = if increasing { b < a - MONO_TOL } else { b > a + MONO_TOL };
        if bad && out.len() < 10 {
            out.push((ts[k], b.exp()));
        }
    }
    out
}

/// `f` non-decreasing and `f / a` non-increasing on the sample grid.
pub fn is_quasiconcave(f: &RealFun, a: &RealFun, cfg: &QuadratureConfig) -> CheckReport {
    let (ts, lf) = node_values(f, cfg, &[a]);
    let la: Vec<f64> = ts.iter().map(|t| a.ln_eval(*t)).collect();
    let up = monotone_violations(&ts, &lf, true);
    if !up.is_empty() {
        return CheckReport { ok: false, detail: "f decreases".into(), witnesses: up };
    }
    let ratio: Vec<f64> = lf.iter().zip(&la).map(|(x, y)| if *x == NEG_INF { NEG_INF } else { x - y }).collect();
    let down = monotone_violations(&ts, &ratio, false);
    if !down.is_empty() {
        return CheckReport { ok: false, detail: "f/a increases".into(), witnesses: down };
    }
    CheckReport { ok: true, detail: format!("monotone on {} nodes", ts.len()), witnesses: Vec::new() }
}

/// `U(0+) = 0`, `U` strictly increasing, `U(∞) = ∞`, all on the sample grid.
pub fn is_admissible(big_u: &RealFun, cfg: &QuadratureConfig) -> CheckReport {
    let (ts, lu) = node_values(big_u, cfg, &[]);
    let mut bad = Vec::new();
    for k in 1..lu.len() {
        if !(lu[k] > lu[k - 1]) && bad.len() < 10 {
            bad.push((ts[k], lu[k].exp()));
        }
    }
    if !bad.is_empty() {
        return CheckReport { ok: false, detail: "U is not strictly increasing".into(), witnesses: bad };
    }
    let at0 = limit_trend(|k| big_u.ln_eval((-(k as f64) * std::f64::consts::LN_2).exp()));
    let at_inf = limit_trend(|k| big_u.ln_eval((k as f64 * std::f64::consts::LN_2).exp()));
    let ok = at0.verdict == Limit::Zero && at_inf.verdict == Limit::Infinity;
    CheckReport {
        ok,
        detail: format!("U(0+): {:?}, U(∞): {:?}", at0.verdict, at_inf.verdict),
        witnesses: vec![at0.witness, at_inf.witness],
    }
}

/// Limit of a positive sequence along `t = 2^{±k}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Limit {
    Zero,
    Infinity,
    Finite(f64),
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitEstimate {
    pub verdict: Limit,
    /// `(k, value)` at the last index used.
    pub witness: (f64, f64),
}

const K_MAX: usize = 40;

/// Classifies `lim_k exp(seq(k))` from the last ten steps up to `k = 40`.
fn limit_trend(seq: impl Fn(usize) -> f64) -> LimitEstimate {
    let xs: Vec<f64> = (0..=K_MAX).map(&seq).collect();
    let last = xs[K_MAX];
    let witness = (K_MAX as f64, last.exp());
    if last == NEG_INF {
        return LimitEstimate { verdict: Limit::Zero, witness };
    }
    if last == POS_INF {
        return LimitEstimate { verdict: Limit::Infinity, witness };
    }
    let tail = &xs[K_MAX - 10..];
    if tail.iter().any(|x| !x.is_finite()) {
        return LimitEstimate { verdict: Limit::Inconclusive, witness };
    }
    let d: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    let eps = 1e-3;
    let verdict = if d.iter().all(|x| *x < -eps) {
        Limit::Zero
    } else if d.iter().all(|x| *x > eps) {
        Limit::Infinity
    } else if d.iter().all(|x| x.abs() <= eps) {
        // Geometric-rate Richardson step for the remaining drift.
        let (d1, d2) = (d[d.len() - 2], d[d.len() - 1]);
        let extra = if d1 != 0.0 && (d2 / d1).abs() < 1.0 { d2 * (d2 / d1) / (1.0 - d2 / d1) } else { 0.0 };
        Limit::Finite((last + extra).exp())
    } else {
        Limit::Inconclusive
    };
    LimitEstimate { verdict, witness }
}

/// The four vanishing limits of `Q_U` membership, plus `U`-quasiconcavity.
#[derive(Clone, Debug, Serialize)]
pub struct NondegeneracyReport {
    pub ok: bool,
    pub quasiconcave: CheckReport,
    /// `φ(0+)`, `1/φ(∞)`, `φ/U (∞)`, `U/φ (0+)`; each must be [`Limit::Zero`].
    pub limits: [LimitEstimate; 4],
}

pub fn is_nondegenerate(phi: &RealFun, big_u: &RealFun, cfg: &QuadratureConfig) -> NondegeneracyReport {
    let ln2 = std::f64::consts::LN_2;
    let at0 = |k: usize| (-(k as f64) * ln2).exp();
    let at_inf = |k: usize| (k as f64 * ln2).exp();
    let limits = [
        limit_trend(|k| phi.ln_eval(at0(k))),
        limit_trend(|k| -phi.ln_eval(at_inf(k))),
        limit_trend(|k| phi.ln_eval(at_inf(k)) - big_u.ln_eval(at_inf(k))),
        limit_trend(|k| big_u.ln_eval(at0(k)) - phi.ln_eval(at0(k))),
    ];
    let quasiconcave = is_quasiconcave(phi, big_u, cfg);
    let ok = quasiconcave.ok && limits.iter().all(|l| l.verdict == Limit::Zero);
    NondegeneracyReport { ok, quasiconcave, limits }
}

#[derive(Debug)]
struct StieltjesNode {
    /// `ln` of the running integral `H`.
    ln_h: RealFun,
    /// Integrand of `H`, used for the increments.
    g: RealFun,
    cfg: QuadratureConfig,
    dir: Direction,
    /// Density is `scale · H^{power} · |d ln H / ds| / t`.
    scale: f64,
    power: f64,
    label: String,
}

const DIFF_STEP: f64 = 1e-2;

impl FunctionNode for StieltjesNode {
    fn ln_eval(&self, t: f64) -> f64 {
        let s = t.ln();
        let lh = self.ln_h.ln_eval(t);
        // `ln H(s+h) - ln H(s-h)` as `ln(1 + ΔH/H)`, with the increment
        // integrated directly so it survives when `H` has saturated.
        let d = |h: f64| {
            let (a, b) = ((s - h).exp(), (s + h).exp());
            let base = match self.dir {
                Direction::Head => self.ln_h.ln_eval(a),
                Direction::Tail => self.ln_h.ln_eval(b),
            };
            let inc = Interval::new(a, b).and_then(|iv| ln_integrate(&self.g, &iv, &self.cfg)).unwrap_or(f64::NAN);
            (inc - base).exp().ln_1p() / (2.0 * h)
        };
        let step = DIFF_STEP.min(DIFF_STEP / (self.g.exp_rate() * t).max(1e-300));
        let (d1, d2) = (d(step), d(step / 2.0));
        let slope = ((4.0 * d2 - d1) / 3.0).abs();
        if !slope.is_finite() || !lh.is_finite() {
            return if lh == POS_INF && self.power < 0.0 { NEG_INF } else { f64::NAN };
        }
        ln_of(self.scale) + ln_pow(lh, self.power) + ln_of(slope) - s
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.ln_h.breakpoints()
    }

    fn recipe(&self) -> String {
        self.label.clone()
    }

    fn exp_rate(&self) -> f64 {
        self.ln_h.exp_rate()
    }
}

/// Density of `d(-‖u‖_{r,(0,t)}^{-(r→p)})`, by differentiating the tabulated
/// primitive (central differences with one Richardson step).
///
/// Equals `((r→p)/r) · A_{r,p}(u)^{r→p}` for `p < r`.
pub fn stieltjes_density(u: &RealFun, r: &Exponent, p: &Exponent, cfg: &QuadratureConfig) -> Result<Weight> {
    let (rv, _) = finite_pair(r, p)?;
    let rho = arrow(r, p);
    if rho.is_infinite() {
        return Err(Error::InvalidInput(format!("r→p is infinite for r = {r}, p = {p}")));
    }
    let rho = rho.value();
    let g = u.powf(rv);
    let h = RealFun::node(Arc::new(RunningNode::new(g.clone(), Direction::Head, Running::Integral, cfg)));
    probe(&h, u, "∫_0^x u^r", cfg)?;
    let node = StieltjesNode {
        ln_h: h,
        g,
        cfg: cfg.clone(),
        dir: Direction::Head,
        scale: rho / rv,
        power: -rho / rv,
        label: format!("d(-‖{}‖_{r}^-{rho})", short(u)),
    };
    Ok(Weight::unchecked(RealFun::node(Arc::new(node))))
}

/// Density of `d(-‖w‖_{q,(t,∞)}^{q′})`; equals `(q′/q) · A*_{q,1}(w)^{q′}`.
pub fn stieltjes_density_tail(w: &RealFun, q: &Exponent, cfg: &QuadratureConfig) -> Result<Weight> {
    let (qv, _) = finite_pair(q, &Exponent::one())?;
    let qd = dual_exponent(q);
    if qd.is_infinite() {
        return Err(Error::InvalidInput("q′ is infinite for q = 1".into()));
    }
    let qd = qd.value();
    let g = w.powf(qv);
    let h = RealFun::node(Arc::new(RunningNode::new(g.clone(), Direction::Tail, Running::Integral, cfg)));
    probe(&h, w, "∫_x^∞ w^q", cfg)?;
    let node = StieltjesNode {
        ln_h: h,
        g,
        cfg: cfg.clone(),
        dir: Direction::Tail,
        scale: qd / qv,
        power: qd / qv,
        label: format!("d(-‖{}‖_(t,∞)^{qd})", short(w)),
    };
    Ok(Weight::unchecked(RealFun::node(Arc::new(node))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        ((a - b) / b).abs() < tol
    }

    #[test]
    fn operator_examples() {
        let one = Exponent::one();
        let half = Exponent::ratio(1, 2).unwrap();
        let a = op_a(&RealFun::one(), &one, &one, &cfg()).unwrap();
        let e = RealFun::exp_family(1.0, 0.0, -1.0);
        let b = op_a_star(&e, &one, &one, &cfg()).unwrap();
        let c = op_a(&RealFun::one(), &half, &half, &cfg()).unwrap();
        for x in [0.01, 0.5, 3.0, 40.0] {
            assert!(close(a.eval(x), 1.0 / x, 1e-12));
            assert!(close(b.eval(x), (-x).exp(), 1e-12));
            assert!(close(c.eval(x), x.powi(-2), 1e-12));
        }
        assert!(matches!(op_a_star(&RealFun::one(), &one, &one, &cfg()), Err(Error::DegenerateOperator(_))));
    }

    #[test]
    fn tabulated_running_integral() {
        // (1 + t)^{-2} has no closed form in the families.
        let g = RealFun::sum(vec![RealFun::one(), RealFun::power(1.0, 1.0)]).powf(-2.0);
        let h = running_integral(&g, Direction::Head, &cfg());
        let t = running_integral(&g, Direction::Tail, &cfg());
        for x in [1e-3, 0.7, 2.5, 1e3] {
            assert!(close(h.eval(x), x / (1.0 + x), 1e-8), "{x}");
            assert!(close(t.eval(x), 1.0 / (1.0 + x), 1e-8), "{x}");
        }
        let s = running_sup(&RealFun::exp_family(1.0, 1.0, -1.0), Direction::Head, &cfg());
        assert!(close(s.eval(0.5), 0.5 * (-0.5f64).exp(), 1e-12));
        assert!(close(s.eval(3.0), (-1f64).exp(), 1e-4));
    }

    #[test]
    fn v_examples() {
        let two = Exponent::int(2);
        let v = big_v(&RealFun::one(), &two, &cfg());
        assert!(close(v.eval(9.0), 3.0, 1e-12));
        let v = big_v(&RealFun::one(), &Exponent::ratio(1, 2).unwrap(), &cfg());
        assert!(close(v.eval(9.0), 9.0, 1e-12));
        assert_eq!(cal_v(&v, 4.0, 4.0), 0.5);
        assert!((cal_v(&v, 1.0, 3.0) + cal_v(&v, 3.0, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kernel_examples() {
        let k = KernelA::new(Weight::unchecked(RealFun::one()), &cfg()).unwrap();
        assert_eq!(k.eval(1.0, 7.0), 0.5);
        let k = KernelA::new(Weight::unchecked(RealFun::power(1.0, 1.0)), &cfg()).unwrap();
        assert_eq!(k.eval(2.0, 2.0), 0.5);
        assert!(close(k.eval(1.0, 3.0), 0.25, 1e-15));
        assert!(KernelA::new(Weight::unchecked(RealFun::power(1.0, -1.0)), &cfg()).is_err());
    }

    #[test]
    fn fundamental_examples() {
        let spec = FundamentalSpec { big_u: RealFun::power(1.0, 1.0), w: RealFun::indicator(1.0, 2.0).unwrap() };
        for t in [0.1, 1.0, 5.0] {
            let phi = fundamental_function(&spec, t, &cfg()).unwrap();
            assert!(close(phi, t * ((2.0 + t) / (1.0 + t)).ln(), 1e-8));
        }
        let zero = FundamentalSpec { big_u: RealFun::power(1.0, 1.0), w: RealFun::zero() };
        assert_eq!(fundamental_function(&zero, 1.0, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn check_examples() {
        let f = RealFun::sum(vec![RealFun::power(1.0, -1.0), RealFun::one()]).powf(-1.0);
        assert!(is_quasiconcave(&f, &RealFun::power(1.0, 1.0), &cfg()).ok);
        assert!(is_admissible(&RealFun::power(1.0, 1.0), &cfg()).ok);
        assert!(!is_admissible(&RealFun::exp_family(1.0, 0.0, -1.0), &cfg()).ok);
        let r = is_nondegenerate(&RealFun::power(1.0, 0.5), &RealFun::power(1.0, 1.0), &cfg());
        assert!(r.ok, "{r:?}");
        let r = is_nondegenerate(&RealFun::one(), &RealFun::power(1.0, 1.0), &cfg());
        assert!(!r.ok);
    }

    #[test]
    fn stieltjes_examples() {
        let d = stieltjes_density(&RealFun::one(), &Exponent::one(), &Exponent::ratio(1, 2).unwrap(), &cfg()).unwrap();
        for x in [0.1, 1.0, 7.0] {
            assert!(close(d.eval(x), x.powi(-2), 1e-6));
        }
        let e = RealFun::exp_family(1.0, 0.0, -1.0);
        let d = stieltjes_density_tail(&e, &Exponent::ratio(1, 2).unwrap(), &cfg()).unwrap();
        for x in [0.1, 1.0, 7.0] {
            assert!(close(d.eval(x), 4.0 * (-x).exp(), 1e-6));
        }
    }
}
