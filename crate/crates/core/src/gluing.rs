//! Gluing functionals: the two sides of each kernel inequality built from
//! `𝒜(x,t) = a(x)/(a(x)+a(t))`, dyadic covering sequences, and the discrete
//! lemmas for almost geometric sequences.
//!
//! The left-hand sides are evaluated by direct double loops over the sample
//! points of a log grid; the right-hand sides use running integrals and
//! suprema on the same grid, so both sides share one discretization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::exponents::Exponent;
use crate::operators::{running_integral, Direction};
use crate::realfun::logmath::{ln_mul, ln_pow, NEG_INF, POS_INF};
use crate::realfun::{FunSpec, Grid, QuadratureConfig, RealFun, Sampled, GL_N};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LemmaId {
    SupSup,
    SupInt,
    IntSup,
    IntIntSup,
    Integral,
    Mixed,
}

impl LemmaId {
    pub const ALL: [LemmaId; 6] =
        [LemmaId::SupSup, LemmaId::SupInt, LemmaId::IntSup, LemmaId::IntIntSup, LemmaId::Integral, LemmaId::Mixed];

    /// Number of exponents the lemma takes.
    pub fn arity(self) -> usize {
        match self {
            LemmaId::SupSup => 0,
            LemmaId::SupInt | LemmaId::IntSup | LemmaId::Mixed => 1,
            LemmaId::IntIntSup => 2,
            LemmaId::Integral => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::SupSup => "SUP_SUP",
            LemmaId::SupInt => "SUP_INT",
            LemmaId::IntSup => "INT_SUP",
            LemmaId::IntIntSup => "INT_INT_SUP",
            LemmaId::Integral => "INTEGRAL",
            LemmaId::Mixed => "MIXED",
        }
    }
}

/// One instance of a gluing lemma. `exps` holds `β`, `(α, β)` or `(α, β, γ)`.
#[derive(Clone, Debug)]
pub struct GlueInstance {
    pub lemma: LemmaId,
    pub g: RealFun,
    pub h: RealFun,
    /// Non-decreasing.
    pub a: RealFun,
    pub exps: Vec<f64>,
}

/// Serializable form of a [`GlueInstance`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlueRecord {
    pub lemma: LemmaId,
    pub g: FunSpec,
    pub h: FunSpec,
    pub a: FunSpec,
    #[serde(default)]
    pub exps: Vec<f64>,
}

impl GlueInstance {
    pub fn new(lemma: LemmaId, g: RealFun, h: RealFun, a: RealFun, exps: Vec<f64>) -> Result<Self> {
        if exps.len() != lemma.arity() {
            return Err(Error::InvalidInput(format!(
                "{} takes {} exponents, got {}",
                lemma.name(),
                lemma.arity(),
                exps.len()
            )));
        }
        if exps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidInput("gluing exponents must be positive and finite".into()));
        }
        Ok(GlueInstance { lemma, g, h, a, exps })
    }

    pub fn to_record(&self) -> Option<GlueRecord> {
        Some(GlueRecord {
            lemma: self.lemma,
            g: self.g.to_spec()?,
            h: self.h.to_spec()?,
            a: self.a.to_spec()?,
            exps: self.exps.clone(),
        })
    }

    pub fn from_record(r: &GlueRecord) -> Result<Self> {
        GlueInstance::new(r.lemma, r.g.build()?, r.h.build()?, r.a.build()?, r.exps.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlueResult {
    pub lhs: f64,
    pub rhs_terms: Vec<f64>,
    pub rhs: f64,
    /// `lhs / rhs`; `None` when both sides are `0` or both are `∞`.
    pub ratio: Option<f64>,
}

impl GlueResult {
    fn new(lhs: f64, rhs_terms: Vec<f64>) -> Self {
        let rhs: f64 = rhs_terms.iter().sum();
        let ratio = if (lhs == 0.0 && rhs == 0.0) || (lhs.is_infinite() && rhs.is_infinite()) {
            None
        } else if rhs == 0.0 {
            Some(f64::INFINITY)
        } else {
            Some(lhs / rhs)
        };
        GlueResult { lhs, rhs_terms, rhs, ratio }
    }

    /// Two-sided equivalence within `[lo, hi]`; indeterminate ratios pass.
    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.ratio.map_or(true, |r| r >= lo && r <= hi)
    }

    /// Every right-hand term is at most `c · lhs`.
    pub fn terms_dominated(&self, c: f64) -> bool {
        self.rhs_terms.iter().all(|t| *t <= c * self.lhs || (t.is_infinite() && self.lhs.is_infinite()))
    }
}

/// Linear-domain samples used by the double loops.
struct Points {
    /// Values at every node (both limits) and GL point: `(a, f)`.
    sup: Vec<(f64, f64)>,
    /// Values at GL points with quadrature weights: `(a, f, w)`.
    int: Vec<(f64, f64, f64)>,
}

impl Points {
    fn new(grid: &Grid, a: &Sampled, f: &Sampled) -> Points {
        let n = grid.n_panels();
        let mut sup = Vec::with_capacity((n + 1) * (GL_N + 2));
        let mut int = Vec::with_capacity(n * GL_N);
        let s = grid.nodes_s();
        for k in 0..=n {
            sup.push((a.left[k].exp(), f.left[k].exp()));
            sup.push((a.right[k].exp(), f.right[k].exp()));
            if k == n {
                break;
            }
            let hk = s[k + 1] - s[k];
            for j in 0..GL_N {
                let sj = grid.gl_s(k, j);
                let (av, fv) = (a.inner[k][j].exp(), f.inner[k][j].exp());
                sup.push((av, fv));
                int.push((av, fv, GL_WEIGHTS[j] * hk * sj.exp()));
            }
        }
        Points { sup, int }
    }

    fn clone_support(&self) -> Points {
        Points { sup: self.sup.clone(), int: self.int.clone() }.support()
    }

    /// Drops the points where `f` vanishes.
    fn support(mut self) -> Points {
        self.sup.retain(|p| p.1 > 0.0);
        self.int.retain(|p| p.1 > 0.0);
        self
    }
}

const GL_WEIGHTS: [f64; GL_N] = [
    0.118463442528094543757132020359959,
    0.239314335249683234020645757417819,
    0.284444444444444444444444444444444,
    0.239314335249683234020645757417819,
    0.118463442528094543757132020359959,
];

/// `sup_t K g(t)` where `K = a(x)/(a(x)+a(t))` (`fwd`) or `a(t)/(a(t)+a(x))`.
fn kernel_sup(ax: f64, pts: &Points, fwd: bool) -> f64 {
    let mut m: f64 = 0.0;
    for &(at, f) in &pts.sup {
        let k = if fwd { ax / (ax + at) } else { at / (ax + at) };
        m = m.max(k * f);
    }
    m
}

fn kernel_int(ax: f64, pts: &Points, fwd: bool, e: f64) -> f64 {
    let mut acc = 0.0;
    for &(at, f, w) in &pts.int {
        let k = if fwd { ax / (ax + at) } else { at / (ax + at) };
        let ke = if e == 1.0 { k } else { k.powf(e) };
        acc += w * ke * f;
    }
    acc
}

fn pow0(x: f64, e: f64) -> f64 {
    ln_pow(x.ln(), e).exp()
}

fn mul0(x: f64, y: f64) -> f64 {
    ln_mul(x.ln(), y.ln()).exp()
}

/// Left-hand side by brute force over all sample pairs.
fn lhs(inst: &GlueInstance, grid: &Grid, a: &Sampled, g: &Sampled, h: &Sampled) -> f64 {
    let gx = Points::new(grid, a, g);
    let gp = gx.clone_support();
    let hp = Points::new(grid, a, h).support();
    let e = &inst.exps;
    match inst.lemma {
        // Outer integral over x at the GL points, weighted by g(x).
        LemmaId::Integral | LemmaId::Mixed => {
            let mut total = 0.0;
            for &(ax, gv, w) in &gx.int {
                if gv == 0.0 {
                    continue;
                }
                let v = if inst.lemma == LemmaId::Integral {
                    let (al, b, ga) = (e[0], e[1], e[2]);
                    mul0(pow0(kernel_int(ax, &gp, true, al), ga / al - 1.0), pow0(kernel_int(ax, &hp, false, b), ga / b))
                } else {
                    let b = e[0];
                    mul0(pow0(kernel_int(ax, &gp, true, 1.0), b - 1.0), pow0(kernel_sup(ax, &hp, false), b))
                };
                total += w * mul0(v, gv);
            }
            total
        }
        // Outer supremum over every sample point.
        _ => {
            let mut best: f64 = 0.0;
            for &(ax, _) in &gx.sup {
                let v = match inst.lemma {
                    LemmaId::SupSup => mul0(kernel_sup(ax, &gp, true), kernel_sup(ax, &hp, false)),
                    LemmaId::SupInt => {
                        let b = e[0];
                        mul0(kernel_sup(ax, &gp, true), pow0(kernel_int(ax, &hp, false, b), 1.0 / b))
                    }
                    LemmaId::IntSup => {
                        let b = e[0];
                        mul0(pow0(kernel_int(ax, &gp, true, b), 1.0 / b), kernel_sup(ax, &hp, false))
                    }
                    _ => {
                        let (al, b) = (e[0], e[1]);
                        mul0(pow0(kernel_int(ax, &gp, true, b), 1.0 / b), pow0(kernel_int(ax, &hp, false, al), 1.0 / al))
                    }
                };
                best = best.max(v);
            }
            best
        }
    }
}

/// Right-hand side terms from running integrals and suprema.
fn rhs_terms(inst: &GlueInstance, grid: &Grid, a: &Sampled, g: &Sampled, h: &Sampled) -> Vec<f64> {
    let e = &inst.exps;
    let head = |f: &Sampled| f.cumulative_head(grid).0;
    let tail = |f: &Sampled| f.cumulative_tail(grid).0;
    let sup_head = |f: &Sampled| f.running_sup_head(grid).0;
    let sup_tail = |f: &Sampled| f.running_sup_tail(grid).0;
    let a_pow = |p: f64| a.pow(p);
    let sup = |f: Sampled| f.total_sup(grid).exp();
    let int = |f: Sampled| f.total_integral(grid).exp();
    match inst.lemma {
        LemmaId::SupSup => vec![
            sup(g.mul(&sup_tail(h))),
            sup(a_pow(-1.0).mul(g).mul(&sup_head(&a.mul(h)))),
        ],
        LemmaId::SupInt => {
            let b = e[0];
            vec![
                sup(g.mul(&tail(h).pow(1.0 / b))),
                sup(a_pow(-1.0).mul(g).mul(&head(&a_pow(b).mul(h)).pow(1.0 / b))),
            ]
        }
        LemmaId::IntSup => {
            let b = e[0];
            vec![
                sup(h.mul(&head(g).pow(1.0 / b))),
                sup(a.mul(h).mul(&tail(&a_pow(-b).mul(g)).pow(1.0 / b))),
            ]
        }
        LemmaId::IntIntSup => {
            let (al, b) = (e[0], e[1]);
            vec![
                sup(head(g).pow(1.0 / b).mul(&tail(h).pow(1.0 / al))),
                sup(tail(&a_pow(-b).mul(g)).pow(1.0 / b).mul(&head(&a_pow(al).mul(h)).pow(1.0 / al))),
            ]
        }
        LemmaId::Integral => {
            let (al, b, ga) = (e[0], e[1], e[2]);
            let ag = a_pow(-al).mul(g);
            vec![
                int(head(g).pow(ga / al - 1.0).mul(&tail(h).pow(ga / b)).mul(g)),
                int(tail(&ag).pow(ga / al - 1.0).mul(&head(&a_pow(b).mul(h)).pow(ga / b)).mul(&ag)),
            ]
        }
        LemmaId::Mixed => {
            let b = e[0];
            let ag = a_pow(-1.0).mul(g);
            vec![
                int(head(g).pow(b - 1.0).mul(&sup_tail(h).pow(b)).mul(g)),
                int(tail(&ag).pow(b - 1.0).mul(&sup_head(&a.mul(h)).pow(b)).mul(&ag)),
            ]
        }
    }
}

/// Evaluates both sides of the lemma on one grid.
pub fn glue_eval(inst: &GlueInstance, cfg: &QuadratureConfig) -> Result<GlueResult> {
    cfg.validate()?;
    let grid = Grid::for_funs(cfg, &[&inst.g, &inst.h, &inst.a]);
    let a = grid.sample(&inst.a);
    let bad_a = a.left.windows(2).any(|w| w[1] < w[0] - 1e-12 * w[0].abs().max(1.0));
    if bad_a || a.left.iter().chain(&a.right).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("gluing weight {} must be positive and non-decreasing", inst.a.recipe())));
    }
    let g = grid.sample(&inst.g);
    let h = grid.sample(&inst.h);
    let l = lhs(inst, &grid, &a, &g, &h);
    let terms = rhs_terms(inst, &grid, &a, &g, &h);
    Ok(GlueResult::new(l, terms))
}

/// Settings for randomized instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlueGenerator {
    /// Exponents are drawn log-uniformly from this range.
    pub exp_range: (f64, f64),
    /// Supports of `g`, `h` lie inside `[e^{-spread}, e^{spread}]`.
    pub spread: f64,
    /// Exponent range of `a(t) = c t^κ`.
    pub kappa_max: f64,
}

impl Default for GlueGenerator {
    fn default() -> Self {
        GlueGenerator { exp_range: (0.5, 3.0), spread: 6.0, kappa_max: 2.0 }
    }
}

impl GlueGenerator {
    fn mixture(&self, rng: &mut ChaCha8Rng) -> RealFun {
        let parts = rng.gen_range(1..=3);
        let mut out = Vec::with_capacity(parts);
        for _ in 0..parts {
            let c = rng.gen_range(-2.0f64..2.0).exp();
            let gamma = rng.gen_range(-2.0..2.0);
            let lo = rng.gen_range(-self.spread..self.spread - 0.5);
            let hi = (lo + rng.gen_range(0.5..4.0)).min(self.spread);
            let ind = RealFun::indicator(lo.exp(), hi.exp()).expect("ordered bounds");
            out.push(RealFun::product(vec![RealFun::power(c, gamma), ind]));
        }
        RealFun::sum(out)
    }

    /// A reproducible random instance.
    pub fn instance(&self, lemma: LemmaId, seed: u64) -> GlueInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = self.mixture(&mut rng);
        let h = self.mixture(&mut rng);
        let a = RealFun::power(rng.gen_range(-1.0f64..1.0).exp(), rng.gen_range(0.0..self.kappa_max));
        let (lo, hi) = (self.exp_range.0.ln(), self.exp_range.1.ln());
        let exps = (0..lemma.arity()).map(|_| rng.gen_range(lo..=hi).exp()).collect();
        GlueInstance { lemma, g, h, a, exps }
    }
}

/// Grid settings used by the randomized suite.
pub fn suite_config() -> QuadratureConfig {
    QuadratureConfig { domain_cut: 12.0, panels: 64, rel_tol: 1e-10, sup_grid: 24 }
}

/// Per-instance seed for instance `i` of a suite.
pub fn instance_seed(seed: u64, lemma: LemmaId, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((lemma as u64) << 32)
        .wrapping_add(i as u64)
}

/// `n` seeded instances of one lemma, evaluated in parallel.
pub fn glue_suite(
    lemma: LemmaId,
    n: usize,
    seed: u64,
    gen: &GlueGenerator,
    cfg: &QuadratureConfig,
) -> Vec<(GlueInstance, Result<GlueResult>)> {
    exec::par_map_range(n, |i| {
        let inst = gen.instance(lemma, instance_seed(seed, lemma, i));
        let res = glue_eval(&inst, cfg);
        (inst, res)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverDirection {
    Head,
    Tail,
}

/// Points `x_m` with `∫_0^{x_m} g = 2^m` (head) or `∫_{x_m}^∞ g = 2^{-m}` (tail).
#[derive(Clone, Debug, Serialize)]
pub struct DyadicCover {
    pub direction: CoverDirection,
    /// First level `N`.
    pub first: i64,
    /// Last level `M`.
    pub last: i64,
    /// `x_N, …, x_M`, increasing.
    pub points: Vec<f64>,
    pub warnings: Vec<String>,
}

impl DyadicCover {
    pub fn level(&self, m: i64) -> Option<f64> {
        if m < self.first || m > self.last {
            return None;
        }
        self.points.get((m - self.first) as usize).copied()
    }
}

/// Solves for the dyadic points by bisection in `ln t` on the primitive.
pub fn dyadic_cover(g: &RealFun, direction: CoverDirection, cfg: &QuadratureConfig) -> Result<DyadicCover> {
    let dir = match direction {
        CoverDirection::Head => Direction::Head,
        CoverDirection::Tail => Direction::Tail,
    };
    let prim = running_integral(g, dir, cfg);
    let (lo, hi) = cfg.window(&[g]);
    let ln2 = std::f64::consts::LN_2;
    let at = |s: f64| prim.ln_eval(s.exp()) / ln2;
    let (l_lo, l_hi) = (at(lo), at(hi));
    let mut warnings = Vec::new();
    // Log2 of the running integral is non-decreasing (head) or non-increasing (tail) in s.
    let (first, last, sign) = match direction {
        CoverDirection::Head => {
            if l_hi == NEG_INF {
                return Err(Error::ZeroMass);
            }
            let total = crate::realfun::ln_integrate(g, &crate::realfun::Interval::positive(), cfg)? / ln2;
            let last = if total == POS_INF || total.floor() > l_hi.floor() {
                warnings.push("total mass exceeds the window; levels truncated at the upper edge".into());
                l_hi.floor() as i64
            } else {
                total.floor() as i64
            };
            (l_lo.ceil().max(-1e6) as i64, last, 1.0)
        }
        CoverDirection::Tail => {
            if l_lo == NEG_INF {
                return Err(Error::ZeroMass);
            }
            if l_lo == POS_INF {
                warnings.push("tail mass is infinite at the lower edge".into());
            }
            // ∫_{x_m}^∞ g = 2^{-m}: m runs from -log2(tail at lo) to -log2(tail at hi).
            let first = if l_lo.is_finite() { (-l_lo).ceil() as i64 } else { (-at(lo + 1.0)).ceil() as i64 };
            let last = if l_hi == NEG_INF { i64::MAX } else { (-l_hi).floor() as i64 };
            (first, last.min(first + 4000), -1.0)
        }
    };
    let mut points = Vec::new();
    if last >= first {
        for m in first..=last {
            let target = sign * m as f64;
            // Find s with at(s) = target (head) or at(s) = -m (tail).
            let (mut a, mut b) = (lo, hi);
            let f = |s: f64| at(s) - target;
            if sign > 0.0 {
                if f(a) > 0.0 || f(b) < 0.0 {
                    continue;
                }
            } else if f(a) < 0.0 || f(b) > 0.0 {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let v = f(mid);
                let go_right = if sign > 0.0 { v < 0.0 } else { v > 0.0 };
                if go_right {
                    a = mid;
                } else {
                    b = mid;
                }
                if b - a < 1e-14 {
                    break;
                }
            }
            points.push((0.5 * (a + b)).exp());
        }
    }
    let last = first + points.len() as i64 - 1;
    Ok(DyadicCover { direction, first, last, points, warnings })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Dec,
    Inc,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlmostGeometricWitness {
    pub direction: Trend,
    pub alpha: f64,
    pub l: usize,
    pub k: f64,
}

const ALPHAS: [f64; 4] = [1.1, 1.5, 2.0, 4.0];
const MAX_L: usize = 8;

/// Searches the `(α, L)` lattice for the strongest rate `α^{1/L}`; ties go to
/// the smaller `L`. `K` is the largest adjacent ratio against the trend.
pub fn almost_geometric_check(seq: &[f64], direction: Trend) -> Option<AlmostGeometricWitness> {
    if seq.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return None;
    }
    let k = seq
        .windows(2)
        .map(|w| match direction {
            Trend::Dec => w[1] / w[0],
            Trend::Inc => w[0] / w[1],
        })
        .fold(1.0, f64::max);
    let holds = |alpha: f64, l: usize| {
        (l..seq.len()).all(|i| match direction {
            Trend::Dec => alpha * seq[i] <= seq[i - l],
            Trend::Inc => seq[i] >= alpha * seq[i - l],
        })
    };
    let mut best: Option<(f64, AlmostGeometricWitness)> = None;
    for l in 1..=MAX_L.min(seq.len().saturating_sub(1).max(1)) {
        for &alpha in &ALPHAS {
            if !holds(alpha, l) {
                continue;
            }
            let rate = alpha.powf(1.0 / l as f64);
            if best.map_or(true, |(r, _)| rate > r + 1e-12) {
                best = Some((rate, AlmostGeometricWitness { direction, alpha, l, k }));
            }
        }
    }
    best.map(|b| b.1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscreteLemma {
    Agd,
    Agi,
}

/// Whether the inner accumulation is a partial sum or a partial maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Accumulate {
    Sum,
    Sup,
}

fn lq(xs: &[f64], q: &Exponent) -> f64 {
    if q.is_infinite() {
        xs.iter().cloned().fold(0.0, f64::max)
    } else {
        let qv = q.value();
        xs.iter().map(|x| x.powf(qv)).sum::<f64>().powf(1.0 / qv)
    }
}

/// `(‖τ_k Σ_{m≤k} a_m‖_q, ‖τ_k a_k‖_q)` for AGD; AGI accumulates over `m ≥ k`.
pub fn discrete_equiv(
    lemma: DiscreteLemma,
    acc: Accumulate,
    seq: &[f64],
    a: &[f64],
    q: &Exponent,
) -> Result<(f64, f64)> {
    if seq.len() != a.len() || a.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::InvalidInput("sequences must have equal length and a ≥ 0".into()));
    }
    let trend = match lemma {
        DiscreteLemma::Agd => Trend::Dec,
        DiscreteLemma::Agi => Trend::Inc,
    };
    almost_geometric_check(seq, trend).ok_or(Error::NoWitness)?;
    let n = a.len();
    let mut running = vec![0.0; n];
    let combine = |x: f64, y: f64| match acc {
        Accumulate::Sum => x + y,
        Accumulate::Sup => x.max(y),
    };
    match lemma {
        DiscreteLemma::Agd => {
            let mut c = 0.0;
            for k in 0..n {
                c = combine(c, a[k]);
                running[k] = c;
            }
        }
        DiscreteLemma::Agi => {
            let mut c = 0.0;
            for k in (0..n).rev() {
                c = combine(c, a[k]);
                running[k] = c;
            }
        }
    }
    let left: Vec<f64> = (0..n).map(|k| seq[k] * running[k]).collect();
    let right: Vec<f64> = (0..n).map(|k| seq[k] * a[k]).collect();
    Ok((lq(&left, q), lq(&right, q)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_sup_examples() {
        let cfg = suite_config();
        let ind = RealFun::indicator(0.0, 1.0).unwrap();
        let inst = GlueInstance::new(LemmaId::SupSup, ind.clone(), ind.clone(), RealFun::one(), vec![]).unwrap();
        let r = glue_eval(&inst, &cfg).unwrap();
        assert!((r.lhs - 0.25).abs() < 1e-12, "{r:?}");
        assert!((r.rhs - 2.0).abs() < 1e-12, "{r:?}");
        let zero = GlueInstance::new(LemmaId::SupSup, ind, RealFun::zero(), RealFun::one(), vec![]).unwrap();
        let r = glue_eval(&zero, &cfg).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ratio), (0.0, 0.0, None));
    }

    #[test]
    fn dyadic_examples() {
        let cfg = QuadratureConfig::default();
        let c = dyadic_cover(&RealFun::one(), CoverDirection::Head, &cfg).unwrap();
        for m in [-5, 0, 7] {
            let x = c.level(m).unwrap();
            assert!((x / 2f64.powi(m as i32) - 1.0).abs() < 1e-10);
        }
        assert!(!c.warnings.is_empty());
        let c = dyadic_cover(&RealFun::power(2.0, 1.0), CoverDirection::Head, &cfg).unwrap();
        assert!((c.level(3).unwrap() / 2f64.powf(1.5) - 1.0).abs() < 1e-10);
        let five = RealFun::product(vec![RealFun::constant(5.0), RealFun::exp_family(1.0, 0.0, -1.0)]);
        let c = dyadic_cover(&five, CoverDirection::Head, &cfg).unwrap();
        assert_eq!(c.last, 2);
        assert!(dyadic_cover(&RealFun::zero(), CoverDirection::Head, &cfg).is_err());
    }

    #[test]
    fn witness_examples() {
        let geo: Vec<f64> = (0..12).map(|k| 2f64.powi(-k)).collect();
        let w = almost_geometric_check(&geo, Trend::Dec).unwrap();
        assert_eq!((w.alpha, w.l, w.k), (2.0, 1, 1.0));
        assert!(almost_geometric_check(&[1.0; 8], Trend::Dec).is_none());
        let wiggle: Vec<f64> = (0..12).map(|k| 2f64.powi(-k) * (1.0 + 0.1 * (-1f64).powi(k))).collect();
        let w = almost_geometric_check(&wiggle, Trend::Dec).unwrap();
        assert_eq!(w.l, 2);
        assert!(w.k <= 1.25);
    }

    #[test]
    fn discrete_examples() {
        let tau: Vec<f64> = (0..40).map(|k| 2f64.powi(-k)).collect();
        let mut a = vec![0.0; 40];
        a[0] = 1.0;
        let (l, r) = discrete_equiv(DiscreteLemma::Agd, Accumulate::Sum, &tau, &a, &Exponent::one()).unwrap();
        assert!((l - 2.0).abs() < 1e-9 && r == 1.0);
        let z = discrete_equiv(DiscreteLemma::Agd, Accumulate::Sum, &tau, &[0.0; 40], &Exponent::one()).unwrap();
        assert_eq!(z, (0.0, 0.0));
        let sigma: Vec<f64> = (0..10).map(|k| 2f64.powi(k)).collect();
        let mut a = vec![0.0; 10];
        a[9] = 3.0;
        let (l, r) = discrete_equiv(DiscreteLemma::Agi, Accumulate::Sum, &sigma, &a, &Exponent::infinity()).unwrap();
        assert_eq!((l, r), (512.0 * 3.0, 512.0 * 3.0));
        assert_eq!(
            discrete_equiv(DiscreteLemma::Agd, Accumulate::Sum, &[1.0; 4], &[1.0; 4], &Exponent::one()),
            Err(Error::NoWitness)
        );
    }
}
