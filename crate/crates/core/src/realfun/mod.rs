//! Functions and weights on `(0, ∞)`, evaluated in the log domain.
//!
//! A [`RealFun`] is a small expression tree over the supported families. The
//! constructors keep power and exponential factors in closed form so that
//! analytic primitives stay available after products and powers.

mod grid;
pub mod logmath;
mod quad;
mod spec;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use logmath::{ln_add, ln_mul, ln_of, ln_pow, NEG_INF, POS_INF};

pub use grid::{Grid, Sampled, GL_N};
pub use quad::{
    esssup, integrate, integrate_numeric, ln_esssup, ln_integrate, ln_lp_norm, lp_norm, primitive_at, tail_at,
    QuadratureConfig,
};
pub use spec::{ExtReal, FunSpec};

/// An open interval `(lo, hi)` with `0 ≤ lo < hi ≤ ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0) || !(hi > lo) || lo.is_infinite() {
            return Err(Error::InvalidInput(format!("invalid interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    /// `(0, ∞)`.
    pub fn positive() -> Self {
        Interval { lo: 0.0, hi: f64::INFINITY }
    }

    pub fn head(x: f64) -> Self {
        Interval { lo: 0.0, hi: x }
    }

    pub fn tail(x: f64) -> Self {
        Interval { lo: x, hi: f64::INFINITY }
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.lo && t < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if hi > lo {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }
}

/// A user-defined or derived function plugged into a [`RealFun`] tree.
///
/// `ln_eval` returns `ln f(t)`, with `-∞` for zero and `+∞` for an infinite
/// value. Operator outputs implement this trait.
pub trait FunctionNode: Send + Sync + fmt::Debug {
    fn ln_eval(&self, t: f64) -> f64;

    /// Points where the function may jump.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Composition string for reports.
    fn recipe(&self) -> String;

    /// `ln ∫_a^b f`, when known in closed form.
    fn ln_integral_hint(&self, _a: f64, _b: f64) -> Option<f64> {
        None
    }

    /// Largest `|γ|` over exponential factors inside; limits the working window.
    fn exp_rate(&self) -> f64 {
        0.0
    }

    fn warnings(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Tabulated function: log-linear interpolation in `(ln t, ln f)`, flat outside.
#[derive(Clone, Debug)]
pub struct Table {
    ln_t: Vec<f64>,
    ln_v: Vec<f64>,
}

impl Table {
    /// `log_t` are natural logarithms of increasing sample points.
    pub fn new(log_t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if log_t.len() != values.len() || log_t.is_empty() {
            return Err(Error::InvalidInput("table needs equally many points and values".into()));
        }
        if log_t.windows(2).any(|w| !(w[1] > w[0])) || log_t.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("table points must be finite and increasing".into()));
        }
        if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput("table values must be finite and positive".into()));
        }
        Ok(Table { ln_t: log_t, ln_v: values.iter().map(|v| v.ln()).collect() })
    }

    fn ln_eval(&self, t: f64) -> f64 {
        let s = t.ln();
        let n = self.ln_t.len();
        if s <= self.ln_t[0] {
            return self.ln_v[0];
        }
        if s >= self.ln_t[n - 1] {
            return self.ln_v[n - 1];
        }
        let k = self.ln_t.partition_point(|x| *x <= s) - 1;
        let w = (s - self.ln_t[k]) / (self.ln_t[k + 1] - self.ln_t[k]);
        self.ln_v[k] * (1.0 - w) + self.ln_v[k + 1] * w
    }

    pub fn points(&self) -> &[f64] {
        &self.ln_t
    }

    pub fn values(&self) -> Vec<f64> {
        self.ln_v.iter().map(|v| v.exp()).collect()
    }
}

/// Nonnegative function on `(0, ∞)`.
#[derive(Clone, Debug)]
pub enum RealFun {
    /// `c · t^α`.
    Power { c: f64, alpha: f64 },
    /// `c · t^α · (1 + |ln t|)^β`.
    PowerLog { c: f64, alpha: f64, beta: f64 },
    /// `c · t^α · e^{γ t}`.
    Exp { c: f64, alpha: f64, gamma: f64 },
    Indicator(Interval),
    Table(Arc<Table>),
    Product(Vec<RealFun>),
    Sum(Vec<RealFun>),
    PowerOf(Box<RealFun>, f64),
    /// Same function, reported under a name.
    Labeled(Arc<str>, Box<RealFun>),
    Node(Arc<dyn FunctionNode>),
}

#[derive(Clone, Copy, Debug)]
struct Mono {
    ln_c: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl Mono {
    fn one() -> Self {
        Mono { ln_c: 0.0, alpha: 0.0, beta: 0.0, gamma: 0.0 }
    }

    fn into_fun(self) -> Vec<RealFun> {
        let c = self.ln_c.exp();
        if self.ln_c == NEG_INF {
            return vec![RealFun::zero()];
        }
        match (self.beta != 0.0, self.gamma != 0.0) {
            (false, false) => vec![RealFun::Power { c, alpha: self.alpha }],
            (true, false) => vec![RealFun::PowerLog { c, alpha: self.alpha, beta: self.beta }],
            (false, true) => vec![RealFun::Exp { c, alpha: self.alpha, gamma: self.gamma }],
            (true, true) => vec![
                RealFun::PowerLog { c, alpha: self.alpha, beta: self.beta },
                RealFun::Exp { c: 1.0, alpha: 0.0, gamma: self.gamma },
            ],
        }
    }
}

impl RealFun {
    pub fn power(c: f64, alpha: f64) -> Self {
        RealFun::Power { c, alpha }
    }

    pub fn powerlog(c: f64, alpha: f64, beta: f64) -> Self {
        if beta == 0.0 {
            RealFun::Power { c, alpha }
        } else {
            RealFun::PowerLog { c, alpha, beta }
        }
    }

    pub fn exp_family(c: f64, alpha: f64, gamma: f64) -> Self {
        if gamma == 0.0 {
            RealFun::Power { c, alpha }
        } else {
            RealFun::Exp { c, alpha, gamma }
        }
    }

    pub fn constant(c: f64) -> Self {
        RealFun::Power { c, alpha: 0.0 }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        Ok(RealFun::Indicator(Interval::new(lo, hi)?))
    }

    pub fn table(log_t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(RealFun::Table(Arc::new(Table::new(log_t, values)?)))
    }

    pub fn node(n: Arc<dyn FunctionNode>) -> Self {
        RealFun::Node(n)
    }

    pub fn labeled(self, name: &str) -> Self {
        RealFun::Labeled(Arc::from(name), Box::new(self))
    }

    /// `ln f(t)`.
    pub fn ln_eval(&self, t: f64) -> f64 {
        match self {
            RealFun::Power { c, alpha } => {
                if *alpha == 0.0 {
                    ln_of(*c)
                } else {
                    ln_mul(ln_of(*c), alpha * t.ln())
                }
            }
            RealFun::PowerLog { c, alpha, beta } => {
                let l = t.ln();
                ln_mul(ln_of(*c), alpha * l + beta * l.abs().ln_1p())
            }
            RealFun::Exp { c, alpha, gamma } => {
                let a = if *alpha == 0.0 { 0.0 } else { alpha * t.ln() };
                ln_mul(ln_of(*c), a + gamma * t)
            }
            RealFun::Indicator(iv) => {
                if iv.contains(t) {
                    0.0
                } else {
                    NEG_INF
                }
            }
            RealFun::Table(tab) => tab.ln_eval(t),
            RealFun::Product(parts) => {
                let mut acc = 0.0;
                for p in parts {
                    let v = p.ln_eval(t);
                    if v == NEG_INF {
                        return NEG_INF;
                    }
                    acc += v;
                }
                acc
            }
            RealFun::Sum(parts) => parts.iter().fold(NEG_INF, |acc, p| ln_add(acc, p.ln_eval(t))),
            RealFun::PowerOf(f, e) => ln_pow(f.ln_eval(t), *e),
            RealFun::Labeled(_, f) => f.ln_eval(t),
            RealFun::Node(n) => n.ln_eval(t),
        }
    }

    /// `f(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        self.ln_eval(t).exp()
    }

    /// Sorted, deduplicated jump locations (table knots included).
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.retain(|x| x.is_finite() && *x > 0.0);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            RealFun::Indicator(iv) => {
                out.push(iv.lo);
                out.push(iv.hi);
            }
            RealFun::Table(tab) => out.extend(tab.points().iter().map(|s| s.exp())),
            RealFun::Product(parts) | RealFun::Sum(parts) => parts.iter().for_each(|p| p.collect_breakpoints(out)),
            RealFun::PowerOf(f, _) | RealFun::Labeled(_, f) => f.collect_breakpoints(out),
            RealFun::Node(n) => out.extend(n.breakpoints()),
            _ => {}
        }
    }

    /// Largest exponential rate `|γ|` appearing in the tree.
    pub fn exp_rate(&self) -> f64 {
        match self {
            RealFun::Exp { gamma, .. } => gamma.abs(),
            RealFun::Product(parts) | RealFun::Sum(parts) => parts.iter().map(|p| p.exp_rate()).fold(0.0, f64::max),
            RealFun::PowerOf(f, e) => f.exp_rate() * e.abs(),
            RealFun::Labeled(_, f) => f.exp_rate(),
            RealFun::Node(n) => n.exp_rate(),
            _ => 0.0,
        }
    }

    /// Notes about approximations made while evaluating (e.g. flat table extension).
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_warnings(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_warnings(&self, out: &mut Vec<String>) {
        match self {
            RealFun::Table(tab) => {
                let p = tab.points();
                out.push(format!(
                    "table extended flat outside [{:.6e}, {:.6e}]",
                    p[0].exp(),
                    p[p.len() - 1].exp()
                ));
            }
            RealFun::Product(parts) | RealFun::Sum(parts) => parts.iter().for_each(|p| p.collect_warnings(out)),
            RealFun::PowerOf(f, _) | RealFun::Labeled(_, f) => f.collect_warnings(out),
            RealFun::Node(n) => out.extend(n.warnings()),
            _ => {}
        }
    }

    /// `ln ∫_a^b f` in closed form, when the family allows it.
    pub fn ln_integral_hint(&self, a: f64, b: f64) -> Option<f64> {
        if !(b > a) {
            return Some(NEG_INF);
        }
        match self {
            RealFun::Power { c, alpha } => Some(ln_mul(ln_of(*c), ln_power_integral(*alpha, a, b))),
            RealFun::Exp { c, alpha, gamma } if *alpha == 0.0 => Some(ln_mul(ln_of(*c), ln_exp_integral(*gamma, a, b))),
            RealFun::Indicator(iv) => {
                let lo = iv.lo.max(a);
                let hi = iv.hi.min(b);
                Some(if hi > lo { ln_of(hi - lo) } else { NEG_INF })
            }
            RealFun::Sum(parts) => {
                let mut acc = NEG_INF;
                for p in parts {
                    acc = ln_add(acc, p.ln_integral_hint(a, b)?);
                }
                Some(acc)
            }
            RealFun::Product(parts) => {
                let mut ln_c = 0.0;
                let mut lo = a;
                let mut hi = b;
                let mut core: Option<&RealFun> = None;
                for p in parts {
                    match p {
                        RealFun::Power { c, alpha } if *alpha == 0.0 => ln_c = ln_mul(ln_c, ln_of(*c)),
                        RealFun::Indicator(iv) => {
                            lo = lo.max(iv.lo);
                            hi = hi.min(iv.hi);
                        }
                        other => {
                            if core.is_some() {
                                return None;
                            }
                            core = Some(other);
                        }
                    }
                }
                if ln_c == NEG_INF || !(hi > lo) {
                    return Some(NEG_INF);
                }
                let inner = match core {
                    Some(f) => f.ln_integral_hint(lo, hi)?,
                    None => ln_of(hi - lo),
                };
                Some(ln_mul(ln_c, inner))
            }
            RealFun::Labeled(_, f) => f.ln_integral_hint(a, b),
            RealFun::Node(n) => n.ln_integral_hint(a, b),
            _ => None,
        }
    }

    pub fn ln_primitive_hint(&self, x: f64) -> Option<f64> {
        self.ln_integral_hint(0.0, x)
    }

    pub fn ln_tail_hint(&self, x: f64) -> Option<f64> {
        self.ln_integral_hint(x, POS_INF)
    }

    /// `self · other`, merging closed-form factors.
    pub fn mul(&self, other: &RealFun) -> RealFun {
        RealFun::product(vec![self.clone(), other.clone()])
    }

    /// `c · self`.
    pub fn scale(&self, c: f64) -> RealFun {
        self.mul(&RealFun::constant(c))
    }

    /// Product of several functions, with power/exp factors and indicators merged.
    pub fn product(parts: Vec<RealFun>) -> RealFun {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                RealFun::Product(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        let mut mono = Mono::one();
        let mut has_mono = false;
        let mut ind: Option<Interval> = None;
        let mut rest = Vec::new();
        for p in flat {
            match p {
                RealFun::Power { c, alpha } => {
                    mono.ln_c = ln_mul(mono.ln_c, ln_of(c));
                    mono.alpha += alpha;
                    has_mono = true;
                }
                RealFun::PowerLog { c, alpha, beta } => {
                    mono.ln_c = ln_mul(mono.ln_c, ln_of(c));
                    mono.alpha += alpha;
                    mono.beta += beta;
                    has_mono = true;
                }
                RealFun::Exp { c, alpha, gamma } => {
                    mono.ln_c = ln_mul(mono.ln_c, ln_of(c));
                    mono.alpha += alpha;
                    mono.gamma += gamma;
                    has_mono = true;
                }
                RealFun::Indicator(iv) => {
                    ind = Some(match ind {
                        None => iv,
                        Some(prev) => match prev.intersect(&iv) {
                            Some(x) => x,
                            None => return RealFun::zero(),
                        },
                    });
                }
                other => rest.push(other),
            }
        }
        if mono.ln_c == NEG_INF {
            return RealFun::zero();
        }
        let mut out = Vec::new();
        let trivial = mono.alpha == 0.0 && mono.beta == 0.0 && mono.gamma == 0.0 && mono.ln_c == 0.0;
        if has_mono && !(trivial && (ind.is_some() || !rest.is_empty())) {
            out.extend(mono.into_fun());
        }
        if let Some(iv) = ind {
            out.push(RealFun::Indicator(iv));
        }
        out.extend(rest);
        match out.len() {
            0 => RealFun::one(),
            1 => out.pop().unwrap(),
            _ => RealFun::Product(out),
        }
    }

    /// Sum of several functions.
    pub fn sum(parts: Vec<RealFun>) -> RealFun {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                RealFun::Sum(inner) => flat.extend(inner),
                RealFun::Power { c, .. } if c == 0.0 => {}
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => RealFun::zero(),
            1 => flat.pop().unwrap(),
            _ => RealFun::Sum(flat),
        }
    }

    /// `self^e`, kept in closed form where possible.
    pub fn powf(&self, e: f64) -> RealFun {
        if e == 1.0 {
            return self.clone();
        }
        if e == 0.0 {
            return RealFun::one();
        }
        match self {
            RealFun::Power { c, alpha } => RealFun::Power { c: c.powf(e), alpha: alpha * e },
            RealFun::PowerLog { c, alpha, beta } => RealFun::PowerLog { c: c.powf(e), alpha: alpha * e, beta: beta * e },
            RealFun::Exp { c, alpha, gamma } => RealFun::Exp { c: c.powf(e), alpha: alpha * e, gamma: gamma * e },
            RealFun::Indicator(iv) if e > 0.0 => RealFun::Indicator(*iv),
            RealFun::Product(parts) => RealFun::product(parts.iter().map(|p| p.powf(e)).collect()),
            RealFun::PowerOf(f, e1) => {
                let e2 = e1 * e;
                if e2 == 1.0 {
                    (**f).clone()
                } else {
                    RealFun::PowerOf(f.clone(), e2)
                }
            }
            other => RealFun::PowerOf(Box::new(other.clone()), e),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RealFun::Power { c, .. } if *c == 0.0)
    }

    /// Composition string for reports.
    pub fn recipe(&self) -> String {
        match self {
            RealFun::Power { c, alpha } => fmt_mono(*c, *alpha, 0.0, 0.0),
            RealFun::PowerLog { c, alpha, beta } => fmt_mono(*c, *alpha, *beta, 0.0),
            RealFun::Exp { c, alpha, gamma } => fmt_mono(*c, *alpha, 0.0, *gamma),
            RealFun::Indicator(iv) => format!("1({}, {})", fmt_num(iv.lo), fmt_num(iv.hi)),
            RealFun::Table(tab) => format!("table[{}]", tab.points().len()),
            RealFun::Product(parts) => parts.iter().map(|p| wrap(p)).collect::<Vec<_>>().join("·"),
            RealFun::Sum(parts) => format!("({})", parts.iter().map(|p| p.recipe()).collect::<Vec<_>>().join(" + ")),
            RealFun::PowerOf(f, e) => format!("{}^{}", wrap(f), fmt_num(*e)),
            RealFun::Labeled(name, _) => name.to_string(),
            RealFun::Node(n) => n.recipe(),
        }
    }

    /// Serializable record for base families; `None` for derived nodes.
    pub fn to_spec(&self) -> Option<FunSpec> {
        spec::to_spec(self)
    }
}

fn wrap(f: &RealFun) -> String {
    let r = f.recipe();
    match f {
        RealFun::Product(_) => format!("({r})"),
        RealFun::Power { c, alpha } if *c != 1.0 && *alpha != 0.0 => format!("({r})"),
        RealFun::PowerLog { .. } | RealFun::Exp { .. } => format!("({r})"),
        _ => r,
    }
}

fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

fn fmt_mono(c: f64, alpha: f64, beta: f64, gamma: f64) -> String {
    let mut parts = Vec::new();
    if c != 1.0 || (alpha == 0.0 && beta == 0.0 && gamma == 0.0) {
        parts.push(fmt_num(c));
    }
    if alpha != 0.0 {
        parts.push(if alpha == 1.0 { "t".into() } else { format!("t^{}", fmt_num(alpha)) });
    }
    if beta != 0.0 {
        parts.push(format!("(1+|ln t|)^{}", fmt_num(beta)));
    }
    if gamma != 0.0 {
        parts.push(format!("exp({}t)", fmt_num(gamma)));
    }
    parts.join("·")
}

/// `ln ∫_a^b t^α dt` for `0 ≤ a < b ≤ ∞`.
pub(crate) fn ln_power_integral(alpha: f64, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return NEG_INF;
    }
    let k = alpha + 1.0;
    if k == 0.0 {
        if a == 0.0 || b.is_infinite() {
            return POS_INF;
        }
        return (b.ln() - a.ln()).ln();
    }
    if k > 0.0 {
        if b.is_infinite() {
            return POS_INF;
        }
        let lb = k * b.ln() - k.ln();
        if a == 0.0 {
            return lb;
        }
        // b^k (1 - (a/b)^k) / k
        lb + (-(k * (a / b).ln()).exp_m1()).ln()
    } else {
        if a == 0.0 {
            return POS_INF;
        }
        let la = k * a.ln() - (-k).ln();
        if b.is_infinite() {
            return la;
        }
        // a^k (1 - (b/a)^k) / (-k)
        la + (-(k * (b / a).ln()).exp_m1()).ln()
    }
}

/// `ln ∫_a^b e^{γt} dt` for `0 ≤ a < b ≤ ∞`.
pub(crate) fn ln_exp_integral(gamma: f64, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return NEG_INF;
    }
    if gamma == 0.0 {
        return if b.is_infinite() { POS_INF } else { (b - a).ln() };
    }
    if gamma < 0.0 {
        // e^{γa} (1 - e^{γ(b-a)}) / (-γ)
        let d = if b.is_infinite() { 1.0 } else { -(gamma * (b - a)).exp_m1() };
        gamma * a + d.ln() - (-gamma).ln()
    } else {
        if b.is_infinite() {
            return POS_INF;
        }
        // e^{γb} (1 - e^{-γ(b-a)}) / γ
        gamma * b + (-(-gamma * (b - a)).exp_m1()).ln() - gamma.ln()
    }
}

/// A strictly positive, a.e. finite function.
#[derive(Clone, Debug)]
pub struct Weight(RealFun);

impl Weight {
    /// Validates positivity and finiteness on a coarse log grid over `[e^{-30}, e^{30}]`.
    pub fn new(f: RealFun) -> Result<Self> {
        let n = 241;
        for i in 0..n {
            let s = -30.0 + 60.0 * i as f64 / (n - 1) as f64;
            let v = f.ln_eval(s.exp());
            if v == NEG_INF || v == POS_INF || v.is_nan() {
                return Err(Error::InvalidInput(format!(
                    "weight {} is not positive and finite at t = {:.4e}",
                    f.recipe(),
                    s.exp()
                )));
            }
        }
        Ok(Weight(f))
    }

    /// Wraps without checking; for derived weights built by this crate.
    pub fn unchecked(f: RealFun) -> Self {
        Weight(f)
    }

    pub fn fun(&self) -> &RealFun {
        &self.0
    }

    pub fn into_fun(self) -> RealFun {
        self.0
    }

    pub fn labeled(self, name: &str) -> Self {
        Weight(self.0.labeled(name))
    }
}

impl std::ops::Deref for Weight {
    type Target = RealFun;
    fn deref(&self) -> &RealFun {
        &self.0
    }
}

impl From<Weight> for RealFun {
    fn from(w: Weight) -> RealFun {
        w.0
    }
}
