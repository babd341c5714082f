//! Integration and essential suprema over subintervals of `(0, ∞)`.

use serde::{Deserialize, Serialize};

use super::logmath::{ln_sum, NEG_INF, POS_INF};
use super::{Interval, RealFun};
use crate::error::{Error, Result};
use crate::exponents::Exponent;

/// Numerical settings shared by every computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Working window is `[e^{-S}, e^{S}]`.
    #[serde(rename = "S")]
    pub domain_cut: f64,
    /// Initial panel count for adaptive quadrature.
    pub panels: usize,
    pub rel_tol: f64,
    /// Grid points per decade for suprema and nested norms.
    pub sup_grid: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { domain_cut: 30.0, panels: 64, rel_tol: 1e-10, sup_grid: 64 }
    }
}

/// Exponential factors are followed up to `|γ| t = EXP_HORIZON`; beyond
/// that point they only decide the power-law extrapolation.
const EXP_HORIZON: f64 = 2000.0;
/// Log-slope threshold above which a supremum is taken to run off to infinity.
pub(crate) const SUP_SLOPE_TOL: f64 = 1e-7;
/// Margin around `-1` for power-law tail convergence.
pub(crate) const TAIL_SLOPE_TOL: f64 = 1e-9;
const EDGE_STEP: f64 = 0.01;

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.domain_cut > 0.0) || !self.domain_cut.is_finite() {
            return Err(Error::InvalidInput("S must be positive".into()));
        }
        if self.panels < 16 {
            return Err(Error::InvalidInput("panels must be at least 16".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidInput("rel_tol must lie in (0, 1)".into()));
        }
        if self.sup_grid < 8 {
            return Err(Error::InvalidInput("sup_grid must be at least 8".into()));
        }
        Ok(())
    }

    /// Working window in `s = ln t` for the given functions.
    pub fn window(&self, funs: &[&RealFun]) -> (f64, f64) {
        self.window_with_horizon(funs, EXP_HORIZON)
    }

    /// Working window with exponential factors followed up to `|γ| t = horizon`.
    pub(crate) fn window_with_horizon(&self, funs: &[&RealFun], horizon: f64) -> (f64, f64) {
        let mut lo = -self.domain_cut;
        let mut hi = self.domain_cut;
        let rate = funs.iter().map(|f| f.exp_rate()).fold(0.0, f64::max);
        if rate > 0.0 {
            hi = hi.min((horizon / rate).ln());
        }
        for f in funs {
            for b in f.breakpoints() {
                lo = lo.min(b.ln() - 1.0);
                hi = hi.max(b.ln() + 1.0);
            }
        }
        if hi < lo + 2.0 {
            hi = lo + 2.0;
        }
        (lo, hi)
    }
}

/// Power-law extrapolation of `∫_0^{e^{s}} g` from the local log-slope below `s`.
pub(crate) fn head_extrapolation(g: &RealFun, s: f64) -> f64 {
    let l0 = g.ln_eval(s.exp());
    let l1 = g.ln_eval((s - EDGE_STEP).exp());
    edge_head(l0, l1, s, EDGE_STEP)
}

/// Power-law extrapolation of `∫_{e^{s}}^∞ g` from the local log-slope above `s`.
pub(crate) fn tail_extrapolation(g: &RealFun, s: f64) -> f64 {
    let l0 = g.ln_eval(s.exp());
    let l1 = g.ln_eval((s + EDGE_STEP).exp());
    edge_tail(l0, l1, s, EDGE_STEP)
}

/// `l_edge` is `ln g` at the window edge `s`, `l_out` at distance `ds` outside.
pub(crate) fn edge_head(l_edge: f64, l_out: f64, s: f64, ds: f64) -> f64 {
    if l_edge == NEG_INF {
        return NEG_INF;
    }
    if l_edge == POS_INF {
        return POS_INF;
    }
    let beta = if l_out == NEG_INF { 0.0 } else { (l_edge - l_out) / ds };
    if beta + 1.0 > TAIL_SLOPE_TOL {
        l_edge + s - (beta + 1.0).ln()
    } else {
        POS_INF
    }
}

pub(crate) fn edge_tail(l_edge: f64, l_out: f64, s: f64, ds: f64) -> f64 {
    if l_edge == NEG_INF {
        return NEG_INF;
    }
    if l_edge == POS_INF {
        return POS_INF;
    }
    let beta = if l_out == NEG_INF { f64::NEG_INFINITY } else { (l_out - l_edge) / ds };
    if beta == f64::NEG_INFINITY {
        return NEG_INF;
    }
    if -beta - 1.0 > TAIL_SLOPE_TOL {
        l_edge + s - (-beta - 1.0).ln()
    } else {
        POS_INF
    }
}

const GK_X: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Piece {
    a: f64,
    b: f64,
    /// Kronrod estimate and error estimate, both scaled by `e^{-shift}`.
    val: f64,
    err: f64,
}

/// Kronrod value, error and log-scale of `∫_a^b e^{ℓ(s) + s} ds`.
fn gk15(g: &RealFun, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut ls = [0.0f64; 15];
    let lf = |s: f64| -> f64 {
        let v = g.ln_eval(s.exp());
        if v == NEG_INF {
            NEG_INF
        } else {
            v + s
        }
    };
    for i in 0..7 {
        ls[2 * i] = lf(c - h * GK_X[i]);
        ls[2 * i + 1] = lf(c + h * GK_X[i]);
    }
    ls[14] = lf(c);
    let m = ls.iter().cloned().fold(NEG_INF, f64::max);
    if m == NEG_INF {
        return (0.0, 0.0, 0.0);
    }
    if m == POS_INF || m.is_nan() {
        return (f64::INFINITY, 0.0, 0.0);
    }
    let e = |i: usize| (ls[i] - m).exp();
    let mut k = GK_WK[7] * e(14);
    let mut gs = GK_WG[3] * e(14);
    for i in 0..7 {
        let pair = e(2 * i) + e(2 * i + 1);
        k += GK_WK[i] * pair;
        if i % 2 == 1 {
            gs += GK_WG[i / 2] * pair;
        }
    }
    (k * h, (k - gs).abs() * h, m)
}

/// `ln ∫_{e^{a}}^{e^{b}} g` by adaptive Gauss–Kronrod in `s`.
fn adaptive(g: &RealFun, cuts: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    let total_len = cuts[cuts.len() - 1] - cuts[0];
    let mut pieces: Vec<Piece> = Vec::new();
    let mut shift = NEG_INF;
    let mut raw = Vec::new();
    for w in cuts.windows(2) {
        let len = w[1] - w[0];
        if !(len > 0.0) {
            continue;
        }
        let n = ((cfg.panels as f64) * len / total_len).ceil().max(1.0) as usize;
        for i in 0..n {
            let a = w[0] + len * i as f64 / n as f64;
            let b = w[0] + len * (i + 1) as f64 / n as f64;
            let (v, e, m) = gk15(g, a, b);
            if v.is_infinite() {
                return Ok(POS_INF);
            }
            if v > 0.0 {
                shift = shift.max(m + v.ln());
            }
            raw.push((a, b, v, e, m));
        }
    }
    if shift == NEG_INF {
        return Ok(NEG_INF);
    }
    for (a, b, v, e, m) in raw {
        let f = (m - shift).exp();
        pieces.push(Piece { a, b, val: v * f, err: e * f });
    }
    let budget = cfg.panels * 1024;
    loop {
        let total: f64 = pieces.iter().map(|p| p.val).sum();
        let err: f64 = pieces.iter().map(|p| p.err).sum();
        if err <= cfg.rel_tol * total || err <= 1e-15 * total {
            return Ok(shift + total.ln());
        }
        if pieces.len() >= budget {
            return Err(Error::NonIntegrableOscillation { intervals: pieces.len() });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.partial_cmp(&y.1.err).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return Err(Error::NonIntegrableOscillation { intervals: pieces.len() });
        }
        for (a, b) in [(p.a, mid), (mid, p.b)] {
            let (v, e, m) = gk15(g, a, b);
            if v.is_infinite() {
                return Ok(POS_INF);
            }
            let f = (m - shift).exp();
            pieces.push(Piece { a, b, val: v * f, err: e * f });
        }
    }
}

/// `ln ∫_lo^hi g`, ignoring analytic hints.
fn ln_integrate_numeric(g: &RealFun, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(hi > lo) {
        return Ok(NEG_INF);
    }
    if g.is_zero() {
        return Ok(NEG_INF);
    }
    let (w_lo, w_hi) = cfg.window(&[g]);
    let b_s = if hi.is_infinite() { w_hi } else { hi.ln() };
    let a_s = if lo == 0.0 { w_lo.min(b_s - 5.0) } else { lo.ln() };
    let b_s = if hi.is_infinite() { b_s.max(a_s + 5.0) } else { b_s };
    let mut cuts = vec![a_s];
    for bp in g.breakpoints() {
        let s = bp.ln();
        if s > a_s && s < b_s {
            cuts.push(s);
        }
    }
    cuts.push(b_s);
    let mut parts = vec![adaptive(g, &cuts, cfg)?];
    if lo == 0.0 {
        parts.push(head_extrapolation(g, a_s));
    }
    if hi.is_infinite() {
        parts.push(tail_extrapolation(g, b_s));
    }
    Ok(ln_sum(&parts))
}

/// `ln ∫_I g`: closed form when available, adaptive quadrature otherwise.
pub fn ln_integrate(g: &RealFun, iv: &Interval, cfg: &QuadratureConfig) -> Result<f64> {
    if let Some(v) = g.ln_integral_hint(iv.lo, iv.hi) {
        if !v.is_nan() {
            return Ok(v);
        }
    }
    ln_integrate_numeric(g, iv.lo, iv.hi, cfg)
}

/// `∫_I g`, possibly `+∞`.
pub fn integrate(g: &RealFun, iv: &Interval, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(ln_integrate(g, iv, cfg)?.exp())
}

/// `∫_I g` by quadrature only; used to cross-check analytic hints.
pub fn integrate_numeric(g: &RealFun, iv: &Interval, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(ln_integrate_numeric(g, iv.lo, iv.hi, cfg)?.exp())
}

/// `∫_0^x g`.
pub fn primitive_at(g: &RealFun, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidInput(format!("primitive_at needs x > 0, got {x}")));
    }
    integrate(g, &Interval::head(x), cfg)
}

/// `∫_x^∞ g`.
pub fn tail_at(g: &RealFun, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidInput(format!("tail_at needs x > 0, got {x}")));
    }
    integrate(g, &Interval::tail(x), cfg)
}

/// `ln esssup_I g`: log-grid maximum with golden-section refinement at the argmax.
pub fn ln_esssup(g: &RealFun, iv: &Interval, cfg: &QuadratureConfig) -> f64 {
    let (w_lo, w_hi) = cfg.window(&[g]);
    let a_s = if iv.lo == 0.0 { w_lo } else { iv.lo.ln() };
    let b_s = if iv.hi.is_infinite() { w_hi.max(a_s + 1.0) } else { iv.hi.ln() };
    if iv.lo > 0.0 && iv.hi.is_finite() && b_s <= a_s {
        return NEG_INF;
    }
    let h = std::f64::consts::LN_10 / cfg.sup_grid as f64;
    let n = (((b_s - a_s) / h).ceil() as usize).max(2);
    let nudge = 1e-9;
    let mut ss: Vec<f64> = (0..=n).map(|i| a_s + (b_s - a_s) * i as f64 / n as f64).collect();
    ss[0] += nudge;
    ss[n] -= nudge;
    for bp in g.breakpoints() {
        let s = bp.ln();
        if s > a_s && s < b_s {
            ss.push(s - nudge);
            ss.push(s + nudge);
        }
    }
    ss.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let vals: Vec<f64> = ss.iter().map(|s| g.ln_eval(s.exp())).collect();
    let mut best = NEG_INF;
    let mut arg = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v > best {
            best = *v;
            arg = i;
        }
    }
    if best == POS_INF {
        return POS_INF;
    }
    if best > NEG_INF && arg > 0 && arg + 1 < ss.len() {
        let refined = golden_max(|s| g.ln_eval(s.exp()), ss[arg - 1], ss[arg + 1]);
        best = best.max(refined);
    }
    if iv.lo == 0.0 {
        let l0 = g.ln_eval(a_s.exp());
        let l1 = g.ln_eval((a_s - EDGE_STEP).exp());
        if l0 > NEG_INF && (l1 - l0) / EDGE_STEP > SUP_SLOPE_TOL {
            return POS_INF;
        }
    }
    if iv.hi.is_infinite() {
        let l0 = g.ln_eval(b_s.exp());
        let l1 = g.ln_eval((b_s + EDGE_STEP).exp());
        if l0 > NEG_INF && (l1 - l0) / EDGE_STEP > SUP_SLOPE_TOL {
            return POS_INF;
        }
    }
    best
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..60 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if b - a < 1e-13 {
            break;
        }
    }
    fc.max(fd)
}

/// `esssup_I g`.
pub fn esssup(g: &RealFun, iv: &Interval, cfg: &QuadratureConfig) -> f64 {
    ln_esssup(g, iv, cfg).exp()
}

/// `ln ‖f w‖_{p, I}`.
pub fn ln_lp_norm(f: &RealFun, w: &RealFun, iv: &Interval, p: &Exponent, cfg: &QuadratureConfig) -> Result<f64> {
    let fw = f.mul(w);
    if p.is_infinite() {
        return Ok(ln_esssup(&fw, iv, cfg));
    }
    let e = p.value();
    let li = ln_integrate(&fw.powf(e), iv, cfg)?;
    Ok(if li.is_infinite() { li } else { li / e })
}

/// `‖f‖_{p, w, I} = ‖f w‖_{p, I}`.
pub fn lp_norm(f: &RealFun, w: &RealFun, iv: &Interval, p: &Exponent, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(ln_lp_norm(f, w, iv, p, cfg)?.exp())
}
