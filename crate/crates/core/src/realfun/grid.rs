//! Log-spaced grids and sampled functions for nested norms.
//!
//! A grid is a sequence of nodes `s_0 < … < s_n` in `s = ln t`, with jump
//! points of the inputs placed exactly on nodes. A [`Sampled`] function stores
//! one-sided limits at every node and values at the Gauss–Legendre points of
//! every panel; running integrals and running suprema map sampled functions to
//! sampled functions, so norms can be nested to any depth at linear cost.

use std::sync::OnceLock;

use super::logmath::{ln_add, ln_mul, ln_pow, NEG_INF, POS_INF};
use super::quad::{edge_head, edge_tail, QuadratureConfig, SUP_SLOPE_TOL};
use super::RealFun;
use crate::exec;

pub const GL_N: usize = 5;

/// Gauss–Legendre abscissae and weights on `[0, 1]`.
const GL_X: [f64; GL_N] = [
    0.046910077030668003601186560850304,
    0.230765344947158454481842789649896,
    0.5,
    0.769234655052841545518157210350104,
    0.953089922969331996398813439149696,
];
const GL_W: [f64; GL_N] = [
    0.118463442528094543757132020359959,
    0.239314335249683234020645757417819,
    0.284444444444444444444444444444444,
    0.239314335249683234020645757417819,
    0.118463442528094543757132020359959,
];

/// `P[j][i] = ∫_0^{x_j} L_i`, with `L_i` the Lagrange basis on the GL points.
fn partial_weights() -> &'static [[f64; GL_N]; GL_N] {
    static P: OnceLock<[[f64; GL_N]; GL_N]> = OnceLock::new();
    P.get_or_init(|| {
        let mut p = [[0.0; GL_N]; GL_N];
        for (j, row) in p.iter_mut().enumerate() {
            let xj = GL_X[j];
            for (i, cell) in row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for k in 0..GL_N {
                    let x = xj * GL_X[k];
                    let mut l = 1.0;
                    for m in 0..GL_N {
                        if m != i {
                            l *= (x - GL_X[m]) / (GL_X[i] - GL_X[m]);
                        }
                    }
                    acc += GL_W[k] * l;
                }
                *cell = acc * xj;
            }
        }
        p
    })
}

/// `∫_0^x L_i` for `x ∈ [0, 1]`.
fn partial_weights_at(x: f64) -> [f64; GL_N] {
    std::array::from_fn(|i| {
        let mut acc = 0.0;
        for k in 0..GL_N {
            let y = x * GL_X[k];
            let mut l = 1.0;
            for m in 0..GL_N {
                if m != i {
                    l *= (y - GL_X[m]) / (GL_X[i] - GL_X[m]);
                }
            }
            acc += GL_W[k] * l;
        }
        acc * x
    })
}

const JUMP_NUDGE: f64 = 1e-10;
/// Largest change of `rate · t` across one panel.
const EXP_STEP: f64 = 0.5;
/// Grids follow exponential factors up to `|γ| t = GRID_EXP_HORIZON`.
const GRID_EXP_HORIZON: f64 = 200.0;

/// Nodes in `s = ln t`, with jump points on nodes.
#[derive(Clone, Debug)]
pub struct Grid {
    s: Vec<f64>,
    t: Vec<f64>,
    jump: Vec<bool>,
}

impl Grid {
    /// Uniform nodes on `[s_lo, s_hi]` at `per_decade` points per decade,
    /// with `breakpoints` (in `t`) merged in as jump nodes.
    pub fn new(s_lo: f64, s_hi: f64, per_decade: usize, breakpoints: &[f64]) -> Grid {
        Grid::graded(s_lo, s_hi, per_decade, 0.0, breakpoints)
    }

    /// Like [`Grid::new`], but panels are shrunk where `rate · t · Δs` would
    /// exceed `EXP_STEP`, so factors `e^{±rate·t}` stay resolved.
    pub fn graded(s_lo: f64, s_hi: f64, per_decade: usize, rate: f64, breakpoints: &[f64]) -> Grid {
        let h = std::f64::consts::LN_10 / per_decade as f64;
        let n = (((s_hi - s_lo) / h).ceil() as usize).max(2);
        let h = (s_hi - s_lo) / n as f64;
        let mut base: Vec<f64> = Vec::with_capacity(n + 1);
        for i in 0..n {
            let a = s_lo + h * i as f64;
            base.push(a);
            if rate > 0.0 {
                let local = EXP_STEP / (rate * (a + h).exp());
                if local < h {
                    let m = (h / local).ceil() as usize;
                    for j in 1..m {
                        base.push(a + h * j as f64 / m as f64);
                    }
                }
            }
        }
        base.push(s_hi);
        let mut nodes: Vec<(f64, bool)> = base.iter().map(|s| (*s, false)).collect();
        for bp in breakpoints {
            let sb = bp.ln();
            if !(sb > s_lo && sb < s_hi) {
                continue;
            }
            let k = base.partition_point(|x| *x < sb);
            let cand = if k > 0 && (sb - base[k - 1]) < (base[k] - sb) { k - 1 } else { k };
            let width = if cand + 1 < base.len() { base[cand + 1] - base[cand] } else { base[cand] - base[cand - 1] };
            if cand > 0 && cand < base.len() - 1 && (nodes[cand].0 - sb).abs() < 0.25 * width && !nodes[cand].1 {
                nodes[cand] = (sb, true);
            } else {
                nodes.push((sb, true));
            }
        }
        nodes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        nodes.dedup_by(|a, b| {
            if (a.0 - b.0).abs() < 1e-12 {
                b.1 |= a.1;
                true
            } else {
                false
            }
        });
        Grid {
            t: nodes.iter().map(|x| x.0.exp()).collect(),
            s: nodes.iter().map(|x| x.0).collect(),
            jump: nodes.iter().map(|x| x.1).collect(),
        }
    }

    /// Grid covering the working window of `funs`, with all their jump points.
    pub fn for_funs(cfg: &QuadratureConfig, funs: &[&RealFun]) -> Grid {
        let (lo, hi) = cfg.window_with_horizon(funs, GRID_EXP_HORIZON);
        let mut bps = Vec::new();
        for f in funs {
            bps.extend(f.breakpoints());
        }
        let rate = funs.iter().map(|f| f.exp_rate()).fold(0.0, f64::max);
        Grid::graded(lo, hi, cfg.sup_grid, rate, &bps)
    }

    pub fn n_panels(&self) -> usize {
        self.s.len() - 1
    }

    pub fn nodes_s(&self) -> &[f64] {
        &self.s
    }

    pub fn nodes_t(&self) -> &[f64] {
        &self.t
    }

    pub fn s_lo(&self) -> f64 {
        self.s[0]
    }

    pub fn s_hi(&self) -> f64 {
        self.s[self.s.len() - 1]
    }

    pub fn is_jump(&self, k: usize) -> bool {
        self.jump[k]
    }

    /// `s` coordinate of GL point `j` in panel `k`.
    pub fn gl_s(&self, k: usize, j: usize) -> f64 {
        self.s[k] + (self.s[k + 1] - self.s[k]) * GL_X[j]
    }

    /// Panel `k` with `t_k ≤ t < t_{k+1}`, if inside the grid.
    pub fn locate(&self, t: f64) -> Option<usize> {
        let s = t.ln();
        if !(s >= self.s[0] && s < self.s[self.s.len() - 1]) {
            return None;
        }
        Some(self.s.partition_point(|x| *x <= s) - 1)
    }

    /// Samples `f` at every node (both one-sided limits) and GL point.
    pub fn sample(&self, f: &RealFun) -> Sampled {
        self.sample_with(|t| f.ln_eval(t))
    }

    /// Samples an arbitrary log-domain evaluator.
    pub fn sample_with<F: Fn(f64) -> f64 + Sync + Send>(&self, f: F) -> Sampled {
        let n = self.n_panels();
        let rows: Vec<(f64, f64, [f64; GL_N])> = exec::par_map_range(n + 1, |k| {
            let t = self.t[k];
            let (l, r) = if self.jump[k] {
                (f(t * (1.0 - JUMP_NUDGE)), f(t * (1.0 + JUMP_NUDGE)))
            } else {
                let v = f(t);
                (v, v)
            };
            let mut inner = [NEG_INF; GL_N];
            if k < n {
                for (j, slot) in inner.iter_mut().enumerate() {
                    *slot = f(self.gl_s(k, j).exp());
                }
            }
            (l, r, inner)
        });
        let mut left = Vec::with_capacity(n + 1);
        let mut right = Vec::with_capacity(n + 1);
        let mut inner = Vec::with_capacity(n);
        for (k, (l, r, g)) in rows.into_iter().enumerate() {
            left.push(l);
            right.push(r);
            if k < n {
                inner.push(g);
            }
        }
        // The window edges are not jump points of the sampled function.
        left[0] = right[0];
        right[n] = left[n];
        Sampled { left, right, inner }
    }

    /// Every sample position `(s, value)` in increasing order of `s`.
    pub fn positions(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.s.len() * (GL_N + 1));
        for k in 0..self.n_panels() {
            out.push(self.s[k]);
            for j in 0..GL_N {
                out.push(self.gl_s(k, j));
            }
        }
        out.push(self.s_hi());
        out
    }
}

/// Log-values of a function on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Sampled {
    /// `ln f(t_k^-)`.
    pub left: Vec<f64>,
    /// `ln f(t_k^+)`.
    pub right: Vec<f64>,
    /// `ln f` at the GL points of panel `k`.
    pub inner: Vec<[f64; GL_N]>,
}

impl Sampled {
    pub fn constant(grid: &Grid, v: f64) -> Sampled {
        let n = grid.n_panels();
        Sampled { left: vec![v; n + 1], right: vec![v; n + 1], inner: vec![[v; GL_N]; n] }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Sampled {
        Sampled {
            left: self.left.iter().map(|x| f(*x)).collect(),
            right: self.right.iter().map(|x| f(*x)).collect(),
            inner: self.inner.iter().map(|r| r.map(&f)).collect(),
        }
    }

    pub fn zip(&self, o: &Sampled, f: impl Fn(f64, f64) -> f64) -> Sampled {
        Sampled {
            left: self.left.iter().zip(&o.left).map(|(a, b)| f(*a, *b)).collect(),
            right: self.right.iter().zip(&o.right).map(|(a, b)| f(*a, *b)).collect(),
            inner: self
                .inner
                .iter()
                .zip(&o.inner)
                .map(|(a, b)| std::array::from_fn(|j| f(a[j], b[j])))
                .collect(),
        }
    }

    /// Pointwise product.
    pub fn mul(&self, o: &Sampled) -> Sampled {
        self.zip(o, ln_mul)
    }

    /// Pointwise power.
    pub fn pow(&self, e: f64) -> Sampled {
        self.map(|x| ln_pow(x, e))
    }

    /// Pointwise sum.
    pub fn add(&self, o: &Sampled) -> Sampled {
        self.zip(o, ln_add)
    }

    /// Largest sampled value (ignoring the behaviour beyond the grid).
    pub fn max_value(&self) -> f64 {
        let a = self.left.iter().chain(&self.right).cloned().fold(NEG_INF, f64::max);
        self.inner.iter().flat_map(|r| r.iter()).cloned().fold(a, f64::max)
    }

    /// Integrals over each panel in log form: `(m, e_j, total, partials)`.
    fn panel(&self, grid: &Grid, k: usize) -> PanelSums {
        let hk = grid.s[k + 1] - grid.s[k];
        let mut lg = [NEG_INF; GL_N];
        for (j, slot) in lg.iter_mut().enumerate() {
            let v = self.inner[k][j];
            *slot = if v == NEG_INF { NEG_INF } else { v + grid.gl_s(k, j) };
        }
        let m = lg.iter().cloned().fold(NEG_INF, f64::max);
        if m == NEG_INF {
            return PanelSums { ln_total: NEG_INF, ln_partial: [NEG_INF; GL_N], ln_rest: [NEG_INF; GL_N] };
        }
        if m == POS_INF || m.is_nan() {
            return PanelSums { ln_total: POS_INF, ln_partial: [POS_INF; GL_N], ln_rest: [POS_INF; GL_N] };
        }
        let e: [f64; GL_N] = std::array::from_fn(|j| (lg[j] - m).exp());
        let total: f64 = (0..GL_N).map(|j| GL_W[j] * e[j]).sum();
        let pw = partial_weights();
        let mut partial = [0.0; GL_N];
        let mut prev = 0.0;
        for j in 0..GL_N {
            let v: f64 = (0..GL_N).map(|i| pw[j][i] * e[i]).sum();
            let v = v.clamp(prev, total);
            partial[j] = v;
            prev = v;
        }
        let lt = m + (hk * total).ln();
        let lp = partial.map(|v| if v > 0.0 { m + (hk * v).ln() } else { NEG_INF });
        let lr = partial.map(|v| {
            let r = total - v;
            if r > 0.0 {
                m + (hk * r).ln()
            } else {
                NEG_INF
            }
        });
        PanelSums { ln_total: lt, ln_partial: lp, ln_rest: lr }
    }

    /// `(ln ∫_{t_k}^t f, ln ∫_t^{t_{k+1}} f)` for `t` inside panel `k`, from the
    /// interpolant through the stored Gauss–Legendre values.
    pub fn ln_split_panel(&self, grid: &Grid, k: usize, t: f64) -> (f64, f64) {
        let hk = grid.s[k + 1] - grid.s[k];
        let x = ((t.ln() - grid.s[k]) / hk).clamp(0.0, 1.0);
        let lg: [f64; GL_N] = std::array::from_fn(|j| {
            let v = self.inner[k][j];
            if v == NEG_INF {
                NEG_INF
            } else {
                v + grid.gl_s(k, j)
            }
        });
        let m = lg.iter().cloned().fold(NEG_INF, f64::max);
        if m == NEG_INF {
            return (NEG_INF, NEG_INF);
        }
        if m == POS_INF || m.is_nan() {
            return (POS_INF, POS_INF);
        }
        let e: [f64; GL_N] = std::array::from_fn(|j| (lg[j] - m).exp());
        let total: f64 = (0..GL_N).map(|j| GL_W[j] * e[j]).sum();
        let pw = partial_weights_at(x);
        let part = (0..GL_N).map(|i| pw[i] * e[i]).sum::<f64>().clamp(0.0, total);
        let ln = |v: f64| if v > 0.0 { m + (hk * v).ln() } else { NEG_INF };
        (ln(part), ln(total - part))
    }

    /// Slope of `ln f` per unit `s` across the first half-step of panel 0.
    fn head_slope(&self, grid: &Grid) -> Option<f64> {
        let (a, b) = (self.right[0], self.inner[0][0]);
        if a.is_finite() && b.is_finite() {
            Some((b - a) / (grid.gl_s(0, 0) - grid.s[0]))
        } else {
            None
        }
    }

    fn tail_slope(&self, grid: &Grid) -> Option<f64> {
        let n = grid.n_panels();
        let (a, b) = (self.inner[n - 1][GL_N - 1], self.left[n]);
        if a.is_finite() && b.is_finite() {
            Some((b - a) / (grid.s[n] - grid.gl_s(n - 1, GL_N - 1)))
        } else {
            None
        }
    }

    fn head_edge(&self, grid: &Grid) -> f64 {
        let l0 = self.right[0];
        let l_out = self.head_slope(grid).map_or(NEG_INF, |b| l0 - b);
        edge_head(l0, l_out, grid.s[0], 1.0)
    }

    fn tail_edge(&self, grid: &Grid) -> f64 {
        let n = grid.n_panels();
        let l0 = self.left[n];
        let l_out = self.tail_slope(grid).map_or(NEG_INF, |b| l0 + b);
        edge_tail(l0, l_out, grid.s[n], 1.0)
    }

    /// `t ↦ ∫_0^t f`, and `ln ∫_0^∞ f`.
    pub fn cumulative_head(&self, grid: &Grid) -> (Sampled, f64) {
        let n = grid.n_panels();
        let mut c = self.head_edge(grid);
        let mut out = Sampled::constant(grid, NEG_INF);
        for k in 0..n {
            let p = self.panel(grid, k);
            out.left[k] = c;
            out.right[k] = c;
            for j in 0..GL_N {
                out.inner[k][j] = ln_add(c, p.ln_partial[j]);
            }
            c = ln_add(c, p.ln_total);
        }
        out.left[n] = c;
        out.right[n] = c;
        let total = ln_add(c, self.tail_edge(grid));
        (out, total)
    }

    /// `t ↦ ∫_t^∞ f`, and `ln ∫_0^∞ f`.
    pub fn cumulative_tail(&self, grid: &Grid) -> (Sampled, f64) {
        let n = grid.n_panels();
        let mut c = self.tail_edge(grid);
        let mut out = Sampled::constant(grid, NEG_INF);
        out.left[n] = c;
        out.right[n] = c;
        for k in (0..n).rev() {
            let p = self.panel(grid, k);
            for j in 0..GL_N {
                out.inner[k][j] = ln_add(c, p.ln_rest[j]);
            }
            c = ln_add(c, p.ln_total);
            out.left[k] = c;
            out.right[k] = c;
        }
        let total = ln_add(c, self.head_edge(grid));
        (out, total)
    }

    fn head_sup_edge(&self, grid: &Grid) -> f64 {
        match self.head_slope(grid) {
            Some(b) if b < -SUP_SLOPE_TOL => POS_INF,
            _ => self.right[0],
        }
    }

    fn tail_sup_edge(&self, grid: &Grid) -> f64 {
        match self.tail_slope(grid) {
            Some(b) if b > SUP_SLOPE_TOL => POS_INF,
            _ => self.left[grid.n_panels()],
        }
    }

    /// `t ↦ esssup_{(0,t)} f`, and `ln esssup_{(0,∞)} f`.
    pub fn running_sup_head(&self, grid: &Grid) -> (Sampled, f64) {
        let n = grid.n_panels();
        let mut out = Sampled::constant(grid, NEG_INF);
        let mut m = self.head_sup_edge(grid);
        out.left[0] = m;
        m = m.max(self.right[0]);
        out.right[0] = m;
        for k in 0..n {
            for j in 0..GL_N {
                m = m.max(self.inner[k][j]);
                out.inner[k][j] = m;
            }
            m = m.max(self.left[k + 1]);
            out.left[k + 1] = m;
            m = m.max(self.right[k + 1]);
            out.right[k + 1] = m;
        }
        let total = m.max(self.tail_sup_edge(grid));
        (out, total)
    }

    /// `t ↦ esssup_{(t,∞)} f`, and `ln esssup_{(0,∞)} f`.
    pub fn running_sup_tail(&self, grid: &Grid) -> (Sampled, f64) {
        let n = grid.n_panels();
        let mut out = Sampled::constant(grid, NEG_INF);
        let mut m = self.tail_sup_edge(grid);
        out.right[n] = m;
        m = m.max(self.left[n]);
        out.left[n] = m;
        for k in (0..n).rev() {
            for j in (0..GL_N).rev() {
                m = m.max(self.inner[k][j]);
                out.inner[k][j] = m;
            }
            m = m.max(self.right[k]);
            out.right[k] = m;
            m = m.max(self.left[k]);
            out.left[k] = m;
        }
        let total = m.max(self.head_sup_edge(grid));
        (out, total)
    }

    /// `ln ∫_0^∞ f`.
    pub fn total_integral(&self, grid: &Grid) -> f64 {
        self.cumulative_head(grid).1
    }

    /// `ln esssup_{(0,∞)} f`.
    pub fn total_sup(&self, grid: &Grid) -> f64 {
        self.running_sup_head(grid).1
    }
}

struct PanelSums {
    ln_total: f64,
    ln_partial: [f64; GL_N],
    ln_rest: [f64; GL_N],
}
