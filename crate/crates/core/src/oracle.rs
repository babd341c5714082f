//! Brute-force lower bounds for multiplier norms:
//! `sup_g ‖f g‖_Y / ‖g‖_X` over a finite family of test functions `g`.
//!
//! All candidates of one search are evaluated on a shared grid built from
//! `f` and the weights of `X` and `Y`. Candidate breakpoints are snapped to
//! grid nodes, so sampling a candidate is exact and needs no re-gridding.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::gluing::{dyadic_cover, CoverDirection};
use crate::realfun::logmath::{NEG_INF, POS_INF};
use crate::realfun::{Grid, QuadratureConfig, RealFun, Sampled, GL_N};
use crate::spaces::{PreparedSpace, SpaceSpec};

/// A nonnegative test function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Candidate {
    /// `χ_{(0,t)}`.
    Head { t: f64 },
    /// `χ_{(t,∞)}`.
    Tail { t: f64 },
    /// `χ_{(lo,hi)}`.
    Band { lo: f64, hi: f64 },
    /// `t^γ χ_{(lo,hi)}`; `hi` may be infinite.
    PowerBump { gamma: f64, lo: f64, hi: f64 },
    /// `e^{levels[i]}` on `(knots[i], knots[i+1])`.
    Dyadic { knots: Vec<f64>, levels: Vec<f64> },
}

impl Candidate {
    /// The candidate as a [`RealFun`] (breakpoints not snapped).
    pub fn to_fun(&self) -> RealFun {
        let ind = |a: f64, b: f64| RealFun::indicator(a, b).unwrap_or_else(|_| RealFun::zero());
        match self {
            Candidate::Head { t } => ind(0.0, *t),
            Candidate::Tail { t } => ind(*t, f64::INFINITY),
            Candidate::Band { lo, hi } => ind(*lo, *hi),
            Candidate::PowerBump { gamma, lo, hi } => RealFun::product(vec![RealFun::power(1.0, *gamma), ind(*lo, *hi)]),
            Candidate::Dyadic { knots, levels } => RealFun::sum(
                knots
                    .windows(2)
                    .zip(levels)
                    .map(|(k, l)| RealFun::product(vec![RealFun::constant(l.exp()), ind(k[0], k[1])]))
                    .collect(),
            ),
        }
    }

    /// `(lo, hi, ln g)` pieces; `lo = 0` and `hi = ∞` reach the grid edges.
    fn pieces(&self) -> Vec<(f64, f64, Piece)> {
        match self {
            Candidate::Head { t } => vec![(0.0, *t, Piece::Const(0.0))],
            Candidate::Tail { t } => vec![(*t, POS_INF, Piece::Const(0.0))],
            Candidate::Band { lo, hi } => vec![(*lo, *hi, Piece::Const(0.0))],
            Candidate::PowerBump { gamma, lo, hi } => vec![(*lo, *hi, Piece::Power(*gamma))],
            Candidate::Dyadic { knots, levels } => {
                knots.windows(2).zip(levels).map(|(k, l)| (k[0], k[1], Piece::Const(*l))).collect()
            }
        }
    }

    /// Snaps to `grid` and samples; also returns the snapped node ranges.
    pub fn sample(&self, grid: &Grid) -> (Sampled, Vec<(usize, usize)>) {
        let n = grid.n_panels();
        let mut out = Sampled::constant(grid, NEG_INF);
        let mut ranges = Vec::new();
        for (lo, hi, piece) in self.pieces() {
            let i0 = if lo <= 0.0 { 0 } else { nearest(grid, lo) };
            let i1 = if hi == POS_INF { n } else { nearest(grid, hi) };
            let (i0, i1) = if i1 <= i0 { (i0.min(n - 1), i0.min(n - 1) + 1) } else { (i0, i1) };
            ranges.push((i0, i1));
            let val = |s: f64| piece.ln_value(s);
            let s = grid.nodes_s();
            for k in i0..i1 {
                for j in 0..GL_N {
                    out.inner[k][j] = val(grid.gl_s(k, j));
                }
                out.right[k] = val(s[k]);
                out.left[k + 1] = val(s[k + 1]);
            }
            if i0 == 0 {
                out.left[0] = out.right[0];
            }
            if i1 == n {
                out.right[n] = out.left[n];
            }
        }
        (out, ranges)
    }
}

#[derive(Clone, Copy, Debug)]
enum Piece {
    Const(f64),
    Power(f64),
}

impl Piece {
    fn ln_value(&self, s: f64) -> f64 {
        match self {
            Piece::Const(l) => *l,
            Piece::Power(g) => g * s,
        }
    }
}

fn nearest(grid: &Grid, t: f64) -> usize {
    let s = grid.nodes_s();
    let x = t.ln();
    match s.binary_search_by(|a| a.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Less)) {
        Ok(k) => k,
        Err(0) => 0,
        Err(k) if k >= s.len() => s.len() - 1,
        Err(k) => {
            if x - s[k - 1] < s[k] - x {
                k - 1
            } else {
                k
            }
        }
    }
}

/// Test functions plus the generator settings that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateFamily {
    pub candidates: Vec<Candidate>,
    pub budget: usize,
    pub seed: u64,
}

/// Positions of the deterministic generators span `[e^{-SPAN}, e^{SPAN}]`.
const SPAN: f64 = 14.0;
const BAND_WIDTHS: [f64; 4] = [0.1, 0.7, 2.5, 7.0];
const BUMP_GAMMAS: [f64; 9] = [-3.0, -2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0];
const BUMP_WIDTHS: [f64; 3] = [2.0, 6.0, 14.0];

impl CandidateFamily {
    pub fn new(candidates: Vec<Candidate>, seed: u64) -> Self {
        let budget = candidates.len();
        CandidateFamily { candidates, budget, seed }
    }

    /// Heads, tails, bands and power bumps on a log-uniform lattice, plus
    /// random piecewise-constant functions on the dyadic cover of the outer
    /// source weight. At most `budget` candidates.
    pub fn standard(source: &SpaceSpec, budget: usize, seed: u64, cfg: &QuadratureConfig) -> Self {
        let mut det = Vec::new();
        let step = 0.5;
        let npos = (2.0 * SPAN / step) as usize;
        let pos = |i: usize| (-SPAN + step * i as f64).exp();
        for i in 0..=npos {
            det.push(Candidate::Head { t: pos(i) });
            det.push(Candidate::Tail { t: pos(i) });
        }
        for w in BAND_WIDTHS {
            for i in 0..=npos {
                let lo = pos(i);
                det.push(Candidate::Band { lo, hi: lo * w.exp() });
            }
        }
        for g in BUMP_GAMMAS {
            for w in BUMP_WIDTHS {
                for i in (0..=npos).step_by(4) {
                    let lo = pos(i);
                    det.push(Candidate::PowerBump { gamma: g, lo, hi: lo * w.exp() });
                }
            }
            if g < -1.0 {
                for i in (0..=npos).step_by(4) {
                    det.push(Candidate::PowerBump { gamma: g, lo: pos(i), hi: POS_INF });
                }
            }
        }
        let n_random = (budget / 8).max(8);
        let keep = budget.saturating_sub(n_random).max(1);
        let mut candidates = thin(det, keep);
        candidates.extend(dyadic_candidates(source, n_random, seed, cfg));
        CandidateFamily { candidates, budget, seed }
    }
}

/// Evenly spaced subset of at most `keep` items.
fn thin(items: Vec<Candidate>, keep: usize) -> Vec<Candidate> {
    if items.len() <= keep {
        return items;
    }
    let n = items.len();
    (0..keep).map(|i| items[i * n / keep].clone()).collect()
}

fn dyadic_candidates(source: &SpaceSpec, count: usize, seed: u64, cfg: &QuadratureConfig) -> Vec<Candidate> {
    let outer = &source.weights[0];
    let e = source.exponents[source.arity() - 1].value();
    let g = if e.is_finite() { outer.powf(e) } else { outer.clone() };
    let cover_cfg = QuadratureConfig { domain_cut: cfg.domain_cut.min(SPAN + 2.0), ..cfg.clone() };
    let points = match dyadic_cover(&g, CoverDirection::Head, &cover_cfg) {
        Ok(c) if c.points.len() >= 3 => c.points,
        _ => (0..=28).map(|i| (-SPAN + i as f64).exp()).collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let len = rng.gen_range(2..=points.len().min(12));
        let start = rng.gen_range(0..=points.len() - len);
        let knots = points[start..start + len].to_vec();
        let slope: f64 = rng.gen_range(-1.0..1.0);
        let levels = (0..len - 1).map(|i| slope * i as f64 + rng.gen_range(-1.5..1.5)).collect();
        out.push(Candidate::Dyadic { knots, levels });
    }
    out
}

/// Best ratio found and the candidate attaining it.
#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub lower_bound: f64,
    pub argmax: Option<Candidate>,
    pub evaluated: usize,
    /// Candidates whose source norm is 0 or ∞.
    pub skipped: usize,
}

/// A search over one `(f, X, Y)` with cached candidate scores.
pub struct OracleSearch {
    grid: Grid,
    fs: Sampled,
    x: PreparedSpace,
    y: PreparedSpace,
    family: CandidateFamily,
    /// `ln` ratio per candidate; NaN for skipped ones.
    scores: Vec<f64>,
    seen: HashSet<Vec<(usize, usize)>>,
}

impl OracleSearch {
    pub fn new(f: &RealFun, x: &SpaceSpec, y: &SpaceSpec, cfg: &QuadratureConfig) -> Self {
        let mut funs = x.funs();
        funs.extend(y.funs());
        funs.push(f);
        let grid = Grid::for_funs(cfg, &funs);
        let fs = grid.sample(f);
        let x = PreparedSpace::new(x, &grid);
        let y = PreparedSpace::new(y, &grid);
        OracleSearch {
            grid,
            fs,
            x,
            y,
            family: CandidateFamily::new(Vec::new(), 0),
            scores: Vec::new(),
            seen: HashSet::new(),
        }
    }

    fn ln_ratio(&self, c: &Candidate) -> f64 {
        let (g, _) = c.sample(&self.grid);
        let den = self.x.ln_norm(&g, &self.grid);
        if !den.is_finite() {
            return f64::NAN;
        }
        let num = self.y.ln_norm(&self.fs.mul(&g), &self.grid);
        if num.is_nan() {
            return f64::NAN;
        }
        num - den
    }

    /// Adds candidates not yet present (after snapping) and scores them.
    pub fn extend(&mut self, cands: Vec<Candidate>) {
        let mut fresh = Vec::new();
        for c in cands {
            let key = c.sample(&self.grid).1;
            if self.seen.insert(key) {
                fresh.push(c);
            }
        }
        let scores = exec::par_map(&fresh, |c| self.ln_ratio(c));
        self.scores.extend(scores);
        self.family.candidates.extend(fresh);
        self.family.budget = self.family.candidates.len();
    }

    pub fn family(&self) -> &CandidateFamily {
        &self.family
    }

    pub fn result(&self) -> OracleResult {
        let best = exec::argmax(&self.scores);
        let skipped = self.scores.iter().filter(|s| s.is_nan()).count();
        OracleResult {
            lower_bound: best.map_or(0.0, |i| self.scores[i].exp()),
            argmax: best.map(|i| self.family.candidates[i].clone()),
            evaluated: self.scores.len(),
            skipped,
        }
    }

    /// One local-search round around the current top candidates.
    pub fn enrich_round(&mut self, round: usize) {
        let mut order: Vec<usize> = (0..self.scores.len()).filter(|i| !self.scores[*i].is_nan()).collect();
        order.sort_by(|a, b| self.scores[*b].partial_cmp(&self.scores[*a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(b)));
        let seed = self.family.seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(round as u64 + 1));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1.0 / (1.0 + round as f64);
        let mut fresh = Vec::new();
        for &i in order.iter().take(TOP_K) {
            let c = self.family.candidates[i].clone();
            for _ in 0..PERTURBATIONS {
                fresh.push(perturb(&c, scale, &mut rng));
            }
            fresh.extend(widen(&c));
        }
        self.extend(fresh);
    }
}

const TOP_K: usize = 6;
const PERTURBATIONS: usize = 10;

fn jitter(t: f64, scale: f64, rng: &mut ChaCha8Rng) -> f64 {
    if t <= 0.0 || !t.is_finite() {
        return t;
    }
    t * (rng.gen_range(-1.5..1.5) * scale).exp()
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn perturb(c: &Candidate, scale: f64, rng: &mut ChaCha8Rng) -> Candidate {
    match c {
        Candidate::Head { t } => Candidate::Head { t: jitter(*t, scale, rng) },
        Candidate::Tail { t } => Candidate::Tail { t: jitter(*t, scale, rng) },
        Candidate::Band { lo, hi } => {
            let (lo, hi) = ordered(jitter(*lo, scale, rng), jitter(*hi, scale, rng));
            Candidate::Band { lo, hi }
        }
        Candidate::PowerBump { gamma, lo, hi } => {
            let (lo, hi) = ordered(jitter(*lo, scale, rng), jitter(*hi, scale, rng));
            Candidate::PowerBump { gamma: gamma + rng.gen_range(-0.75..0.75) * scale, lo, hi }
        }
        Candidate::Dyadic { knots, levels } => {
            let mut knots: Vec<f64> = knots.iter().map(|k| jitter(*k, 0.3 * scale, rng)).collect();
            knots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            let levels = levels.iter().map(|l| l + rng.gen_range(-1.0..1.0) * scale).collect();
            Candidate::Dyadic { knots, levels }
        }
    }
}

/// Longer and shorter versions of interval-shaped candidates.
fn widen(c: &Candidate) -> Vec<Candidate> {
    let f = [0.25f64, 4.0];
    match c {
        Candidate::Band { lo, hi } => f
            .iter()
            .flat_map(|k| [Candidate::Band { lo: lo * k, hi: *hi }, Candidate::Band { lo: *lo, hi: hi * k }])
            .filter(|c| matches!(c, Candidate::Band { lo, hi } if lo < hi))
            .collect(),
        Candidate::PowerBump { gamma, lo, hi } => f
            .iter()
            .flat_map(|k| {
                [
                    Candidate::PowerBump { gamma: *gamma, lo: lo * k, hi: *hi },
                    Candidate::PowerBump { gamma: *gamma, lo: *lo, hi: hi * k },
                ]
            })
            .filter(|c| matches!(c, Candidate::PowerBump { lo, hi, .. } if lo < hi))
            .collect(),
        _ => Vec::new(),
    }
}

/// `max_g ‖f g‖_Y / ‖g‖_X` over the family, skipping candidates whose source
/// norm is 0 or ∞. Ties go to the earliest candidate.
pub fn brute_force_multiplier(
    f: &RealFun,
    x: &SpaceSpec,
    y: &SpaceSpec,
    fam: &CandidateFamily,
    cfg: &QuadratureConfig,
) -> Result<OracleResult> {
    if fam.candidates.is_empty() {
        return Err(Error::EmptyFamily);
    }
    cfg.validate()?;
    let mut search = OracleSearch::new(f, x, y, cfg);
    search.family.seed = fam.seed;
    search.extend(fam.candidates.clone());
    Ok(search.result())
}

/// Problem data for [`enrich`].
#[derive(Clone, Debug)]
pub struct OracleProblem {
    pub f: RealFun,
    pub source: SpaceSpec,
    pub target: SpaceSpec,
}

/// Adds `rounds` of local perturbations around the best candidates. The
/// result contains `fam`, so its brute-force value can only grow.
pub fn enrich(fam: &CandidateFamily, prob: &OracleProblem, rounds: usize, cfg: &QuadratureConfig) -> CandidateFamily {
    if rounds == 0 {
        return fam.clone();
    }
    enrich_search(fam, prob, rounds, cfg).0
}

/// [`enrich`] together with the final brute-force result.
pub fn enrich_search(
    fam: &CandidateFamily,
    prob: &OracleProblem,
    rounds: usize,
    cfg: &QuadratureConfig,
) -> (CandidateFamily, OracleResult) {
    let mut search = OracleSearch::new(&prob.f, &prob.source, &prob.target, cfg);
    search.family.seed = fam.seed;
    search.extend(fam.candidates.clone());
    for round in 0..rounds {
        search.enrich_round(round);
    }
    let mut out = fam.clone();
    let added = search.family.candidates.iter().filter(|c| !fam.candidates.contains(c)).cloned();
    out.candidates.extend(added);
    out.budget = out.candidates.len();
    (out, search.result())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::Exponent;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig { sup_grid: 32, ..QuadratureConfig::default() }
    }

    fn t6_spaces() -> (SpaceSpec, SpaceSpec, RealFun) {
        let x = SpaceSpec::cop(Exponent::one(), Exponent::ratio(1, 2).unwrap(), RealFun::one(), RealFun::one());
        let y = SpaceSpec::ces(Exponent::one(), Exponent::int(2), RealFun::exp_family(1.0, 0.0, -1.0), RealFun::one());
        (x, y, RealFun::exp_family(1.0, 2.0, 1.0))
    }

    #[test]
    fn identity_and_zero() {
        let cfg = cfg();
        let x = SpaceSpec::ces(Exponent::one(), Exponent::int(2), RealFun::exp_family(1.0, 0.0, -1.0), RealFun::one());
        let fam = CandidateFamily::standard(&x, 200, 1, &cfg);
        let r = brute_force_multiplier(&RealFun::one(), &x, &x, &fam, &cfg).unwrap();
        assert!((r.lower_bound - 1.0).abs() < 1e-9, "{}", r.lower_bound);
        let r = brute_force_multiplier(&RealFun::zero(), &x, &x, &fam, &cfg).unwrap();
        assert_eq!(r.lower_bound, 0.0);
        let empty = CandidateFamily::new(Vec::new(), 0);
        assert_eq!(brute_force_multiplier(&RealFun::one(), &x, &x, &empty, &cfg).unwrap_err(), Error::EmptyFamily);
    }

    #[test]
    fn t6_sandwich_and_enrich() {
        let cfg = cfg();
        let (x, y, f) = t6_spaces();
        let value = std::f64::consts::FRAC_1_SQRT_2;
        let fam = CandidateFamily::standard(&x, 400, 7, &cfg);
        let base = brute_force_multiplier(&f, &x, &y, &fam, &cfg).unwrap();
        assert!(base.lower_bound <= value * 1.001 && base.lower_bound >= value / 100.0, "{} {:?}", base.lower_bound, base.argmax);
        let prob = OracleProblem { f: f.clone(), source: x.clone(), target: y.clone() };
        let (fam5, res) = enrich_search(&fam, &prob, 5, &cfg);
        assert!(res.lower_bound >= base.lower_bound);
        assert!(res.lower_bound >= value / 10.0, "{}", res.lower_bound);
        assert_eq!(enrich(&fam, &prob, 0, &cfg).candidates, fam.candidates);
        assert!(fam5.candidates.len() > fam.candidates.len());
        let again = brute_force_multiplier(&f, &x, &y, &fam5, &cfg).unwrap();
        assert_eq!(again.lower_bound, res.lower_bound);
    }
}
