use proptest::prelude::*;

use cesmul_core::exponents::Exponent;
use cesmul_core::multiplier::characterize;
use cesmul_core::operators::{cal_v, kernel_a, KernelA};
use cesmul_core::oracle::{brute_force_multiplier, enrich, CandidateFamily, OracleProblem};
use cesmul_core::realfun::{integrate, integrate_numeric, lp_norm, Interval};
use cesmul_core::suite;
use cesmul_core::{arrow, dual_exponent, space_norm, QuadratureConfig, RealFun, SpaceSpec, Weight};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        (1i64..12, 1i64..6).prop_map(|(n, d)| Exponent::ratio(n, d).unwrap()),
        Just(Exponent::infinity()),
    ]
}

fn finite_exponent() -> impl Strategy<Value = Exponent> {
    (1i64..12, 1i64..6).prop_map(|(n, d)| Exponent::ratio(n, d).unwrap())
}

/// `t^α e^{-γ t}` plus an optional bump `c χ(lo, hi)`.
fn test_fun() -> impl Strategy<Value = RealFun> {
    (-1.5f64..3.0, 0.2f64..2.0, proptest::option::of((0.1f64..3.0, -3.0f64..2.0, 0.2f64..3.0))).prop_map(
        |(alpha, gamma, bump)| {
            let base = RealFun::exp_family(1.0, alpha, -gamma);
            match bump {
                None => base,
                Some((c, lo, w)) => RealFun::sum(vec![
                    base,
                    RealFun::product(vec![RealFun::constant(c), RealFun::indicator(lo.exp(), (lo + w).exp()).unwrap()]),
                ]),
            }
        },
    )
}

/// Sum of power-weighted indicators, or its image under `t ↦ 1/t`.
fn build_invertible(parts: &[(f64, f64, f64, f64)], invert: bool) -> RealFun {
    RealFun::sum(
        parts
            .iter()
            .map(|&(c, a, lo, w)| {
                let (lo, hi) = (lo.exp(), (lo + w).exp());
                let (a, lo, hi) = if invert { (-a, 1.0 / hi, 1.0 / lo) } else { (a, lo, hi) };
                RealFun::product(vec![RealFun::power(c, a), RealFun::indicator(lo, hi).unwrap()])
            })
            .collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lp_norm_homogeneous(f in test_fun(), p in exponent(), c in 0.01f64..100.0) {
        let w = RealFun::one();
        let iv = Interval::positive();
        let a = lp_norm(&f, &w, &iv, &p, &cfg()).unwrap();
        let b = lp_norm(&f.scale(c), &w, &iv, &p, &cfg()).unwrap();
        prop_assert!(rel(b, c * a) < 1e-10, "{a} {b}");
    }

    #[test]
    fn lp_norm_monotone(f in test_fun(), p in exponent(), lo in -3.0f64..2.0, c in 0.1f64..2.0) {
        let bigger = RealFun::sum(vec![
            f.clone(),
            RealFun::product(vec![RealFun::constant(c), RealFun::indicator(lo.exp(), (lo + 1.0).exp()).unwrap()]),
        ]);
        let iv = Interval::positive();
        let a = lp_norm(&f, &RealFun::one(), &iv, &p, &cfg()).unwrap();
        let b = lp_norm(&bigger, &RealFun::one(), &iv, &p, &cfg()).unwrap();
        prop_assert!(a <= b * (1.0 + 1e-10), "{a} {b}");
    }

    #[test]
    fn lp_norm_interval_additive(f in test_fun(), p in finite_exponent(), a in -3.0f64..0.0, b in 0.0f64..1.0, c in 1.0f64..3.0) {
        let pv = p.value();
        let n = |lo: f64, hi: f64| lp_norm(&f, &RealFun::one(), &Interval::new(lo.exp(), hi.exp()).unwrap(), &p, &cfg()).unwrap().powf(pv);
        let whole = n(a, c);
        let parts = n(a, b) + n(b, c);
        prop_assert!(rel(parts, whole) < 1e-8, "{whole} {parts}");
    }

    #[test]
    fn hints_match_quadrature(alpha in -0.9f64..3.0, gamma in 0.2f64..3.0, x in -4.0f64..3.0) {
        let x = x.exp();
        for f in [RealFun::power(1.5, alpha), RealFun::exp_family(1.0, alpha, -gamma)] {
            let iv = Interval::head(x);
            let a = integrate(&f, &iv, &cfg()).unwrap();
            let b = integrate_numeric(&f, &iv, &cfg()).unwrap();
            prop_assert!(rel(b, a) < 1e-8, "{} {a} {b}", f.recipe());
        }
    }

    #[test]
    fn exponent_algebra(p in finite_exponent(), q in finite_exponent(), r in finite_exponent()) {
        if p.value() > 1.0 {
            prop_assert_eq!(dual_exponent(&dual_exponent(&p)), p.clone());
        }
        let a = arrow(&p, &q);
        prop_assert!(a.value() > 0.0);
        prop_assert_eq!(a.is_infinite(), q >= p);
        let mut v = [p, q, r];
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if v[0] < v[1] && v[1] < v[2] {
            let inv = |e: Exponent| e.recip_exact().unwrap();
            prop_assert_eq!(inv(arrow(&v[2], &v[0])), inv(arrow(&v[2], &v[1])) + inv(arrow(&v[1], &v[0])));
        }
    }

    #[test]
    fn space_norm_homogeneous_and_monotone(
        f in test_fun(), p in exponent(), q in exponent(), c in 0.01f64..100.0, cop in any::<bool>(), lo in -2.0f64..2.0
    ) {
        let u = RealFun::exp_family(1.0, 0.0, -1.0);
        let spec = if cop {
            SpaceSpec::cop(p, q, RealFun::power(1.0, 1.0), RealFun::one())
        } else {
            SpaceSpec::ces(p, q, u, RealFun::one())
        };
        let a = space_norm(&spec, &f, &cfg()).unwrap();
        let b = space_norm(&spec, &f.scale(c), &cfg()).unwrap();
        prop_assert!(rel(b, c * a) < 1e-10, "{a} {b}");
        let bigger = RealFun::sum(vec![f.clone(), RealFun::indicator(lo.exp(), (lo + 0.5).exp()).unwrap()]);
        let m = space_norm(&spec, &bigger, &cfg()).unwrap();
        prop_assert!(a <= m * (1.0 + 1e-10), "{a} {m}");
    }

    #[test]
    fn indicator_inner_norm_saturates(a in -2.0f64..2.0, p in finite_exponent(), beta in -0.5f64..1.0) {
        let a = a.exp();
        let f = RealFun::indicator(0.0, a).unwrap();
        let v = RealFun::power(1.0, beta);
        let inner = |t: f64| lp_norm(&f, &v, &Interval::head(t), &p, &cfg()).unwrap();
        let ts: Vec<f64> = (0..16).map(|i| a * 2f64.powf(i as f64 / 3.0 - 3.0)).collect();
        for w in ts.windows(2) {
            prop_assert!(inner(w[0]) <= inner(w[1]) * (1.0 + 1e-12));
        }
        let at = inner(a);
        for t in ts.iter().filter(|t| **t >= a) {
            prop_assert!(rel(inner(*t), at) < 1e-10);
        }
    }

    #[test]
    fn kernel_envelope(kappa in 0.0f64..3.0, c in 0.1f64..10.0, x in -5.0f64..5.0, t in -5.0f64..5.0) {
        let a = RealFun::power(c, kappa);
        let k = KernelA::new(Weight::new(a.clone()).unwrap(), &cfg()).unwrap();
        let (x, t) = (x.exp(), t.exp());
        let m = (a.eval(x) / a.eval(t)).min(1.0);
        let v = kernel_a(&k, x, t);
        prop_assert!(0.5 * m <= v * (1.0 + 1e-12) && v <= m * (1.0 + 1e-12), "{v} {m}");
        prop_assert!((cal_v(&a, x, t) + cal_v(&a, t, x) - 1.0).abs() < 1e-12);
    }
}

/// The three expressions of the sup-kernel identity on a sampled grid.
#[test]
fn sup_kernel_expressions_agree() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let ts: Vec<f64> = (0..400).map(|i| (-8.0 + 16.0 * i as f64 / 399.0f64).exp()).collect();
    for _ in 0..20 {
        let kappa = rng.gen_range(0.1..2.5);
        let a: Vec<f64> = ts.iter().map(|t| t.powf(kappa)).collect();
        let parts: Vec<(f64, f64, f64, f64)> =
            (0..3).map(|_| (rng.gen_range(0.1..5.0), rng.gen_range(-2.0..2.0), rng.gen_range(-6.0..4.0), rng.gen_range(0.5..3.0))).collect();
        let g: Vec<f64> = ts
            .iter()
            .map(|t| {
                let s = t.ln();
                parts.iter().filter(|p| s > p.2 && s < p.2 + p.3).map(|p| p.0 * t.powf(p.1)).sum()
            })
            .collect();
        let n = ts.len();
        let kern = |i: usize, j: usize| a[i] / (a[i] + a[j]);
        let mut tail_sup = vec![0.0f64; n + 1];
        for j in (0..n).rev() {
            tail_sup[j] = tail_sup[j + 1].max(g[j] / a[j]);
        }
        let mut head_sup = vec![0.0f64; n];
        let mut m = 0.0f64;
        for j in 0..n {
            m = m.max(g[j]);
            head_sup[j] = m;
        }
        for _ in 0..20 {
            let i = rng.gen_range(0..n);
            let e1 = (0..n).map(|j| kern(i, j) * g[j]).fold(0.0, f64::max);
            let e2 = (0..=i).map(|j| a[j] * tail_sup[j]).fold(0.0, f64::max);
            let e3 = a[i] * (i..n).map(|j| head_sup[j] / a[j]).fold(0.0, f64::max);
            if e1 == 0.0 {
                assert!(e2 == 0.0 && e3 == 0.0);
                continue;
            }
            for e in [e2, e3] {
                assert!(e / e1 <= 4.0 && e1 / e <= 4.0, "{e1} {e2} {e3}");
            }
        }
    }
}

#[test]
fn ces_cop_inversion() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let cfg = cfg();
    for _ in 0..10 {
        let p = Exponent::ratio(rng.gen_range(1..8), rng.gen_range(1..4)).unwrap();
        let q = Exponent::ratio(rng.gen_range(1..8), rng.gen_range(1..4)).unwrap();
        let (pv, qv) = (p.value(), q.value());
        let a = -(1.0 + rng.gen_range(0.1..2.0)) / qv;
        let b = rng.gen_range(-0.5..1.0);
        let parts: Vec<(f64, f64, f64, f64)> =
            (0..2).map(|_| (rng.gen_range(0.2..3.0), rng.gen_range(-1.0..1.0), rng.gen_range(-3.0..1.0), rng.gen_range(0.3..3.0))).collect();
        let f = build_invertible(&parts, false);
        let g = build_invertible(&parts, true);
        let ces = SpaceSpec::ces(p.clone(), q.clone(), RealFun::power(1.0, a), RealFun::power(1.0, b));
        let cop = SpaceSpec::cop(p, q, RealFun::power(1.0, -a - 2.0 / qv), RealFun::power(1.0, -b - 2.0 / pv));
        let x = space_norm(&ces, &f, &cfg).unwrap();
        let y = space_norm(&cop, &g, &cfg).unwrap();
        assert!(rel(y, x) < 1e-4, "{x} {y}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn characterize_scales_in_f_and_v(idx in 0usize..28, c in 0.05f64..20.0) {
        let insts = suite::regime_instances();
        let prob = &insts[idx % insts.len()].problem;
        let base = characterize(prob, &cfg()).unwrap();
        let sum: f64 = base.terms.iter().map(|t| t.value).sum();
        prop_assert_eq!(sum, base.value);

        let sf = characterize(&prob.with_f(prob.f.scale(c)), &cfg()).unwrap();
        prop_assert!(rel(sf.value, c * base.value) < 1e-10, "{} {}", base.value, sf.value);

        let mut pv = prob.clone();
        pv.v = Weight::new(prob.v.fun().scale(c)).unwrap();
        let sv = characterize(&pv, &cfg()).unwrap();
        for (t0, t1) in base.terms.iter().zip(&sv.terms) {
            prop_assert!(rel(t1.value, c * t0.value) < 1e-6, "{}: {} {}", t0.name, t0.value, t1.value);
        }
    }

    #[test]
    fn oracle_deterministic_and_enrich_monotone(seed in 0u64..1000, rounds in 0usize..3) {
        let ocfg = QuadratureConfig { sup_grid: 16, ..cfg() };
        let prob = &suite::regime_instances()[22].problem;
        let source = prob.source_space();
        let fam = CandidateFamily::standard(&source, 80, seed, &ocfg);
        prop_assert_eq!(&fam, &CandidateFamily::standard(&source, 80, seed, &ocfg));
        let op = OracleProblem { f: prob.f.clone(), source: source.clone(), target: prob.target_space() };
        let before = brute_force_multiplier(&op.f, &op.source, &op.target, &fam, &ocfg).unwrap();
        let grown = enrich(&fam, &op, rounds, &ocfg);
        prop_assert!(fam.candidates.iter().all(|c| grown.candidates.contains(c)));
        let after = brute_force_multiplier(&op.f, &op.source, &op.target, &grown, &ocfg).unwrap();
        prop_assert!(after.lower_bound >= before.lower_bound);
        let again = brute_force_multiplier(&op.f, &op.source, &op.target, &grown, &ocfg).unwrap();
        prop_assert_eq!(after.lower_bound, again.lower_bound);
        prop_assert_eq!(after.argmax, again.argmax);
    }
}
