mod common;

use marc_core::allocator::{allocate, Allocation, MmWaveGains};
use marc_core::channel::FadingModel;
use marc_core::oracle::*;
use marc_core::presets;
use rayon::prelude::*;

fn joint_dual() -> common::JointDual {
    common::JointDual { alpha: 2.0, r: 1.0, d: 1.5, g_rd: 1.0 }
}

fn direct_only_rate(budget: f64) -> f64 {
    2.0 * 2.0 * (1.0 + 1.5 * budget / 2.0).log2()
}

#[test]
fn kkt_holds_at_closed_form() {
    let g = presets::moderate_gains();
    let (a, _) = allocate(&g, 1.0).unwrap();
    let k = kkt_residuals(&g, 1.0, &a).unwrap();
    assert!(k.max_residual() <= 1e-6, "{k:?}");
    assert!((k.lambda1 + k.lambda2 - 1.0).abs() < 1e-15);

    let bad = Allocation { p1: a.p1 - 0.1, q1: a.q1 + 0.1, ..a };
    let k = kkt_residuals(&g, 1.0, &bad).unwrap();
    assert!(k.stationarity_residual.max(k.complementarity_residual) > 1e-3, "{k:?}");
}

#[test]
fn kkt_on_random_tuples() {
    let worst = common::tuples(41, 20_000)
        .par_iter()
        .map(|(g, p)| {
            let (a, _) = allocate(g, *p).unwrap();
            kkt_residuals(g, *p, &a).unwrap().max_residual()
        })
        .reduce(|| 0.0, f64::max);
    assert!(worst <= 1e-6, "{worst}");
}

#[test]
fn perturbations_break_kkt() {
    let mut broken = 0;
    let mut tried = 0;
    for (g, p) in common::tuples(43, 2_000) {
        if p < 1.0 {
            continue;
        }
        let (a, _) = allocate(&g, p).unwrap();
        let shift = 0.1f64.min(a.p1);
        if shift < 0.05 {
            continue;
        }
        let bad = Allocation { p1: a.p1 - shift, q1: a.q1 + shift, ..a };
        let k = kkt_residuals(&g, p, &bad).unwrap();
        tried += 1;
        if k.max_residual() > 1e-5 {
            broken += 1;
        }
    }
    assert!(tried > 100);
    assert_eq!(broken, tried);
}

#[test]
fn p1_oracle_matches_closed_form() {
    let g = presets::moderate_gains();
    let (a, _) = allocate(&g, 2.0).unwrap();
    let r = solve_p1(&g, 2.0, 1e-10).unwrap();
    assert!(r.converged);
    assert!(r.allocation.max_abs_diff(&a) <= 1e-3, "{:?} {a:?}", r.allocation);

    let results: Vec<(f64, f64, f64)> = common::tuples(47, 2_000)
        .par_iter()
        .map(|(g, p)| {
            let (a, _) = allocate(g, *p).unwrap();
            let o = solve_p1(g, *p, 1e-10).unwrap();
            let k = kkt_residuals(g, *p, &a).unwrap();
            let gap = (common::rate(g, a.as_array()) - o.rate).abs();
            (gap, a.max_abs_diff(&o.allocation), k.strict_margin)
        })
        .collect();
    for (gap, diff, margin) in results {
        assert!(gap <= 1e-5, "{gap}");
        if margin > 1e-6 {
            assert!(diff <= 1e-3, "{diff} {margin}");
        }
    }
}

#[test]
fn p1_rate_never_exceeds_closed_form() {
    for (g, p) in common::tuples(53, 500) {
        let (a, _) = allocate(&g, p).unwrap();
        let o = solve_p1(&g, p, 1e-10).unwrap();
        assert!(o.rate <= common::rate(&g, a.as_array()) + 1e-9);
        assert!(o.allocation.budget_error(p) <= 1e-12);
    }
}

#[test]
fn direct_only_gamma() {
    let g = MmWaveGains::new(1.0, 1.0, 1.0, 1.0, 0.9).unwrap();
    let a = Allocation { p1: 5.0, q1: 0.0, p2: 5.0, q2: 0.0 };
    let k = kkt_residuals(&g, 5.0, &a).unwrap();
    assert!(k.max_residual() <= 1e-6);
    assert_eq!((k.lambda1, k.lambda2), (0.0, 1.0));
}

#[test]
fn joint_problem_matches_dual_bound() {
    let cfg = presets::joint_scenario();
    let dual = joint_dual();
    let budgets = [0.5, 2.0, 3.0, 5.0, 20.0, 100.0];
    let rates: Vec<(f64, f64)> = budgets
        .par_iter()
        .map(|&p| {
            let r = solve_p2(&cfg, p, SupergradientOptions::default()).unwrap();
            assert!((r.joint.unwrap().total() - p).abs() <= 1e-9 * p.max(1.0));
            (r.rate, dual.solve(p).value)
        })
        .collect();
    for ((rate, bound), p) in rates.iter().zip(budgets) {
        assert!(*bound >= rate - 1e-9, "P={p}: {rate} > {bound}");
        assert!(bound - rate <= 1e-3, "P={p}: {rate} vs {bound}");
    }
}

#[test]
fn joint_problem_is_direct_only_for_small_budgets() {
    let dual = joint_dual();
    for p in [0.1, 0.5, 1.0, 2.0, 2.5] {
        let bound = dual.solve(p).value;
        assert!(direct_only_rate(p) >= bound - 1e-9, "P={p}");
    }
    assert!(direct_only_rate(3.0) < joint_dual().solve(3.0).value - 1e-6);
    let r = solve_p2(&presets::joint_scenario(), 2.0, SupergradientOptions::default()).unwrap();
    let j = r.joint.unwrap();
    assert!(j.total() - j.mmwave.p1 - j.mmwave.p2 < 0.01, "{j:?}");
}

#[test]
fn joint_optimum_is_monotone_and_concave() {
    let dual = joint_dual();
    let grid: Vec<f64> = (0..=40).map(|i| 2.5 * i as f64).collect();
    let v: Vec<f64> = grid.iter().map(|&p| dual.solve(p).value).collect();
    for w in v.windows(3) {
        assert!(w[1] >= w[0] - 1e-9);
        assert!(w[1] >= 0.5 * (w[0] + w[2]) - 1e-9);
    }
    let cfg = presets::joint_scenario();
    let opts = SupergradientOptions { iterations: 20_000, ..Default::default() };
    let s: Vec<f64> = [10.0, 20.0, 30.0].par_iter().map(|&p| solve_p2(&cfg, p, opts).unwrap().rate).collect();
    assert!(s[0] <= s[1] && s[1] <= s[2]);
    assert!(s[1] >= 0.5 * (s[0] + s[2]) - 1e-3);
}

#[test]
fn joint_problem_needs_phase_fading() {
    let mut cfg = presets::joint_scenario();
    cfg.mmwave.fading = FadingModel::Rayleigh;
    assert!(solve_p2(&cfg, 1.0, SupergradientOptions::default()).is_err());
}
