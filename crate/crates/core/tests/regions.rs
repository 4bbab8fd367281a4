use std::f64::consts::{FRAC_PI_4, PI};

use marc_core::allocator::{Allocation, MmWaveGains};
use marc_core::channel::{Geometry, MicrowaveSummary};
use marc_core::presets;
use marc_core::regions::*;
use proptest::prelude::*;

fn at(d_rd: f64, d_sr: f64, phi: f64) -> marc_core::channel::DualBandConfig {
    presets::near_scenario(d_rd).with_geometry(Geometry { d_rd, d_sr, phi })
}

#[test]
fn sum_condition_holds_near_and_fails_far() {
    let cfg = at(1.0, 1.0, FRAC_PI_4);
    let near = jointly_near_check(&cfg, RelayLinkPowers::from_config(&cfg)).unwrap();
    assert!(near.cond_sum.holds, "{near:?}");
    // per-user conditions: log₂11·3 against log₂(11 + 10/(2+√2)) + 2log₂11
    let per_user = 3.0 * 11f64.log2() - (11.0 + 10.0 / (2.0 + 2f64.sqrt())).log2() - 2.0 * 11f64.log2();
    assert!((near.cond_r1.margin - per_user).abs() < 1e-12);
    assert_eq!(near.cond_r1, near.cond_r2);
    assert!(!near.capacity_achieving());

    let cfg = at(1.0, 2.0, FRAC_PI_4);
    let far = jointly_near_check(&cfg, RelayLinkPowers::from_config(&cfg)).unwrap();
    assert!(!far.cond_sum.holds, "{far:?}");
    assert!(!far.capacity_achieving());
}

#[test]
fn threshold_distance_values() {
    let opts = BisectionOptions::default();
    let d1 = threshold_distance(&presets::near_scenario(1.0), 1.0, FRAC_PI_4, 2.0, opts).unwrap();
    let d05 = threshold_distance(&presets::near_scenario(0.5), 0.5, FRAC_PI_4, 2.0, opts).unwrap();
    assert!((d1 - 1.40391).abs() < 1e-4, "{d1}");
    assert!((d05 - 0.91460).abs() < 1e-4, "{d05}");
    assert!(d05 < d1);
    let m = near_margin(&presets::near_scenario(1.0), 1.0, FRAC_PI_4, 2.0, d1, NearCriterion::Sum).unwrap();
    assert!(m.abs() < 1e-6);
}

#[test]
fn all_conditions_threshold_is_no_larger() {
    let sum = BisectionOptions::default();
    let all = BisectionOptions { criterion: NearCriterion::All, ..sum };
    let t = presets::near_scenario(1.0);
    let a = threshold_distance(&t, 1.0, FRAC_PI_4, 2.0, all).unwrap();
    let s = threshold_distance(&t, 1.0, FRAC_PI_4, 2.0, sum).unwrap();
    assert!(a <= s + 1e-9, "{a} {s}");
}

#[test]
fn microwave_only_collinear_threshold() {
    let t = presets::near_scenario(1.0);
    let opts = BisectionOptions { hi: 0.999, ..Default::default() };
    let sum = threshold_distance(&t, 1.0, PI - 1e-6, 0.0, opts).unwrap();
    assert!((sum - 0.47).abs() < 0.02, "{sum}");
    let all = BisectionOptions { criterion: NearCriterion::All, ..opts };
    let all = threshold_distance(&t, 1.0, PI - 1e-6, 0.0, all).unwrap();
    assert!((all - 0.47).abs() < 0.01, "{all}");
    let far = threshold_distance(&t, 1.0, 1e-6, 0.0, BisectionOptions::default()).unwrap();
    assert!((far - 1.2).abs() < 0.02, "{far}");
}

#[test]
fn threshold_needs_geometry() {
    let r = threshold_distance(&presets::joint_scenario(), 1.0, 0.0, 1.0, BisectionOptions::default());
    assert!(r.is_err());
}

#[test]
fn zero_direct_power_is_identity() {
    for d_sr in [0.3, 1.0, 2.5] {
        let cfg = at(1.0, d_sr, 1.0);
        let r = rmarc_achievable_region(&cfg, RelayLinkPowers::from_config(&cfg)).unwrap();
        assert_eq!(drmarc_region(&r, &cfg, DirectLinkPowers::default()).unwrap(), r);
    }
}

#[test]
fn negative_powers_rejected() {
    let cfg = at(1.0, 1.0, 1.0);
    assert!(rmarc_achievable_region(&cfg, RelayLinkPowers { source1: -1.0, source2: 0.0 }).is_err());
    let r = rmarc_achievable_region(&cfg, RelayLinkPowers::from_config(&cfg)).unwrap();
    assert!(drmarc_region(&r, &cfg, DirectLinkPowers { source1: 0.0, source2: -0.5 }).is_err());
}

proptest! {
    #[test]
    fn bounds_grow_with_relay_link_power(d_sr in 0.2f64..3.0, phi in 0.0f64..3.1, p in 0.0f64..20.0, dp in 0.0f64..20.0) {
        let cfg = at(1.0, d_sr, phi);
        let lo = rmarc_achievable_region(&cfg, RelayLinkPowers { source1: p, source2: p }).unwrap();
        let hi = rmarc_achievable_region(&cfg, RelayLinkPowers { source1: p + dp, source2: p + dp }).unwrap();
        for (a, b) in lo.constraints.iter().zip(&hi.constraints) {
            prop_assert!(b.bound >= a.bound - 1e-12);
        }
    }

    #[test]
    fn direct_power_only_adds(d_sr in 0.2f64..3.0, phi in 0.0f64..3.1, p1 in 0.0f64..10.0, p2 in 0.0f64..10.0) {
        let cfg = at(1.0, d_sr, phi);
        let r = rmarc_achievable_region(&cfg, RelayLinkPowers::from_config(&cfg)).unwrap();
        let d = drmarc_region(&r, &cfg, DirectLinkPowers { source1: p1, source2: p2 }).unwrap();
        for (a, b) in r.constraints.iter().zip(&d.constraints) {
            prop_assert!(b.bound >= a.bound);
        }
        let inc1 = d.bound(BoundKind::RelayUser1).unwrap() - r.bound(BoundKind::RelayUser1).unwrap();
        let inc2 = d.bound(BoundKind::RelayUser2).unwrap() - r.bound(BoundKind::RelayUser2).unwrap();
        let inc = d.bound(BoundKind::DestSum).unwrap() - r.bound(BoundKind::DestSum).unwrap();
        prop_assert!((inc - inc1 - inc2).abs() < 1e-12);
    }

    #[test]
    fn near_means_destination_side_binds(d_sr in 0.1f64..4.0, phi in 0.0f64..3.1, d_rd in 0.3f64..2.0) {
        let cfg = at(d_rd, d_sr, phi);
        let report = jointly_near_check(&cfg, RelayLinkPowers::from_config(&cfg)).unwrap();
        let r = rmarc_achievable_region(&cfg, RelayLinkPowers::from_config(&cfg)).unwrap();
        if report.capacity_achieving() {
            prop_assert!(r.bound(BoundKind::DestSum).unwrap() <= r.bound(BoundKind::RelaySum).unwrap());
            prop_assert!(r.max_sum_rate() <= r.bound(BoundKind::DestSum).unwrap() + 1e-12);
        }
        for v in r.vertices() {
            prop_assert!(r.contains(v.0 * (1.0 - 1e-12), v.1 * (1.0 - 1e-12)));
        }
    }

    #[test]
    fn sum_rate_is_concave(
        r1 in 0.05f64..20.0, r2 in 0.05f64..20.0, d1 in 0.05f64..20.0, d2 in 0.05f64..20.0,
        gamma in 1.0f64..30.0, a in proptest::array::uniform4(0.0f64..50.0), b in proptest::array::uniform4(0.0f64..50.0),
    ) {
        let g = MmWaveGains { r1, r2, d1, d2, gamma };
        let s = MicrowaveSummary::from_gamma(gamma, 2.0);
        let x = Allocation { p1: a[0], q1: a[1], p2: a[2], q2: a[3] };
        let y = Allocation { p1: b[0], q1: b[1], p2: b[2], q2: b[3] };
        let m = Allocation { p1: 0.5 * (a[0] + b[0]), q1: 0.5 * (a[1] + b[1]), p2: 0.5 * (a[2] + b[2]), q2: 0.5 * (a[3] + b[3]) };
        let f = |z: &Allocation| sum_rates(&s, &g, z, 2.0).rate;
        prop_assert!(f(&m) >= 0.5 * (f(&x) + f(&y)) - 1e-12);
        let n = normalized_rate(&g, &x);
        prop_assert!(((f(&x) - s.sigma_r) / 2.0 - n).abs() < 1e-10);
    }
}
