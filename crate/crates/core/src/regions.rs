//! Rate regions of the relay-assisted dual-band channel, the jointly-near
//! capacity test and the sum-rate functionals `Σ_R`, `Σ_D`.

use serde::{Deserialize, Serialize};

use crate::allocator::{Allocation, MmWaveGains};
use crate::channel::{DualBandConfig, Geometry, MicrowaveSummary, Placement};
use crate::error::{non_negative, MarcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    RelayUser1,
    RelayUser2,
    RelaySum,
    DestUser1,
    DestUser2,
    DestSum,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::RelayUser1 => "relay_user1",
            BoundKind::RelayUser2 => "relay_user2",
            BoundKind::RelaySum => "relay_sum",
            BoundKind::DestUser1 => "dest_user1",
            BoundKind::DestUser2 => "dest_user2",
            BoundKind::DestSum => "dest_sum",
        }
    }

    fn coefficients(self) -> (u8, u8) {
        match self {
            BoundKind::RelayUser1 | BoundKind::DestUser1 => (1, 0),
            BoundKind::RelayUser2 | BoundKind::DestUser2 => (0, 1),
            BoundKind::RelaySum | BoundKind::DestSum => (1, 1),
        }
    }
}

/// `coeff_r1·R₁ + coeff_r2·R₂ ≤ bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateConstraint {
    pub kind: BoundKind,
    pub coeff_r1: u8,
    pub coeff_r2: u8,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    pub constraints: Vec<RateConstraint>,
}

impl RateRegion {
    pub fn bound(&self, kind: BoundKind) -> Option<f64> {
        self.constraints.iter().find(|c| c.kind == kind).map(|c| c.bound)
    }

    pub fn contains(&self, r1: f64, r2: f64) -> bool {
        r1 >= 0.0
            && r2 >= 0.0
            && self
                .constraints
                .iter()
                .all(|c| c.coeff_r1 as f64 * r1 + c.coeff_r2 as f64 * r2 <= c.bound)
    }

    /// Largest achievable sum rate over the region.
    pub fn max_sum_rate(&self) -> f64 {
        let (mut u1, mut u2, mut s) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        for c in &self.constraints {
            match (c.coeff_r1, c.coeff_r2) {
                (1, 0) => u1 = u1.min(c.bound),
                (0, 1) => u2 = u2.min(c.bound),
                (1, 1) => s = s.min(c.bound),
                _ => {}
            }
        }
        s.min(u1 + u2)
    }

    /// Corner points of the polytope, counter-clockwise from the origin.
    pub fn vertices(&self) -> Vec<(f64, f64)> {
        let (mut u1, mut u2, mut s) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        for c in &self.constraints {
            match (c.coeff_r1, c.coeff_r2) {
                (1, 0) => u1 = u1.min(c.bound),
                (0, 1) => u2 = u2.min(c.bound),
                (1, 1) => s = s.min(c.bound),
                _ => {}
            }
        }
        let a = u1.min(s);
        let b = u2.min(s);
        let mut v = vec![(0.0, 0.0), (a, 0.0)];
        if s < a + b {
            v.push((a, s - a));
            if s - b > 0.0 && s - b < a {
                v.push((s - b, b));
            }
        } else {
            v.push((a, b));
        }
        v.push((0.0, b));
        v.dedup();
        v
    }
}

/// Relay-link mm-wave source powers `(P̂₁, P̂₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelayLinkPowers {
    pub source1: f64,
    pub source2: f64,
}

impl RelayLinkPowers {
    pub fn from_config(cfg: &DualBandConfig) -> Self {
        RelayLinkPowers { source1: cfg.mmwave.powers.source1, source2: cfg.mmwave.powers.source2 }
    }
}

/// Direct-link mm-wave source powers `(P̄₁, P̄₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DirectLinkPowers {
    pub source1: f64,
    pub source2: f64,
}

/// The six bounds of the relay-only mm-wave configuration.
pub fn rmarc_achievable_region(cfg: &DualBandConfig, mm: RelayLinkPowers) -> Result<RateRegion> {
    non_negative("mmwave relay-link power source1", mm.source1)?;
    non_negative("mmwave relay-link power source2", mm.source2)?;
    let (g, gb) = cfg.band_gains()?;
    let p = cfg.microwave.powers;
    let mw = &cfg.microwave;
    let mmw = &cfg.mmwave;
    let a = cfg.alpha;
    let mm_rd = cfg.rate(mmw, &[gb.relay_dest], &[mmw.powers.relay])?;
    let mm_1r = cfg.rate(mmw, &[gb.s1_relay], &[mm.source1])?;
    let mm_2r = cfg.rate(mmw, &[gb.s2_relay], &[mm.source2])?;

    let bounds = [
        (BoundKind::RelayUser1, cfg.rate(mw, &[g.s1_relay], &[p.source1])? + a * mm_1r),
        (BoundKind::RelayUser2, cfg.rate(mw, &[g.s2_relay], &[p.source2])? + a * mm_2r),
        (
            BoundKind::RelaySum,
            cfg.rate(mw, &[g.s1_relay, g.s2_relay], &[p.source1, p.source2])? + a * (mm_1r + mm_2r),
        ),
        (
            BoundKind::DestUser1,
            cfg.rate(mw, &[g.s1_dest, g.relay_dest], &[p.source1, p.relay])? + a * mm_rd,
        ),
        (
            BoundKind::DestUser2,
            cfg.rate(mw, &[g.s2_dest, g.relay_dest], &[p.source2, p.relay])? + a * mm_rd,
        ),
        (
            BoundKind::DestSum,
            cfg.rate(mw, &[g.s1_dest, g.s2_dest, g.relay_dest], &[p.source1, p.source2, p.relay])?
                + a * mm_rd,
        ),
    ];
    Ok(RateRegion {
        constraints: bounds
            .into_iter()
            .map(|(kind, bound)| {
                let (coeff_r1, coeff_r2) = kind.coefficients();
                RateConstraint { kind, coeff_r1, coeff_r2, bound }
            })
            .collect(),
    })
}

/// Adds the direct mm-wave links: per-user bounds grow by `α·E[C(Ḡ_kD P̄_k)]`,
/// sum bounds by both increments.
pub fn drmarc_region(rmarc: &RateRegion, cfg: &DualBandConfig, direct: DirectLinkPowers) -> Result<RateRegion> {
    non_negative("direct-link power source1", direct.source1)?;
    non_negative("direct-link power source2", direct.source2)?;
    let (_, gb) = cfg.band_gains()?;
    let inc1 = cfg.alpha * cfg.rate(&cfg.mmwave, &[gb.s1_dest], &[direct.source1])?;
    let inc2 = cfg.alpha * cfg.rate(&cfg.mmwave, &[gb.s2_dest], &[direct.source2])?;
    let constraints = rmarc
        .constraints
        .iter()
        .map(|c| RateConstraint {
            bound: c.bound + c.coeff_r1 as f64 * inc1 + c.coeff_r2 as f64 * inc2,
            ..*c
        })
        .collect();
    Ok(RateRegion { constraints })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub holds: bool,
    /// Relay-side bound minus destination-side bound.
    pub margin: f64,
}

impl Condition {
    fn new(margin: f64) -> Self {
        Condition { holds: margin >= 0.0, margin }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearnessReport {
    pub cond_r1: Condition,
    pub cond_r2: Condition,
    pub cond_sum: Condition,
}

impl NearnessReport {
    /// All three conditions hold, so the region is the capacity region.
    pub fn capacity_achieving(&self) -> bool {
        self.cond_r1.holds && self.cond_r2.holds && self.cond_sum.holds
    }
}

pub fn jointly_near_check(cfg: &DualBandConfig, mm: RelayLinkPowers) -> Result<NearnessReport> {
    let region = rmarc_achievable_region(cfg, mm)?;
    let margin = |relay, dest| {
        region.bound(relay).unwrap_or(f64::INFINITY) - region.bound(dest).unwrap_or(f64::INFINITY)
    };
    Ok(NearnessReport {
        cond_r1: Condition::new(margin(BoundKind::RelayUser1, BoundKind::DestUser1)),
        cond_r2: Condition::new(margin(BoundKind::RelayUser2, BoundKind::DestUser2)),
        cond_sum: Condition::new(margin(BoundKind::RelaySum, BoundKind::DestSum)),
    })
}

/// Which jointly-near conditions define the threshold distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NearCriterion {
    /// Sum-rate condition only (the crossing of achievable sum rate and outer bound).
    #[default]
    Sum,
    /// All three conditions (boundary of the capacity region).
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionOptions {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub tol: f64,
    pub criterion: NearCriterion,
}

impl Default for BisectionOptions {
    fn default() -> Self {
        BisectionOptions { lo: 1e-3, hi: 10.0, steps: 60, tol: 1e-9, criterion: NearCriterion::Sum }
    }
}

/// Margin of the selected condition at source-relay distance `d_sr`.
pub fn near_margin(
    template: &DualBandConfig,
    d_rd: f64,
    phi: f64,
    alpha: f64,
    d_sr: f64,
    criterion: NearCriterion,
) -> Result<f64> {
    let mut cfg = template.with_geometry(Geometry { d_rd, d_sr, phi });
    cfg.alpha = alpha;
    let report = jointly_near_check(&cfg, RelayLinkPowers::from_config(&cfg))?;
    Ok(match criterion {
        NearCriterion::Sum => report.cond_sum.margin,
        NearCriterion::All => report.cond_r1.margin.min(report.cond_r2.margin).min(report.cond_sum.margin),
    })
}

/// Source-relay distance at which the selected condition stops holding.
/// Bisection over `[opts.lo, opts.hi]`; the margin is positive near the relay.
pub fn threshold_distance(
    template: &DualBandConfig,
    d_rd: f64,
    phi: f64,
    alpha: f64,
    opts: BisectionOptions,
) -> Result<f64> {
    if !matches!(template.placement, Placement::Geometry(_)) {
        return Err(MarcError::Domain("threshold_distance needs a geometry placement".into()));
    }
    let f = |x: f64| near_margin(template, d_rd, phi, alpha, x, opts.criterion);
    let (mut lo, mut hi) = (opts.lo, opts.hi);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo.signum() == fhi.signum() && flo != 0.0 && fhi != 0.0 {
        return Err(MarcError::NoSignChange { lo, hi, holds_everywhere: flo > 0.0 });
    }
    let increasing = flo < fhi;
    for _ in 0..opts.steps {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm.abs() <= opts.tol {
            return Ok(mid);
        }
        if (fm < 0.0) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumRates {
    pub sigma_big_r: f64,
    pub sigma_big_d: f64,
    pub rate: f64,
}

/// `Σ_R = σ_R + α Σₖ [log₂(1+rₖqₖ) + log₂(1+dₖpₖ)]`, `Σ_D = σ_D + α Σₖ log₂(1+dₖpₖ)`.
pub fn sum_rates(summary: &MicrowaveSummary, g: &MmWaveGains, alloc: &Allocation, alpha: f64) -> SumRates {
    let direct = (g.d1 * alloc.p1).ln_1p() + (g.d2 * alloc.p2).ln_1p();
    let relay = (g.r1 * alloc.q1).ln_1p() + (g.r2 * alloc.q2).ln_1p();
    let scale = alpha / std::f64::consts::LN_2;
    let sigma_big_r = summary.sigma_r + scale * (direct + relay);
    let sigma_big_d = summary.sigma_d + scale * direct;
    SumRates { sigma_big_r, sigma_big_d, rate: sigma_big_r.min(sigma_big_d) }
}

/// Sum rate with `σ_R = 0`, `σ_D = log₂γ`, `α = 1`; same maximizers as [`sum_rates`].
pub fn normalized_rate(g: &MmWaveGains, alloc: &Allocation) -> f64 {
    sum_rates(&MicrowaveSummary::from_gamma(g.gamma, 1.0), g, alloc, 1.0).rate
}
