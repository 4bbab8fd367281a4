//! Regime paths: the sequence of regimes visited as the budget grows.

use std::fmt;

use serde::Serialize;

use super::classify::Allocator;
use super::{Allocation, LgrId, MmWaveGains, RelayRegime};
use crate::error::{non_negative, MarcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub lgr: LgrId,
    pub p_lo: f64,
    /// Exclusive upper end; `+∞` for the last segment.
    pub p_hi: f64,
}

/// Which enumerated path family a label belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PathTable {
    /// Moderate relay asymmetry (`R₁`/`R₂`).
    Moderate,
    /// Strong relay asymmetry (`R_S1`/`R_S2`).
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PathLabel {
    pub name: &'static str,
    pub table: PathTable,
    /// The path was matched after exchanging the user indices.
    pub mirrored: bool,
}

impl fmt::Display for PathLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]{}", self.name, if self.mirrored { "*" } else { "" })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LgrPath {
    pub segments: Vec<Segment>,
    pub label: Option<PathLabel>,
}

impl LgrPath {
    pub fn lgrs(&self) -> Vec<LgrId> {
        self.segments.iter().map(|s| s.lgr).collect()
    }

    /// Segment containing `budget` (half-open intervals).
    pub fn segment_at(&self, budget: f64) -> Option<&Segment> {
        self.segments.iter().find(|s| budget >= s.p_lo && budget < s.p_hi)
    }

    /// Interior segment boundaries, ascending.
    pub fn boundaries(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.p_lo).collect()
    }
}

use LgrId::*;

const MODERATE: &[(&str, &[LgrId])] = &[
    ("S1", &[Rr, Rdr, Rdrd, SatRdrd]),
    ("S2", &[Rr, Rdr, SatRdr, SatRdrd]),
    ("S3", &[Rr, SatRdr, SatRdrd]),
    ("S4", &[Dd, Drd, Rdrd, SatRdrd]),
    ("S5", &[Dr, Rdr, Rdrd, SatRdrd]),
    ("S6", &[Dr, Rdr, SatRdr, SatRdrd]),
    ("S7", &[Dr, Drd, Rdrd, SatRdrd]),
];

const STRONG: &[(&str, &[LgrId])] = &[
    ("T3", &[Rr, SatRdr, SatRdrd, SatDrd]),
    ("N1", &[Rr, SatRdr, SatDrd]),
    ("T4", &[Dd, Drd, Rdrd, SatRdrd, SatDrd]),
    ("N2", &[Dd, Drd, SatDrd]),
    ("T5", &[Dr, Rdr, Rdrd, SatRdrd, SatDrd]),
    ("T6", &[Dr, Rdr, SatRdr, SatRdrd, SatDrd]),
    ("T7", &[Dr, Drd, Rdrd, SatRdrd, SatDrd]),
    ("N3", &[Dr, Rdr, SatRdr, SatDrd]),
    ("N4", &[Dr, Drd, SatDrd]),
    ("N5", &[Dr, SatDrd]),
];

fn match_label(seq: &[LgrId], regime: RelayRegime) -> Option<PathLabel> {
    let (table, family, mirrored) = match regime {
        RelayRegime::R2 => (PathTable::Moderate, MODERATE, false),
        RelayRegime::R1 => (PathTable::Moderate, MODERATE, true),
        RelayRegime::RS2 => (PathTable::Strong, STRONG, false),
        RelayRegime::RS1 => (PathTable::Strong, STRONG, true),
    };
    let seq: Vec<LgrId> = if mirrored { seq.iter().map(|l| l.mirrored()).collect() } else { seq.to_vec() };
    family
        .iter()
        .find(|(_, s)| *s == seq.as_slice())
        .map(|(name, _)| PathLabel { name, table, mirrored })
}

/// Regime path tiling `[0, ∞)`. Each gap between consecutive positive
/// thresholds is classified at its midpoint; equal neighbours are merged.
pub fn lgr_path(g: &MmWaveGains) -> Result<LgrPath> {
    let alloc = Allocator::new(*g)?;
    if g.gamma <= 1.0 {
        return Ok(LgrPath {
            segments: vec![Segment { lgr: LgrId::DirectOnly, p_lo: 0.0, p_hi: f64::INFINITY }],
            label: None,
        });
    }
    let mut knots = vec![0.0];
    knots.extend(alloc.thresholds.breakpoints());
    let mut segments: Vec<Segment> = Vec::new();
    for (i, &lo) in knots.iter().enumerate() {
        let hi = knots.get(i + 1).copied().unwrap_or(f64::INFINITY);
        let probe = if hi.is_finite() { 0.5 * (lo + hi) } else { lo + lo.max(1.0) };
        let lgr = alloc.classify(probe).ok_or(MarcError::Unclassified { budget: probe })?;
        match segments.last_mut() {
            Some(last) if last.lgr == lgr => last.p_hi = hi,
            _ => segments.push(Segment { lgr, p_lo: lo, p_hi: hi }),
        }
    }
    let symmetric_direct = (g.d1 - g.d2).abs() <= 1e-12 * g.d1.max(g.d2);
    let label = if symmetric_direct {
        match_label(&segments.iter().map(|s| s.lgr).collect::<Vec<_>>(), alloc.regime)
    } else {
        None
    };
    Ok(LgrPath { segments, label })
}

/// Allocation curve on `n` evenly spaced budgets in `[0, p_max]`.
pub fn sample_allocations(g: &MmWaveGains, p_max: f64, n: usize) -> Result<Vec<(f64, Allocation, LgrId)>> {
    non_negative("p_max", p_max)?;
    let alloc = Allocator::new(*g)?;
    let step = if n > 1 { p_max / (n - 1) as f64 } else { 0.0 };
    (0..n)
        .map(|i| {
            let p = if i + 1 == n { p_max } else { i as f64 * step };
            alloc.allocate(p).map(|(a, l)| (p, a, l))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaturationInfo {
    pub p_sat: f64,
    pub p_fin: f64,
    pub saturation_lgr: LgrId,
    pub final_lgr: LgrId,
    /// Relay powers as `P → ∞`, present when the final regime is `S_rdrd`.
    pub q_bar: Option<(f64, f64)>,
}

pub fn saturation_info(g: &MmWaveGains) -> Result<SaturationInfo> {
    if g.gamma <= 1.0 {
        return Err(MarcError::Domain(format!("saturation needs gamma > 1 (got {})", g.gamma)));
    }
    let path = lgr_path(g)?;
    let alloc = Allocator::new(*g)?;
    let first = path
        .segments
        .iter()
        .find(|s| s.lgr.is_saturated())
        .ok_or(MarcError::Domain("path never saturates".into()))?;
    let t = &alloc.thresholds;
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (p_fin, final_lgr) = match alloc.regime {
        RelayRegime::R1 | RelayRegime::R2 => {
            (max(&[t.bar_rdd, t.bar_drd, t.bar_rdr, t.bar_rrd, t.rdrd]), LgrId::SatRdrd)
        }
        RelayRegime::RS1 => (max(&[t.rd, t.rdd, t.bar_rdd]), LgrId::SatRdd),
        RelayRegime::RS2 => (max(&[t.dr, t.drd, t.bar_drd]), LgrId::SatDrd),
    };
    let q_bar = (final_lgr == LgrId::SatRdrd).then(|| {
        let level = (g.gamma / (g.r1 * g.r2)).sqrt();
        (level - 1.0 / g.r1, level - 1.0 / g.r2)
    });
    Ok(SaturationInfo {
        p_sat: first.p_lo,
        p_fin: p_fin.max(0.0),
        saturation_lgr: first.lgr,
        final_lgr,
        q_bar,
    })
}
