//! Symmetric-gain fast path and the two-dimensional mode map.

use serde::Serialize;

use super::{Allocation, LgrId};
use crate::channel::{microwave_summary, pathloss_gain, DualBandConfig, Geometry, Placement};
use crate::error::{non_negative, positive, MarcError, Result};

/// Optimal allocation when `r₁ = r₂ = r` and `d₁ = d₂ = d`; always of the form `(p, q, p, q)`.
pub fn symmetric_allocate(r: f64, d: f64, gamma: f64, budget: f64) -> Result<(Allocation, LgrId)> {
    positive("r", r)?;
    positive("d", d)?;
    positive("gamma", gamma)?;
    non_negative("budget", budget)?;
    let p = budget;
    let (q, lgr) = if gamma <= 1.0 {
        (0.0, LgrId::DirectOnly)
    } else {
        let root = gamma.sqrt();
        let saturated = (root - 1.0) / r;
        if r > d * root {
            if p <= saturated {
                (p, LgrId::Rr)
            } else {
                (saturated, LgrId::SatRdrd)
            }
        } else {
            let split_end = (2.0 * root - 1.0) / r - 1.0 / d;
            if d >= r && p <= 1.0 / r - 1.0 / d {
                (0.0, LgrId::Dd)
            } else if d < r && p <= 1.0 / d - 1.0 / r {
                (p, LgrId::Rr)
            } else if p <= split_end {
                (0.5 * (p - 1.0 / r + 1.0 / d), LgrId::Rdrd)
            } else {
                (saturated, LgrId::SatRdrd)
            }
        }
    };
    let q = q.clamp(0.0, p);
    Ok((Allocation { p1: p - q, q1: q, p2: p - q, q2: q }, lgr))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeCell {
    pub phi: f64,
    pub d_sr: f64,
    pub gamma: f64,
    pub mode: LgrId,
}

/// Mode labels over a `(φ, d_SR)` grid, `φ`-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeGrid {
    pub budget: f64,
    pub cells: Vec<ModeCell>,
}

fn cell(template: &DualBandConfig, d_rd: f64, phi: f64, d_sr: f64, budget: f64) -> Result<ModeCell> {
    let geometry = Geometry { d_rd, d_sr, phi };
    let cfg = template.with_geometry(geometry);
    let gamma = microwave_summary(&cfg)?.gamma;
    let beta = cfg.mmwave.pathloss_exp;
    let r = pathloss_gain(d_sr, beta)?;
    let d = pathloss_gain(geometry.source_dest_distance(), beta)?;
    let (_, mode) = symmetric_allocate(r, d, gamma, budget)?;
    Ok(ModeCell { phi, d_sr, gamma, mode })
}

/// Per-cell optimal mm-wave mode for symmetric source placements. The
/// relay-destination distance is taken from the template geometry.
pub fn sweep_2d_topology(template: &DualBandConfig, phi_grid: &[f64], dsr_grid: &[f64], budget: f64) -> Result<ModeGrid> {
    non_negative("budget", budget)?;
    let d_rd = match template.placement {
        Placement::Geometry(g) => g.d_rd,
        _ => return Err(MarcError::Domain("sweep_2d_topology needs a geometry placement".into())),
    };
    let points: Vec<(f64, f64)> = phi_grid.iter().flat_map(|&phi| dsr_grid.iter().map(move |&d| (phi, d))).collect();
    #[cfg(feature = "parallel")]
    let cells = {
        use rayon::prelude::*;
        points.par_iter().map(|&(phi, d_sr)| cell(template, d_rd, phi, d_sr, budget)).collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let cells = points.iter().map(|&(phi, d_sr)| cell(template, d_rd, phi, d_sr, budget)).collect::<Result<Vec<_>>>()?;
    Ok(ModeGrid { budget, cells })
}
