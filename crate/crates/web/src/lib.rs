//! Browser bindings. Every export returns a JSON string; the plain functions
//! behind them are usable (and tested) natively.

use marc_core::allocator::{
    self, lgr_path, relay_regime, sample_allocations, saturation_info, sweep_2d_topology, threshold_powers, MmWaveGains,
};
use marc_core::channel::Geometry;
use marc_core::presets;
use marc_core::regions::normalized_rate;
use marc_core::MarcError;
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Serialize, PartialEq)]
pub struct SegmentView {
    pub lgr: &'static str,
    pub p_lo: f64,
    /// `None` for the unbounded last segment.
    pub p_hi: Option<f64>,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct SampleView {
    pub budget: f64,
    pub p1: f64,
    pub q1: f64,
    pub p2: f64,
    pub q2: f64,
    pub lgr: &'static str,
    pub rate: f64,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct PathView {
    pub label: Option<String>,
    pub regime: String,
    pub segments: Vec<SegmentView>,
    pub samples: Vec<SampleView>,
}

pub fn path_view(g: &MmWaveGains, p_max: f64, samples: usize) -> Result<PathView, MarcError> {
    g.validate()?;
    let path = lgr_path(g)?;
    let segments = path
        .segments
        .iter()
        .map(|s| SegmentView { lgr: s.lgr.label(), p_lo: s.p_lo, p_hi: s.p_hi.is_finite().then_some(s.p_hi) })
        .collect();
    let samples = sample_allocations(g, p_max, samples)?
        .into_iter()
        .map(|(budget, a, l)| SampleView {
            budget,
            p1: a.p1,
            q1: a.q1,
            p2: a.p2,
            q2: a.q2,
            lgr: l.label(),
            rate: normalized_rate(g, &a),
        })
        .collect();
    Ok(PathView {
        label: path.label.map(|l| l.to_string()),
        regime: relay_regime(g.r1, g.r2, g.gamma).to_string(),
        segments,
        samples,
    })
}

#[derive(Debug, Serialize, PartialEq)]
pub struct ModeMapView {
    pub phi: Vec<f64>,
    pub d_sr: Vec<f64>,
    /// `modes[i][j]` at `phi[i]`, `d_sr[j]`.
    pub modes: Vec<Vec<&'static str>>,
    pub gamma: Vec<Vec<f64>>,
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Mode map of the symmetric placement with microwave powers 10 and mm-wave
/// relay power `relay_power`.
pub fn mode_map_view(
    d_rd: f64,
    alpha: f64,
    budget: f64,
    relay_power: f64,
    phi_steps: usize,
    dsr_steps: usize,
    dsr_max: f64,
) -> Result<ModeMapView, MarcError> {
    let mut template = presets::mode_map_scenario().with_geometry(Geometry { d_rd, d_sr: 1.0, phi: 0.0 });
    template.alpha = alpha;
    template.mmwave.powers.relay = relay_power;
    template.validate()?;
    let phi = grid(0.0, 0.99 * std::f64::consts::PI, phi_steps);
    let d_sr = grid(dsr_max / dsr_steps.max(2) as f64, dsr_max, dsr_steps);
    let cells = sweep_2d_topology(&template, &phi, &d_sr, budget)?.cells;
    let modes = cells.chunks(d_sr.len()).map(|row| row.iter().map(|c| c.mode.label()).collect()).collect();
    let gamma = cells.chunks(d_sr.len()).map(|row| row.iter().map(|c| c.gamma).collect()).collect();
    Ok(ModeMapView { phi, d_sr, modes, gamma })
}

#[derive(Debug, Serialize, PartialEq)]
pub struct SummaryView {
    pub regime: String,
    pub label: Option<String>,
    pub lgrs: Vec<&'static str>,
    pub p_sat: Option<f64>,
    pub p_fin: Option<f64>,
    pub q_bar: Option<(f64, f64)>,
    pub thresholds: Vec<(&'static str, f64)>,
    pub budget: f64,
    pub allocation: [f64; 4],
    pub lgr: &'static str,
    pub rate: f64,
}

pub fn summary_view(g: &MmWaveGains, budget: f64) -> Result<SummaryView, MarcError> {
    g.validate()?;
    let path = lgr_path(g)?;
    let sat = if g.gamma > 1.0 { Some(saturation_info(g)?) } else { None };
    let (a, lgr) = allocator::allocate(g, budget)?;
    Ok(SummaryView {
        regime: relay_regime(g.r1, g.r2, g.gamma).to_string(),
        label: path.label.map(|l| l.to_string()),
        lgrs: path.lgrs().iter().map(|l| l.label()).collect(),
        p_sat: sat.map(|s| s.p_sat),
        p_fin: sat.map(|s| s.p_fin),
        q_bar: sat.and_then(|s| s.q_bar),
        thresholds: threshold_powers(g).named().into_iter().filter(|(_, v)| v.is_finite()).collect(),
        budget,
        allocation: a.as_array(),
        lgr: lgr.label(),
        rate: normalized_rate(g, &a),
    })
}

fn to_js<T: Serialize>(r: Result<T, MarcError>) -> Result<String, JsError> {
    match r {
        Ok(v) => serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string())),
        Err(e) => Err(JsError::new(&e.to_string())),
    }
}

fn gains(r1: f64, r2: f64, d1: f64, d2: f64, gamma: f64) -> Result<MmWaveGains, MarcError> {
    MmWaveGains::new(r1, r2, d1, d2, gamma)
}

/// Regime path and sampled allocation curves on `[0, p_max]`.
#[wasm_bindgen(js_name = allocationPath)]
pub fn allocation_path(r1: f64, r2: f64, d1: f64, d2: f64, gamma: f64, p_max: f64, samples: usize) -> Result<String, JsError> {
    to_js(gains(r1, r2, d1, d2, gamma).and_then(|g| path_view(&g, p_max, samples)))
}

#[wasm_bindgen(js_name = modeMap)]
pub fn mode_map(
    d_rd: f64,
    alpha: f64,
    budget: f64,
    relay_power: f64,
    phi_steps: usize,
    dsr_steps: usize,
    dsr_max: f64,
) -> Result<String, JsError> {
    to_js(mode_map_view(d_rd, alpha, budget, relay_power, phi_steps, dsr_steps, dsr_max))
}

#[wasm_bindgen]
pub fn summary(r1: f64, r2: f64, d1: f64, d2: f64, gamma: f64, budget: f64) -> Result<String, JsError> {
    to_js(gains(r1, r2, d1, d2, gamma).and_then(|g| summary_view(&g, budget)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strong_path_view() {
        let v = path_view(&presets::strong_gains(), 2.0, 21).unwrap();
        assert_eq!(v.label.as_deref(), Some("[T5]"));
        assert_eq!(v.regime, "RS2");
        assert_eq!(v.segments.last().unwrap().lgr, "S_drd");
        assert_eq!(v.segments.last().unwrap().p_hi, None);
        let last = v.samples.last().unwrap();
        assert_eq!(last.budget, 2.0);
        assert!((last.q2 - 0.5).abs() < 1e-12);
        assert!(serde_json::to_string(&v).unwrap().contains("\"p_hi\":null"));
    }

    #[test]
    fn mode_map_corners() {
        let v = mode_map_view(1.0, 2.0, 10.0, 1.0, 5, 8, 2.5).unwrap();
        assert_eq!(v.modes.len(), 5);
        assert!(v.modes.iter().all(|r| r.len() == 8));
        assert_eq!(v.modes[0][0], "L1");
        assert!(mode_map_view(-1.0, 2.0, 10.0, 1.0, 5, 8, 2.5).is_err());
    }

    #[test]
    fn summary_view_matches_allocator() {
        let g = presets::moderate_gains();
        let v = summary_view(&g, 1.0).unwrap();
        assert_eq!(v.label.as_deref(), Some("[S5]"));
        assert_eq!(v.lgr, "S_rdrd");
        assert!((v.p_sat.unwrap() - 0.62).abs() < 0.01);
        let total = v.allocation[0] + v.allocation[1];
        assert!((total - 1.0).abs() < 1e-12);

        let low = summary_view(&MmWaveGains { gamma: 0.5, ..g }, 3.0).unwrap();
        assert_eq!(low.lgr, "L1");
        assert_eq!(low.p_sat, None);
    }

    #[test]
    fn invalid_gains_rejected() {
        assert!(gains(0.0, 1.0, 1.0, 1.0, 2.0).is_err());
    }
}
