//! Channel model: node placement, per-band path loss and fading, ergodic rates
//! and the microwave summary `(σ_R, σ_D, γ)` that the mm-wave allocator consumes.
//!
//! Node `R` sits at the origin and `D` on the positive x-axis at distance
//! `d_RD`. The two sources are placed symmetrically at
//! `(-d_SR cos φ, ±d_SR sin φ)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::allocator::MmWaveGains;
use crate::error::{non_negative, positive, MarcError, Result};
use crate::quadrature::expected_ln1p_exp;

pub const DEFAULT_QMC_SAMPLES: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingModel {
    /// Deterministic gain `1/dist^β`.
    #[default]
    Phase,
    /// Exponentially distributed gain with mean `1/dist^β`.
    Rayleigh,
}

/// Symmetric two-source placement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub d_rd: f64,
    pub d_sr: f64,
    pub phi: f64,
}

impl Geometry {
    pub fn source_dest_distance(&self) -> f64 {
        (self.d_sr * self.d_sr + self.d_rd * self.d_rd + 2.0 * self.d_sr * self.d_rd * self.phi.cos())
            .max(0.0)
            .sqrt()
    }

    pub fn distances(&self) -> LinkDistances {
        let d_sd = self.source_dest_distance();
        LinkDistances {
            s1_relay: self.d_sr,
            s2_relay: self.d_sr,
            s1_dest: d_sd,
            s2_dest: d_sd,
            relay_dest: self.d_rd,
        }
    }
}

/// Explicit per-link distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDistances {
    pub s1_relay: f64,
    pub s2_relay: f64,
    pub s1_dest: f64,
    pub s2_dest: f64,
    pub relay_dest: f64,
}

/// Mean gains of the five links of one band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandGains {
    pub s1_relay: f64,
    pub s2_relay: f64,
    pub s1_dest: f64,
    pub s2_dest: f64,
    pub relay_dest: f64,
}

impl BandGains {
    pub fn uniform(g: f64) -> Self {
        BandGains { s1_relay: g, s2_relay: g, s1_dest: g, s2_dest: g, relay_dest: g }
    }

    fn from_distances(d: &LinkDistances, beta: f64) -> Result<Self> {
        Ok(BandGains {
            s1_relay: pathloss_gain(d.s1_relay, beta)?,
            s2_relay: pathloss_gain(d.s2_relay, beta)?,
            s1_dest: pathloss_gain(d.s1_dest, beta)?,
            s2_dest: pathloss_gain(d.s2_dest, beta)?,
            relay_dest: pathloss_gain(d.relay_dest, beta)?,
        })
    }

    fn validate(&self) -> Result<()> {
        positive("gain s1_relay", self.s1_relay)?;
        positive("gain s2_relay", self.s2_relay)?;
        positive("gain s1_dest", self.s1_dest)?;
        positive("gain s2_dest", self.s2_dest)?;
        positive("gain relay_dest", self.relay_dest)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitGains {
    pub microwave: BandGains,
    pub mmwave: BandGains,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    Geometry(Geometry),
    Distances(LinkDistances),
    Gains(ExplicitGains),
}

/// Fixed transmit powers of one band. In the mm-wave band the source entries
/// are the relay-link powers used when building rate regions; the relay
/// entry is the relay→destination power.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkPowers {
    #[serde(default)]
    pub source1: f64,
    #[serde(default)]
    pub source2: f64,
    #[serde(default)]
    pub relay: f64,
}

impl LinkPowers {
    pub fn uniform(p: f64) -> Self {
        LinkPowers { source1: p, source2: p, relay: p }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    pub pathloss_exp: f64,
    #[serde(default)]
    pub fading: FadingModel,
    #[serde(default)]
    pub powers: LinkPowers,
}

/// Sampling controls for multi-term Rayleigh expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QmcSettings {
    pub samples: usize,
    pub seed: u64,
}

impl Default for QmcSettings {
    fn default() -> Self {
        QmcSettings { samples: DEFAULT_QMC_SAMPLES, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualBandConfig {
    pub microwave: BandConfig,
    pub mmwave: BandConfig,
    pub alpha: f64,
    pub placement: Placement,
    /// Explicit γ; takes precedence over the value computed from the microwave model.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub qmc: QmcSettings,
}

impl DualBandConfig {
    pub fn validate(&self) -> Result<()> {
        positive("microwave pathloss_exp", self.microwave.pathloss_exp)?;
        positive("mmwave pathloss_exp", self.mmwave.pathloss_exp)?;
        non_negative("alpha", self.alpha)?;
        for (name, p) in [
            ("microwave power source1", self.microwave.powers.source1),
            ("microwave power source2", self.microwave.powers.source2),
            ("microwave power relay", self.microwave.powers.relay),
            ("mmwave power source1", self.mmwave.powers.source1),
            ("mmwave power source2", self.mmwave.powers.source2),
            ("mmwave power relay", self.mmwave.powers.relay),
        ] {
            non_negative(name, p)?;
        }
        if let Some(g) = self.gamma {
            positive("gamma", g)?;
        }
        if self.qmc.samples == 0 {
            return Err(MarcError::Domain("qmc samples must be at least 1".into()));
        }
        match &self.placement {
            Placement::Geometry(g) => {
                positive("d_rd", g.d_rd)?;
                positive("d_sr", g.d_sr)?;
                if !g.phi.is_finite() {
                    return Err(MarcError::Domain(format!("phi must be finite (got {})", g.phi)));
                }
                positive("source-destination distance", g.source_dest_distance())?;
            }
            Placement::Distances(d) => {
                positive("s1_relay distance", d.s1_relay)?;
                positive("s2_relay distance", d.s2_relay)?;
                positive("s1_dest distance", d.s1_dest)?;
                positive("s2_dest distance", d.s2_dest)?;
                positive("relay_dest distance", d.relay_dest)?;
            }
            Placement::Gains(g) => {
                g.microwave.validate()?;
                g.mmwave.validate()?;
            }
        }
        Ok(())
    }

    /// Mean link gains `(microwave, mm-wave)`.
    pub fn band_gains(&self) -> Result<(BandGains, BandGains)> {
        self.validate()?;
        match &self.placement {
            Placement::Geometry(g) => {
                let d = g.distances();
                Ok((
                    BandGains::from_distances(&d, self.microwave.pathloss_exp)?,
                    BandGains::from_distances(&d, self.mmwave.pathloss_exp)?,
                ))
            }
            Placement::Distances(d) => Ok((
                BandGains::from_distances(d, self.microwave.pathloss_exp)?,
                BandGains::from_distances(d, self.mmwave.pathloss_exp)?,
            )),
            Placement::Gains(g) => Ok((g.microwave, g.mmwave)),
        }
    }

    /// Optimization-facing gains: mm-wave relay/direct link means plus γ.
    pub fn mmwave_gains(&self) -> Result<MmWaveGains> {
        let (_, mm) = self.band_gains()?;
        let summary = microwave_summary(self)?;
        MmWaveGains::new(mm.s1_relay, mm.s2_relay, mm.s1_dest, mm.s2_dest, summary.gamma)
    }

    pub fn with_geometry(mut self, geometry: Geometry) -> Self {
        self.placement = Placement::Geometry(geometry);
        self
    }

    pub(crate) fn rate(&self, band: &BandConfig, gains: &[f64], powers: &[f64]) -> Result<f64> {
        ergodic_rate_with(band.fading, gains, powers, &self.qmc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicrowaveSummary {
    pub sigma_r: f64,
    pub sigma_d: f64,
    pub gamma: f64,
}

impl MicrowaveSummary {
    /// Summary consistent with a directly supplied γ: `σ_R = 0`, `σ_D = α·log₂γ`.
    pub fn from_gamma(gamma: f64, alpha: f64) -> Self {
        MicrowaveSummary { sigma_r: 0.0, sigma_d: alpha * gamma.log2(), gamma }
    }
}

/// Mean gain `1/dist^beta`.
pub fn pathloss_gain(dist: f64, beta: f64) -> Result<f64> {
    positive("distance", dist)?;
    positive("pathloss exponent", beta)?;
    Ok(dist.powf(-beta))
}

/// `E[log₂(1 + Σ Gᵢ Pᵢ)]` with default sampling controls.
pub fn ergodic_rate(fading: FadingModel, mean_gains: &[f64], powers: &[f64]) -> Result<f64> {
    ergodic_rate_with(fading, mean_gains, powers, &QmcSettings::default())
}

pub fn ergodic_rate_with(
    fading: FadingModel,
    mean_gains: &[f64],
    powers: &[f64],
    qmc: &QmcSettings,
) -> Result<f64> {
    if mean_gains.is_empty() || mean_gains.len() != powers.len() {
        return Err(MarcError::Domain(format!(
            "gain and power lists must be non-empty and of equal length ({} vs {})",
            mean_gains.len(),
            powers.len()
        )));
    }
    for (&g, &p) in mean_gains.iter().zip(powers) {
        positive("mean gain", g)?;
        non_negative("power", p)?;
    }
    let scales: Vec<f64> = mean_gains
        .iter()
        .zip(powers)
        .map(|(g, p)| g * p)
        .filter(|s| *s > 0.0)
        .collect();
    let nats = match (fading, scales.len()) {
        (_, 0) => 0.0,
        (FadingModel::Phase, _) => scales.iter().sum::<f64>().ln_1p(),
        (FadingModel::Rayleigh, 1) => expected_ln1p_exp(scales[0]),
        (FadingModel::Rayleigh, _) => qmc_expected_ln1p(&scales, qmc),
    };
    Ok(nats / std::f64::consts::LN_2)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Kronecker (generalized golden ratio) lattice with a seeded random shift.
/// The shift depends only on the seed and the input bits.
fn qmc_expected_ln1p(scales: &[f64], qmc: &QmcSettings) -> f64 {
    let dim = scales.len();
    let mut phi = 2.0_f64;
    for _ in 0..64 {
        phi -= (phi.powi(dim as i32 + 1) - phi - 1.0) / ((dim as f64 + 1.0) * phi.powi(dim as i32) - 1.0);
    }
    let mut key = splitmix(qmc.seed);
    for s in scales {
        key = splitmix(key ^ s.to_bits());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    let steps: Vec<f64> = (1..=dim).map(|i| phi.powi(-(i as i32)).fract()).collect();
    let mut point: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let mut acc = 0.0;
    for _ in 0..qmc.samples {
        let mut s = 0.0;
        for ((u, step), a) in point.iter_mut().zip(&steps).zip(scales) {
            s += a * -(-*u).ln_1p();
            *u += step;
            if *u >= 1.0 {
                *u -= 1.0;
            }
        }
        acc += s.ln_1p();
    }
    acc / qmc.samples as f64
}

/// `σ_R`, `σ_D` and `γ = 2^{(σ_D − σ_R)/α}`; an explicit γ in the config overrides the computed one.
pub fn microwave_summary(cfg: &DualBandConfig) -> Result<MicrowaveSummary> {
    let (mw, mm) = cfg.band_gains()?;
    let p = cfg.microwave.powers;
    let sigma_r = cfg.rate(&cfg.microwave, &[mw.s1_relay, mw.s2_relay], &[p.source1, p.source2])?;
    let sigma_d = cfg.rate(
        &cfg.microwave,
        &[mw.s1_dest, mw.s2_dest, mw.relay_dest],
        &[p.source1, p.source2, p.relay],
    )? + cfg.alpha * cfg.rate(&cfg.mmwave, &[mm.relay_dest], &[cfg.mmwave.powers.relay])?;
    let gamma = match cfg.gamma {
        Some(g) => g,
        None if cfg.alpha > 0.0 => ((sigma_d - sigma_r) / cfg.alpha).exp2(),
        None => return Err(MarcError::GammaUndefined),
    };
    Ok(MicrowaveSummary { sigma_r, sigma_d, gamma })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pathloss_examples() {
        assert_eq!(pathloss_gain(1.0, 4.0).unwrap(), 1.0);
        assert!((pathloss_gain(1.3, 4.0).unwrap() - 0.35013).abs() < 1e-5);
        assert_eq!(pathloss_gain(0.5, 2.0).unwrap(), 4.0);
        assert!(pathloss_gain(0.0, 2.0).is_err());
        assert!(pathloss_gain(1.0, -1.0).is_err());
    }

    #[test]
    fn phase_rates() {
        assert_eq!(ergodic_rate(FadingModel::Phase, &[1.0], &[1.0]).unwrap(), 1.0);
        assert_eq!(ergodic_rate(FadingModel::Phase, &[1.0; 3], &[0.0; 3]).unwrap(), 0.0);
        assert!(ergodic_rate(FadingModel::Phase, &[], &[]).is_err());
        assert!(ergodic_rate(FadingModel::Phase, &[1.0], &[-1.0]).is_err());
    }

    #[test]
    fn geometry_distance() {
        let g = Geometry { d_rd: 1.0, d_sr: 1.0, phi: std::f64::consts::FRAC_PI_2 };
        assert!((g.source_dest_distance() - 2f64.sqrt()).abs() < 1e-15);
        let g = Geometry { d_rd: 1.0, d_sr: 0.5, phi: 0.0 };
        assert!((g.source_dest_distance() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn qmc_is_reproducible() {
        let q = QmcSettings { samples: 4096, seed: 3 };
        let a = ergodic_rate_with(FadingModel::Rayleigh, &[1.0, 2.0], &[1.0, 1.0], &q).unwrap();
        let b = ergodic_rate_with(FadingModel::Rayleigh, &[1.0, 2.0], &[1.0, 1.0], &q).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
