//! Parameter sets of the reference scenarios reproduced by the CLI `fig` command.

use std::f64::consts::FRAC_PI_4;

use crate::allocator::MmWaveGains;
use crate::channel::{
    BandConfig, BandGains, DualBandConfig, ExplicitGains, FadingModel, Geometry, LinkPowers, Placement, QmcSettings,
};

fn band(pathloss_exp: f64, powers: LinkPowers) -> BandConfig {
    BandConfig { pathloss_exp, fading: FadingModel::Phase, powers }
}

/// Jointly-near scenario: every power 10, exponents 2 and 4, `α = 2`, `φ = π/4`.
pub fn near_scenario(d_rd: f64) -> DualBandConfig {
    DualBandConfig {
        microwave: band(2.0, LinkPowers::uniform(10.0)),
        mmwave: band(4.0, LinkPowers::uniform(10.0)),
        alpha: 2.0,
        placement: Placement::Geometry(Geometry { d_rd, d_sr: 1.0, phi: FRAC_PI_4 }),
        gamma: None,
        qmc: QmcSettings::default(),
    }
}

/// Mode-map scenario: microwave powers 10, mm-wave relay→destination power 1, `d_RD = 1`.
pub fn mode_map_scenario() -> DualBandConfig {
    DualBandConfig {
        microwave: band(2.0, LinkPowers::uniform(10.0)),
        mmwave: band(4.0, LinkPowers { source1: 0.0, source2: 0.0, relay: 1.0 }),
        alpha: 2.0,
        placement: Placement::Geometry(Geometry { d_rd: 1.0, d_sr: 1.0, phi: FRAC_PI_4 }),
        gamma: None,
        qmc: QmcSettings::default(),
    }
}

/// Moderate relay asymmetry, `(r₁, r₂, d, γ) = (1, 2.9, 1.3, 3)`.
pub fn moderate_gains() -> MmWaveGains {
    MmWaveGains { r1: 1.0, r2: 2.9, d1: 1.3, d2: 1.3, gamma: 3.0 }
}

/// Strong relay asymmetry, `(r₁, r₂, d, γ) = (1, 4, 1.52, 3)`.
pub fn strong_gains() -> MmWaveGains {
    MmWaveGains { r1: 1.0, r2: 4.0, d1: 1.52, d2: 1.52, gamma: 3.0 }
}

/// Unit microwave gains and powers, `r = 1`, `d = 1.5`, `Ḡ_RD = 1`, `P̄_R = 1`, `α = 2`.
pub fn joint_scenario() -> DualBandConfig {
    DualBandConfig {
        microwave: band(2.0, LinkPowers::uniform(1.0)),
        mmwave: band(4.0, LinkPowers { source1: 0.0, source2: 0.0, relay: 1.0 }),
        alpha: 2.0,
        placement: Placement::Gains(ExplicitGains {
            microwave: BandGains::uniform(1.0),
            mmwave: BandGains { s1_relay: 1.0, s2_relay: 1.0, s1_dest: 1.5, s2_dest: 1.5, relay_dest: 1.0 },
        }),
        gamma: None,
        qmc: QmcSettings::default(),
    }
}
