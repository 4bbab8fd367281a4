//! Closed-form sum-rate-optimal mm-wave power allocation.
//!
//! Each source splits a budget `P` between its direct link (`p_k`, gain `d_k`)
//! and its relay link (`q_k`, gain `r_k`). The microwave band enters only
//! through `γ`. The budget axis is partitioned by [`ThresholdPowers`] into
//! regimes ([`LgrId`]) with one closed-form allocation each.

mod classify;
mod path;
mod roots;
mod symmetric;
mod thresholds;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{positive, MarcError, Result};

pub use classify::{allocate, Allocator};
pub use path::{lgr_path, sample_allocations, saturation_info, LgrPath, PathLabel, PathTable, SaturationInfo, Segment};
pub use roots::{positive_root, RootInfo};
pub use symmetric::{symmetric_allocate, sweep_2d_topology, ModeCell, ModeGrid};
pub use thresholds::{threshold_powers, ThresholdPowers};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MmWaveGains {
    pub r1: f64,
    pub r2: f64,
    pub d1: f64,
    pub d2: f64,
    pub gamma: f64,
}

impl MmWaveGains {
    pub fn new(r1: f64, r2: f64, d1: f64, d2: f64, gamma: f64) -> Result<Self> {
        Ok(MmWaveGains {
            r1: positive("r1", r1)?,
            r2: positive("r2", r2)?,
            d1: positive("d1", d1)?,
            d2: positive("d2", d2)?,
            gamma: positive("gamma", gamma)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.r1, self.r2, self.d1, self.d2, self.gamma).map(|_| ())
    }

    /// Same channel with the two users relabelled.
    pub fn swapped(&self) -> Self {
        MmWaveGains { r1: self.r2, r2: self.r1, d1: self.d2, d2: self.d1, gamma: self.gamma }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Allocation {
    pub p1: f64,
    pub q1: f64,
    pub p2: f64,
    pub q2: f64,
}

impl Allocation {
    pub fn as_array(&self) -> [f64; 4] {
        [self.p1, self.q1, self.p2, self.q2]
    }

    pub fn swapped(&self) -> Self {
        Allocation { p1: self.p2, q1: self.q2, p2: self.p1, q2: self.q1 }
    }

    /// Largest budget violation `|p_k + q_k − P|`.
    pub fn budget_error(&self, budget: f64) -> f64 {
        (self.p1 + self.q1 - budget).abs().max((self.p2 + self.q2 - budget).abs())
    }

    pub fn max_abs_diff(&self, other: &Allocation) -> f64 {
        self.as_array().iter().zip(other.as_array()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Allocation regime. `DirectOnly` covers `γ ≤ 1`; the others are the
/// fourteen `γ > 1` regimes, `A_*` unsaturated and `S_*` saturated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LgrId {
    DirectOnly,
    Dd,
    Dr,
    Rd,
    Rr,
    Rdd,
    Drd,
    Rrd,
    Rdr,
    Rdrd,
    SatRrd,
    SatRdr,
    SatRdd,
    SatDrd,
    SatRdrd,
}

impl LgrId {
    pub const ALL: [LgrId; 15] = [
        LgrId::DirectOnly,
        LgrId::Dd,
        LgrId::Dr,
        LgrId::Rd,
        LgrId::Rr,
        LgrId::Rdd,
        LgrId::Drd,
        LgrId::Rrd,
        LgrId::Rdr,
        LgrId::Rdrd,
        LgrId::SatRrd,
        LgrId::SatRdr,
        LgrId::SatRdd,
        LgrId::SatDrd,
        LgrId::SatRdrd,
    ];

    pub fn label(self) -> &'static str {
        match self {
            LgrId::DirectOnly => "L1",
            LgrId::Dd => "A_dd",
            LgrId::Dr => "A_dr",
            LgrId::Rd => "A_rd",
            LgrId::Rr => "A_rr",
            LgrId::Rdd => "A_rdd",
            LgrId::Drd => "A_drd",
            LgrId::Rrd => "A_rrd",
            LgrId::Rdr => "A_rdr",
            LgrId::Rdrd => "A_rdrd",
            LgrId::SatRrd => "S_rrd",
            LgrId::SatRdr => "S_rdr",
            LgrId::SatRdd => "S_rdd",
            LgrId::SatDrd => "S_drd",
            LgrId::SatRdrd => "S_rdrd",
        }
    }

    pub fn is_saturated(self) -> bool {
        matches!(self, LgrId::SatRrd | LgrId::SatRdr | LgrId::SatRdd | LgrId::SatDrd | LgrId::SatRdrd)
    }

    /// Regime seen after exchanging the user indices.
    pub fn mirrored(self) -> Self {
        match self {
            LgrId::Dr => LgrId::Rd,
            LgrId::Rd => LgrId::Dr,
            LgrId::Rdd => LgrId::Drd,
            LgrId::Drd => LgrId::Rdd,
            LgrId::Rrd => LgrId::Rdr,
            LgrId::Rdr => LgrId::Rrd,
            LgrId::SatRrd => LgrId::SatRdr,
            LgrId::SatRdr => LgrId::SatRrd,
            LgrId::SatRdd => LgrId::SatDrd,
            LgrId::SatDrd => LgrId::SatRdd,
            other => other,
        }
    }
}

impl fmt::Display for LgrId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for LgrId {
    type Err = MarcError;

    fn from_str(s: &str) -> Result<Self> {
        LgrId::ALL
            .into_iter()
            .find(|l| l.label() == s)
            .ok_or_else(|| MarcError::Domain(format!("unknown regime label {s:?}")))
    }
}

impl Serialize for LgrId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for LgrId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Partition of the relay gains relative to `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelayRegime {
    /// `r₁ ≥ γ r₂`
    RS1,
    /// `γ r₂ > r₁ ≥ r₂`
    R1,
    /// `γ r₁ > r₂ > r₁`
    R2,
    /// `r₂ ≥ γ r₁`
    RS2,
}

impl RelayRegime {
    pub fn mirrored(self) -> Self {
        match self {
            RelayRegime::RS1 => RelayRegime::RS2,
            RelayRegime::R1 => RelayRegime::R2,
            RelayRegime::R2 => RelayRegime::R1,
            RelayRegime::RS2 => RelayRegime::RS1,
        }
    }
}

impl fmt::Display for RelayRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub fn relay_regime(r1: f64, r2: f64, gamma: f64) -> RelayRegime {
    if r2 >= gamma * r1 {
        RelayRegime::RS2
    } else if r1 >= gamma * r2 {
        RelayRegime::RS1
    } else if r1 >= r2 {
        RelayRegime::R1
    } else {
        RelayRegime::R2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        assert_eq!(relay_regime(1.0, 2.9, 3.0), RelayRegime::R2);
        assert_eq!(relay_regime(1.0, 4.0, 3.0), RelayRegime::RS2);
        assert_eq!(relay_regime(5.0, 1.0, 3.0), RelayRegime::RS1);
        assert_eq!(relay_regime(1.0, 3.0, 3.0), RelayRegime::RS2);
        assert_eq!(relay_regime(2.0, 1.0, 3.0), RelayRegime::R1);
        assert_eq!(relay_regime(1.0, 1.0, 3.0), RelayRegime::R1);
    }

    #[test]
    fn labels_round_trip() {
        for l in LgrId::ALL {
            assert_eq!(l.label().parse::<LgrId>().unwrap(), l);
            assert_eq!(l.mirrored().mirrored(), l);
        }
    }

    #[test]
    fn gains_rejected_when_not_positive() {
        assert!(MmWaveGains::new(0.0, 1.0, 1.0, 1.0, 2.0).is_err());
        assert!(MmWaveGains::new(1.0, 1.0, 1.0, f64::NAN, 2.0).is_err());
    }
}
