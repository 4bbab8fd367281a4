use super::thresholds::{threshold_powers, ThresholdPowers};
use super::{relay_regime, Allocation, LgrId, MmWaveGains, RelayRegime};
use crate::error::{non_negative, Result, MarcError};

/// Gains with their thresholds precomputed, for repeated evaluation over `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocator {
    pub gains: MmWaveGains,
    pub thresholds: ThresholdPowers,
    pub regime: RelayRegime,
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Relative tie-breaking tolerance on the budget axis.
pub(crate) fn tie_tolerance(budget: f64) -> f64 {
    1e-9 * budget.max(1.0)
}

impl Allocator {
    pub fn new(gains: MmWaveGains) -> Result<Self> {
        gains.validate()?;
        Ok(Allocator { gains, thresholds: threshold_powers(&gains), regime: relay_regime(gains.r1, gains.r2, gains.gamma) })
    }

    /// Regime active at budget `budget`. Conditions are tested in a fixed
    /// order with non-strict comparisons widened by [`tie_tolerance`]; the
    /// first match wins.
    pub fn classify(&self, budget: f64) -> Option<LgrId> {
        if self.gains.gamma <= 1.0 {
            return Some(LgrId::DirectOnly);
        }
        let t = &self.thresholds;
        let p = budget;
        let eps = tie_tolerance(budget);
        let below = |hi: f64| p <= hi + eps;
        let above = |lo: f64| p + eps >= lo;
        let rs1 = self.regime == RelayRegime::RS1;
        let rs2 = self.regime == RelayRegime::RS2;

        let rows: [(LgrId, bool); 14] = [
            (LgrId::Dd, below(min(&[t.dd, t.dd_hat]))),
            (LgrId::Dr, below(min(&[t.dd_hat_neg, t.dd, t.dr]))),
            (LgrId::Rd, below(min(&[t.dd_neg, t.dd_hat, t.rd]))),
            (LgrId::Rr, below(min(&[t.dd_neg, t.dd_hat_neg, t.rr]))),
            (LgrId::Rdd, above(max(&[t.dd, t.dd_neg])) && below(min(&[t.dd_hat, t.rdd]))),
            (LgrId::Drd, above(max(&[t.dd_hat, t.dd_hat_neg])) && below(min(&[t.dd, t.drd]))),
            (LgrId::Rrd, above(max(&[t.dd_hat, t.dd_hat_neg])) && below(min(&[t.dd_neg, t.rrd]))),
            (LgrId::Rdr, above(max(&[t.dd, t.dd_neg])) && below(min(&[t.dd_hat_neg, t.rdr]))),
            (LgrId::Rdrd, above(max(&[t.dd, t.dd_hat, t.dd_neg, t.dd_hat_neg])) && below(t.rdrd)),
            (LgrId::SatRrd, above(max(&[t.rr, t.rrd])) && below(min(&[t.bar_rrd, t.rd]))),
            (LgrId::SatRdr, above(max(&[t.rr, t.rdr])) && below(min(&[t.bar_rdr, t.dr]))),
            (
                LgrId::SatRdd,
                if rs1 {
                    above(max(&[t.rd, t.rdd, t.bar_rdd]))
                } else {
                    above(max(&[t.rd, t.rdd])) && below(t.bar_rdd)
                },
            ),
            (
                LgrId::SatDrd,
                if rs2 {
                    above(max(&[t.dr, t.drd, t.bar_drd]))
                } else {
                    above(max(&[t.dr, t.drd])) && below(t.bar_drd)
                },
            ),
            (
                LgrId::SatRdrd,
                match self.regime {
                    RelayRegime::R1 | RelayRegime::R2 => {
                        above(max(&[t.bar_rdd, t.bar_drd, t.bar_rdr, t.bar_rrd, t.rdrd]))
                    }
                    RelayRegime::RS1 => {
                        above(max(&[t.bar_drd, t.bar_rdr, t.bar_rrd, t.rdrd])) && below(t.bar_rdd)
                    }
                    RelayRegime::RS2 => {
                        above(max(&[t.bar_rdd, t.bar_rdr, t.bar_rrd, t.rdrd])) && below(t.bar_drd)
                    }
                },
            ),
        ];
        rows.into_iter().find(|(_, hit)| *hit).map(|(id, _)| id)
    }

    /// Closed-form allocation of regime `lgr` at budget `budget`.
    pub fn allocation_in(&self, lgr: LgrId, budget: f64) -> Allocation {
        let MmWaveGains { r1, r2, d1, d2, gamma } = self.gains;
        let p = budget;
        let split = |r: f64, d: f64| 0.5 * (p - 1.0 / r + 1.0 / d);
        let (q1, q2) = match lgr {
            LgrId::DirectOnly | LgrId::Dd => (0.0, 0.0),
            LgrId::Dr => (0.0, p),
            LgrId::Rd => (p, 0.0),
            LgrId::Rr => (p, p),
            LgrId::Rdd => (split(r1, d1), 0.0),
            LgrId::Drd => (0.0, split(r2, d2)),
            LgrId::Rrd => (p, split(r2, d2)),
            LgrId::Rdr => (split(r1, d1), p),
            LgrId::Rdrd => (split(r1, d1), split(r2, d2)),
            LgrId::SatRrd => (p, (gamma / (1.0 + p * r1) - 1.0) / r2),
            LgrId::SatRdr => ((gamma / (1.0 + p * r2) - 1.0) / r1, p),
            LgrId::SatRdd => ((gamma - 1.0) / r1, 0.0),
            LgrId::SatDrd => (0.0, (gamma - 1.0) / r2),
            LgrId::SatRdrd => {
                let level = (gamma / (r1 * r2)).sqrt();
                let w1 = p + 1.0 / d1 + 1.0 / r1;
                let w2 = p + 1.0 / d2 + 1.0 / r2;
                (level * (w1 / w2).sqrt() - 1.0 / r1, level * (w2 / w1).sqrt() - 1.0 / r2)
            }
        };
        let q1 = q1.clamp(0.0, p);
        let q2 = q2.clamp(0.0, p);
        Allocation { p1: p - q1, q1, p2: p - q2, q2 }
    }

    pub fn allocate(&self, budget: f64) -> Result<(Allocation, LgrId)> {
        non_negative("budget", budget)?;
        let lgr = self.classify(budget).ok_or(MarcError::Unclassified { budget })?;
        Ok((self.allocation_in(lgr, budget), lgr))
    }
}

/// Optimal `(p₁, q₁, p₂, q₂)` and its regime at budget `budget`.
pub fn allocate(g: &MmWaveGains, budget: f64) -> Result<(Allocation, LgrId)> {
    Allocator::new(*g)?.allocate(budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_below_one_is_direct_only() {
        let g = MmWaveGains::new(3.0, 0.2, 1.0, 5.0, 0.8).unwrap();
        let (a, l) = allocate(&g, 7.0).unwrap();
        assert_eq!(l, LgrId::DirectOnly);
        assert_eq!(a, Allocation { p1: 7.0, q1: 0.0, p2: 7.0, q2: 0.0 });
    }

    #[test]
    fn saturated_single_relay() {
        let g = MmWaveGains::new(1.0, 4.0, 1.52, 1.52, 3.0).unwrap();
        let (a, l) = allocate(&g, 2.0).unwrap();
        assert_eq!(l, LgrId::SatDrd);
        assert_eq!(a.q2, 0.5);
        assert_eq!(a.q1, 0.0);
        assert_eq!(a.p1, 2.0);
        assert_eq!(a.p2, 1.5);
    }

    #[test]
    fn low_budget_direct_and_relay() {
        let g = MmWaveGains::new(1.0, 2.9, 1.3, 1.3, 3.0).unwrap();
        let (a, l) = allocate(&g, 0.1).unwrap();
        assert_eq!(l, LgrId::Dr);
        assert_eq!(a, Allocation { p1: 0.1, q1: 0.0, p2: 0.0, q2: 0.1 });
    }

    #[test]
    fn zero_budget() {
        let g = MmWaveGains::new(1.0, 2.9, 1.3, 1.3, 3.0).unwrap();
        let (a, _) = allocate(&g, 0.0).unwrap();
        assert_eq!(a, Allocation::default());
        assert!(allocate(&g, -1.0).is_err());
    }
}
