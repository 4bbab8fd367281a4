//! Threshold powers that partition the budget axis into allocation regimes.
//!
//! Names follow the regime labels: the first letter group belongs to user 1,
//! the second to user 2 (`d` direct only, `r` relay only, `rd` split).
//! The `bar_*` thresholds bound the saturated regimes from above.

use serde::Serialize;

use super::roots::largest_real_root;
use super::MmWaveGains;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdPowers {
    pub dd: f64,
    pub dd_neg: f64,
    pub dd_hat: f64,
    pub dd_hat_neg: f64,
    pub rd: f64,
    pub dr: f64,
    pub rr: f64,
    pub rdd: f64,
    pub drd: f64,
    pub rrd: f64,
    pub rdr: f64,
    pub rdrd: f64,
    pub bar_rrd: f64,
    pub bar_rdr: f64,
    pub bar_rdd: f64,
    pub bar_drd: f64,
    /// A ratio threshold had a zero denominator (`r₁ = γr₂` or `r₂ = γr₁`).
    pub degenerate_ratio: bool,
}

impl ThresholdPowers {
    pub fn named(&self) -> [(&'static str, f64); 16] {
        [
            ("P_dd", self.dd),
            ("P'_dd", self.dd_neg),
            ("P^_dd", self.dd_hat),
            ("P^'_dd", self.dd_hat_neg),
            ("P_rd", self.rd),
            ("P_dr", self.dr),
            ("P_rr", self.rr),
            ("P_rdd", self.rdd),
            ("P_drd", self.drd),
            ("P_rrd", self.rrd),
            ("P_rdr", self.rdr),
            ("P_rdrd", self.rdrd),
            ("Pbar_rrd", self.bar_rrd),
            ("Pbar_rdr", self.bar_rdr),
            ("Pbar_rdd", self.bar_rdd),
            ("Pbar_drd", self.bar_drd),
        ]
    }

    /// Finite positive thresholds, ascending and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.named().iter().map(|x| x.1).filter(|x| x.is_finite() && *x > 0.0).collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        v
    }

    /// Defining polynomials of the root thresholds, `(name, ascending coefficients, root)`.
    pub fn root_polynomials(g: &MmWaveGains) -> [(&'static str, Vec<f64>); 6] {
        let (r1, r2, d1, d2, gamma) = (g.r1, g.r2, g.d1, g.d2, g.gamma);
        [
            ("P_rr", relay_pair_poly(r1, r2, gamma)),
            ("P_rrd", relay_split_poly(r1, r2, d2, gamma)),
            ("P_rdr", relay_split_poly(r2, r1, d1, gamma)),
            ("P_rdrd", split_split_poly(r1, r2, d1, d2, gamma)),
            ("Pbar_rrd", saturated_split_poly(r1, r2, d1, d2, gamma)),
            ("Pbar_rdr", saturated_split_poly(r2, r1, d2, d1, gamma)),
        ]
    }
}

/// `(1 + x ra)(1 + x rb) − γ`
fn relay_pair_poly(ra: f64, rb: f64, gamma: f64) -> Vec<f64> {
    vec![1.0 - gamma, ra + rb, ra * rb]
}

/// `(1 + rb/db + x rb)(1 + x ra) − 2γ`: user `a` relay-only, user `b` split.
fn relay_split_poly(ra: f64, rb: f64, db: f64, gamma: f64) -> Vec<f64> {
    let b = 1.0 + rb / db;
    vec![b - 2.0 * gamma, b * ra + rb, ra * rb]
}

/// `(1 + r1/d1 + x r1)(1 + r2/d2 + x r2) − 4γ`
fn split_split_poly(r1: f64, r2: f64, d1: f64, d2: f64, gamma: f64) -> Vec<f64> {
    let a1 = 1.0 + r1 / d1;
    let a2 = 1.0 + r2 / d2;
    vec![a1 * a2 - 4.0 * gamma, a1 * r2 + a2 * r1, r1 * r2]
}

/// `(1 + rb/db + x rb)(1 + x ra)² − γ(1 + ra/da + x ra)`
fn saturated_split_poly(ra: f64, rb: f64, da: f64, db: f64, gamma: f64) -> Vec<f64> {
    let b = 1.0 + rb / db;
    let a = 1.0 + ra / da;
    vec![
        b - gamma * a,
        2.0 * b * ra + rb - gamma * ra,
        b * ra * ra + 2.0 * ra * rb,
        ra * ra * rb,
    ]
}

/// `num/den`, with a zero denominator mapped to an infinity carrying the sign of `num`.
fn signed_ratio(num: f64, den: f64) -> (f64, bool) {
    if den == 0.0 {
        (if num < 0.0 { f64::NEG_INFINITY } else { f64::INFINITY }, true)
    } else {
        (num / den, false)
    }
}

fn root_or_inf(c: &[f64]) -> f64 {
    largest_real_root(c).unwrap_or(f64::INFINITY)
}

pub fn threshold_powers(g: &MmWaveGains) -> ThresholdPowers {
    let (r1, r2, d1, d2, gamma) = (g.r1, g.r2, g.d1, g.d2, g.gamma);
    let dd = 1.0 / r1 - 1.0 / d1;
    let dd_hat = 1.0 / r2 - 1.0 / d2;
    let polys = ThresholdPowers::root_polynomials(g);
    let (bar_rdd, deg1) = signed_ratio(gamma - 1.0 + gamma * r2 / d2 - r1 / d1, r1 - gamma * r2);
    let (bar_drd, deg2) = signed_ratio(gamma - 1.0 + gamma * r1 / d1 - r2 / d2, r2 - gamma * r1);
    ThresholdPowers {
        dd,
        dd_neg: -dd,
        dd_hat,
        dd_hat_neg: -dd_hat,
        rd: (gamma - 1.0) / r1,
        dr: (gamma - 1.0) / r2,
        rr: root_or_inf(&polys[0].1),
        rdd: (2.0 * gamma - 1.0) / r1 - 1.0 / d1,
        drd: (2.0 * gamma - 1.0) / r2 - 1.0 / d2,
        rrd: root_or_inf(&polys[1].1),
        rdr: root_or_inf(&polys[2].1),
        rdrd: root_or_inf(&polys[3].1),
        bar_rrd: root_or_inf(&polys[4].1),
        bar_rdr: root_or_inf(&polys[5].1),
        bar_rdd,
        bar_drd,
        degenerate_ratio: deg1 || deg2,
    }
}
