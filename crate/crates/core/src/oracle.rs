//! Numeric reference solvers and a KKT residual checker for the closed forms.

use serde::Serialize;

use crate::allocator::{Allocation, MmWaveGains};
use crate::channel::{DualBandConfig, FadingModel};
use crate::error::{non_negative, positive, MarcError, Result};
use crate::regions::normalized_rate;

/// Powers of the joint microwave + mm-wave problem.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct JointPowers {
    pub mmwave: Allocation,
    /// mm-wave relay→destination power.
    pub relay_mm: f64,
    pub source1_mw: f64,
    pub source2_mw: f64,
    pub relay_mw: f64,
}

impl JointPowers {
    pub fn as_array(&self) -> [f64; 8] {
        let a = self.mmwave;
        [a.p1, a.q1, a.p2, a.q2, self.relay_mm, self.source1_mw, self.source2_mw, self.relay_mw]
    }

    fn from_array(x: &[f64; 8]) -> Self {
        JointPowers {
            mmwave: Allocation { p1: x[0], q1: x[1], p2: x[2], q2: x[3] },
            relay_mm: x[4],
            source1_mw: x[5],
            source2_mw: x[6],
            relay_mw: x[7],
        }
    }

    pub fn total(&self) -> f64 {
        self.as_array().iter().sum()
    }

    pub const NAMES: [&'static str; 8] = ["p1", "q1", "p2", "q2", "relay_mm", "source1_mw", "source2_mw", "relay_mw"];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    pub allocation: Allocation,
    /// Present for the joint problem only.
    pub joint: Option<JointPowers>,
    pub rate: f64,
    pub iterations: usize,
    pub converged: bool,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const GOLDEN_CAP: usize = 200;

/// Maximizer of a unimodal `f` on `[lo, hi]`; `(x, f(x), iterations, converged)`.
fn golden_max(lo: f64, hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64, usize, bool) {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut it = 0;
    while b - a > tol && it < GOLDEN_CAP {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        }
        it += 1;
    }
    let converged = b - a <= tol;
    let mid = 0.5 * (a + b);
    let mut best = (mid, f(mid));
    for x in [lo, hi, x1, x2] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    (best.0, best.1, it, converged)
}

/// Maximizes `min(Σ_R, Σ_D)` over `(q₁, q₂) ∈ [0, P]²` with `p_k = P − q_k`
/// by nested golden-section search. The rate is reported with `σ_R = 0`,
/// `σ_D = log₂γ` and `α = 1`.
pub fn solve_p1(g: &MmWaveGains, budget: f64, tol: f64) -> Result<OracleResult> {
    g.validate()?;
    non_negative("budget", budget)?;
    positive("tol", tol)?;
    let at = |q1: f64, q2: f64| Allocation { p1: budget - q1, q1, p2: budget - q2, q2 };
    if budget == 0.0 {
        let a = at(0.0, 0.0);
        return Ok(OracleResult { allocation: a, joint: None, rate: normalized_rate(g, &a), iterations: 0, converged: true });
    }
    let inner = |q1: f64| golden_max(0.0, budget, tol, |q2| normalized_rate(g, &at(q1, q2)));
    let mut inner_ok = true;
    let (q1, _, outer_it, outer_ok) = golden_max(0.0, budget, tol, |q1| inner(q1).1);
    let (q2, rate, inner_it, ok) = inner(q1);
    inner_ok &= ok;
    Ok(OracleResult {
        allocation: at(q1, q2),
        joint: None,
        rate,
        iterations: outer_it * (inner_it + 1),
        converged: outer_ok && inner_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupergradientOptions {
    pub iterations: usize,
    /// Step at iteration `t` is `step_scale·(1 + P)/√t`.
    pub step_scale: f64,
}

impl Default for SupergradientOptions {
    fn default() -> Self {
        SupergradientOptions { iterations: 100_000, step_scale: 0.03 }
    }
}

/// Phase-fading gains of the joint problem.
#[derive(Debug, Clone, Copy)]
struct JointModel {
    alpha: f64,
    g1r: f64,
    g2r: f64,
    g1d: f64,
    g2d: f64,
    grd: f64,
    r1: f64,
    r2: f64,
    d1: f64,
    d2: f64,
    rd: f64,
}

impl JointModel {
    fn new(cfg: &DualBandConfig) -> Result<Self> {
        if cfg.microwave.fading != FadingModel::Phase || cfg.mmwave.fading != FadingModel::Phase {
            return Err(MarcError::Unsupported("the joint problem is solved for phase fading only"));
        }
        let (mw, mm) = cfg.band_gains()?;
        Ok(JointModel {
            alpha: cfg.alpha,
            g1r: mw.s1_relay,
            g2r: mw.s2_relay,
            g1d: mw.s1_dest,
            g2d: mw.s2_dest,
            grd: mw.relay_dest,
            r1: mm.s1_relay,
            r2: mm.s2_relay,
            d1: mm.s1_dest,
            d2: mm.s2_dest,
            rd: mm.relay_dest,
        })
    }

    /// `(Σ_R, Σ_D)` in bits.
    fn rates(&self, x: &[f64; 8]) -> (f64, f64) {
        let [p1, q1, p2, q2, pr_mm, p1_mw, p2_mw, pr_mw] = *x;
        let l = |z: f64| z.ln_1p() / std::f64::consts::LN_2;
        let direct = self.alpha * (l(self.d1 * p1) + l(self.d2 * p2));
        let sr = l(self.g1r * p1_mw + self.g2r * p2_mw) + self.alpha * (l(self.r1 * q1) + l(self.r2 * q2)) + direct;
        let sd = l(self.g1d * p1_mw + self.g2d * p2_mw + self.grd * pr_mw) + self.alpha * l(self.rd * pr_mm) + direct;
        (sr, sd)
    }

    fn gradients(&self, x: &[f64; 8]) -> ([f64; 8], [f64; 8]) {
        let [p1, q1, p2, q2, pr_mm, p1_mw, p2_mw, pr_mw] = *x;
        let s = 1.0 / std::f64::consts::LN_2;
        let a = self.alpha * s;
        let gp1 = a * self.d1 / (1.0 + self.d1 * p1);
        let gp2 = a * self.d2 / (1.0 + self.d2 * p2);
        let relay_mw = s / (1.0 + self.g1r * p1_mw + self.g2r * p2_mw);
        let dest_mw = s / (1.0 + self.g1d * p1_mw + self.g2d * p2_mw + self.grd * pr_mw);
        let gr = [
            gp1,
            a * self.r1 / (1.0 + self.r1 * q1),
            gp2,
            a * self.r2 / (1.0 + self.r2 * q2),
            0.0,
            self.g1r * relay_mw,
            self.g2r * relay_mw,
            0.0,
        ];
        let gd = [
            gp1,
            0.0,
            gp2,
            0.0,
            a * self.rd / (1.0 + self.rd * pr_mm),
            self.g1d * dest_mw,
            self.g2d * dest_mw,
            self.grd * dest_mw,
        ];
        (gr, gd)
    }
}

/// Euclidean projection onto `{x ≥ 0, Σx = total}`.
fn project_simplex(y: &[f64; 8], total: f64) -> [f64; 8] {
    let mut u = *y;
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &v) in u.iter().enumerate() {
        cum += v;
        let t = (cum - total) / (k as f64 + 1.0);
        if v - t > 0.0 {
            theta = t;
        }
    }
    let mut x = [0.0; 8];
    for (xi, yi) in x.iter_mut().zip(y) {
        *xi = (yi - theta).max(0.0);
    }
    x
}

/// Joint microwave + mm-wave problem: maximize `min(Σ_R, Σ_D)` over all eight
/// powers summing to `P`, by projected supergradient ascent from the uniform
/// split. Returns the best iterate.
pub fn solve_p2(cfg: &DualBandConfig, budget: f64, opts: SupergradientOptions) -> Result<OracleResult> {
    non_negative("budget", budget)?;
    let model = JointModel::new(cfg)?;
    let mut x = [budget / 8.0; 8];
    let (sr, sd) = model.rates(&x);
    let mut best = (x, sr.min(sd));
    if budget == 0.0 {
        return Ok(result_from(best.0, best.1, 0, true));
    }
    let c = opts.step_scale * (1.0 + budget);
    for t in 1..=opts.iterations {
        let (sr, sd) = model.rates(&x);
        let v = sr.min(sd);
        if v > best.1 {
            best = (x, v);
        }
        let (gr, gd) = model.gradients(&x);
        let step = c / (t as f64).sqrt();
        let mut y = x;
        for i in 0..8 {
            let g = if (sr - sd).abs() < 1e-10 {
                0.5 * (gr[i] + gd[i])
            } else if sr < sd {
                gr[i]
            } else {
                gd[i]
            };
            y[i] += step * g;
        }
        x = project_simplex(&y, budget);
    }
    let (sr, sd) = model.rates(&x);
    if sr.min(sd) > best.1 {
        best = (x, sr.min(sd));
    }
    Ok(result_from(best.0, best.1, opts.iterations, true))
}

fn result_from(x: [f64; 8], rate: f64, iterations: usize, converged: bool) -> OracleResult {
    let joint = JointPowers::from_array(&x);
    OracleResult { allocation: joint.mmwave, joint: Some(joint), rate, iterations, converged }
}

/// KKT multipliers and residuals, all in units of `α/ln 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KktReport {
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// Dual variables of `p₁, q₁, p₂, q₂ ≥ 0`.
    pub rho: [f64; 4],
    pub stationarity_residual: f64,
    pub complementarity_residual: f64,
    pub feasibility_residual: f64,
    /// Smallest multiplier that strict complementarity requires to be positive;
    /// `+∞` when there is none.
    pub strict_margin: f64,
}

impl KktReport {
    pub fn max_residual(&self) -> f64 {
        self.stationarity_residual.max(self.complementarity_residual).max(self.feasibility_residual)
    }
}

struct KktParts {
    mu: [f64; 2],
    rho: [f64; 4],
    stationarity: f64,
    complementarity: f64,
}

fn kkt_parts(g: &MmWaveGains, x: &[f64; 4], lambda1: f64, active: f64) -> KktParts {
    let grad_p = [g.d1 / (1.0 + g.d1 * x[0]), g.d2 / (1.0 + g.d2 * x[2])];
    let grad_q = [g.r1 / (1.0 + g.r1 * x[1]), g.r2 / (1.0 + g.r2 * x[3])];
    let mut mu = [0.0; 2];
    let mut rho = [0.0; 4];
    for k in 0..2 {
        mu[k] = grad_p[k].max(lambda1 * grad_q[k]);
        rho[2 * k] = mu[k] - grad_p[k];
        rho[2 * k + 1] = mu[k] - lambda1 * grad_q[k];
    }
    let stationarity = (0..4).filter(|&i| x[i] > active).map(|i| rho[i]).fold(0.0, f64::max);
    let complementarity = (0..4).map(|i| (rho[i] * x[i]).abs()).fold(0.0, f64::max);
    KktParts { mu, rho, stationarity, complementarity }
}

/// Recovers the multipliers of the allocation problem at `alloc` and reports
/// how far the KKT system is from being satisfied.
pub fn kkt_residuals(g: &MmWaveGains, budget: f64, alloc: &Allocation) -> Result<KktReport> {
    g.validate()?;
    non_negative("budget", budget)?;
    let x = alloc.as_array();
    let active = 1e-12 * budget.max(1.0);
    // ln of Σ_R − Σ_D in the normalized objective.
    let gap = ((1.0 + g.r1 * x[1]) * (1.0 + g.r2 * x[3])).ln() - g.gamma.ln();
    let tie = 1e-9 * (1.0 + g.gamma.ln().abs());
    let residual = |l: f64| kkt_parts(g, &x, l, active).stationarity;

    let (lambda1, slack) = if gap < -tie {
        (1.0, 0.0)
    } else if gap > tie {
        (0.0, 0.0)
    } else {
        let (l_opt, _, _, _) = golden_max(0.0, 1.0, 1e-15, |l| -residual(l));
        let mut candidates = vec![1.0, 0.0, l_opt];
        for k in 0..2 {
            let (p, q, r, d) = if k == 0 { (x[0], x[1], g.r1, g.d1) } else { (x[2], x[3], g.r2, g.d2) };
            if q > active {
                candidates.push((d * (1.0 + r * q) / (r * (1.0 + d * p))).clamp(0.0, 1.0));
            }
        }
        let mut best = (candidates[0], residual(candidates[0]));
        for &l in &candidates[1..] {
            let r = residual(l);
            if r < best.1 {
                best = (l, r);
            }
        }
        (best.0, gap.abs())
    };
    let parts = kkt_parts(g, &x, lambda1, active);
    let feasibility = [
        alloc.budget_error(budget),
        x.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let free = gap.abs() <= tie;
    let mut strict_margin = (0..4).filter(|&i| x[i] <= active).map(|i| parts.rho[i]).fold(f64::INFINITY, f64::min);
    if free {
        strict_margin = strict_margin.min(lambda1).min(1.0 - lambda1);
    }
    Ok(KktReport {
        lambda1,
        lambda2: 1.0 - lambda1,
        mu1: parts.mu[0],
        mu2: parts.mu[1],
        rho: parts.rho,
        stationarity_residual: parts.stationarity,
        complementarity_residual: parts.complementarity + slack,
        feasibility_residual: feasibility,
        strict_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection() {
        let x = project_simplex(&[1.0, 2.0, 3.0, 0.0, 0.0, 0.0, 0.0, -1.0], 3.0);
        assert!((x.iter().sum::<f64>() - 3.0).abs() < 1e-15);
        assert!(x.iter().all(|v| *v >= 0.0));
        assert_eq!(x[2] - x[1], 1.0);
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, _, _, ok) = golden_max(0.0, 4.0, 1e-10, |x| -(x - 1.3) * (x - 1.3));
        assert!(ok);
        assert!((x - 1.3).abs() < 1e-7);
    }

    #[test]
    fn gamma_below_one_gives_direct_only() {
        let g = MmWaveGains::new(2.0, 3.0, 1.0, 1.0, 0.5).unwrap();
        let r = solve_p1(&g, 4.0, 1e-10).unwrap();
        assert!(r.allocation.q1 < 1e-8 && r.allocation.q2 < 1e-8);
        let k = kkt_residuals(&g, 4.0, &Allocation { p1: 4.0, q1: 0.0, p2: 4.0, q2: 0.0 }).unwrap();
        assert!(k.max_residual() <= 1e-6);
        assert_eq!(k.lambda1, 0.0);
    }

    #[test]
    fn zero_budget() {
        let g = MmWaveGains::new(2.0, 3.0, 1.0, 1.0, 3.0).unwrap();
        let r = solve_p1(&g, 0.0, 1e-10).unwrap();
        assert_eq!(r.allocation, Allocation::default());
        assert_eq!(r.rate, 0.0);
    }
}
