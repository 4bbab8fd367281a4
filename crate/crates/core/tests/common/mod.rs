//! Reference computations that share no code with the library.
#![allow(dead_code)]

use marc_core::allocator::MmWaveGains;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `e^x E₁(x)` for `x > 0`: power series below 1, continued fraction above.
pub fn exp_e1(x: f64) -> f64 {
    assert!(x > 0.0);
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-18 {
                break;
            }
        }
        x.exp() * (-EULER_GAMMA - x.ln() - sum)
    } else {
        // modified Lentz on the E₁ continued fraction
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h
    }
}

/// `E[log₂(1 + c X)]`, `X ~ Exp(1)`, in closed form.
pub fn rayleigh_closed_form(c: f64) -> f64 {
    exp_e1(1.0 / c) / std::f64::consts::LN_2
}

/// `E[log₂(1 + Σ aᵢ Xᵢ)]` for distinct `aᵢ` via the hypoexponential density.
pub fn hypoexponential_rate(a: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, &ai) in a.iter().enumerate() {
        let mut coef = 1.0;
        for (j, &aj) in a.iter().enumerate() {
            if i != j {
                coef *= ai / (ai - aj);
            }
        }
        total += coef * exp_e1(1.0 / ai);
    }
    total / std::f64::consts::LN_2
}

/// Log-uniform on `[lo, hi]`.
pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// `(gains, budget)` drawn as in the exhaustiveness suite: gains log-uniform
/// on `[0.05, 20]`, `γ` uniform on `(1, 30]`, budget uniform on `[0, 100]`.
pub fn random_tuple(rng: &mut ChaCha8Rng) -> (MmWaveGains, f64) {
    let r1 = log_uniform(rng, 0.05, 20.0);
    let r2 = log_uniform(rng, 0.05, 20.0);
    let d1 = log_uniform(rng, 0.05, 20.0);
    let d2 = log_uniform(rng, 0.05, 20.0);
    let gamma = 30.0 - 29.0 * rng.random::<f64>();
    let budget = 100.0 * rng.random::<f64>();
    (MmWaveGains { r1, r2, d1, d2, gamma }, budget)
}

pub fn tuples(seed: u64, n: usize) -> Vec<(MmWaveGains, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_tuple(&mut rng)).collect()
}

/// Normalized sum rate `min(Σ_R, Σ_D)` with `σ_R = 0`, `σ_D = log₂γ`, `α = 1`.
pub fn rate(g: &MmWaveGains, x: [f64; 4]) -> f64 {
    let [p1, q1, p2, q2] = x;
    let direct = (1.0 + g.d1 * p1).log2() + (1.0 + g.d2 * p2).log2();
    let relay = (1.0 + g.r1 * q1).log2() + (1.0 + g.r2 * q2).log2();
    (direct + relay).min(direct + g.gamma.log2())
}

/// Dual bound for the joint problem of the unit-microwave scenario
/// (all microwave gains 1, mm-wave `r`, `d`, relay→destination gain `g_rd`).
///
/// For a weight `λ` on `Σ_R` the Lagrangian separates: every power is set by
/// water-filling against a common level, and the microwave powers enter only
/// through `log₂(1 + P₁ + P₂)` (the relay's microwave power is dominated).
/// `min_λ` of the separated maximum equals the optimum.
pub struct JointDual {
    pub alpha: f64,
    pub r: f64,
    pub d: f64,
    pub g_rd: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct DualPoint {
    pub lambda: f64,
    pub value: f64,
    /// `(p, q, relay_mm, microwave_total)` with `p`, `q` per source.
    pub powers: [f64; 4],
}

impl JointDual {
    /// Terms `(weight, gain, multiplicity)` of `weight·log₂(1 + gain·x)`.
    fn terms(&self, lambda: f64) -> [(f64, f64, f64); 4] {
        [
            (self.alpha, self.d, 2.0),
            (lambda * self.alpha, self.r, 2.0),
            ((1.0 - lambda) * self.alpha, self.g_rd, 1.0),
            (1.0, 1.0, 1.0),
        ]
    }

    fn fill(&self, lambda: f64, level: f64) -> [f64; 4] {
        let ln2 = std::f64::consts::LN_2;
        let mut x = [0.0; 4];
        for (xi, (w, g, _)) in x.iter_mut().zip(self.terms(lambda)) {
            *xi = (w / (level * ln2) - 1.0 / g).max(0.0);
        }
        x
    }

    fn total(&self, lambda: f64, x: &[f64; 4]) -> f64 {
        self.terms(lambda).iter().zip(x).map(|((_, _, m), v)| m * v).sum()
    }

    pub fn inner(&self, lambda: f64, budget: f64) -> DualPoint {
        let (mut lo, mut hi) = (1e-12_f64, 1e6_f64);
        for _ in 0..400 {
            let mid = (lo * hi).sqrt();
            if self.total(lambda, &self.fill(lambda, mid)) > budget {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = self.fill(lambda, hi);
        let value = self
            .terms(lambda)
            .iter()
            .zip(&x)
            .map(|((w, g, m), v)| m * w * (1.0 + g * v).log2())
            .sum::<f64>();
        DualPoint { lambda, value, powers: x }
    }

    pub fn solve(&self, budget: f64) -> DualPoint {
        let gr = 0.618_033_988_749_894_9;
        let (mut a, mut b) = (0.0, 1.0);
        for _ in 0..80 {
            let x1 = b - gr * (b - a);
            let x2 = a + gr * (b - a);
            if self.inner(x1, budget).value < self.inner(x2, budget).value {
                b = x2;
            } else {
                a = x1;
            }
        }
        let mut best = self.inner(0.5 * (a + b), budget);
        for l in [0.0, 1.0] {
            let p = self.inner(l, budget);
            if p.value < best.value {
                best = p;
            }
        }
        best
    }
}
