//! Fixed Gauss rules and the expectations of `ln(1 + c·X)` with `X ~ Exp(1)`.

use std::sync::OnceLock;

pub(crate) const LAGUERRE_NODES: usize = 64;
const LEGENDRE_NODES: usize = 16;

pub(crate) struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss–Laguerre rule for `∫₀^∞ e^{-x} f(x) dx`.
pub(crate) fn laguerre() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| gauss_laguerre(LAGUERRE_NODES))
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub(crate) fn legendre() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(LEGENDRE_NODES))
}

fn gauss_laguerre(n: usize) -> Rule {
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut z = 0.0_f64;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
            }
        };
        let mut pp = 0.0;
        let mut p2 = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (p1 - p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs() {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = -1.0 / (pp * nf * p2);
    }
    Rule { nodes, weights }
}

fn gauss_legendre(n: usize) -> Rule {
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// `∫ₐᵇ f(x) dx` with one Gauss–Legendre panel.
fn legendre_panel(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let rule = legendre();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// `E[ln(1 + c·X)]` for `X ~ Exp(1)`, `c ≥ 0`.
///
/// Small `c` uses the plain Laguerre rule. Large `c` makes the integrand
/// vary on the scale `1/c` near the origin, which the Laguerre rule cannot
/// resolve, so `[0, 1]` is covered with geometrically growing Legendre panels
/// and the tail `[1, ∞)` is shifted back onto the Laguerre rule.
pub(crate) fn expected_ln1p_exp(c: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    let lag = laguerre();
    if c <= 1.0 {
        return lag
            .nodes
            .iter()
            .zip(&lag.weights)
            .map(|(x, w)| w * (c * x).ln_1p())
            .sum();
    }
    let f = |x: f64| (-x).exp() * (c * x).ln_1p();
    let mut head = 0.0;
    let mut a = 0.0;
    let mut width = 1.0 / c;
    while a < 1.0 {
        let b = (a + width).min(1.0);
        head += legendre_panel(a, b, f);
        a = b;
        width *= 2.0;
    }
    let tail: f64 = lag
        .nodes
        .iter()
        .zip(&lag.weights)
        .map(|(x, w)| w * (c * (1.0 + x)).ln_1p())
        .sum();
    head + (-1.0_f64).exp() * tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_moments() {
        let r = laguerre();
        let m0: f64 = r.weights.iter().sum();
        let m1: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x).sum();
        let m2: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x * x).sum();
        assert!((m0 - 1.0).abs() < 1e-12);
        assert!((m1 - 1.0).abs() < 1e-11);
        assert!((m2 - 2.0).abs() < 1e-10);
    }

    #[test]
    fn legendre_polynomials_exact() {
        let r = legendre();
        let s: f64 = r.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let x30: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(30)).sum();
        assert!((x30 - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn zero_scale() {
        assert_eq!(expected_ln1p_exp(0.0), 0.0);
    }
}
