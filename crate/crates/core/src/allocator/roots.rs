//! Real roots of low-degree polynomials (coefficients in ascending order).

use crate::error::{MarcError, Result};

pub(crate) fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, a)| i as f64 * a).collect()
}

fn trim(c: &[f64]) -> &[f64] {
    let mut n = c.len();
    while n > 0 && c[n - 1] == 0.0 {
        n -= 1;
    }
    &c[..n]
}

/// Cauchy bound on the modulus of every root.
fn root_bound(c: &[f64]) -> f64 {
    let lead = c[c.len() - 1].abs();
    1.0 + c[..c.len() - 1].iter().map(|a| a.abs() / lead).fold(0.0, f64::max)
}

/// Root of `c` on `[lo, hi]` where `c` is monotone and changes sign.
fn bisect(c: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval(c, lo);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let (fl, fh) = (eval(c, lo).abs(), eval(c, hi).abs());
    if fl <= fh {
        lo
    } else {
        hi
    }
}

/// All distinct real roots, ascending. Exact-degree-zero input yields none.
pub(crate) fn real_roots(c: &[f64]) -> Vec<f64> {
    let c = trim(c);
    match c.len() {
        0 | 1 => Vec::new(),
        2 => vec![-c[0] / c[1]],
        _ => {
            let b = root_bound(c);
            let mut knots = vec![-b];
            knots.extend(real_roots(&derivative(c)).into_iter().filter(|x| x.abs() < b));
            knots.push(b);
            let scale = c.iter().map(|a| a.abs()).fold(0.0, f64::max);
            let mut roots: Vec<f64> = Vec::new();
            for w in knots.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let (flo, fhi) = (eval(c, lo), eval(c, hi));
                let x = if flo == 0.0 {
                    Some(lo)
                } else if fhi == 0.0 {
                    Some(hi)
                } else if (flo < 0.0) != (fhi < 0.0) {
                    Some(bisect(c, lo, hi))
                } else if flo.abs() <= 1e-14 * scale {
                    Some(lo)
                } else {
                    None
                };
                if let Some(x) = x {
                    if roots.last().is_none_or(|&r| (x - r).abs() > 1e-14 * (1.0 + r.abs())) {
                        roots.push(x);
                    }
                }
            }
            roots
        }
    }
}

/// Smallest positive root and whether more than one positive root exists in the bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootInfo {
    pub root: f64,
    pub multiple: bool,
}

/// Smallest `x ∈ (0, bracket_hi]` with `f(x) = 0` for a quadratic or cubic `f`
/// given by ascending coefficients.
pub fn positive_root(poly: &[f64], bracket_hi: f64) -> Result<RootInfo> {
    let degree = trim(poly).len().saturating_sub(1);
    if !(2..=3).contains(&degree) {
        return Err(MarcError::Domain(format!("positive_root expects degree 2 or 3, got {degree}")));
    }
    let roots: Vec<f64> = if degree == 2 {
        quadratic_roots(poly[0], poly[1], poly[2])
    } else {
        real_roots(poly)
    }
    .into_iter()
    .filter(|&x| x > 0.0 && x <= bracket_hi)
    .collect();
    match roots.first() {
        Some(&root) => Ok(RootInfo { root, multiple: roots.len() > 1 }),
        None => Err(MarcError::NoRoot { bracket_hi }),
    }
}

/// Real roots of `c + b x + a x²`, ascending, by the cancellation-free formula.
pub(crate) fn quadratic_roots(c: f64, b: f64, a: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { Vec::new() } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    let t = -0.5 * (b + b.signum() * s);
    let mut r = if t == 0.0 { vec![0.0, 0.0] } else { vec![t / a, c / t] };
    r.sort_by(f64::total_cmp);
    r.dedup();
    r
}

/// Largest real root (signed). For the threshold polynomials this root is the
/// boundary of `{x ≥ 0 : f(x) ≤ 0}`, whether or not it is positive.
pub(crate) fn largest_real_root(poly: &[f64]) -> Option<f64> {
    let t = trim(poly);
    let roots = if t.len() == 3 { quadratic_roots(t[0], t[1], t[2]) } else { real_roots(t) };
    roots.last().copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        // (1+x)² − 4
        assert!((positive_root(&[-3.0, 2.0, 1.0], 10.0).unwrap().root - 1.0).abs() < 1e-15);
        // 2x² + 3x − 2
        assert!((positive_root(&[-2.0, 3.0, 2.0], 10.0).unwrap().root - 0.5).abs() < 1e-15);
        assert!(matches!(positive_root(&[1.0, 3.0, 2.0], 10.0), Err(MarcError::NoRoot { .. })));
    }

    #[test]
    fn cubic_roots() {
        // (x−1)(x−2)(x−3)
        let c = [-6.0, 11.0, -6.0, 1.0];
        let r = real_roots(&c);
        assert_eq!(r.len(), 3);
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let info = positive_root(&c, 100.0).unwrap();
        assert!((info.root - 1.0).abs() < 1e-12);
        assert!(info.multiple);
        assert!((positive_root(&c, 1.5).unwrap().root - 1.0).abs() < 1e-12);
        assert!(!positive_root(&c, 1.5).unwrap().multiple);
    }

    #[test]
    fn largest_root_may_be_negative() {
        // (x+1)(x+2)
        assert!((largest_real_root(&[2.0, 3.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
    }
}
