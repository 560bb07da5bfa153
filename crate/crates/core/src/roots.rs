//! Roots of univariate complex polynomials.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

/// `Σ c_i z^i` by Horner (coefficients in ascending degree).
pub fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Value and derivative at `z`.
pub fn poly_eval_deriv(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    for _ in 0..8 {
        let (p, dp) = poly_eval_deriv(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        let next = z - step;
        if !next.is_finite() {
            break;
        }
        // only accept steps that do not make things worse
        if poly_eval(coeffs, next).norm() > p.norm() {
            break;
        }
        z = next;
        if step.norm() <= 1e-16 * z.norm() {
            break;
        }
    }
    z
}

/// Aberth–Ehrlich iteration, used when the eigenvalue route fails.
fn aberth(monic: &[Complex64]) -> Vec<Complex64> {
    let n = monic.len() - 1;
    let radius = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius * 0.5, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (p, dp) = poly_eval_deriv(monic, z[k]);
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// All roots of `Σ c_i z^i`, with multiplicity, sorted by (re, im).
///
/// Leading coefficients that are exactly zero are dropped; a polynomial that
/// is identically zero has no well defined roots and returns an empty list.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|x| *x == Complex64::new(0.0, 0.0)) {
        c.pop();
    }
    if c.len() <= 1 {
        return vec![];
    }
    let zeros = c.iter().take_while(|x| **x == Complex64::new(0.0, 0.0)).count();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let c = &c[zeros..];
    let n = c.len() - 1;
    if n > 0 {
        let lead = c[n];
        let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
        let mut comp = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..n {
            comp[(i, n - 1)] = -monic[i];
        }
        let eig = Schur::try_new(comp, f64::EPSILON, 10_000).map(|s| s.eigenvalues());
        let raw: Vec<Complex64> = match eig {
            Some(Some(v)) if v.iter().all(|z| z.is_finite()) => v.iter().copied().collect(),
            _ => aberth(&monic),
        };
        roots.extend(raw.into_iter().map(|z| polish(&monic, z)));
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cyclotomic() {
        // z² - z + 1 has the primitive sixth roots of unity
        let r = poly_roots(&[c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(r.len(), 2);
        for z in r {
            assert!((z.norm() - 1.0).abs() < 1e-14);
            assert!((z.arg().abs() - std::f64::consts::PI / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_roots_and_trailing_zeros() {
        // z²(z - 2), with an explicit zero leading coefficient
        let r = poly_roots(&[c(0.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(r.len(), 3);
        assert_eq!(r[0], c(0.0, 0.0));
        assert!((r[2] - c(2.0, 0.0)).norm() < 1e-14);
        assert!(poly_roots(&[c(0.0, 0.0)]).is_empty());
    }

    #[test]
    fn wilkinson_like() {
        let mut p = vec![c(1.0, 0.0)];
        for k in 1..=10 {
            let mut q = vec![c(0.0, 0.0); p.len() + 1];
            for (i, &a) in p.iter().enumerate() {
                q[i + 1] += a;
                q[i] -= a * k as f64;
            }
            p = q;
        }
        let r = poly_roots(&p);
        for (k, z) in r.iter().enumerate() {
            assert!((z - c(k as f64 + 1.0, 0.0)).norm() < 1e-8, "{z}");
        }
        assert!(aberth(&p).iter().all(|z| poly_eval(&p, *z).norm() < 1e-3));
    }
}
