use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::SeriesData;
use crate::roots::{poly_eval, poly_eval_deriv, poly_roots};
use crate::{Error, Result};

/// Singular values below `RCOND · σ_max` are treated as zero.
const RCOND: f64 = 1e-13;
/// Poles whose residue is below this fraction of the largest are spurious.
const RESIDUE_FLOOR: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PadePole {
    pub z: Complex64,
    /// `|residue|` relative to the largest residue.
    pub weight: f64,
    pub genuine: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PadeResult {
    /// All poles, sorted by modulus.
    pub poles: Vec<PadePole>,
    /// Numerical rank of the Toeplitz system.
    pub rank: usize,
    /// The series was fitted in `w = x / scale`.
    pub scale: f64,
}

/// `[L/M]` Padé approximant of `Σ_{n≥1} c_n xⁿ` (with `c_0 = 0`).
///
/// The coefficients are rescaled by an estimate of the radius of convergence
/// and the Toeplitz system for the denominator is solved by truncated SVD, so
/// a rank-deficient system yields the minimal-norm denominator instead of noise.
pub fn pade_approximant(s: &SeriesData, l: usize, m: usize) -> Result<PadeResult> {
    if m == 0 {
        return Err(Error::Config("denominator degree must be positive".into()));
    }
    let top = l + m;
    if s.n_max() < top {
        return Err(Error::InsufficientData(format!(
            "[{l}/{m}] needs c_1..c_{top}, have {} coefficients",
            s.n_max()
        )));
    }
    // overflowed coefficients carry no phase information and are rejected below
    let phase = |n: usize| {
        let c = s.coeff(n);
        let a = c.norm();
        if a > 0.0 && a.is_finite() {
            c / a
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let log_top = s.log_abs_at(top);
    let log_scale = if log_top.is_finite() { -log_top / top as f64 } else { 0.0 };
    let scaled_log: Vec<f64> =
        (1..=top).map(|n| s.log_abs_at(n) + n as f64 * log_scale).collect();
    let norm = scaled_log.iter().copied().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    if !norm.is_finite() {
        return Err(Error::SingularSystem);
    }
    if (1..=top).any(|n| s.log_abs_at(n).is_finite() && !s.coeff(n).is_finite()) {
        return Err(Error::InsufficientData("coefficients overflow double precision".into()));
    }
    let mut a = vec![Complex64::new(0.0, 0.0); top + 1];
    for n in 1..=top {
        let v = scaled_log[n - 1];
        if v.is_finite() {
            a[n] = phase(n) * (v - norm).exp();
        }
    }

    let mut toe = DMatrix::<Complex64>::zeros(m, m);
    let mut rhs = DVector::<Complex64>::zeros(m);
    for (row, k) in (l + 1..=top).enumerate() {
        for j in 1..=m {
            if k >= j {
                toe[(row, j - 1)] = a[k - j];
            }
        }
        rhs[row] = -a[k];
    }
    let svd = toe.svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Err(Error::SingularSystem);
    }
    let eps = RCOND * smax;
    let rank = svd.singular_values.iter().filter(|&&x| x > eps).count();
    let sol = svd.solve(&rhs, eps).map_err(|_| Error::SingularSystem)?;

    let mut den = vec![Complex64::new(1.0, 0.0)];
    den.extend(sol.iter().copied());
    let num: Vec<Complex64> = (0..=l)
        .map(|k| (0..=k.min(m)).map(|j| den[j] * a[k - j]).sum())
        .collect();
    let dmax = den.iter().map(|x| x.norm()).fold(0.0, f64::max);
    while den.len() > 1 && den.last().is_some_and(|x| x.norm() <= 1e-14 * dmax) {
        den.pop();
    }
    let scale = log_scale.exp();
    let mut poles: Vec<PadePole> = poly_roots(&den)
        .into_iter()
        .map(|w| {
            let (_, dd) = poly_eval_deriv(&den, w);
            let res = (poly_eval(&num, w) / dd).norm();
            PadePole { z: w * scale, weight: if res.is_finite() { res } else { 0.0 }, genuine: false }
        })
        .collect();
    let wmax = poles.iter().map(|p| p.weight).fold(0.0, f64::max);
    for p in poles.iter_mut() {
        p.weight = if wmax > 0.0 { p.weight / wmax } else { 0.0 };
        p.genuine = p.weight >= RESIDUE_FLOOR;
    }
    poles.sort_by(|a, b| a.z.norm().total_cmp(&b.z.norm()));
    Ok(PadeResult { poles, rank, scale })
}

/// Genuine (residue-filtered) poles of the `[L/M]` approximant, nearest first.
pub fn pade_poles(s: &SeriesData, l: usize, m: usize) -> Result<Vec<Complex64>> {
    Ok(pade_approximant(s, l, m)?.poles.into_iter().filter(|p| p.genuine).map(|p| p.z).collect())
}
