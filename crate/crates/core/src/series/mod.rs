//! The sequence `c_n = a_{t,n}(e^{2πi/n})` of a special q-term and tools for
//! locating the singularities of `Σ c_n xⁿ`.

mod asymptotics;
mod conjecture;
mod growth;
mod pade;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::model::{LaurentPoly, Sign, SpecialQTerm};
use crate::{Error, Result};

pub use asymptotics::{empirical_potential_defect, laplace_ratio_check, qfactorial_asymptotics_defect, term_ratio};
pub use conjecture::{check_conjecture, ConjectureConfig, ConjectureReport, Verdict};
pub use growth::{growth_rate, SingularityEstimate};
pub use pade::{pade_approximant, pade_poles, PadePole, PadeResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesMode {
    /// Sum exact Laurent polynomials, then evaluate at the root of unity.
    Exact,
    /// Evaluate every factor directly at the root of unity.
    Numeric,
}

/// `c_1, …, c_{n_max}` together with `log|c_n|`.
///
/// `log_abs` stays meaningful when `c_n` itself overflows a double.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesData {
    pub mode: SeriesMode,
    /// `coeffs[i] = c_{i+1}`.
    pub coeffs: Vec<Complex64>,
    pub log_abs: Vec<f64>,
}

impl SeriesData {
    /// Wrap externally supplied coefficients `c_1, c_2, …`.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        let log_abs = coeffs.iter().map(|c| c.norm().ln()).collect();
        SeriesData { mode: SeriesMode::Numeric, coeffs, log_abs }
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_n` for `n ≥ 1`.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs[n - 1]
    }

    pub fn log_abs_at(&self, n: usize) -> f64 {
        self.log_abs[n - 1]
    }

    /// The coefficients `c_1, …, c_m`.
    pub fn truncated(&self, m: usize) -> SeriesData {
        let m = m.min(self.n_max());
        SeriesData { mode: self.mode, coeffs: self.coeffs[..m].to_vec(), log_abs: self.log_abs[..m].to_vec() }
    }
}

/// `log(1 - ζ^j)` prefix sums for `ζ = e^{2πi/n}`, with exact zero counting.
struct RootTable {
    n: u64,
    /// `Σ_{i ≤ j, n ∤ i} Log(1 - ζ^i)`
    logs: Vec<Complex64>,
    /// `#{i ≤ j : n | i}`
    zeros: Vec<u64>,
}

impl RootTable {
    fn new(n: u64, jmax: u64) -> Self {
        let mut logs = Vec::with_capacity(jmax as usize + 1);
        let mut zeros = Vec::with_capacity(jmax as usize + 1);
        let (mut s, mut z) = (Complex64::new(0.0, 0.0), 0);
        logs.push(s);
        zeros.push(0);
        for j in 1..=jmax {
            let r = j % n;
            if r == 0 {
                z += 1;
            } else {
                let w = Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64);
                s += crate::dilog::log_principal(Complex64::new(1.0, 0.0) - w);
            }
            logs.push(s);
            zeros.push(z);
        }
        RootTable { n, logs, zeros }
    }

    /// `log((q)_d / (q)_e)` for `d ≥ e`; `None` if it vanishes.
    fn log_ratio(&self, d: u64, e: u64) -> Option<Complex64> {
        if self.zeros[d as usize] > self.zeros[e as usize] {
            None
        } else {
            Some(self.logs[d as usize] - self.logs[e as usize])
        }
    }

    /// `log [b; c]_ζ` by the q-Lucas theorem; `None` if it vanishes.
    fn log_binomial(&self, b: u64, c: u64) -> Option<Complex64> {
        let n = self.n;
        let (b1, b0, c1, c0) = (b / n, b % n, c / n, c % n);
        if c0 > b0 || c1 > b1 {
            return None;
        }
        let small = self.logs[b0 as usize] - self.logs[c0 as usize] - self.logs[(b0 - c0) as usize];
        let k = c1.min(b1 - c1);
        let big: f64 = (0..k).map(|i| (((b1 - i) as f64) / ((i + 1) as f64)).ln()).sum();
        Some(small + big)
    }
}

fn sum_logs(terms: &[Complex64]) -> (f64, Complex64) {
    if terms.is_empty() {
        return (f64::NEG_INFINITY, Complex64::new(0.0, 0.0));
    }
    let m = terms.iter().map(|t| t.re).fold(f64::NEG_INFINITY, f64::max);
    let s: Complex64 = terms.iter().map(|t| (t - m).exp()).sum();
    let abs = s.norm();
    if abs == 0.0 {
        return (f64::NEG_INFINITY, Complex64::new(0.0, 0.0));
    }
    (m + abs.ln(), s / abs)
}

fn numeric_coefficient(t: &SpecialQTerm, n: u64) -> Result<(f64, Complex64)> {
    let points = t.polytope_points(n as i64)?;
    let mut evals = Vec::with_capacity(points.len());
    let mut jmax = 0u64;
    for kp in &points {
        let mut k = vec![n as i64];
        k.extend(kp);
        let mut vals = Vec::with_capacity(t.quads().len());
        for qf in t.quads() {
            let v = [qf.b.eval(&k)?, qf.c.eval(&k)?, qf.d.eval(&k)?, qf.e.eval(&k)?];
            jmax = jmax.max(v.iter().copied().max().unwrap_or(0) as u64);
            vals.push(v.map(|x| x as u64));
        }
        evals.push((k, vals));
    }
    let table = RootTable::new(n, jmax);
    let mut logs = Vec::with_capacity(evals.len());
    'points: for (k, vals) in evals {
        let qk = t.q().eval(&k)?.rem_euclid(n as i64);
        let mut lg = Complex64::new(0.0, 2.0 * PI * qk as f64 / n as f64);
        if t.epsilon() == Sign::Minus && t.l().eval(&k)?.rem_euclid(2) == 1 {
            lg += Complex64::new(0.0, PI);
        }
        for [b, c, d, e] in vals {
            match (table.log_binomial(b, c), table.log_ratio(d, e)) {
                (Some(x), Some(y)) => lg += x + y,
                _ => continue 'points,
            }
        }
        logs.push(lg);
    }
    Ok(sum_logs(&logs))
}

/// `a_{t,n}(q) = Σ_{k' ∈ nP_t} t_{n,k'}(q)` as an exact Laurent polynomial.
pub fn exact_polynomial(t: &SpecialQTerm, n: u64) -> Result<LaurentPoly> {
    let mut s = LaurentPoly::zero();
    for kp in t.polytope_points(n as i64)? {
        let mut k = vec![n as i64];
        k.extend(&kp);
        s += &t.eval_exact(&k)?;
    }
    Ok(s)
}

fn coefficient(t: &SpecialQTerm, n: u64, mode: SeriesMode) -> Result<(f64, Complex64)> {
    match mode {
        SeriesMode::Numeric => numeric_coefficient(t, n),
        SeriesMode::Exact => {
            let c = exact_polynomial(t, n)?.eval_root_of_unity(n);
            let a = c.norm();
            Ok((a.ln(), if a == 0.0 { Complex64::new(0.0, 0.0) } else { c / a }))
        }
    }
}

/// `c_n = a_{t,n}(e^{2πi/n})` for `1 ≤ n ≤ n_max`.
pub fn sequence(t: &SpecialQTerm, n_max: usize, mode: SeriesMode) -> Result<SeriesData> {
    if n_max == 0 {
        return Err(Error::Config("n_max must be at least 1".into()));
    }
    let vals: Vec<(f64, Complex64)> =
        (1..=n_max as u64).into_par_iter().map(|n| coefficient(t, n, mode)).collect::<Result<_>>()?;
    let coeffs = vals.iter().map(|&(l, p)| if l == f64::NEG_INFINITY { p } else { p * l.exp() }).collect();
    let log_abs = vals.iter().map(|v| v.0).collect();
    Ok(SeriesData { mode, coeffs, log_abs })
}

/// Exact and numeric `c_n` side by side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crosscheck {
    pub exact: Complex64,
    pub numeric: Complex64,
    /// `|exact - numeric|`.
    pub defect: f64,
}

impl Crosscheck {
    /// `defect / (1 + |c|)`.
    pub fn relative(&self) -> f64 {
        self.defect / (1.0 + self.exact.norm())
    }
}

pub fn crosscheck_exact_numeric(t: &SpecialQTerm, n: u64) -> Result<Crosscheck> {
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    let exact = exact_polynomial(t, n)?.eval_root_of_unity(n);
    let (l, p) = numeric_coefficient(t, n)?;
    let numeric = if l == f64::NEG_INFINITY { p } else { p * l.exp() };
    Ok(Crosscheck { exact, numeric, defect: (exact - numeric).norm() })
}

/// `Σ_{k=0}^{n-1} |(q)_k|²` at `q = e^{2πi/n}` by direct products.
pub fn kashaev_41_oracle(n: u64) -> Complex64 {
    let q = Complex64::from_polar(1.0, 2.0 * PI / n as f64);
    let mut p = Complex64::new(1.0, 0.0);
    let mut s = 0.0;
    let mut qk = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        s += p.norm_sqr();
        qk *= q;
        p *= Complex64::new(1.0, 0.0) - qk;
    }
    Complex64::new(s, 0.0)
}
