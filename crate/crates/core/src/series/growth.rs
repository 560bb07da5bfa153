use num_complex::Complex64;
use serde::Serialize;

use super::SeriesData;
use crate::{Error, Result};

/// Exponential growth of `|c_n|` and the radius of convergence it implies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularityEstimate {
    /// `lim log|c_n| / n`.
    pub c: f64,
    /// `e^{-c}`.
    pub radius: f64,
    /// `γ` in `|c_n| ~ K e^{cn} n^γ`.
    pub poly_exponent: f64,
    pub pade_poles: Vec<Complex64>,
    /// Nodes `n` used for the extrapolation, coarsest first.
    pub nodes: Vec<usize>,
    /// Richardson table; row `m` holds the order-`m` extrapolants.
    pub richardson: Vec<Vec<f64>>,
}

/// Estimate `c` from `d_n = log|c_n| - log|c_{n-1}| = c + a/n + …` by
/// Richardson extrapolation over `n = N, N/2, N/4, …` (nodes ≥ 50), then
/// `γ` by least squares of `log|c_n| - cn` against `log n` on `[N/4, N]`.
pub fn growth_rate(s: &SeriesData) -> Result<SingularityEstimate> {
    let big_n = s.n_max();
    if big_n < 200 {
        return Err(Error::InsufficientData(format!("need n_max ≥ 200 (n₀ ≥ 50), have {big_n}")));
    }
    let lo = big_n / 4;
    if s.log_abs[lo - 2..].iter().any(|v| !v.is_finite()) {
        return Err(Error::InsufficientData("zero or non-finite coefficients in the fit window".into()));
    }
    let d = |n: usize| s.log_abs_at(n) - s.log_abs_at(n - 1);
    let mut nodes = Vec::new();
    let mut n = big_n;
    while n >= 50 && nodes.len() < 4 {
        nodes.push(n);
        n /= 2;
    }
    nodes.reverse();
    // h = 1/n halves from one node to the next (up to rounding of odd N)
    let mut table = vec![nodes.iter().map(|&n| d(n)).collect::<Vec<f64>>()];
    for m in 1..nodes.len() {
        let prev = &table[m - 1];
        let f = 2f64.powi(m as i32);
        let row = (1..prev.len()).map(|k| (f * prev[k] - prev[k - 1]) / (f - 1.0)).collect();
        table.push(row);
    }
    let c = *table.last().and_then(|r| r.last()).expect("at least one node");

    let (mut sx, mut sy, mut sxx, mut sxy, mut cnt) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for n in lo..=big_n {
        let x = (n as f64).ln();
        let y = s.log_abs_at(n) - c * n as f64;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        cnt += 1.0;
    }
    let poly_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    Ok(SingularityEstimate { c, radius: (-c).exp(), poly_exponent, pade_poles: vec![], nodes, richardson: table })
}
