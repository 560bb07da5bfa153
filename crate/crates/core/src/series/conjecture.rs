use num_complex::Complex64;
use serde::Serialize;

use super::{growth_rate, pade_approximant, sequence, SeriesMode, SingularityEstimate};
use crate::bloch::cv_set;
use crate::model::SpecialQTerm;
use crate::variational::SolverConfig;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureConfig {
    /// Coefficients used for the growth estimate.
    pub n_max: usize,
    pub pade_num: usize,
    pub pade_den: usize,
    /// Coefficients used for the Padé fit.
    pub pade_n_max: usize,
    pub solver: SolverConfig,
    /// Maximal `|radius - min|v|| / min|v|`.
    pub radius_tol: f64,
    /// Maximal relative distance from the nearest Padé pole to `CV_t`.
    pub pole_tol: f64,
    /// Poles with `|p| ≤ (1 + near_disk) · radius` are reported.
    pub near_disk: f64,
}

impl Default for ConjectureConfig {
    fn default() -> Self {
        ConjectureConfig {
            n_max: 1000,
            pade_num: 40,
            pade_den: 40,
            pade_n_max: 120,
            solver: SolverConfig::default(),
            radius_tol: 0.03,
            pole_tol: 0.05,
            near_disk: 0.25,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NearPole {
    pub pole: Complex64,
    pub nearest_cv: Complex64,
    /// `|pole - v| / |v|`.
    pub relative_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub verdict: Verdict,
    pub critical_values: Vec<Complex64>,
    pub min_cv_modulus: Option<f64>,
    pub growth: Option<SingularityEstimate>,
    /// `|radius - min|v|| / min|v|`.
    pub radius_defect: Option<f64>,
    pub near_poles: Vec<NearPole>,
    pub pade_rank: Option<usize>,
    /// Failures of individual stages.
    pub notes: Vec<String>,
}

fn nearest(values: &[Complex64], p: Complex64) -> Option<(Complex64, f64)> {
    values
        .iter()
        .map(|&v| (v, (p - v).norm() / v.norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Compare the singularities of `Σ c_n xⁿ` with the critical values of the
/// fiber term. Every failing stage is recorded in `notes` and makes the
/// verdict inconclusive unless an earlier stage already contradicts.
pub fn check_conjecture(t: &SpecialQTerm, cfg: &ConjectureConfig) -> ConjectureReport {
    let mut rep = ConjectureReport {
        verdict: Verdict::Inconclusive,
        critical_values: vec![],
        min_cv_modulus: None,
        growth: None,
        radius_defect: None,
        near_poles: vec![],
        pade_rank: None,
        notes: vec![],
    };
    match t.fiber_qterm() {
        None => rep.notes.push("term has no summation variables".into()),
        Some(f) => match cv_set(&f, &cfg.solver) {
            Ok(cv) => rep.critical_values = cv.values,
            Err(e) => rep.notes.push(format!("critical values: {e}")),
        },
    }
    rep.min_cv_modulus = rep.critical_values.iter().map(|v| v.norm()).min_by(f64::total_cmp);
    if rep.critical_values.is_empty() {
        rep.notes.push("no critical values".into());
    }

    let n_seq = cfg.n_max.max(cfg.pade_n_max);
    let seq = match sequence(t, n_seq, SeriesMode::Numeric) {
        Ok(s) => Some(s),
        Err(e) => {
            rep.notes.push(format!("sequence: {e}"));
            None
        }
    };
    if let Some(s) = &seq {
        match growth_rate(&s.truncated(cfg.n_max)) {
            Ok(g) => rep.growth = Some(g),
            Err(e) => rep.notes.push(format!("growth: {e}")),
        }
        match pade_approximant(&s.truncated(cfg.pade_n_max), cfg.pade_num, cfg.pade_den) {
            Ok(p) => {
                rep.pade_rank = Some(p.rank);
                let genuine: Vec<Complex64> = p.poles.iter().filter(|p| p.genuine).map(|p| p.z).collect();
                if let Some(g) = rep.growth.as_mut() {
                    g.pade_poles = genuine.clone();
                }
                let bound = rep.growth.as_ref().map(|g| g.radius).or(rep.min_cv_modulus);
                if let Some(b) = bound {
                    for z in genuine.into_iter().filter(|z| z.norm() <= (1.0 + cfg.near_disk) * b) {
                        if let Some((v, d)) = nearest(&rep.critical_values, z) {
                            rep.near_poles.push(NearPole { pole: z, nearest_cv: v, relative_distance: d });
                        }
                    }
                }
            }
            Err(e) => rep.notes.push(format!("padé: {e}")),
        }
    }

    if let (Some(m), Some(g)) = (rep.min_cv_modulus, rep.growth.as_ref()) {
        rep.radius_defect = Some((g.radius - m).abs() / m);
    }
    rep.verdict = match rep.radius_defect {
        None => Verdict::Inconclusive,
        Some(d) if d > cfg.radius_tol => Verdict::Inconsistent,
        // the nearest pole is the only one expected to sit on a critical value;
        // further poles discretize branch cuts
        Some(_) => match rep.near_poles.first() {
            Some(p) if p.relative_distance > cfg.pole_tol => Verdict::Inconsistent,
            _ => Verdict::Consistent,
        },
    };
    rep
}
