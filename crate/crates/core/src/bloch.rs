//! Bloch group elements of critical points, their regulators, the potential
//! `V_t` and runtime certificates for the vanishing of `ν̂` and for the
//! identity `e^{-V_t} = e^{R̂(β̂_t)/2πi}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::dilog::{bloch_wigner, log_principal, phi, rogers_hat, CHatPoint, ModZ1Value, ModZ2Value};
use crate::model::{LinForm, QTerm};
use crate::variational::{
    branch_integer, half_log_point, solve_variational, var_residual, varlog_residual_with, CriticalPoint,
    SolverConfig,
};
use crate::{Error, Result};

fn iu() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

fn same_z(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * (1.0 + a.norm())
}

/// Formal sum `Σ m [z]` in `ℤ[ℂ \ {0,1}]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BlochElement {
    terms: Vec<(Complex64, i64)>,
}

impl BlochElement {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `mult · [z]`, merging with an equal point.
    pub fn push(&mut self, z: Complex64, mult: i64) {
        if let Some(slot) = self.terms.iter_mut().find(|(w, _)| same_z(*w, z)) {
            slot.1 += mult;
        } else {
            self.terms.push((z, mult));
        }
        self.terms.retain(|(_, m)| *m != 0);
    }

    pub fn terms(&self) -> &[(Complex64, i64)] {
        &self.terms
    }
}

/// Formal sum `Σ m [z; p, q]` of points of `Ĉ`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExtBlochElement {
    terms: Vec<(CHatPoint, i64)>,
}

impl ExtBlochElement {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, w: CHatPoint, mult: i64) {
        if let Some(slot) =
            self.terms.iter_mut().find(|(v, _)| v.p == w.p && v.q == w.q && same_z(v.z, w.z))
        {
            slot.1 += mult;
        } else {
            self.terms.push((w, mult));
        }
        self.terms.retain(|(_, m)| *m != 0);
    }

    pub fn terms(&self) -> &[(CHatPoint, i64)] {
        &self.terms
    }

    /// Forget the branch data.
    pub fn to_bloch(&self) -> BlochElement {
        let mut e = BlochElement::new();
        for (w, m) in &self.terms {
            e.push(w.z, *m);
        }
        e
    }
}

/// `β_t(z) = Σ_j ε_j [z^{A_j}]` at a solution of the variational equations.
pub fn beta(t: &QTerm, z: &[Complex64], tol: f64) -> Result<BlochElement> {
    let res = var_residual(t, z)?;
    if res.is_nan() || res > tol {
        return Err(Error::NotOnVariety(res));
    }
    let mut e = BlochElement::new();
    for f in t.factors() {
        e.push(f.form.monomial(z), f.sign.as_i64());
    }
    Ok(e)
}

/// `β̂_t(z) = Σ_j ε_j [z^{A_j}; p_{z,A_j}, 0] + [z^{-L/2}; p, 2λ/πi] - [z^{-L/2}; p, 0]`.
///
/// The pair is omitted when `λ = 0` (it cancels) or when `z^{-L/2} = 1` on the
/// trivial branch.
pub fn beta_hat(t: &QTerm, cp: &CriticalPoint) -> Result<ExtBlochElement> {
    if !cp.accepted {
        return Err(Error::Domain("critical point was not accepted by the solver".into()));
    }
    let mut e = ExtBlochElement::new();
    for f in t.factors() {
        let hom = LinForm::homogeneous(f.form.coeffs().to_vec());
        let x = hom.eval_hom(&cp.u).exp();
        let p = branch_integer(&cp.u, &hom)?;
        e.push(CHatPoint::new(x, p, 0)?, f.sign.as_i64());
    }
    if cp.log_eps != 0 {
        let h = half_log_point(&cp.u, t.l())?;
        if let Some(w) = h.point {
            e.push(CHatPoint::new(w.z, w.p, 2 * cp.log_eps)?, 1);
            e.push(w, -1);
        }
    }
    Ok(e)
}

/// `Σ m · R̂(w)` modulo `ℤ(2)`.
pub fn rogers_of_element(e: &ExtBlochElement) -> ModZ2Value {
    let s = e.terms().iter().map(|(w, m)| rogers_hat(w).0 * *m as f64).sum();
    ModZ2Value(s)
}

/// `Σ m · D₂(z)` (purely imaginary).
pub fn bw_of_element(e: &BlochElement) -> Complex64 {
    e.terms().iter().map(|(z, m)| bloch_wigner(*z) * *m as f64).sum()
}

/// `V_t = (1/2πi)(Q(u) + λ Log(z^L)) + Σ_j ε_j Φ(z^{A_j})` with `λ = log_eps·πi`.
pub fn potential_with(t: &QTerm, u: &[Complex64], log_eps: i64) -> Result<ModZ1Value> {
    if u.len() != t.dim() {
        return Err(Error::Domain(format!("expected {} coordinates", t.dim())));
    }
    let one = Complex64::new(1.0, 0.0);
    for (i, ui) in u.iter().enumerate() {
        let z = ui.exp();
        if (z - one).norm() < 1e-14 || !z.is_finite() {
            return Err(Error::Domain(format!("z_{i} = {z} lies on H_t")));
        }
    }
    let two_pi_i = iu() * (2.0 * PI);
    let lam = iu() * (PI * log_eps as f64);
    let mut v = (t.q().eval_hom(u) + lam * log_principal(t.l().eval_hom(u).exp())) / two_pi_i;
    for (j, f) in t.factors().iter().enumerate() {
        let x = f.form.eval_hom(u).exp();
        if (x - one).norm() < 1e-14 {
            return Err(Error::Domain(format!("z^A_{j} = 1 lies on H_t")));
        }
        v += phi(x).0 * f.sign.as_i64() as f64;
    }
    Ok(ModZ1Value(v))
}

/// `V_t` with the principal `Log ε`.
pub fn potential(t: &QTerm, u: &[Complex64]) -> Result<ModZ1Value> {
    let log_eps = match t.epsilon() {
        crate::model::Sign::Plus => 0,
        crate::model::Sign::Minus => 1,
    };
    potential_with(t, u, log_eps)
}

/// The critical values `{e^{-V_t(z)}}` over accepted critical points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CVSet {
    pub values: Vec<Complex64>,
    /// Relative tolerance used to merge values.
    pub tol: f64,
    /// Number of accepted critical points the values came from.
    pub points: usize,
}

pub fn cv_from_points(t: &QTerm, points: &[CriticalPoint]) -> Result<CVSet> {
    let tol = 1e-8;
    let mut values: Vec<Complex64> = Vec::new();
    let mut used = 0;
    for cp in points.iter().filter(|p| p.accepted) {
        let v = potential_with(t, &cp.u, cp.log_eps)?.exp_neg();
        used += 1;
        if !values.iter().any(|w| (w - v).norm() <= tol * (1.0 + v.norm())) {
            values.push(v);
        }
    }
    values.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    Ok(CVSet { values, tol, points: used })
}

pub fn cv_set(t: &QTerm, cfg: &SolverConfig) -> Result<CVSet> {
    cv_from_points(t, &solve_variational(t, cfg)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NuHatClause {
    /// `Q` is symmetric.
    Symmetric,
    /// The logarithmic variational equations hold.
    LogEquations,
    /// `Log(z^L) + 2 Log(z^{-L/2}) ∈ (πi/2)ℤ`.
    HalfLog,
    /// All branch integers are even.
    BranchParity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuHatCertificate {
    pub holds: bool,
    pub failed: Option<NuHatClause>,
}

/// Check the hypotheses under which `ν̂(β̂_t(z))` vanishes.
pub fn certify_nu_hat(t: &QTerm, cp: &CriticalPoint, tol: f64) -> NuHatCertificate {
    let fail = |c| NuHatCertificate { holds: false, failed: Some(c) };
    let n = t.dim();
    if (0..n).any(|i| (0..i).any(|j| t.q().entry(i, j) != t.q().entry(j, i))) {
        return fail(NuHatClause::Symmetric);
    }
    match varlog_residual_with(t, &cp.u, cp.log_eps) {
        Ok(r) if r.iter().all(|x| x.norm() < tol) => {}
        _ => return fail(NuHatClause::LogEquations),
    }
    let lu = t.l().eval_hom(&cp.u);
    match half_log_point(&cp.u, t.l()) {
        Ok(h) => {
            let lw = h.point.map_or(Complex64::new(0.0, 0.0), |w| log_principal(w.z));
            let s = log_principal(lu.exp()) + 2.0 * lw;
            let k = (s.im / (PI / 2.0)).round();
            if s.re.abs() > tol || (s.im - k * PI / 2.0).abs() > tol {
                return fail(NuHatClause::HalfLog);
            }
        }
        Err(_) => return fail(NuHatClause::HalfLog),
    }
    // Log ε is an odd multiple of πi exactly when ε = -1
    let want_odd = t.epsilon() == crate::model::Sign::Minus;
    if cp.branch_l % 2 != 0 || (cp.log_eps.rem_euclid(2) == 1) != want_odd {
        return fail(NuHatClause::BranchParity);
    }
    if cp.branch_a.len() != t.factors().len() || cp.branch_a.iter().any(|p| p % 2 != 0) {
        return fail(NuHatClause::BranchParity);
    }
    for (f, &p) in t.factors().iter().zip(&cp.branch_a) {
        let hom = LinForm::homogeneous(f.form.coeffs().to_vec());
        if branch_integer(&cp.u, &hom).ok() != Some(p) {
            return fail(NuHatClause::BranchParity);
        }
    }
    NuHatCertificate { holds: true, failed: None }
}

/// `|e^{-V_t(z)} - e^{R̂(β̂_t(z))/2πi}|`.
pub fn certify_diagram(t: &QTerm, cp: &CriticalPoint) -> Result<f64> {
    let lhs = potential_with(t, &cp.u, cp.log_eps)?.exp_neg();
    let r = rogers_of_element(&beta_hat(t, cp)?);
    let rhs = (r.canonical() / (iu() * (2.0 * PI))).exp();
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{family, four_one};
    use crate::model::Sign;
    use crate::variational::critical_point_at;

    const VOL2: f64 = 2.029_883_212_819_307_4;

    fn four_one_points() -> Vec<CriticalPoint> {
        solve_variational(&four_one(), &SolverConfig::default()).unwrap()
    }

    #[test]
    fn four_one_regulator_and_cv() {
        let t = four_one();
        let pts = four_one_points();
        let mut ims = vec![];
        for cp in &pts {
            let r = rogers_of_element(&beta_hat(&t, cp).unwrap()).canonical();
            assert!(r.re.abs() < 1e-10, "{r}");
            ims.push(r.im);
            let bw = bw_of_element(&beta(&t, &cp.z, 1e-10).unwrap());
            assert!((bw.im - r.im).abs() < 1e-10);
            assert!(certify_diagram(&t, cp).unwrap() < 1e-10);
            assert!(certify_nu_hat(&t, cp, 1e-8).holds);
        }
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + VOL2).abs() < 1e-10 && (ims[1] - VOL2).abs() < 1e-10);
        let cv = cv_from_points(&t, &pts).unwrap();
        assert_eq!(cv.values.len(), 2);
        assert!((cv.values[0].re - 0.723_926_111_9).abs() < 1e-9);
        assert!((cv.values[1].re - 1.381_356_444_5).abs() < 1e-9);
        assert!(((cv.values[0] * cv.values[1]).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_family_at_one_half() {
        let t = family(-1, 1, Sign::Plus).unwrap();
        let pts = solve_variational(&t, &SolverConfig::default()).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].z[0] - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        assert!(certify_diagram(&t, &pts[0]).unwrap() < 1e-10);
    }

    #[test]
    fn certificate_failures() {
        let t = four_one();
        let mut cp = four_one_points()[1].clone();
        cp.branch_a[0] = 1;
        assert_eq!(certify_nu_hat(&t, &cp, 1e-8).failed, Some(NuHatClause::BranchParity));
        let off = critical_point_at(&t, vec![Complex64::new(0.4, 0.3)], 10.0).unwrap();
        assert_eq!(certify_nu_hat(&t, &off, 1e-8).failed, Some(NuHatClause::LogEquations));
    }

    #[test]
    fn element_helpers() {
        let mut e = BlochElement::new();
        let z = Complex64::from_polar(1.0, PI / 3.0);
        e.push(z, 1);
        e.push(z, 1);
        assert_eq!(e.terms().len(), 1);
        assert!((bw_of_element(&e).im - VOL2).abs() < 1e-13);
        let mut half = BlochElement::new();
        half.push(Complex64::new(0.5, 0.0), 1);
        assert_eq!(bw_of_element(&half).im, 0.0);
        let mut c = BlochElement::new();
        c.push(z.conj(), 2);
        assert!((bw_of_element(&c) + bw_of_element(&e)).norm() < 1e-13);
        assert!(matches!(beta(&four_one(), &[Complex64::new(0.3, 0.0)], 1e-10), Err(Error::NotOnVariety(_))));
    }
}
