//! Variational equations of a q-term and their solutions in log coordinates.
//!
//! Points are found by multistart Newton on the logarithmic system
//! `Σ_j ε_j v_i(A_j) Log(1 - e^{A_j(u)}) + Σ_m Q_im u_m + λ v_i(L) = 0`
//! with each residual reduced modulo `2πi`, so every solution of the
//! multiplicative equations in the strip is reachable. For each solution the
//! branch `λ = Log ε` is then chosen so that the principal-log system holds
//! exactly, when the `v(L)` column allows it.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dilog::{log_principal, CHatPoint};
use crate::model::{LinForm, QTerm, Sign};
use crate::roots::poly_roots;
use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;
/// Points closer than this to the hypersurfaces `z = 1`, `z^A = 1` are rejected.
const DOMAIN_EPS: f64 = 1e-8;
/// Bound on `|Re u_i|` during and after Newton.
const RE_BOUND: f64 = 40.0;
/// Beyond this `|Re|` of `u_i` or `A_j(u)`, a point with a degenerate Jacobian
/// is taken to be an asymptotic solution at infinity.
const ASYMPTOTIC_RE: f64 = 20.0;

fn iu() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Number of random starting points.
    pub starts: usize,
    pub seed: u64,
    /// Required max-norm of the log residual.
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Solutions closer than this (max-norm in `u`) are merged.
    pub dedup_tol: f64,
    /// Restrict `Im u_i` to `(-π, π]`.
    pub strip: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { starts: 100, seed: 0, newton_tol: 1e-10, max_iter: 100, dedup_tol: 1e-6, strip: true }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::Config("starts must be positive".into()));
        }
        if !(self.newton_tol > 0.0 && self.newton_tol.is_finite()) {
            return Err(Error::Config("newton_tol must be a positive number".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be positive".into()));
        }
        if !(self.dedup_tol > 0.0 && self.dedup_tol.is_finite()) {
            return Err(Error::Config("dedup_tol must be a positive number".into()));
        }
        Ok(())
    }
}

/// A solution of the variational equations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    /// Log coordinates, `z = e^u`.
    pub u: Vec<Complex64>,
    pub z: Vec<Complex64>,
    /// Max-norm of the logarithmic residual (with the chosen `Log ε`,
    /// reduced mod `2πi` when the point is not accepted).
    pub residual_log: f64,
    /// Max-norm of the multiplicative residual.
    pub residual_mult: f64,
    /// `p_{z,A_j}` for every factor.
    pub branch_a: Vec<i64>,
    /// `p_{z,L}`.
    pub branch_l: i64,
    /// `Log ε = log_eps · πi`.
    pub log_eps: i64,
    /// Multiples of `2πi` left in the principal-log residual that no choice
    /// of `Log ε` absorbs; all zero for accepted points.
    pub sheet: Vec<i64>,
    /// The principal-log system holds with the chosen `Log ε`.
    pub accepted: bool,
    pub jacobian_singular: bool,
}

impl CriticalPoint {
    pub fn lambda(&self) -> Complex64 {
        iu() * (PI * self.log_eps as f64)
    }
}

fn principal_log_eps(eps: Sign) -> i64 {
    match eps {
        Sign::Plus => 0,
        Sign::Minus => 1,
    }
}

fn check_dim(t: &QTerm, len: usize) -> Result<()> {
    if len != t.dim() {
        return Err(Error::Domain(format!("expected {} coordinates, got {len}", t.dim())));
    }
    Ok(())
}

/// Max-norm of `z^{Q_i} ε^{v_i(L)} Π_j (1 - z^{A_j})^{ε_j v_i(A_j)} - 1`.
pub fn var_residual(t: &QTerm, z: &[Complex64]) -> Result<f64> {
    check_dim(t, z.len())?;
    let one = Complex64::new(1.0, 0.0);
    for (i, &zi) in z.iter().enumerate() {
        if zi.norm() < 1e-300 || (zi - one).norm() < 1e-300 || !zi.is_finite() {
            return Err(Error::Domain(format!("z_{i} = {zi} is 0 or 1")));
        }
    }
    let xs: Vec<Complex64> = t.factors().iter().map(|f| f.form.monomial(z)).collect();
    for (j, x) in xs.iter().enumerate() {
        if (x - one).norm() < 1e-300 || x.norm() < 1e-300 {
            return Err(Error::Domain(format!("z^A_{j} = {x} is 0 or 1")));
        }
    }
    let eps = t.epsilon().as_i64() as f64;
    let mut worst = 0.0f64;
    for i in 0..t.dim() {
        let mut v = t.q().row(i).monomial(z);
        if t.l().coeff(i).rem_euclid(2) == 1 {
            v *= eps;
        }
        for (f, x) in t.factors().iter().zip(&xs) {
            let e = f.sign.as_i64() * f.form.coeff(i);
            if e != 0 {
                v *= (one - x).powi(e as i32);
            }
        }
        worst = worst.max((v - one).norm());
    }
    Ok(worst)
}

/// Logarithmic residual vector with `Log ε = log_eps · πi`.
pub fn varlog_residual_with(t: &QTerm, u: &[Complex64], log_eps: i64) -> Result<Vec<Complex64>> {
    check_dim(t, u.len())?;
    let one = Complex64::new(1.0, 0.0);
    let lam = iu() * (PI * log_eps as f64);
    let logs: Vec<Complex64> = t
        .factors()
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let x = f.form.eval_hom(u).exp();
            if (one - x).norm() < 1e-300 {
                Err(Error::Domain(format!("z^A_{j} = 1")))
            } else {
                Ok(log_principal(one - x))
            }
        })
        .collect::<Result<_>>()?;
    Ok((0..t.dim())
        .map(|i| {
            let mut s = t.q().row(i).eval_hom(u) + lam * t.l().coeff(i) as f64;
            for (f, lg) in t.factors().iter().zip(&logs) {
                s += lg * (f.sign.as_i64() * f.form.coeff(i)) as f64;
            }
            s
        })
        .collect())
}

/// Logarithmic residual with the principal `Log ε` (0 or πi).
pub fn varlog_residual(t: &QTerm, u: &[Complex64]) -> Result<Vec<Complex64>> {
    varlog_residual_with(t, u, principal_log_eps(t.epsilon()))
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn wrap_2pi_i(x: Complex64) -> (Complex64, i64) {
    let s = (x.im / TWO_PI).round();
    (x - iu() * (TWO_PI * s), s as i64)
}

fn wrap_strip(u: Complex64) -> Complex64 {
    let mut im = u.im - TWO_PI * (u.im / TWO_PI).round();
    if im <= -PI {
        im += TWO_PI;
    }
    Complex64::new(u.re, im)
}

/// `p_{z,A} = (A(u) - Log e^{A(u)}) / πi`, the lift of `Log z^A`.
///
/// Requires `e^{A(u)} ∉ {0, 1}`; the result is always even for a homogeneous `A`.
pub fn branch_integer(u: &[Complex64], a: &LinForm) -> Result<i64> {
    let au = a.eval_hom(u);
    let x = au.exp();
    if !x.is_finite() || x.norm() < 1e-300 || (x - Complex64::new(1.0, 0.0)).norm() < 1e-300 {
        return Err(Error::Domain(format!("e^A(u) = {x} is 0 or 1")));
    }
    lift_integer(au)
}

fn lift_integer(au: Complex64) -> Result<i64> {
    let p = (au - log_principal(au.exp())).im / PI;
    let pr = p.round();
    if (p - pr).abs() > 1e-6 {
        return Err(Error::Domain(format!("branch integer {p} is not integral")));
    }
    let pr = pr as i64;
    if pr % 2 != 0 {
        return Err(Error::BranchParity(pr));
    }
    Ok(pr)
}

/// The point `z^{-L/2}` used to complete `β̂`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalfLog {
    /// `ℓ = -Log(z^L) + ½ L(u)`.
    pub log: Complex64,
    /// `[e^ℓ; p, 0]` with `Log e^ℓ + πip = ℓ`; `None` when `e^ℓ = 1` and `ℓ = 0`.
    pub point: Option<CHatPoint>,
}

pub fn half_log_point(u: &[Complex64], l: &LinForm) -> Result<HalfLog> {
    let lu = l.eval_hom(u);
    let log = -log_principal(lu.exp()) + 0.5 * lu;
    let w = log.exp();
    if (w - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
        if log.norm() < 1e-9 {
            return Ok(HalfLog { log, point: None });
        }
        return Err(Error::Domain(format!("z^(-L/2) = 1 on a nontrivial branch (ℓ = {log})")));
    }
    let p = lift_integer(log)?;
    Ok(HalfLog { log, point: Some(CHatPoint::new(w, p, 0)?) })
}

/// Log residual (wrapped mod 2πi) and Jacobian at `u`. `None` outside the domain.
fn residual_and_jacobian(t: &QTerm, u: &[Complex64], lam: Complex64) -> Option<(Vec<Complex64>, DMatrix<Complex64>)> {
    let n = t.dim();
    let one = Complex64::new(1.0, 0.0);
    let mut f: Vec<Complex64> = (0..n)
        .map(|i| t.q().row(i).eval_hom(u) + lam * t.l().coeff(i) as f64)
        .collect();
    let mut jac = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for m in 0..n {
            jac[(i, m)] = Complex64::new(t.q().entry(i, m) as f64, 0.0);
        }
    }
    for fac in t.factors() {
        let x = fac.form.eval_hom(u).exp();
        let om = one - x;
        if !x.is_finite() || om.norm() < 1e-14 {
            return None;
        }
        let lg = log_principal(om);
        let d = -x / om;
        let s = fac.sign.as_i64() as f64;
        for i in 0..n {
            let ci = fac.form.coeff(i);
            if ci == 0 {
                continue;
            }
            f[i] += lg * (s * ci as f64);
            for m in 0..n {
                let cm = fac.form.coeff(m);
                if cm != 0 {
                    jac[(i, m)] += d * (s * (ci * cm) as f64);
                }
            }
        }
    }
    let f = f.into_iter().map(|x| wrap_2pi_i(x).0).collect();
    Some((f, jac))
}

/// Where the leading terms of an equation cancel (e.g. `a + b = 0` in the
/// one-variable family) the residual decays like `e^{-|u|}` towards infinity
/// and Newton "converges" there. The Jacobian decays at the same rate, which
/// separates such points from genuine far-out solutions.
fn escapes_to_infinity(t: &QTerm, u: &[Complex64], jac: &DMatrix<Complex64>) -> bool {
    let far = u.iter().any(|x| x.re.abs() > ASYMPTOTIC_RE)
        || t.factors().iter().any(|f| f.form.eval_hom(u).re.abs() > ASYMPTOTIC_RE);
    if !far {
        return false;
    }
    let mut scale = t.q().matrix().iter().flatten().map(|&x| x.abs()).max().unwrap_or(0) as f64;
    for f in t.factors() {
        let m = f.form.coeffs().iter().map(|&x| x.abs()).max().unwrap_or(0) as f64;
        scale += m * m;
    }
    let smin = jac.singular_values().iter().copied().fold(f64::INFINITY, f64::min);
    smin < 1e-8 * scale.max(1.0)
}

/// Newton iteration from `u0`; returns the converged point or `None`.
fn newton(t: &QTerm, u0: Vec<Complex64>, cfg: &SolverConfig) -> Option<Vec<Complex64>> {
    let lam = iu() * (PI * principal_log_eps(t.epsilon()) as f64);
    let mut u = u0;
    let mut converged = false;
    let mut polish = 0;
    for _ in 0..cfg.max_iter {
        let (g, jac) = residual_and_jacobian(t, &u, lam)?;
        let norm = max_norm(&g);
        if !norm.is_finite() {
            return None;
        }
        if norm < cfg.newton_tol * 1e-3 {
            converged = true;
            polish += 1;
            if polish > 2 || norm < 1e-15 {
                break;
            }
        }
        let rhs = DVector::from_iterator(g.len(), g.iter().map(|x| -x));
        let delta = jac.lu().solve(&rhs)?;
        let size = delta.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if !size.is_finite() {
            return None;
        }
        let scale = if size > 1.5 { 1.5 / size } else { 1.0 };
        for (ui, di) in u.iter_mut().zip(delta.iter()) {
            *ui += di * scale;
            if ui.re.abs() > RE_BOUND {
                return None;
            }
        }
        if cfg.strip {
            for ui in u.iter_mut() {
                *ui = wrap_strip(*ui);
            }
        }
        if converged && size < 1e-16 {
            break;
        }
    }
    let (g, jac) = residual_and_jacobian(t, &u, lam)?;
    if !converged && max_norm(&g) >= cfg.newton_tol {
        return None;
    }
    if escapes_to_infinity(t, &u, &jac) {
        return None;
    }
    Some(u)
}

/// Assemble all diagnostics for a converged `u`. `None` if `u` is outside the domain.
pub fn critical_point_at(t: &QTerm, u: Vec<Complex64>, newton_tol: f64) -> Option<CriticalPoint> {
    let one = Complex64::new(1.0, 0.0);
    let n = t.dim();
    if u.len() != n || u.iter().any(|x| !x.is_finite() || x.re.abs() > RE_BOUND) {
        return None;
    }
    let z: Vec<Complex64> = u.iter().map(|x| x.exp()).collect();
    if z.iter().any(|zi| (zi - one).norm() < DOMAIN_EPS) {
        return None;
    }
    for f in t.factors() {
        let x = f.form.eval_hom(&u).exp();
        if (x - one).norm() < DOMAIN_EPS || x.norm() < DOMAIN_EPS {
            return None;
        }
    }
    let eps0 = principal_log_eps(t.epsilon());
    let f0 = varlog_residual_with(t, &u, eps0).ok()?;
    let sheet0: Vec<i64> = f0.iter().map(|&x| wrap_2pi_i(x).1).collect();
    let wrapped = max_norm(&f0.iter().map(|&x| wrap_2pi_i(x).0).collect::<Vec<_>>());
    if wrapped >= newton_tol {
        return None;
    }
    // λ = (eps0 + 2μ)πi shifts F_i by 2πi·μ·v_i(L); find μ with sheet + μ·v(L) = 0
    let vl = t.l().coeffs();
    let mu = if sheet0.iter().all(|&s| s == 0) {
        Some(0)
    } else {
        vl.iter()
            .zip(&sheet0)
            .find(|(&v, _)| v != 0)
            .and_then(|(&v, &s)| if s % v == 0 { Some(-s / v) } else { None })
            .filter(|&mu| sheet0.iter().zip(vl).all(|(&s, &v)| s + mu * v == 0))
    };
    let (log_eps, sheet, accepted) = match mu {
        Some(mu) => (eps0 + 2 * mu, vec![0; n], true),
        None => (eps0, sheet0, false),
    };
    let residual_log = if accepted {
        max_norm(&varlog_residual_with(t, &u, log_eps).ok()?)
    } else {
        wrapped
    };
    let residual_mult = var_residual(t, &z).ok()?;
    let branch_a = t
        .factors()
        .iter()
        .map(|f| branch_integer(&u, &LinForm::homogeneous(f.form.coeffs().to_vec())))
        .collect::<Result<Vec<_>>>()
        .ok()?;
    let branch_l = lift_integer(t.l().eval_hom(&u)).ok()?;
    let (_, jac) = residual_and_jacobian(t, &u, iu() * (PI * eps0 as f64))?;
    let sv = jac.singular_values();
    let (smax, smin) = sv.iter().fold((0.0f64, f64::INFINITY), |(a, b), &s| (a.max(s), b.min(s)));
    let jacobian_singular = smax == 0.0 || smin / smax < 1e-8;
    Some(CriticalPoint {
        u,
        z,
        residual_log,
        residual_mult,
        branch_a,
        branch_l,
        log_eps,
        sheet,
        accepted,
        jacobian_singular,
    })
}

fn same_point(a: &[Complex64], b: &[Complex64], tol: f64, strip: bool) -> bool {
    a.iter().zip(b).all(|(x, y)| {
        let d = x - y;
        let d = if strip { wrap_strip(d) } else { d };
        d.norm() < tol
    })
}

/// Multistart Newton for the variational equations.
///
/// Deterministic for a fixed seed regardless of the thread count. Output is
/// sorted by `u` (imaginary part first, then real part, coordinate by coordinate).
pub fn solve_variational(t: &QTerm, cfg: &SolverConfig) -> Result<Vec<CriticalPoint>> {
    cfg.validate()?;
    let n = t.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let starts: Vec<Vec<Complex64>> = (0..cfg.starts)
        .map(|_| {
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-3.0..=3.0), PI - rng.gen_range(0.0..TWO_PI)))
                .collect()
        })
        .collect();
    let found: Vec<Option<CriticalPoint>> = starts
        .into_par_iter()
        .map(|u0| newton(t, u0, cfg).and_then(|u| critical_point_at(t, u, cfg.newton_tol)))
        .collect();
    let mut out: Vec<CriticalPoint> = Vec::new();
    for cp in found.into_iter().flatten() {
        if !out.iter().any(|o| same_point(&o.u, &cp.u, cfg.dedup_tol, cfg.strip)) {
            out.push(cp);
        }
    }
    out.sort_by(|a, b| {
        for (x, y) in a.u.iter().zip(&b.u) {
            let c = x.im.total_cmp(&y.im).then(x.re.total_cmp(&y.re));
            if c != std::cmp::Ordering::Equal {
                return c;
            }
        }
        std::cmp::Ordering::Equal
    });
    Ok(out)
}

/// Roots of `ε z^a (1 - z)^b = 1` other than 0 and 1, sorted by (re, im).
pub fn solve_poly_1var(a: i64, b: i64, eps: Sign) -> Result<Vec<Complex64>> {
    if a == 0 && b == 0 {
        return Err(Error::DegenerateFamily);
    }
    if a.abs() > 64 || b.abs() > 64 {
        return Err(Error::Domain("family exponents limited to |a|, |b| ≤ 64".into()));
    }
    // ε z^{a+} (1-z)^{b+} - z^{a-} (1-z)^{b-}
    let poly = |za: i64, ob: i64, c: f64| -> Vec<f64> {
        let mut p = vec![0.0; (za + ob + 1) as usize];
        let mut binom = 1.0;
        for k in 0..=ob {
            p[(za + k) as usize] = c * binom * if k % 2 == 0 { 1.0 } else { -1.0 };
            binom = binom * (ob - k) as f64 / (k + 1) as f64;
        }
        p
    };
    let lhs = poly(a.max(0), b.max(0), eps.as_i64() as f64);
    let rhs = poly((-a).max(0), (-b).max(0), 1.0);
    let len = lhs.len().max(rhs.len());
    let coeffs: Vec<Complex64> = (0..len)
        .map(|i| Complex64::new(lhs.get(i).unwrap_or(&0.0) - rhs.get(i).unwrap_or(&0.0), 0.0))
        .collect();
    let one = Complex64::new(1.0, 0.0);
    Ok(poly_roots(&coeffs)
        .into_iter()
        .filter(|z| z.norm() > 1e-9 && (z - one).norm() > 1e-9)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{family, four_one};

    #[test]
    fn four_one_points() {
        let t = four_one();
        let pts = solve_variational(&t, &SolverConfig { starts: 50, ..Default::default() }).unwrap();
        assert_eq!(pts.len(), 2);
        for p in &pts {
            assert!(p.accepted);
            assert!(p.residual_log < 1e-12 && p.residual_mult < 1e-12);
            assert!((p.u[0].im.abs() - PI / 3.0).abs() < 1e-12 && p.u[0].re.abs() < 1e-12);
            assert!(!p.jacobian_singular);
        }
        // the conjugate point needs Log ε = -πi
        assert_eq!(pts[0].log_eps, -1);
        assert_eq!(pts[1].log_eps, 1);
    }

    #[test]
    fn branch_integer_example() {
        let u = [Complex64::new(0.0, 2.0 * PI / 3.0); 2];
        assert_eq!(branch_integer(&u, &LinForm::homogeneous(vec![1, 1])).unwrap(), 2);
        assert!(branch_integer(&[Complex64::new(0.0, 0.0)], &LinForm::homogeneous(vec![1])).is_err());
    }

    #[test]
    fn half_log_degenerate() {
        let h = half_log_point(&[Complex64::new(0.3, 0.1)], &LinForm::zero(1)).unwrap();
        assert!(h.point.is_none());
        let h = half_log_point(&[Complex64::new(0.0, PI / 3.0)], &LinForm::homogeneous(vec![1])).unwrap();
        let w = h.point.unwrap();
        assert!((w.log_z() - h.log).norm() < 1e-14);
    }

    #[test]
    fn family_matches_polynomial() {
        let t = family(-1, 2, Sign::Minus).unwrap();
        let pts = solve_variational(&t, &SolverConfig::default()).unwrap();
        let roots = solve_poly_1var(-1, 2, Sign::Minus).unwrap();
        assert_eq!(pts.len(), roots.len());
        assert!(matches!(solve_poly_1var(0, 0, Sign::Plus), Err(Error::DegenerateFamily)));
    }

    #[test]
    fn config_validation() {
        let bad = SolverConfig { starts: 0, ..Default::default() };
        assert!(matches!(solve_variational(&four_one(), &bad), Err(Error::Config(_))));
    }

    #[test]
    fn determinism() {
        let t = family(2, 3, Sign::Plus).unwrap();
        let cfg = SolverConfig { seed: 42, ..Default::default() };
        assert_eq!(solve_variational(&t, &cfg).unwrap(), solve_variational(&t, &cfg).unwrap());
    }
}
