use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::bloch::potential;
use crate::dilog::{log_principal, phi};
use crate::model::{pow_i64, QTerm, Sign};
use crate::variational::var_residual;
use crate::{Error, Result};

fn floor_mul(w: Ratio<i64>, n: i64) -> Result<i64> {
    let p = (*w.numer() as i128) * n as i128;
    i64::try_from(p.div_euclid(*w.denom() as i128)).map_err(|_| Error::Overflow("⌊wN⌋".into()))
}

fn in_unit_interval(w: Ratio<i64>) -> bool {
    *w.numer() > 0 && w.numer() < w.denom()
}

/// `Σ_{k=1}^{m} Log(1 - e^{2πik/N})`, `m < N`.
fn log_qfactorial_at_root(m: i64, big_n: i64) -> Complex64 {
    (1..=m)
        .map(|k| log_principal(Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 2.0 * PI * k as f64 / big_n as f64)))
        .sum()
}

/// `|(1/N) Σ_{k=1}^{⌊αN⌋} Log(1 - e^{2πik/N}) - Φ(e^{2πiα})|`.
pub fn qfactorial_asymptotics_defect(alpha: Ratio<i64>, big_n: i64) -> Result<f64> {
    if !in_unit_interval(alpha) {
        return Err(Error::Domain(format!("α = {alpha} is not in (0, 1)")));
    }
    if big_n < 10 {
        return Err(Error::Domain(format!("N = {big_n} < 10")));
    }
    let m = floor_mul(alpha, big_n)?;
    let lhs = log_qfactorial_at_root(m, big_n) / big_n as f64;
    let a = *alpha.numer() as f64 / *alpha.denom() as f64;
    let rhs = phi(Complex64::from_polar(1.0, 2.0 * PI * a)).0;
    Ok((lhs - rhs).norm())
}

/// `|Re (1/N) log t_{⌊wN⌋}(e^{2πi/N}) - Re V_t(e^{2πiw})|`.
///
/// Only real parts are compared: the imaginary parts are defined modulo `2πi/N`
/// on the left and modulo `ℤ(1)` on the right.
pub fn empirical_potential_defect(t: &QTerm, w: &[Ratio<i64>], big_n: i64) -> Result<f64> {
    if w.len() != t.dim() {
        return Err(Error::Domain(format!("expected {} weights", t.dim())));
    }
    if let Some(x) = w.iter().find(|x| !in_unit_interval(**x)) {
        return Err(Error::Domain(format!("weight {x} is not in (0, 1)")));
    }
    if big_n < 1 {
        return Err(Error::Domain("N must be positive".into()));
    }
    let k: Vec<i64> = w.iter().map(|&x| floor_mul(x, big_n)).collect::<Result<_>>()?;
    let mut lhs = 0.0;
    for (j, f) in t.factors().iter().enumerate() {
        let a = f.form.eval(&k)?;
        if a < 0 {
            return Err(Error::Admissibility(format!("A_{j}(⌊wN⌋) = {a} < 0")));
        }
        if a >= big_n {
            return Err(Error::Domain(format!("(q)_{a} vanishes at a primitive {big_n}-th root")));
        }
        lhs += log_qfactorial_at_root(a, big_n).re * f.sign.as_i64() as f64;
    }
    lhs /= big_n as f64;
    let u: Vec<Complex64> = w
        .iter()
        .map(|x| Complex64::new(0.0, 2.0 * PI * *x.numer() as f64 / *x.denom() as f64))
        .collect();
    let v = potential(t, &u)?;
    Ok((lhs - v.0.re).abs())
}

/// Exact ratio `t_{k+e_i}(q) / t_k(q)` written through `z_m = q^{k_m}`.
///
/// Every factor `(q)_{A+v}/(q)_A` becomes `Π_{s=1}^{v}(1 - z^A q^s)` (or the
/// reciprocal product for `v < 0`), so the ratio is a rational function of
/// `(z, q)` whose value at `q = 1` is the `i`-th variational equation.
pub fn term_ratio(t: &QTerm, i: usize, z: &[Complex64], q: Complex64) -> Result<Complex64> {
    if i >= t.dim() || z.len() != t.dim() {
        return Err(Error::Domain("index or point has the wrong dimension".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let qm = t.q();
    // Q(k + e_i) - Q(k) = Σ_m Q_im k_m + (Q_ii + l_i)/2, l the doubled linear part
    let mut r = t.q().row(i).monomial(z);
    let shift = (qm.entry(i, i) + qm.linear_twice()[i]) / 2;
    r *= pow_i64(q, shift);
    if t.epsilon() == Sign::Minus && t.l().coeff(i).rem_euclid(2) == 1 {
        r = -r;
    }
    for f in t.factors() {
        let v = f.form.coeff(i);
        if v == 0 {
            continue;
        }
        let x = f.form.monomial(z) * pow_i64(q, f.form.constant());
        let mut p = one;
        if v > 0 {
            for s in 1..=v {
                p *= one - x * pow_i64(q, s);
            }
        } else {
            for s in 0..-v {
                p /= one - x * pow_i64(q, -s);
            }
        }
        r *= if f.sign == Sign::Plus { p } else { p.inv() };
    }
    Ok(r)
}

/// `max_i |R_i(z, q → 1) - 1|`, the variational equations re-derived from the
/// term ratios of Laplace's method.
pub fn laplace_ratio_check(t: &QTerm, z: &[Complex64]) -> Result<f64> {
    // validates the domain the same way the multiplicative residual does
    var_residual(t, z)?;
    let one = Complex64::new(1.0, 0.0);
    let mut worst = 0.0f64;
    for i in 0..t.dim() {
        worst = worst.max((term_ratio(t, i, z, one)? - one).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{family, four_one};
    use crate::model::{Factor, LinForm, QuadForm};

    #[test]
    fn qfactorial_defect_decreases() {
        for a in [(1, 6), (1, 4), (1, 3), (1, 2), (2, 3)] {
            let alpha = Ratio::new(a.0, a.1);
            let d1 = qfactorial_asymptotics_defect(alpha, 1000).unwrap();
            let d2 = qfactorial_asymptotics_defect(alpha, 2000).unwrap();
            assert!(d2 < d1 && d1.is_finite());
        }
        assert!(qfactorial_asymptotics_defect(Ratio::new(1, 2), 4000).unwrap() < 5e-3);
        assert!(qfactorial_asymptotics_defect(Ratio::new(3, 2), 100).is_err());
    }

    #[test]
    fn empirical_potential() {
        let t = four_one();
        let w = [Ratio::new(1, 3)];
        let d = empirical_potential_defect(&t, &w, 2000).unwrap();
        assert!(d < 1e-2 && d < empirical_potential_defect(&t, &w, 1000).unwrap());
        let trivial = QTerm::new(QuadForm::zero(1), LinForm::homogeneous(vec![1]), Sign::Plus, vec![]).unwrap();
        assert_eq!(empirical_potential_defect(&trivial, &w, 100).unwrap(), 0.0);
        let sixth = [Ratio::new(1, 6)];
        let d: Vec<f64> =
            [500, 1000, 2000, 4000].iter().map(|&n| empirical_potential_defect(&t, &sixth, n).unwrap()).collect();
        assert!(d.windows(2).all(|p| p[1] < p[0]), "{d:?}");
    }

    #[test]
    fn ratio_matches_term_values() {
        // independent check of the ratio formula against actual term values
        let t = QTerm::new(
            QuadForm::new(vec![vec![1, -1], vec![-1, 2]], vec![1, 0]).unwrap(),
            LinForm::homogeneous(vec![1, 0]),
            Sign::Minus,
            vec![
                Factor::new(LinForm::new(vec![1, 1], 1), Sign::Plus),
                Factor::new(LinForm::new(vec![2, -1], 3), Sign::Minus),
            ],
        )
        .unwrap();
        let q = Complex64::new(0.6, 0.3);
        let k = [3i64, 2];
        let z: Vec<Complex64> = k.iter().map(|&x| q.powi(x as i32)).collect();
        for i in 0..2 {
            let mut k1 = k;
            k1[i] += 1;
            let want = t.eval_at(&k1, q).unwrap() / t.eval_at(&k, q).unwrap();
            let got = term_ratio(&t, i, &z, q).unwrap();
            assert!((want - got).norm() < 1e-10 * want.norm(), "{i}: {want} vs {got}");
        }
    }

    #[test]
    fn laplace_at_solutions() {
        let t = four_one();
        let z = [Complex64::from_polar(1.0, PI / 3.0)];
        assert!(laplace_ratio_check(&t, &z).unwrap() < 1e-10);
        assert!(laplace_ratio_check(&t, &[Complex64::new(0.3, 0.4)]).unwrap() > 1e-2);
        let h = family(-1, 1, Sign::Plus).unwrap();
        assert!(laplace_ratio_check(&h, &[Complex64::new(0.5, 0.0)]).unwrap() < 1e-12);
    }
}
