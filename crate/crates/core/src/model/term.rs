use num_bigint::BigInt;
use num_complex::Complex64;

use super::forms::{LinForm, QuadForm, Sign};
use super::laurent::{LaurentPoly, PochhammerProduct};
use crate::lp::{integer_box, is_feasible, rat, Rat};
use crate::{Error, Result};

/// One factor `(q)_{A(k)}^{ε}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub form: LinForm,
    pub sign: Sign,
}

impl Factor {
    pub fn new(form: LinForm, sign: Sign) -> Self {
        Factor { form, sign }
    }
}

/// A q-term `q^{Q(k)} ε^{L(k)} Π_j (q)_{A_j(k)}^{ε_j}` in `r + 1` summation variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QTerm {
    q: QuadForm,
    l: LinForm,
    epsilon: Sign,
    factors: Vec<Factor>,
}

/// Numerator / denominator pair for an exact q-term value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QRational {
    pub num: LaurentPoly,
    pub den: LaurentPoly,
}

fn check_dim(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::InvalidTerm(format!("{what} has {got} variables, expected {want}")));
    }
    Ok(())
}

impl QTerm {
    pub fn new(q: QuadForm, l: LinForm, epsilon: Sign, factors: Vec<Factor>) -> Result<Self> {
        let dim = q.dim();
        if dim == 0 {
            return Err(Error::InvalidTerm("a q-term needs at least one variable".into()));
        }
        check_dim("L", l.dim(), dim)?;
        for (j, f) in factors.iter().enumerate() {
            check_dim(&format!("factor {j}"), f.form.dim(), dim)?;
        }
        Ok(QTerm { q, l, epsilon, factors })
    }

    /// Number of summation variables `r + 1`.
    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn r(&self) -> usize {
        self.dim() - 1
    }

    pub fn q(&self) -> &QuadForm {
        &self.q
    }

    pub fn l(&self) -> &LinForm {
        &self.l
    }

    pub fn epsilon(&self) -> Sign {
        self.epsilon
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_admissible(&self, k: &[i64]) -> Result<bool> {
        for f in &self.factors {
            if f.form.eval(k)? < 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn factor_values(&self, k: &[i64]) -> Result<Vec<u64>> {
        check_dim("index", k.len(), self.dim())?;
        self.factors
            .iter()
            .enumerate()
            .map(|(j, f)| {
                let v = f.form.eval(k)?;
                if v < 0 {
                    Err(Error::Admissibility(format!("A_{j}(k) = {v} < 0")))
                } else {
                    Ok(v as u64)
                }
            })
            .collect()
    }

    /// Exact value as a ratio of Laurent polynomials.
    pub fn eval_exact(&self, k: &[i64]) -> Result<QRational> {
        let vals = self.factor_values(k)?;
        let mut num = PochhammerProduct::new();
        let mut den = PochhammerProduct::new();
        for (f, &v) in self.factors.iter().zip(&vals) {
            match f.sign {
                Sign::Plus => num.times_factorial(v),
                Sign::Minus => den.times_factorial(v),
            }
        }
        let sign = self.epsilon.pow(self.l.eval(k)?);
        let num = num.to_poly()?.shift(self.q.eval(k)?).scale(&BigInt::from(sign));
        Ok(QRational { num, den: den.to_poly()? })
    }

    /// Value at a complex `q` (Pochhammer symbols by direct products).
    pub fn eval_at(&self, k: &[i64], q: Complex64) -> Result<Complex64> {
        let vals = self.factor_values(k)?;
        let mut acc = Complex64::new(self.epsilon.pow(self.l.eval(k)?) as f64, 0.0);
        acc *= pow_i64(q, self.q.eval(k)?);
        for (f, &v) in self.factors.iter().zip(&vals) {
            let p = pochhammer(q, v);
            acc = match f.sign {
                Sign::Plus => acc * p,
                Sign::Minus => acc / p,
            };
        }
        Ok(acc)
    }
}

pub(crate) fn pow_i64(z: Complex64, e: i64) -> Complex64 {
    if let Ok(e32) = i32::try_from(e) {
        z.powi(e32)
    } else {
        z.powf(e as f64)
    }
}

/// `(q; q)_n` at a complex point.
pub fn pochhammer(q: Complex64, n: u64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut qj = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        qj *= q;
        acc *= Complex64::new(1.0, 0.0) - qj;
    }
    acc
}

/// `[B; C]_q · (q)_D / (q)_E`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadFactor {
    pub b: LinForm,
    pub c: LinForm,
    pub d: LinForm,
    pub e: LinForm,
}

impl QuadFactor {
    pub fn new(b: LinForm, c: LinForm, d: LinForm, e: LinForm) -> Self {
        QuadFactor { b, c, d, e }
    }

    fn forms(&self) -> [&LinForm; 4] {
        [&self.b, &self.c, &self.d, &self.e]
    }

    /// The four forms whose non-negativity is admissibility: `B-C, C, D-E, E`.
    fn constraint_forms(&self) -> [LinForm; 4] {
        [diff(&self.b, &self.c), self.c.clone(), diff(&self.d, &self.e), self.e.clone()]
    }
}

fn diff(a: &LinForm, b: &LinForm) -> LinForm {
    LinForm::new(
        a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x - y).collect(),
        a.constant() - b.constant(),
    )
}

/// Special q-term in `(n, k')`, `k' ∈ ℕ^r`, built from q-binomials and
/// factorial ratios. Its support in `k'` for fixed `n` is the lattice points
/// of `n · P_t` (up to the affine constants), with `P_t` a polytope.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpecialQTerm {
    q: QuadForm,
    l: LinForm,
    epsilon: Sign,
    quads: Vec<QuadFactor>,
}

impl SpecialQTerm {
    pub fn new(q: QuadForm, l: LinForm, epsilon: Sign, quads: Vec<QuadFactor>) -> Result<Self> {
        let dim = q.dim();
        if dim == 0 {
            return Err(Error::InvalidTerm("a special q-term needs the variable n".into()));
        }
        check_dim("L", l.dim(), dim)?;
        for (j, qf) in quads.iter().enumerate() {
            for (name, f) in ["B", "C", "D", "E"].iter().zip(qf.forms()) {
                check_dim(&format!("quad {j} {name}"), f.dim(), dim)?;
            }
        }
        let t = SpecialQTerm { q, l, epsilon, quads };
        t.validate_polytope()?;
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    /// Dimension of `k'`.
    pub fn r(&self) -> usize {
        self.dim() - 1
    }

    pub fn q(&self) -> &QuadForm {
        &self.q
    }

    pub fn l(&self) -> &LinForm {
        &self.l
    }

    pub fn epsilon(&self) -> Sign {
        self.epsilon
    }

    pub fn quads(&self) -> &[QuadFactor] {
        &self.quads
    }

    /// Homogeneous system `P_t = {w : all constraint forms at (1, w) ≥ 0}` as `A w ≤ b`.
    fn polytope_system(&self) -> (Vec<Vec<Rat>>, Vec<Rat>) {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for qf in &self.quads {
            for f in qf.constraint_forms() {
                a.push(f.coeffs()[1..].iter().map(|&c| rat(-c)).collect());
                b.push(rat(f.coeff(0)));
            }
        }
        (a, b)
    }

    fn validate_polytope(&self) -> Result<()> {
        let r = self.r();
        let (a, b) = self.polytope_system();
        if r == 0 {
            return if b.iter().all(|x| *x >= rat(0)) {
                Ok(())
            } else {
                Err(Error::Polytope("empty".into()))
            };
        }
        if a.is_empty() {
            return Err(Error::Polytope("no constraints, polytope is unbounded".into()));
        }
        if !is_feasible(&a, &b) {
            return Err(Error::Polytope("empty".into()));
        }
        match integer_box(&a, &b, r) {
            Ok(_) => Ok(()),
            Err(i) => Err(Error::Polytope(format!("unbounded in coordinate {}", i + 1))),
        }
    }

    pub fn is_admissible(&self, k: &[i64]) -> Result<bool> {
        check_dim("index", k.len(), self.dim())?;
        for qf in &self.quads {
            for f in qf.constraint_forms() {
                if f.eval(k)? < 0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// All `k'` with `(n, k')` admissible and `k' ≥ 0`, in lexicographic order.
    pub fn polytope_points(&self, n: i64) -> Result<Vec<Vec<i64>>> {
        let r = self.r();
        if r == 0 {
            return Ok(if self.is_admissible(&[n])? { vec![vec![]] } else { vec![] });
        }
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for qf in &self.quads {
            for f in qf.constraint_forms() {
                a.push(f.coeffs()[1..].iter().map(|&c| rat(-c)).collect::<Vec<_>>());
                b.push(rat(f.coeff(0)) * rat(n) + rat(f.constant()));
            }
        }
        for i in 0..r {
            let mut row = vec![rat(0); r];
            row[i] = rat(-1);
            a.push(row);
            b.push(rat(0));
        }
        let bounds = match integer_box(&a, &b, r) {
            Ok(Some(bx)) => bx,
            Ok(None) => return Ok(vec![]),
            Err(i) => return Err(Error::Polytope(format!("unbounded in coordinate {}", i + 1))),
        };
        let mut out = Vec::new();
        let mut cur: Vec<i64> = bounds.iter().map(|b| b.0).collect();
        if bounds.iter().any(|(lo, hi)| lo > hi) {
            return Ok(out);
        }
        let mut k = vec![n];
        k.extend(&cur);
        loop {
            k[1..].copy_from_slice(&cur);
            if self.is_admissible(&k)? {
                out.push(cur.clone());
            }
            // odometer increment, last coordinate fastest
            let mut i = r;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if cur[i] < bounds[i].1 {
                    cur[i] += 1;
                    for (j, c) in cur.iter_mut().enumerate().skip(i + 1) {
                        *c = bounds[j].0;
                    }
                    break;
                }
            }
        }
    }

    /// Exact value at an admissible index `k = (n, k')`.
    pub fn eval_exact(&self, k: &[i64]) -> Result<LaurentPoly> {
        if !self.is_admissible(k)? {
            return Err(Error::Admissibility(format!("{k:?} violates B ≥ C ≥ 0 or D ≥ E ≥ 0")));
        }
        let mut prod = PochhammerProduct::new();
        for qf in &self.quads {
            let [b, c, d, e] = qf.forms().map(|f| f.eval(k));
            let (b, c, d, e) = (b? as u64, c? as u64, d? as u64, e? as u64);
            prod.times_factorial(b);
            prod.over_factorial(c);
            prod.over_factorial(b - c);
            prod.times_factorial(d);
            prod.over_factorial(e);
        }
        let sign = self.epsilon.pow(self.l.eval(k)?);
        Ok(prod.to_poly()?.shift(self.q.eval(k)?).scale(&BigInt::from(sign)))
    }

    /// The same summand written as a plain q-term:
    /// `[B;C] ↦ (q)_B (q)_C^{-1} (q)_{B-C}^{-1}` and `(q)_D/(q)_E ↦ (q)_D (q)_E^{-1}`.
    pub fn to_qterm(&self) -> QTerm {
        let mut factors = Vec::new();
        for qf in &self.quads {
            factors.push(Factor::new(qf.b.clone(), Sign::Plus));
            factors.push(Factor::new(qf.c.clone(), Sign::Minus));
            factors.push(Factor::new(diff(&qf.b, &qf.c), Sign::Minus));
            factors.push(Factor::new(qf.d.clone(), Sign::Plus));
            factors.push(Factor::new(qf.e.clone(), Sign::Minus));
        }
        let factors = factors.into_iter().filter(|f| !f.form.is_zero()).collect();
        QTerm::new(self.q.clone(), self.l.clone(), self.epsilon, factors)
            .expect("dimensions already validated")
    }

    /// The q-term in `k'` alone that governs the sum at `q = e^{2πi/n}`.
    ///
    /// There `z_0 = qⁿ = 1`, so only the `k'` parts of `Q`, `L` and the factors
    /// survive; factors constant in `k'` drop out. `None` when `r = 0`.
    pub fn fiber_qterm(&self) -> Option<QTerm> {
        let r = self.r();
        if r == 0 {
            return None;
        }
        let m = self.q.matrix();
        let matrix: Vec<Vec<i64>> = (1..=r).map(|i| (1..=r).map(|j| m[i][j]).collect()).collect();
        let diag: Vec<i64> = (0..r).map(|i| matrix[i][i]).collect();
        let q = QuadForm::new(matrix, diag).expect("diagonal parity holds");
        let l = LinForm::homogeneous(self.l.coeffs()[1..].to_vec());
        let factors = self
            .to_qterm()
            .factors
            .into_iter()
            .map(|f| Factor::new(LinForm::homogeneous(f.form.coeffs()[1..].to_vec()), f.sign))
            .filter(|f| !f.form.is_homogeneous_zero())
            .collect();
        Some(QTerm::new(q, l, self.epsilon, factors).expect("dimensions consistent"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::laurent::{q_binomial, q_factorial};

    fn lf(c: &[i64], k: i64) -> LinForm {
        LinForm::new(c.to_vec(), k)
    }

    /// Σ_k [n;k]: polytope 0 ≤ w ≤ 1.
    fn binom_sum() -> SpecialQTerm {
        SpecialQTerm::new(
            QuadForm::zero(2),
            LinForm::zero(2),
            Sign::Plus,
            vec![QuadFactor::new(lf(&[1, 0], 0), lf(&[0, 1], 0), lf(&[0, 0], 0), lf(&[0, 0], 0))],
        )
        .unwrap()
    }

    #[test]
    fn polytope_validation() {
        assert!(binom_sum().polytope_points(3).unwrap().len() == 4);
        // only C ≥ 0: unbounded
        let unb = SpecialQTerm::new(
            QuadForm::zero(2),
            LinForm::zero(2),
            Sign::Plus,
            vec![QuadFactor::new(lf(&[0, 2], 0), lf(&[0, 1], 0), lf(&[0, 0], 0), lf(&[0, 0], 0))],
        );
        assert!(matches!(unb, Err(Error::Polytope(_))));
        // B = -n: empty
        let empty = SpecialQTerm::new(
            QuadForm::zero(2),
            LinForm::zero(2),
            Sign::Plus,
            vec![QuadFactor::new(lf(&[-1, 0], 0), lf(&[0, 1], 0), lf(&[0, 0], 0), lf(&[0, 0], 0))],
        );
        assert!(matches!(empty, Err(Error::Polytope(_))));
    }

    #[test]
    fn binomial_sum_is_rogers_szego_at_one() {
        let t = binom_sum();
        for n in 0..8 {
            let mut s = LaurentPoly::zero();
            for kp in t.polytope_points(n).unwrap() {
                let v = t.eval_exact(&[n, kp[0]]).unwrap();
                assert_eq!(v, q_binomial(n as u64, kp[0] as u64));
                s += &v;
            }
            let total: BigInt = s.terms().map(|(_, c)| c.clone()).sum();
            assert_eq!(total, BigInt::from(1u64 << n));
        }
    }

    #[test]
    fn qterm_exact_and_numeric_agree() {
        let t = QTerm::new(
            QuadForm::new(vec![vec![1, 0], vec![0, 2]], vec![1, 0]).unwrap(),
            LinForm::homogeneous(vec![1, 1]),
            Sign::Minus,
            vec![
                Factor::new(lf(&[1, 1], 0), Sign::Plus),
                Factor::new(lf(&[1, 0], 0), Sign::Minus),
            ],
        )
        .unwrap();
        let q = Complex64::new(0.3, 0.4);
        let k = [3, 2];
        let ex = t.eval_exact(&k).unwrap();
        let val = ex.num.eval(q) / ex.den.eval(q);
        assert!((val - t.eval_at(&k, q).unwrap()).norm() < 1e-12);
        assert_eq!(ex.den, q_factorial(3));
        assert!(t.eval_exact(&[-2, 0]).is_err());
    }

    #[test]
    fn conversion_preserves_values() {
        let t = binom_sum();
        let qt = t.to_qterm();
        let ex = qt.eval_exact(&[6, 2]).unwrap();
        assert_eq!(ex.num, &t.eval_exact(&[6, 2]).unwrap() * &ex.den);
    }
}
