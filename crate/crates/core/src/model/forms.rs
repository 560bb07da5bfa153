use num_complex::Complex64;

use crate::{Error, Result};

/// Sign `±1`, used for ε and for the factor exponents ε_j.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// `self^e`.
    pub fn pow(self, e: i64) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => {
                if e.rem_euclid(2) == 0 {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

fn to_i64(v: i128, what: &str) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow(what.to_string()))
}

/// Integer affine form `k ↦ Σ v_i k_i + v_c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinForm {
    coeffs: Vec<i64>,
    constant: i64,
}

impl LinForm {
    pub fn new(coeffs: Vec<i64>, constant: i64) -> Self {
        LinForm { coeffs, constant }
    }

    pub fn homogeneous(coeffs: Vec<i64>) -> Self {
        LinForm { coeffs, constant: 0 }
    }

    pub fn zero(dim: usize) -> Self {
        LinForm { coeffs: vec![0; dim], constant: 0 }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs[i]
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0 && self.is_homogeneous_zero()
    }

    /// True when every variable coefficient vanishes.
    pub fn is_homogeneous_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn eval(&self, k: &[i64]) -> Result<i64> {
        debug_assert_eq!(k.len(), self.coeffs.len());
        let mut acc = self.constant as i128;
        for (&c, &x) in self.coeffs.iter().zip(k) {
            acc += c as i128 * x as i128;
        }
        to_i64(acc, "linear form")
    }

    /// Homogeneous part evaluated at complex (log) coordinates.
    pub fn eval_hom(&self, u: &[Complex64]) -> Complex64 {
        self.coeffs
            .iter()
            .zip(u)
            .map(|(&c, &x)| x * c as f64)
            .sum()
    }

    /// Monomial `Π z_i^{v_i}` (constant ignored).
    pub fn monomial(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (&c, &x) in self.coeffs.iter().zip(z) {
            if c != 0 {
                acc *= x.powi(c as i32);
            }
        }
        acc
    }

    /// Drop the variable at `idx`, folding `value · v_idx` into the constant.
    pub fn restrict(&self, idx: usize, value: i64) -> LinForm {
        let mut coeffs = self.coeffs.clone();
        let c = coeffs.remove(idx);
        LinForm { coeffs, constant: self.constant + c * value }
    }
}

/// Integer-valued quadratic form `Q(k) = ½ kᵀ M k + ½ l·k`.
///
/// The linear part is stored doubled (`l`), so integrality of `Q` on `ℤ^{r+1}`
/// is the parity condition `l_i ≡ M_ii (mod 2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadForm {
    matrix: Vec<Vec<i64>>,
    linear_twice: Vec<i64>,
}

impl QuadForm {
    pub fn new(matrix: Vec<Vec<i64>>, linear_twice: Vec<i64>) -> Result<Self> {
        let n = matrix.len();
        if linear_twice.len() != n {
            return Err(Error::InvalidTerm(format!(
                "linear part has length {}, matrix is {n}x{n}",
                linear_twice.len()
            )));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTerm(format!("matrix row {i} has length {}", row.len())));
            }
        }
        for i in 0..n {
            for j in 0..i {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::InvalidTerm(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
            if (linear_twice[i] - matrix[i][i]).rem_euclid(2) != 0 {
                return Err(Error::InvalidTerm(format!(
                    "Q is not integer valued: linear coefficient {i} has the wrong parity"
                )));
            }
        }
        Ok(QuadForm { matrix, linear_twice })
    }

    pub fn zero(dim: usize) -> Self {
        QuadForm { matrix: vec![vec![0; dim]; dim], linear_twice: vec![0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.matrix[i][j]
    }

    pub fn linear_twice(&self) -> &[i64] {
        &self.linear_twice
    }

    pub fn eval(&self, k: &[i64]) -> Result<i64> {
        let n = self.dim();
        let mut acc: i128 = 0;
        for i in 0..n {
            acc += self.linear_twice[i] as i128 * k[i] as i128;
            for j in 0..n {
                acc += self.matrix[i][j] as i128 * k[i] as i128 * k[j] as i128;
            }
        }
        debug_assert!(acc % 2 == 0);
        to_i64(acc / 2, "quadratic form")
    }

    /// `½ uᵀ M u` at complex coordinates.
    pub fn eval_hom(&self, u: &[Complex64]) -> Complex64 {
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                if self.matrix[i][j] != 0 {
                    acc += u[i] * u[j] * self.matrix[i][j] as f64;
                }
            }
        }
        acc * 0.5
    }

    /// Row `i` of the matrix as a homogeneous form.
    pub fn row(&self, i: usize) -> LinForm {
        LinForm::homogeneous(self.matrix[i].clone())
    }

    /// Fix variable `idx` to `value`; returns the form in the remaining
    /// variables and the constant that was split off.
    pub fn restrict(&self, idx: usize, value: i64) -> (QuadForm, i64) {
        let n = self.dim();
        let keep: Vec<usize> = (0..n).filter(|&i| i != idx).collect();
        let matrix: Vec<Vec<i64>> =
            keep.iter().map(|&i| keep.iter().map(|&j| self.matrix[i][j]).collect()).collect();
        let linear_twice = keep
            .iter()
            .map(|&i| self.linear_twice[i] + 2 * self.matrix[i][idx] * value)
            .collect();
        let constant = (self.matrix[idx][idx] * value * value + self.linear_twice[idx] * value) / 2;
        (QuadForm { matrix, linear_twice }, constant)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_parity() {
        assert!(QuadForm::new(vec![vec![1]], vec![1]).is_ok());
        assert!(QuadForm::new(vec![vec![1]], vec![0]).is_err());
        assert!(QuadForm::new(vec![vec![0, 1], vec![2, 0]], vec![0, 0]).is_err());
    }

    #[test]
    fn quad_eval_triangular() {
        // k(k+1)/2
        let q = QuadForm::new(vec![vec![1]], vec![1]).unwrap();
        for k in 0..10 {
            assert_eq!(q.eval(&[k]).unwrap(), k * (k + 1) / 2);
        }
    }

    #[test]
    fn restrict_agrees_with_eval() {
        let q = QuadForm::new(vec![vec![2, -1, 0], vec![-1, 1, 3], vec![0, 3, -2]], vec![0, 1, 2])
            .unwrap();
        let (r, c) = q.restrict(0, 5);
        for a in -3..4 {
            for b in -3..4 {
                assert_eq!(q.eval(&[5, a, b]).unwrap(), r.eval(&[a, b]).unwrap() + c);
            }
        }
        let l = LinForm::new(vec![1, -2, 3], 4);
        assert_eq!(l.restrict(0, 5).eval(&[1, 1]).unwrap(), l.eval(&[5, 1, 1]).unwrap());
    }

    #[test]
    fn overflow_is_reported() {
        let l = LinForm::homogeneous(vec![i64::MAX, i64::MAX]);
        assert!(matches!(l.eval(&[1, 1]), Err(Error::Overflow(_))));
    }
}
