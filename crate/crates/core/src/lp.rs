//! Exact rational simplex for small linear programs `max c·x s.t. A x ≤ b`
//! with free variables. Used for Newton polytope validation and lattice
//! point bounds, where a floating point answer could drop boundary points.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rat, x: Vec<Rat> },
    Unbounded,
    Infeasible,
}

pub fn rat(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    /// number of variable columns; the right hand side lives at index `ncols`
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Primal simplex with Bland's rule. Returns false if unbounded.
    fn optimize(&mut self, cost: &[Rat], allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut red = cost[j].clone();
                for (i, row) in self.rows.iter().enumerate() {
                    if !row[j].is_zero() {
                        red -= &cost[self.basis[i]] * &row[j];
                    }
                }
                if red.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, Rat)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[j].is_positive() {
                    let ratio = &row[self.ncols] / &row[j];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((i, _)) => self.pivot(i, j),
                None => return false,
            }
        }
    }
}

/// Maximize `c·x` subject to `A x ≤ b` over `x ∈ ℚ^n` (no sign constraints).
pub fn maximize(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    // columns: x+ (n), x- (n), slack (m), artificial (m)
    let nv = 2 * n + m;
    let ncols = nv + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Rat::zero(); ncols + 1];
        let flip = b[i].is_negative();
        let s = if flip { -Rat::one() } else { Rat::one() };
        for j in 0..n {
            row[j] = &s * &a[i][j];
            row[n + j] = -&s * &a[i][j];
        }
        row[2 * n + i] = s.clone();
        row[nv + i] = Rat::one();
        row[ncols] = &s * &b[i];
        rows.push(row);
    }
    let mut t = Tableau { rows, basis: (nv..nv + m).collect(), ncols };

    let mut cost1 = vec![Rat::zero(); ncols];
    for v in cost1.iter_mut().skip(nv) {
        *v = -Rat::one();
    }
    t.optimize(&cost1, &|_| true);
    if t.basis.iter().zip(&t.rows).any(|(&bv, row)| bv >= nv && !row[ncols].is_zero()) {
        return LpOutcome::Infeasible;
    }
    // drive remaining (zero valued) artificials out of the basis
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= nv {
            match (0..nv).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => {
                    t.pivot(i, j);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    let mut cost2 = vec![Rat::zero(); ncols];
    for j in 0..n {
        cost2[j] = c[j].clone();
        cost2[n + j] = -c[j].clone();
    }
    if !t.optimize(&cost2, &|j| j < nv) {
        return LpOutcome::Unbounded;
    }
    let mut val = vec![Rat::zero(); nv];
    for (i, &bv) in t.basis.iter().enumerate() {
        val[bv] = t.rows[i][ncols].clone();
    }
    let x: Vec<Rat> = (0..n).map(|j| &val[j] - &val[n + j]).collect();
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    LpOutcome::Optimal { value, x }
}

pub fn is_feasible(a: &[Vec<Rat>], b: &[Rat]) -> bool {
    let n = a.first().map_or(0, |r| r.len());
    !matches!(maximize(a, b, &vec![Rat::zero(); n]), LpOutcome::Infeasible)
}

/// Integer range `[ceil(min x_i), floor(max x_i)]` of every coordinate over
/// `{A x ≤ b}`. `Ok(None)` if infeasible, `Err(i)` if coordinate `i` is unbounded.
pub fn integer_box(a: &[Vec<Rat>], b: &[Rat], n: usize) -> Result<Option<Vec<(i64, i64)>>, usize> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut c = vec![Rat::zero(); n];
        c[i] = Rat::one();
        let hi = match maximize(a, b, &c) {
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => return Err(i),
            LpOutcome::Optimal { value, .. } => value.floor(),
        };
        c[i] = -Rat::one();
        let lo = match maximize(a, b, &c) {
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => return Err(i),
            LpOutcome::Optimal { value, .. } => -value.floor(),
        };
        let to_i = |r: Rat| -> i64 {
            use num_traits::ToPrimitive;
            r.to_integer().to_i64().unwrap_or(i64::MAX)
        };
        out.push((to_i(lo), to_i(hi)));
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: &[&[i64]]) -> Vec<Vec<Rat>> {
        v.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    fn v(x: &[i64]) -> Vec<Rat> {
        x.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn triangle() {
        // x ≥ 0, y ≥ 0, x + y ≤ 4; maximize 3x + 2y = 12
        let a = m(&[&[-1, 0], &[0, -1], &[1, 1]]);
        let b = v(&[0, 0, 4]);
        match maximize(&a, &b, &v(&[3, 2])) {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, rat(12));
                assert_eq!(x, v(&[4, 0]));
            }
            o => panic!("{o:?}"),
        }
        assert_eq!(integer_box(&a, &b, 2), Ok(Some(vec![(0, 4), (0, 4)])));
    }

    #[test]
    fn negative_rhs_and_free_variables() {
        // -5 ≤ x ≤ -2 (written as -x ≤ 5, x ≤ -2)
        let a = m(&[&[-1], &[1]]);
        let b = v(&[5, -2]);
        assert_eq!(integer_box(&a, &b, 1), Ok(Some(vec![(-5, -2)])));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = m(&[&[1], &[-1]]);
        assert_eq!(maximize(&a, &v(&[1, -2]), &v(&[1])), LpOutcome::Infeasible);
        let a = m(&[&[-1]]);
        assert_eq!(maximize(&a, &v(&[0]), &v(&[1])), LpOutcome::Unbounded);
        assert_eq!(integer_box(&a, &v(&[0]), 1), Err(0));
    }

    #[test]
    fn fractional_vertex() {
        // 2x ≤ 7 → floor 3
        let a = m(&[&[2], &[-2]]);
        assert_eq!(integer_box(&a, &v(&[7, 7]), 1), Ok(Some(vec![(-3, 3)])));
    }

    #[test]
    fn degenerate_redundant_rows() {
        let a = m(&[&[1, 1], &[1, 1], &[-1, 0], &[0, -1], &[2, 2]]);
        let b = v(&[3, 3, 0, 0, 6]);
        assert_eq!(integer_box(&a, &b, 2), Ok(Some(vec![(0, 3), (0, 3)])));
    }
}
