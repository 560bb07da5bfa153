//! Built-in terms: the figure-eight knot, the one-variable family and random batteries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Factor, LinForm, QTerm, QuadFactor, QuadForm, Sign, SpecialQTerm};
use crate::{Error, Result};

/// One-variable family `q^{a k(k+1)/2} ε^k (q)_k^b`, whose variational
/// equation is `ε z^a (1 - z)^b = 1`. Negative `b` puts `(q)_k` in the denominator.
pub fn family(a: i64, b: i64, eps: Sign) -> Result<QTerm> {
    if a == 0 && b == 0 {
        return Err(Error::DegenerateFamily);
    }
    let sign = if b >= 0 { Sign::Plus } else { Sign::Minus };
    let factors = (0..b.abs()).map(|_| Factor::new(LinForm::homogeneous(vec![1]), sign)).collect();
    QTerm::new(QuadForm::new(vec![vec![a]], vec![a])?, LinForm::homogeneous(vec![1]), eps, factors)
}

/// `(-1)^k q^{-k(k+1)/2} (q)_k²`, the summand of the Kashaev invariant of `4₁`.
pub fn four_one() -> QTerm {
    family(-1, 2, Sign::Minus).expect("valid family")
}

/// `q^{-nk} (q)_{n+k}/(q)_n · (q)_{n-1}/(q)_{n-1-k}`, `0 ≤ k ≤ n - 1`.
///
/// At `q = e^{2πi/n}` this is `|(q)_k|²`, so its sum is the Kashaev invariant of `4₁`.
pub fn four_one_special() -> SpecialQTerm {
    let lf = |c: [i64; 2], k: i64| LinForm::new(c.to_vec(), k);
    SpecialQTerm::new(
        QuadForm::new(vec![vec![0, -1], vec![-1, 0]], vec![0, 0]).expect("valid form"),
        LinForm::zero(2),
        Sign::Plus,
        vec![
            QuadFactor::new(lf([0, 0], 0), lf([0, 0], 0), lf([1, 1], 0), lf([1, 0], 0)),
            QuadFactor::new(lf([0, 0], 0), lf([0, 0], 0), lf([1, 0], -1), lf([1, -1], -1)),
        ],
    )
    .expect("valid polytope")
}

/// Random q-term with `r ≤ max_r` and all coefficients in `[-3, 3]`.
pub fn random_qterm(rng: &mut ChaCha8Rng, max_r: usize) -> QTerm {
    let dim = rng.gen_range(1..=max_r + 1);
    let mut m = vec![vec![0i64; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let v = rng.gen_range(-3..=3);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    let lin: Vec<i64> = (0..dim)
        .map(|i| {
            let mut v: i64 = rng.gen_range(-3..=3);
            if (v - m[i][i]).rem_euclid(2) != 0 {
                v += if v >= 3 { -1 } else { 1 };
            }
            v
        })
        .collect();
    let q = QuadForm::new(m, lin).expect("parity fixed above");
    let l = LinForm::homogeneous((0..dim).map(|_| rng.gen_range(-3..=3)).collect());
    let sign = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
    let eps = sign(rng);
    let nf = rng.gen_range(1..=3);
    let mut factors = Vec::with_capacity(nf);
    while factors.len() < nf {
        let c: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3..=3)).collect();
        if c.iter().all(|&x| x == 0) {
            continue;
        }
        factors.push(Factor::new(LinForm::homogeneous(c), sign(rng)));
    }
    QTerm::new(q, l, eps, factors).expect("dimensions consistent")
}

/// Deterministic battery of `count` random q-terms with `r ≤ 2`.
pub fn battery(seed: u64, count: usize) -> Vec<QTerm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_qterm(&mut rng, 2)).collect()
}

pub const BATTERY_SEED: u64 = 20_240_917;
pub const BATTERY_SIZE: usize = 60;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LaurentPoly;

    #[test]
    fn four_one_term_values() {
        // Σ_{k<n} term at q = e^{2πi/n}: 1, 5, 13, 27
        let t = four_one();
        for (n, want) in [(1u64, 1.0), (2, 5.0), (3, 13.0), (4, 27.0)] {
            let mut s = num_complex::Complex64::new(0.0, 0.0);
            for k in 0..n as i64 {
                let v = t.eval_exact(&[k]).unwrap();
                s += v.num.eval_root_of_unity(n) / v.den.eval_root_of_unity(n);
            }
            assert!((s.re - want).abs() < 1e-10 && s.im.abs() < 1e-10, "n = {n}: {s}");
        }
    }

    #[test]
    fn special_term_support() {
        let t = four_one_special();
        assert_eq!(t.polytope_points(5).unwrap().len(), 5);
        assert_eq!(t.polytope_points(1).unwrap(), vec![vec![0]]);
        let v = t.eval_exact(&[1, 0]).unwrap();
        assert_eq!(v, LaurentPoly::one());
    }

    #[test]
    fn battery_is_reproducible() {
        assert_eq!(battery(1, 5), battery(1, 5));
        assert!(battery(1, 50).iter().all(|t| t.r() <= 2));
    }
}
