use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Sparse Laurent polynomial in `q` with arbitrary precision integer coefficients.
///
/// Zero coefficients are never stored, so structural equality is polynomial equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(0, 1)
    }

    pub fn monomial(exp: i64, coeff: impl Into<BigInt>) -> Self {
        let mut p = LaurentPoly::zero();
        p.add_term(exp, coeff.into());
        p
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = LaurentPoly::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    pub fn add_term(&mut self, exp: i64, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Multiply by `q^e`.
    pub fn shift(&self, e: i64) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(&k, c)| (k + e, c.clone())).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(&k, v)| (k, v * c)).collect() }
    }

    /// Sum of absolute values of the coefficients.
    pub fn norm1(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Evaluate at an arbitrary complex point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|(&e, c)| z.powi(e as i32) * big_to_f64(c)).sum()
    }

    /// Evaluate at `e^{2πi/n}`.
    ///
    /// Exponents are reduced mod `n` first and the buckets summed exactly, so the
    /// only rounding is in the final `n`-term sum.
    pub fn eval_root_of_unity(&self, n: u64) -> Complex64 {
        assert!(n > 0, "root of unity order must be positive");
        let mut buckets: BTreeMap<u64, BigInt> = BTreeMap::new();
        for (&e, c) in &self.terms {
            *buckets.entry(e.rem_euclid(n as i64) as u64).or_default() += c;
        }
        buckets
            .iter()
            .map(|(&r, c)| Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64) * big_to_f64(c))
            .sum()
    }

    fn from_dense(d: Dense, shift: i64) -> Self {
        let mut p = LaurentPoly::zero();
        match d {
            Dense::Small(v) => {
                for (i, c) in v.into_iter().enumerate() {
                    if c != 0 {
                        p.terms.insert(i as i64 + shift, BigInt::from(c));
                    }
                }
            }
            Dense::Big(v) => {
                for (i, c) in v.into_iter().enumerate() {
                    if !c.is_zero() {
                        p.terms.insert(i as i64 + shift, c);
                    }
                }
            }
        }
        p
    }

    /// Dense coefficients if all exponents are non-negative.
    fn to_dense(&self) -> Option<Dense> {
        let lo = self.min_exp().unwrap_or(0);
        if lo < 0 {
            return None;
        }
        let hi = self.max_exp().unwrap_or(0) as usize;
        let mut v = vec![BigInt::zero(); hi + 1];
        for (&e, c) in &self.terms {
            v[e as usize] = c.clone();
        }
        let mut d = Dense::Big(v);
        d.try_shrink();
        Some(d)
    }
}

pub(crate) fn big_to_f64(c: &BigInt) -> f64 {
    c.to_f64().unwrap_or(if c.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect() }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (&e, c) in &rhs.terms {
            self.add_term(e, c.clone());
        }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, -c);
        }
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&a, ca) in &self.terms {
            for (&b, cb) in &rhs.terms {
                out.add_term(a + b, ca * cb);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

/// Dense polynomial with exponents `0..len`, kept in `i128` until something
/// overflows and then promoted to `BigInt`.
#[derive(Clone, Debug)]
enum Dense {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

impl Dense {
    fn one() -> Self {
        Dense::Small(vec![1])
    }

    fn promote(&mut self) {
        if let Dense::Small(v) = self {
            *self = Dense::Big(v.iter().map(|&c| BigInt::from(c)).collect());
        }
    }

    fn try_shrink(&mut self) {
        if let Dense::Big(v) = self {
            // leave headroom so the next few updates cannot overflow
            let lim = BigInt::from(i128::MAX >> 8);
            if v.iter().all(|c| c.abs() < lim) {
                *self = Dense::Small(v.iter().map(|c| c.to_i128().unwrap()).collect());
            }
        }
    }

    /// Multiply by `1 - q^j`, `j ≥ 1`.
    fn mul_one_minus(&mut self, j: usize) {
        if let Dense::Small(v) = self {
            let snapshot = v.clone();
            let old = v.len();
            v.resize(old + j, 0);
            let mut ok = true;
            for e in (j..old + j).rev() {
                match v[e].checked_sub(v[e - j]) {
                    Some(x) => v[e] = x,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return;
            }
            *v = snapshot;
            self.promote();
        }
        if let Dense::Big(v) = self {
            let old = v.len();
            v.resize(old + j, BigInt::zero());
            for e in (j..old + j).rev() {
                let t = v[e - j].clone();
                v[e] -= t;
            }
        }
    }

    /// Divide by `1 - q^i` exactly; errors if the division leaves a remainder.
    fn div_one_minus(&mut self, i: usize) -> Result<()> {
        let fail = || Error::Overflow("inexact division by (1 - q^i)".to_string());
        if let Dense::Small(v) = self {
            if v.len() <= i {
                return if v.iter().all(|&c| c == 0) { Ok(()) } else { Err(fail()) };
            }
            let snapshot = v.clone();
            let mut ok = true;
            for e in i..v.len() {
                match v[e].checked_add(v[e - i]) {
                    Some(x) => v[e] = x,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let n = v.len();
                if v[n - i..].iter().any(|&c| c != 0) {
                    return Err(fail());
                }
                v.truncate(n - i);
                return Ok(());
            }
            *v = snapshot;
            self.promote();
        }
        if let Dense::Big(v) = self {
            if v.len() <= i {
                return if v.iter().all(|c| c.is_zero()) { Ok(()) } else { Err(fail()) };
            }
            for e in i..v.len() {
                let t = v[e - i].clone();
                v[e] += t;
            }
            let n = v.len();
            if v[n - i..].iter().any(|c| !c.is_zero()) {
                return Err(fail());
            }
            v.truncate(n - i);
        }
        Ok(())
    }

    fn mul(&self, other: &Dense) -> Dense {
        let a = self.as_big();
        let b = other.as_big();
        if a.is_empty() || b.is_empty() {
            return Dense::Small(vec![]);
        }
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        let mut d = Dense::Big(out);
        d.try_shrink();
        d
    }

    fn as_big(&self) -> Vec<BigInt> {
        match self {
            Dense::Small(v) => v.iter().map(|&c| BigInt::from(c)).collect(),
            Dense::Big(v) => v.clone(),
        }
    }
}

/// Accumulates a product of factors `(1 - q^j)^{±1}`.
///
/// Multiplications are applied first and divisions afterwards in increasing
/// order, which keeps every intermediate a polynomial whenever the final
/// result is one (true for factorial ratios and q-binomials).
#[derive(Clone, Debug, Default)]
pub(crate) struct PochhammerProduct {
    mul: Vec<usize>,
    div: Vec<usize>,
}

impl PochhammerProduct {
    pub fn new() -> Self {
        Self::default()
    }

    /// Multiply by `(q)_n`.
    pub fn times_factorial(&mut self, n: u64) {
        self.mul.extend((1..=n as usize).rev());
    }

    /// Divide by `(q)_n`.
    pub fn over_factorial(&mut self, n: u64) {
        self.div.extend(1..=n as usize);
    }

    /// Cancel common factors and evaluate. Errors if the result is not a polynomial.
    pub fn to_poly(&self) -> Result<LaurentPoly> {
        let mut counts: BTreeMap<usize, i64> = BTreeMap::new();
        for &j in &self.mul {
            *counts.entry(j).or_default() += 1;
        }
        for &j in &self.div {
            *counts.entry(j).or_default() -= 1;
        }
        let mut d = Dense::one();
        for (&j, &c) in counts.iter().rev() {
            for _ in 0..c.max(0) {
                d.mul_one_minus(j);
            }
        }
        for (&j, &c) in counts.iter() {
            for _ in 0..(-c).max(0) {
                d.div_one_minus(j).map_err(|_| {
                    Error::Admissibility("Pochhammer ratio is not a polynomial".to_string())
                })?;
            }
        }
        Ok(LaurentPoly::from_dense(d, 0))
    }
}

/// `(q; q)_n`.
pub fn q_factorial(n: u64) -> LaurentPoly {
    let mut d = Dense::one();
    for j in 1..=n as usize {
        d.mul_one_minus(j);
    }
    LaurentPoly::from_dense(d, 0)
}

/// Gaussian binomial `[n; m]_q`; zero when `m > n`.
pub fn q_binomial(n: u64, m: u64) -> LaurentPoly {
    if m > n {
        return LaurentPoly::zero();
    }
    let m = m.min(n - m);
    let mut d = Dense::one();
    for i in 1..=m as usize {
        d.mul_one_minus(n as usize - m as usize + i);
    }
    for i in 1..=m as usize {
        d.div_one_minus(i).expect("q-binomial division is exact");
    }
    LaurentPoly::from_dense(d, 0)
}

/// Exact division of a polynomial (non-negative exponents) by `(q)_n`, if exact.
pub fn div_by_q_factorial(p: &LaurentPoly, n: u64) -> Option<LaurentPoly> {
    let shift = p.min_exp().unwrap_or(0);
    let mut d = p.shift(-shift).to_dense()?;
    for i in 1..=n as usize {
        d.div_one_minus(i).ok()?;
    }
    Some(LaurentPoly::from_dense(d, shift))
}

/// Product of two polynomials via the dense kernel (faster for long polynomials).
pub fn dense_product(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    let (sa, sb) = (a.min_exp().unwrap_or(0), b.min_exp().unwrap_or(0));
    match (a.shift(-sa).to_dense(), b.shift(-sb).to_dense()) {
        (Some(x), Some(y)) => LaurentPoly::from_dense(x.mul(&y), sa + sb),
        _ => a * b,
    }
}
