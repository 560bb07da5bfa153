//! Dilogarithm, Bloch–Wigner function and the Rogers dilogarithm on the
//! cover `Ĉ` of `ℂ \ {0, 1}`.

mod li2;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::{Error, Result};
pub use li2::{li2, li2_series, log_principal, PI2_6};

const TWO_PI: f64 = 2.0 * PI;
/// Generator of `ℤ(2) = (2πi)²ℤ` up to sign.
pub const Z2_PERIOD: f64 = 4.0 * PI * PI;

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

fn reduce(x: f64, period: f64) -> f64 {
    let r = x - period * (x / period).round();
    // keep the half-open interval (-p/2, p/2]
    if r <= -period / 2.0 {
        r + period
    } else {
        r
    }
}

/// Complex number modulo `ℤ(2)`, i.e. real part modulo `4π²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModZ2Value(pub Complex64);

impl ModZ2Value {
    /// Representative with real part in `(-2π², 2π²]`.
    pub fn canonical(self) -> Complex64 {
        Complex64::new(reduce(self.0.re, Z2_PERIOD), self.0.im)
    }

    pub fn distance(self, other: ModZ2Value) -> f64 {
        ModZ2Value(self.0 - other.0).canonical().norm()
    }

    pub fn approx_eq(self, other: ModZ2Value, tol: f64) -> bool {
        self.distance(other) <= tol
    }
}

impl std::ops::Add for ModZ2Value {
    type Output = ModZ2Value;
    fn add(self, o: ModZ2Value) -> ModZ2Value {
        ModZ2Value(self.0 + o.0)
    }
}

/// Complex number modulo `ℤ(1) = 2πiℤ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModZ1Value(pub Complex64);

impl ModZ1Value {
    /// Representative with imaginary part in `(-π, π]`.
    pub fn canonical(self) -> Complex64 {
        Complex64::new(self.0.re, reduce(self.0.im, TWO_PI))
    }

    /// `e^{-v}`, which does not depend on the representative.
    pub fn exp_neg(self) -> Complex64 {
        (-self.canonical()).exp()
    }

    pub fn distance(self, other: ModZ1Value) -> f64 {
        ModZ1Value(self.0 - other.0).canonical().norm()
    }
}

impl std::ops::Add for ModZ1Value {
    type Output = ModZ1Value;
    fn add(self, o: ModZ1Value) -> ModZ1Value {
        ModZ1Value(self.0 + o.0)
    }
}

/// Point `[z; p, q]` of the cover `Ĉ`: `z ∉ {0, 1}` with even integers `p, q`
/// selecting the branches `Log z + πip` and `Log(1 - z) + πiq`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CHatPoint {
    pub z: Complex64,
    pub p: i64,
    pub q: i64,
}

impl CHatPoint {
    pub fn new(z: Complex64, p: i64, q: i64) -> Result<Self> {
        if p % 2 != 0 || q % 2 != 0 {
            return Err(Error::OddShift { dp: p, dq: q });
        }
        if !z.is_finite() || z == Complex64::new(0.0, 0.0) || z == Complex64::new(1.0, 0.0) {
            return Err(Error::Domain(format!("z = {z} is not in ℂ \\ {{0, 1}}")));
        }
        Ok(CHatPoint { z, p, q })
    }

    /// `Log z + πip`.
    pub fn log_z(&self) -> Complex64 {
        log_principal(self.z) + i() * (PI * self.p as f64)
    }

    /// `Log(1 - z) + πiq`.
    pub fn log_one_minus_z(&self) -> Complex64 {
        log_principal(Complex64::new(1.0, 0.0) - self.z) + i() * (PI * self.q as f64)
    }
}

/// Bloch–Wigner function `D₂(z) = i·Im(Li₂(z) + Log(1-z)·log|z|)`, purely imaginary.
pub fn bloch_wigner(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if z == Complex64::new(0.0, 0.0) || z == one {
        return Complex64::new(0.0, 0.0);
    }
    let v = li2(z) + log_principal(one - z) * z.norm().ln();
    Complex64::new(0.0, v.im)
}

/// Extended Rogers dilogarithm
/// `R̂([z;p,q]) = Li₂(z) + ½(Log z + πip)(Log(1-z) + πiq) - π²/6`.
pub fn rogers_hat(w: &CHatPoint) -> ModZ2Value {
    ModZ2Value(li2(w.z) + 0.5 * w.log_z() * w.log_one_minus_z() - PI2_6)
}

/// `Φ(z) = (π²/6 - Li₂(z)) / 2πi`, defined modulo `ℤ(1)`.
pub fn phi(z: Complex64) -> ModZ1Value {
    ModZ1Value((PI2_6 - li2(z)) / (i() * TWO_PI))
}

/// Deck transformation `[z; p, q] ↦ [z; p + dp, q + dq]`.
pub fn deck_shift(w: &CHatPoint, dp: i64, dq: i64) -> Result<CHatPoint> {
    if dp % 2 != 0 || dq % 2 != 0 {
        return Err(Error::OddShift { dp, dq });
    }
    CHatPoint::new(w.z, w.p + dp, w.q + dq)
}

/// `(x, y, y/x, (1 - x⁻¹)/(1 - y⁻¹), (1 - x)/(1 - y))`.
pub fn five_term_tuple(x: Complex64, y: Complex64) -> Result<[Complex64; 5]> {
    let one = Complex64::new(1.0, 0.0);
    let bad = |z: Complex64| z.norm() < 1e-300 || (z - one).norm() < 1e-300 || !z.is_finite();
    if bad(x) || bad(y) || x == y {
        return Err(Error::DegenerateTuple);
    }
    let t = [x, y, y / x, (one - x.inv()) / (one - y.inv()), (one - x) / (one - y)];
    if t.iter().any(|&z| bad(z)) {
        return Err(Error::DegenerateTuple);
    }
    Ok(t)
}

/// `|Σ (-1)^i D₂(x_i)|` over the five-term tuple.
pub fn five_term_defect_bw(x: Complex64, y: Complex64) -> Result<f64> {
    let t = five_term_tuple(x, y)?;
    let s: Complex64 =
        t.iter().enumerate().map(|(i, &z)| bloch_wigner(z) * if i % 2 == 0 { 1.0 } else { -1.0 }).sum();
    Ok(s.norm())
}

/// Five-term defect of `R̂` on real `0 < y < x < 1`, where every entry lies in
/// `(0, 1)` and all branch integers are zero.
pub fn five_term_defect_rogers(x: f64, y: f64) -> Result<f64> {
    if !(0.0 < y && y < x && x < 1.0) {
        return Err(Error::Domain(format!("need 0 < y < x < 1, got x = {x}, y = {y}")));
    }
    let t = five_term_tuple(Complex64::new(x, 0.0), Complex64::new(y, 0.0))?;
    let mut s = ModZ2Value(Complex64::new(0.0, 0.0));
    for (i, &z) in t.iter().enumerate() {
        let v = rogers_hat(&CHatPoint::new(z, 0, 0)?).0;
        s = s + ModZ2Value(if i % 2 == 0 { v } else { -v });
    }
    Ok(s.canonical().norm())
}
