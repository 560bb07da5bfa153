use std::f64::consts::PI;

use num_complex::Complex64;

pub const PI2_6: f64 = PI * PI / 6.0;

/// `B_{2k} / (2k+1)!` for k = 1, 2, ...
const BERNOULLI: [f64; 21] = [
    2.777_777_777_777_777_6e-2,
    -2.777_777_777_777_777_8e-4,
    4.724_111_866_969_009_8e-6,
    -9.185_773_074_661_964e-8,
    1.897_886_998_897_100e-9,
    -4.064_761_645_144_225_6e-11,
    8.921_691_020_456_452e-13,
    -1.993_929_586_072_107_4e-14,
    4.518_980_029_619_918e-16,
    -1.035_651_761_218_124_7e-17,
    2.395_218_621_026_187e-19,
    -5.581_785_874_325_009e-21,
    1.309_150_755_418_321_2e-22,
    -3.087_419_802_426_740_3e-24,
    7.315_975_652_702_203e-26,
    -1.740_845_657_234_000_9e-27,
    4.157_635_644_613_900e-29,
    -9.962_148_488_284_622e-31,
    2.394_034_424_896_165e-32,
    -5.768_347_355_367_39e-34,
    1.393_179_479_647_008e-35,
];

/// Principal logarithm with `Im ∈ (-π, π]`.
///
/// The negative real axis maps to `+πi` regardless of the sign of a zero
/// imaginary part.
pub fn log_principal(z: Complex64) -> Complex64 {
    let mut arg = z.im.atan2(z.re);
    if z.im == 0.0 && z.re < 0.0 {
        arg = PI;
    }
    Complex64::new(z.norm().ln(), arg)
}

/// Taylor series `Σ zⁿ/n²`; converges for `|z| ≤ 1` but is only fast for small `|z|`.
pub fn li2_series(z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zn = Complex64::new(1.0, 0.0);
    for n in 1..100_000u32 {
        zn *= z;
        let term = zn / (n as f64 * n as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

/// Series in `u = -Log(1-z)`; accurate for `|z| ≤ 1`, `Re z ≤ 1/2`.
fn li2_bernoulli(z: Complex64) -> Complex64 {
    let u = -log_principal(Complex64::new(1.0, 0.0) - z);
    let u2 = u * u;
    let mut acc = Complex64::new(0.0, 0.0);
    for &b in BERNOULLI.iter().rev() {
        acc = acc * u2 + b;
    }
    u - u2 * 0.25 + acc * u2 * u
}

fn li2_small(z: Complex64) -> Complex64 {
    if z.norm() <= 0.5 {
        li2_series(z)
    } else {
        li2_bernoulli(z)
    }
}

fn li2_disk(z: Complex64) -> Complex64 {
    if z.norm() <= 0.5 {
        return li2_series(z);
    }
    if z.re > 0.5 {
        let one = Complex64::new(1.0, 0.0);
        return PI2_6 - log_principal(z) * log_principal(one - z) - li2_small(one - z);
    }
    li2_bernoulli(z)
}

fn li2_generic(z: Complex64) -> Complex64 {
    if z.norm() <= 1.0 {
        return li2_disk(z);
    }
    let l = log_principal(-z);
    -li2_disk(z.inv()) - PI2_6 - 0.5 * l * l
}

/// Principal dilogarithm.
///
/// Branch cut `[1, ∞)`; on the cut itself the value is the limit from below
/// (`z - i0`), so `Im Li₂(x) = -π ln x` for real `x > 1`.
pub fn li2(z: Complex64) -> Complex64 {
    if z.im != 0.0 {
        return li2_generic(z);
    }
    let x = z.re;
    if x == 0.0 {
        Complex64::new(0.0, 0.0)
    } else if x == 1.0 {
        Complex64::new(PI2_6, 0.0)
    } else if x < 1.0 {
        Complex64::new(li2_generic(Complex64::new(x, 0.0)).re, 0.0)
    } else {
        let lx = x.ln();
        let inner = li2_generic(Complex64::new(1.0 / x, 0.0)).re;
        Complex64::new(2.0 * PI2_6 - 0.5 * lx * lx - inner, -PI * lx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CATALAN: f64 = 0.915_965_594_177_219_015;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn closed_forms() {
        let l2 = 2f64.ln();
        let cases = [
            (Complex64::new(-1.0, 0.0), Complex64::new(-PI * PI / 12.0, 0.0)),
            (Complex64::new(0.5, 0.0), Complex64::new(PI * PI / 12.0 - 0.5 * l2 * l2, 0.0)),
            (Complex64::new(2.0, 0.0), Complex64::new(PI * PI / 4.0, -PI * l2)),
            (Complex64::new(0.0, 1.0), Complex64::new(-PI * PI / 48.0, CATALAN)),
            (Complex64::new(0.0, -1.0), Complex64::new(-PI * PI / 48.0, -CATALAN)),
            (Complex64::new(1.0, 0.0), Complex64::new(PI2_6, 0.0)),
        ];
        for (z, want) in cases {
            assert!(close(li2(z), want, 1e-14), "{z}: {} vs {want}", li2(z));
        }
    }

    #[test]
    fn sixth_root_of_unity() {
        // Li₂(e^{iπ/3}) = π²/36 + i·Cl₂(π/3)
        let z = Complex64::from_polar(1.0, PI / 3.0);
        let want = Complex64::new(PI * PI / 36.0, 1.014_941_606_409_653_6);
        assert!(close(li2(z), want, 1e-14), "{}", li2(z));
    }

    #[test]
    fn matches_series_on_annulus() {
        for i in 0..64 {
            let t = 2.0 * PI * i as f64 / 64.0 + 0.01;
            for r in [0.55, 0.7, 0.85, 0.95] {
                let z = Complex64::from_polar(r, t);
                assert!(close(li2(z), li2_series(z), 1e-13), "{z}");
            }
        }
    }

    #[test]
    fn cut_limits() {
        let x = 3.5;
        let below = li2(Complex64::new(x, -1e-13));
        let above = li2(Complex64::new(x, 1e-13));
        let on = li2(Complex64::new(x, 0.0));
        assert!(close(on, below, 1e-11));
        assert!(close(on.conj(), above, 1e-11));
        assert!(li2(Complex64::new(x, -0.0)) == on);
    }

    #[test]
    fn log_branch() {
        assert_eq!(log_principal(Complex64::new(-2.0, -0.0)).im, PI);
        assert_eq!(log_principal(Complex64::new(-2.0, 0.0)).im, PI);
    }
}
