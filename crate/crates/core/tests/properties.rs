use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use qterm::bloch::potential_with;
use qterm::builtin::{battery, random_qterm, BATTERY_SEED};
use qterm::dilog::{bloch_wigner, five_term_defect_bw, li2, li2_series};
use qterm::lp::{integer_box, rat};
use qterm::model::json::{parse_laurent, parse_term, laurent_to_json, qterm_to_json};
use qterm::model::{q_binomial, AnyTerm, LaurentPoly};
use qterm::series::{growth_rate, pade_poles, SeriesData};
use qterm::variational::{critical_point_at, solve_variational, SolverConfig};
use qterm::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn laurent() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-8i64..8, -50i64..50), 0..6)
        .prop_map(|t| LaurentPoly::from_terms(t.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #[test]
    fn laurent_ring_laws(a in laurent(), b in laurent(), d in laurent()) {
        prop_assert_eq!(&(&a * &b) * &d, &a * &(&b * &d));
        prop_assert_eq!(&a * &(&b + &d), &(&a * &b) + &(&a * &d));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn laurent_eval_is_a_homomorphism(a in laurent(), b in laurent(), n in 1u64..40) {
        let lhs = (&a * &b).eval_root_of_unity(n);
        let rhs = a.eval_root_of_unity(n) * b.eval_root_of_unity(n);
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
        let q = Complex64::from_polar(1.0, 2.0 * PI / n as f64);
        prop_assert!((a.eval(q) - a.eval_root_of_unity(n)).norm() <= 1e-9 * (1.0 + a.norm1().to_f64().unwrap()));
    }

    #[test]
    fn laurent_json_round_trip(a in laurent()) {
        let text = laurent_to_json(&a).to_string();
        prop_assert_eq!(parse_laurent(&text).unwrap(), a);
    }

    #[test]
    fn q_binomial_symmetry_and_pascal(n in 1u64..25, k in 0u64..25) {
        let k = k % (n + 1);
        prop_assert_eq!(q_binomial(n, k), q_binomial(n, n - k));
        if k >= 1 {
            let rhs = &q_binomial(n - 1, k - 1) + &q_binomial(n - 1, k).shift(k as i64);
            prop_assert_eq!(q_binomial(n, k), rhs);
        }
    }

    #[test]
    fn li2_conjugation(re in -4.0f64..4.0, im in 0.01f64..4.0) {
        let z = c(re, im);
        let a = li2(z.conj());
        let b = li2(z).conj();
        prop_assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn li2_matches_series_in_the_disk(r in 0.0f64..0.9, t in -PI..PI) {
        let z = Complex64::from_polar(r, t);
        prop_assert!((li2(z) - li2_series(z)).norm() < 1e-12);
    }

    #[test]
    fn bloch_wigner_symmetries(re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let z = c(re, im);
        prop_assume!(z.norm() > 1e-3 && (z - 1.0).norm() > 1e-3);
        let d = bloch_wigner(z);
        let one = c(1.0, 0.0);
        prop_assert!((bloch_wigner(one / z) + d).norm() < 1e-12);
        prop_assert!((bloch_wigner(one - z) + d).norm() < 1e-12);
        prop_assert!((bloch_wigner(z.conj()) + d).norm() < 1e-12);
    }

    #[test]
    fn five_term_bloch_wigner(x in (-3.0f64..3.0, -3.0f64..3.0), y in (-3.0f64..3.0, -3.0f64..3.0)) {
        if let Ok(d) = five_term_defect_bw(c(x.0, x.1), c(y.0, y.1)) {
            prop_assert!(d < 1e-9, "{}", d);
        }
    }

    #[test]
    fn integer_box_contains_all_lattice_points(
        rows in prop::collection::vec((-4i64..=4, -4i64..=4, -6i64..=12), 0..4)
    ) {
        // random constraints intersected with |x|, |y| ≤ 6
        let mut a = vec![vec![rat(1), rat(0)], vec![rat(-1), rat(0)], vec![rat(0), rat(1)], vec![rat(0), rat(-1)]];
        let mut b = vec![rat(6); 4];
        for &(p, q, r) in &rows {
            a.push(vec![rat(p), rat(q)]);
            b.push(rat(r));
        }
        let inside = |x: i64, y: i64| rows.iter().all(|&(p, q, r)| p * x + q * y <= r);
        let pts: Vec<(i64, i64)> =
            (-6..=6).flat_map(|x| (-6..=6).map(move |y| (x, y))).filter(|&(x, y)| inside(x, y)).collect();
        match integer_box(&a, &b, 2).unwrap() {
            None => prop_assert!(pts.is_empty()),
            Some(bx) => {
                for (x, y) in pts {
                    prop_assert!(bx[0].0 <= x && x <= bx[0].1 && bx[1].0 <= y && y <= bx[1].1);
                }
            }
        }
    }

    #[test]
    fn qterm_json_round_trip(seed in any::<u64>()) {
        let t = random_qterm(&mut ChaCha8Rng::seed_from_u64(seed), 3);
        let back = parse_term(&qterm_to_json(&t).to_string()).unwrap();
        prop_assert_eq!(back, AnyTerm::Plain(t));
    }

    #[test]
    fn growth_recovers_synthetic_rates(rho in 0.3f64..1.5, gamma in -2.0f64..2.0) {
        let s = SeriesData::from_coeffs(
            (1..=500).map(|n| c(rho.powi(-n) * (n as f64).powf(gamma), 0.0)).collect(),
        );
        let g = growth_rate(&s).unwrap();
        prop_assert!((g.c + rho.ln()).abs() < 1e-4, "c = {}", g.c);
        prop_assert!((g.poly_exponent - gamma).abs() < 1e-1, "γ = {}", g.poly_exponent);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pade_recovers_rational_functions(
        r1 in 0.5f64..0.9, t1 in -PI..PI, r2 in 1.2f64..2.0, t2 in -PI..PI, w in 0.2f64..3.0
    ) {
        let p1 = Complex64::from_polar(r1, t1);
        let p2 = Complex64::from_polar(r2, t2);
        let s = SeriesData::from_coeffs((1..=40).map(|n| p1.powi(-n) + w * p2.powi(-n)).collect());
        let poles = pade_poles(&s, 8, 8).unwrap();
        prop_assert!(poles.iter().any(|p| (p - p1).norm() < 1e-6), "{:?}", poles);
        prop_assert!(poles.iter().any(|p| (p - p2).norm() < 1e-6), "{:?}", poles);
    }
}

/// Conjugating a critical point conjugates-and-inverts its critical value.
#[test]
fn critical_values_under_conjugation() {
    let cfg = SolverConfig { starts: 64, ..Default::default() };
    let mut checked = 0;
    for t in battery(BATTERY_SEED, 60) {
        for p in solve_variational(&t, &cfg).unwrap().into_iter().filter(|p| p.accepted) {
            let v = potential_with(&t, &p.u, p.log_eps).unwrap().exp_neg();
            let uc: Vec<Complex64> = p.u.iter().map(|x| x.conj()).collect();
            let q = critical_point_at(&t, uc, 1e-10).expect("conjugate point solves the equations");
            assert!(q.accepted);
            let w = potential_with(&t, &q.u, q.log_eps).unwrap().exp_neg();
            let want = c(1.0, 0.0) / v.conj();
            assert!((w - want).norm() <= 1e-8 * (1.0 + want.norm()), "{w} vs {want}");
            checked += 1;
        }
    }
    assert!(checked > 100);
}

/// Solving twice with the same seed gives identical output.
#[test]
fn solver_is_deterministic() {
    let cfg = SolverConfig { starts: 40, seed: 11, ..Default::default() };
    for t in battery(BATTERY_SEED, 10) {
        assert_eq!(solve_variational(&t, &cfg).unwrap(), solve_variational(&t, &cfg).unwrap());
    }
}
