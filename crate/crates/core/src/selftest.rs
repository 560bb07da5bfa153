//! The acceptance battery, shared by the `selftest` command and the test suite.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bloch::{beta_hat, certify_diagram, cv_set, rogers_of_element};
use crate::builtin::{battery, family, four_one, four_one_special, BATTERY_SEED, BATTERY_SIZE};
use crate::dilog::{five_term_defect_bw, five_term_defect_rogers};
use crate::model::Sign;
use crate::series::{
    exact_polynomial, growth_rate, kashaev_41_oracle, laplace_ratio_check, pade_poles, qfactorial_asymptotics_defect,
    sequence, SeriesMode,
};
use crate::variational::{solve_poly_1var, solve_variational, SolverConfig};
use crate::Result;

pub const VOLUME_41: f64 = 2.029_883_212_819_307_4;
pub const CV_41: [f64; 2] = [0.723_926_111_9, 1.381_356_444_5];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SelftestConfig {
    /// Offsets every random seed used by the battery.
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

pub const CRITERIA: [(u32, &str); 11] = [
    (1, "4_1 variational solutions"),
    (2, "4_1 regulator value"),
    (3, "4_1 critical values"),
    (4, "diagram certificate on random battery"),
    (5, "five-term relations"),
    (6, "Kashaev oracle"),
    (7, "growth rate"),
    (8, "Pade probe"),
    (9, "root-of-unity q-factorial asymptotics"),
    (10, "analyticity bound"),
    (11, "property suite"),
];

fn list(v: &[Complex64]) -> String {
    let items: Vec<String> = v.iter().map(|z| format!("{:.10}{:+.10}i", z.re, z.im)).collect();
    format!("[{}]", items.join(", "))
}

fn solver(cfg: &SelftestConfig, starts: usize) -> SolverConfig {
    SolverConfig { starts, seed: cfg.seed, ..Default::default() }
}

fn c1(cfg: &SelftestConfig) -> Result<(bool, String)> {
    let t0 = Instant::now();
    let pts = solve_variational(&four_one(), &solver(cfg, 200))?;
    let secs = t0.elapsed().as_secs_f64();
    let want = [Complex64::from_polar(1.0, -PI / 3.0), Complex64::from_polar(1.0, PI / 3.0)];
    let matched = pts.len() == 2 && want.iter().all(|w| pts.iter().any(|p| (p.z[0] - w).norm() < 1e-10));
    let res = pts.iter().map(|p| p.residual_log.max(p.residual_mult)).fold(0.0, f64::max);
    Ok((
        matched && res < 1e-10 && secs < 1.0,
        format!("{} points, max residual {res:.2e}, {secs:.3} s", pts.len()),
    ))
}

fn c2(cfg: &SelftestConfig) -> Result<(bool, String)> {
    let t = four_one();
    let pts = solve_variational(&t, &solver(cfg, 200))?;
    let mut ims = Vec::new();
    let mut worst = 0.0f64;
    for p in pts.iter().filter(|p| p.accepted) {
        let r = rogers_of_element(&beta_hat(&t, p)?).canonical();
        worst = worst.max(r.re.abs()).max((r.im.abs() - VOLUME_41).abs());
        ims.push(r.im);
    }
    let both = ims.iter().any(|&x| x > 0.0) && ims.iter().any(|&x| x < 0.0);
    Ok((ims.len() == 2 && both && worst < 1e-9, format!("Im R = {ims:?}, max defect {worst:.2e}")))
}

fn c3(cfg: &SelftestConfig) -> Result<(bool, String)> {
    let cv = cv_set(&four_one(), &solver(cfg, 200))?;
    let mut worst = f64::INFINITY;
    let mut product = Complex64::new(f64::NAN, 0.0);
    if cv.values.len() == 2 {
        worst = cv.values.iter().zip(CV_41).map(|(v, w)| (v - w).norm()).fold(0.0, f64::max);
        product = cv.values[0] * cv.values[1];
    }
    let pd = (product - 1.0).norm();
    Ok((worst < 1e-9 && pd < 1e-9, format!("CV = {}, max defect {worst:.2e}, |product - 1| = {pd:.2e}", list(&cv.values))))
}

fn c4(cfg: &SelftestConfig) -> Result<(bool, String)> {
    let t0 = Instant::now();
    let terms = battery(BATTERY_SEED + cfg.seed, BATTERY_SIZE);
    let scfg = solver(cfg, 64);
    let (mut points, mut worst) = (0usize, 0.0f64);
    for t in &terms {
        for p in solve_variational(t, &scfg)?.iter().filter(|p| p.accepted) {
            worst = worst.max(certify_diagram(t, p)?);
            points += 1;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    Ok((
        terms.len() >= 50 && points > 0 && worst < 1e-8 && secs < 60.0,
        format!("{} terms, {points} accepted points, max defect {worst:.2e}, {secs:.2} s", terms.len()),
    ))
}

fn c5(cfg: &SelftestConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5_7e2 + cfg.seed);
    let mut bw = 0.0f64;
    let mut n_bw = 0;
    while n_bw < 1000 {
        let mut z = || Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let (x, y) = (z(), z());
        if let Ok(d) = five_term_defect_bw(x, y) {
            bw = bw.max(d);
            n_bw += 1;
        }
    }
    let mut rh = 0.0f64;
    for _ in 0..500 {
        let (a, b): (f64, f64) = (rng.gen_range(0.001..0.999), rng.gen_range(0.001..0.999));
        if a == b {
            continue;
        }
        rh = rh.max(five_term_defect_rogers(a.max(b), a.min(b))?);
    }
    Ok((bw < 1e-9 && rh < 1e-9, format!("max D2 defect {bw:.2e}, max R defect {rh:.2e}")))
}

fn c6() -> Result<(bool, String)> {
    let t = four_one_special();
    let exact = sequence(&t, 100, SeriesMode::Exact)?;
    let numeric = sequence(&t, 100, SeriesMode::Numeric)?;
    let mut worst = 0.0f64;
    for n in 1..=100 {
        let o = kashaev_41_oracle(n as u64);
        for s in [&exact, &numeric] {
            worst = worst.max((s.coeff(n) - o).norm() / o.norm());
        }
    }
    let spots = (exact.coeff(2) - 5.0).norm() < 1e-12 && (exact.coeff(3) - 13.0).norm() < 1e-12;
    Ok((worst < 1e-8 && spots, format!("max relative defect {worst:.2e}, c2 = {:.10}, c3 = {:.10}", exact.coeff(2).re, exact.coeff(3).re)))
}

fn c7() -> Result<(bool, String)> {
    let t0 = Instant::now();
    let s = sequence(&four_one_special(), 1000, SeriesMode::Numeric)?;
    let g = growth_rate(&s)?;
    let secs = t0.elapsed().as_secs_f64();
    let rd = (g.radius - CV_41[0]).abs() / CV_41[0];
    Ok((
        (0.313..=0.333).contains(&g.c) && rd < 0.03 && secs < 30.0,
        format!("c = {:.8}, radius = {:.8} ({:.2e} relative), {secs:.2} s", g.c, g.radius, rd),
    ))
}

fn c8() -> Result<(bool, String)> {
    let s = sequence(&four_one_special(), 120, SeriesMode::Numeric)?;
    let poles = pade_poles(&s, 40, 40)?;
    let Some(p) = poles.first() else {
        return Ok((false, "no genuine poles".into()));
    };
    let rd = (p - CV_41[0]).norm() / CV_41[0];
    Ok((rd < 0.05, format!("nearest pole {}, relative distance {rd:.2e}", list(&[*p]))))
}

fn c9() -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for a in [Ratio::new(1, 6), Ratio::new(1, 3), Ratio::new(1, 2)] {
        let d: Vec<f64> =
            [500, 1000, 2000, 4000].iter().map(|&n| qfactorial_asymptotics_defect(a, n)).collect::<Result<_>>()?;
        ok &= d.windows(2).all(|w| w[1] < w[0]) && d[3] < 5e-3;
        detail.push(format!("{a}: {:.2e}", d[3]));
    }
    Ok((ok, format!("defect at N = 4000: {}", detail.join(", "))))
}

fn c10() -> Result<(bool, String)> {
    let t = four_one_special();
    let mut roots = Vec::new();
    let mut bound_ok = true;
    for n in 1..=40u64 {
        let a = exact_polynomial(&t, n)?;
        let norm = a.norm1().to_f64().unwrap_or(f64::INFINITY);
        let c = a.eval_root_of_unity(n).norm();
        bound_ok &= c <= norm * (1.0 + 1e-12);
        roots.push(norm.powf(1.0 / n as f64));
    }
    let tail = &roots[30..];
    let ratio = tail.iter().copied().fold(0.0, f64::max) / tail.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((ratio < 1.2 && bound_ok, format!("max/min of |a_n|^(1/n) on 31..40 = {ratio:.4}, |c_n| <= |a_n| holds: {bound_ok}")))
}

fn c11(cfg: &SelftestConfig) -> Result<(bool, String)> {
    let scfg = solver(cfg, 64);
    let (mut accepted, mut odd) = (0usize, 0usize);
    let mut laplace = 0.0f64;
    for t in battery(BATTERY_SEED + cfg.seed, BATTERY_SIZE) {
        for p in solve_variational(&t, &scfg)? {
            laplace = laplace.max(laplace_ratio_check(&t, &p.z)?);
            if p.accepted {
                accepted += 1;
                if p.branch_l % 2 != 0 || p.branch_a.iter().any(|b| b % 2 != 0) {
                    odd += 1;
                }
            }
        }
    }
    let mut mismatched = Vec::new();
    for a in -3..=3 {
        for b in 1..=3 {
            for eps in [Sign::Plus, Sign::Minus] {
                let t = family(a, b, eps)?;
                let got = solve_variational(&t, &solver(cfg, 200))?;
                let want = solve_poly_1var(a, b, eps)?;
                let same = got.len() == want.len()
                    && want.iter().all(|w| got.iter().any(|p| (p.z[0] - w).norm() < 1e-8 * (1.0 + w.norm())));
                if !same {
                    mismatched.push(format!("({a},{b},{})", eps.as_i64()));
                }
            }
        }
    }
    Ok((
        accepted > 0 && odd == 0 && mismatched.is_empty() && laplace < 1e-8,
        format!(
            "{odd}/{accepted} points with odd branch integers, family mismatches {mismatched:?}, max Laplace defect {laplace:.2e}"
        ),
    ))
}

/// Run criterion `id` (1 to 11).
pub fn run_criterion(id: u32, cfg: &SelftestConfig) -> Option<CriterionReport> {
    let &(_, name) = CRITERIA.iter().find(|c| c.0 == id)?;
    let t0 = Instant::now();
    let out = match id {
        1 => c1(cfg),
        2 => c2(cfg),
        3 => c3(cfg),
        4 => c4(cfg),
        5 => c5(cfg),
        6 => c6(),
        7 => c7(),
        8 => c8(),
        9 => c9(),
        10 => c10(),
        _ => c11(cfg),
    };
    let (passed, detail) = out.unwrap_or_else(|e| (false, format!("error: {e}")));
    Some(CriterionReport { id, name, passed, detail, seconds: t0.elapsed().as_secs_f64() })
}

pub fn run_all(cfg: &SelftestConfig) -> Vec<CriterionReport> {
    CRITERIA.iter().filter_map(|&(id, _)| run_criterion(id, cfg)).collect()
}

impl CriterionReport {
    /// `PASS  3 4_1 critical values: ...`
    pub fn line(&self) -> String {
        format!("{} {:>2} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

