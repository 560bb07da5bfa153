//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.
//!
//! `cargo test -p qterm --test acceptance`

use qterm::selftest::{run_all, SelftestConfig};

fn main() {
    let reports = run_all(&SelftestConfig::default());
    for r in &reports {
        println!("{}  [{:.2} s]", r.line(), r.seconds);
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", reports.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
