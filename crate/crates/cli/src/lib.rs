//! Command line front end: argument parsing, dispatch, file output and exit codes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qterm::bloch::{beta, beta_hat, bw_of_element, certify_diagram, certify_nu_hat, cv_from_points, rogers_of_element};
use qterm::model::json::parse_term;
use qterm::model::{AnyTerm, QTerm, SpecialQTerm};
use qterm::selftest::{run_all, SelftestConfig};
use qterm::series::{check_conjecture, growth_rate, pade_approximant, sequence, ConjectureConfig, SeriesData, SeriesMode};
use qterm::variational::{solve_variational, SolverConfig};
use qterm::Error;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "DILOG_THREADS";

#[derive(Debug, Parser)]
#[command(name = "qterm", version, about = "q-hypergeometric terms, their critical values and generating series")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here (atomically) instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the variational equations.
    Solve(SolveArgs),
    /// Extended Bloch elements and their regulators at every critical point.
    Bloch(SolveArgs),
    /// The set of critical values.
    Cv(SolveArgs),
    /// Coefficients c_n of a special q-term.
    Seq(SeqArgs),
    /// Growth rate, radius of convergence and Pade poles.
    Sing(SingArgs),
    /// Compare the singularities of the series with the critical values.
    Check(CheckArgs),
    /// Run the acceptance battery.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Newton tolerance on the logarithmic residual.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

impl SolveArgs {
    fn solver(&self) -> SolverConfig {
        SolverConfig { starts: self.starts, seed: self.seed, newton_tol: self.tol, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Numeric,
}

impl From<Mode> for SeriesMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => SeriesMode::Exact,
            Mode::Numeric => SeriesMode::Numeric,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = Mode::Numeric)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SingArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = Mode::Numeric)]
    pub mode: Mode,
    /// Numerator and denominator degree of the Pade approximant.
    #[arg(long, num_args = 2, value_names = ["L", "M"], default_values_t = [40, 40])]
    pub pade: Vec<usize>,
    /// Coefficients used for the Pade fit.
    #[arg(long, default_value_t = 120)]
    pub pade_n_max: usize,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub n_max: usize,
    #[arg(long, default_value_t = 120)]
    pub pade_n_max: usize,
    #[arg(long, num_args = 2, value_names = ["L", "M"], default_values_t = [40, 40])]
    pub pade: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.03)]
    pub radius_tol: f64,
    #[arg(long, default_value_t = 0.05)]
    pub pole_tol: f64,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// A failed run: the exit code and the JSON written to stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub report: Value,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_validation() { EXIT_VALIDATION } else { EXIT_NUMERICAL };
        let issues: Vec<Value> = match &e {
            Error::Schema(v) => v.iter().map(|i| json!({"pointer": i.pointer, "message": i.message})).collect(),
            _ => vec![],
        };
        Failure { code, report: json!({"error": error_kind(&e), "message": e.to_string(), "issues": issues}) }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Admissibility(_) => "admissibility",
        Error::Polytope(_) => "polytope",
        Error::InvalidTerm(_) => "invalid_term",
        Error::OddShift { .. } => "odd_shift",
        Error::DegenerateTuple => "degenerate_tuple",
        Error::Domain(_) => "domain",
        Error::Config(_) => "config",
        Error::DegenerateFamily => "degenerate_family",
        Error::BranchParity(_) => "branch_parity",
        Error::NotOnVariety(_) => "not_on_variety",
        Error::InsufficientData(_) => "insufficient_data",
        Error::SingularSystem => "singular_system",
        Error::Overflow(_) => "overflow",
        Error::Schema(_) => "schema",
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: EXIT_VALIDATION, report: json!({"error": "io", "message": format!("{}: {e}", path.display()), "issues": []}) }
}

/// Read and validate a term file.
pub fn parse_qterm(path: &Path) -> Result<AnyTerm, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    Ok(parse_term(&text)?)
}

fn plain(path: &Path) -> Result<QTerm, Failure> {
    parse_qterm(path)?
        .variational_qterm()
        .ok_or_else(|| Error::InvalidTerm("special term without summation variables".into()).into())
}

fn special(path: &Path) -> Result<SpecialQTerm, Failure> {
    match parse_qterm(path)? {
        AnyTerm::Special(s) => Ok(s),
        AnyTerm::Plain(_) => Err(Error::InvalidTerm("this command needs a special q-term (\"quads\")".into()).into()),
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn bloch_report(t: &QTerm, a: &SolveArgs) -> Result<Value, Failure> {
    let pts = solve_variational(t, &a.solver())?;
    let mut out = Vec::new();
    for p in &pts {
        let b = beta(t, &p.z, 1e-8)?;
        let mut entry = json!({
            "u": p.u,
            "z": p.z,
            "accepted": p.accepted,
            "beta": b.terms().iter().map(|(z, m)| json!({"z": z, "mult": m})).collect::<Vec<_>>(),
            "bloch_wigner": bw_of_element(&b).im,
        });
        if p.accepted {
            let bh = beta_hat(t, p)?;
            let r = rogers_of_element(&bh).canonical();
            entry["beta_hat"] = bh
                .terms()
                .iter()
                .map(|(w, m)| json!({"z": w.z, "p": w.p, "q": w.q, "mult": m}))
                .collect();
            entry["rogers"] = json!(r);
            entry["nu_hat"] = json!(certify_nu_hat(t, p, 1e-8));
            entry["diagram_defect"] = json!(certify_diagram(t, p)?);
        }
        out.push(entry);
    }
    Ok(json!({ "points": out }))
}

/// CSV rows `n,re,im,log_abs,growth` with `growth = log|c_n| - log|c_{n-1}|`.
pub fn series_csv(s: &SeriesData) -> String {
    let mut out = String::from("n,re,im,log_abs,growth\n");
    for n in 1..=s.n_max() {
        let c = s.coeff(n);
        let d = if n > 1 { s.log_abs_at(n) - s.log_abs_at(n - 1) } else { f64::NAN };
        let g = if d.is_finite() { format!("{d:.17e}") } else { String::new() };
        writeln!(out, "{n},{:.17e},{:.17e},{:.17e},{g}", c.re, c.im, s.log_abs_at(n)).expect("write to string");
    }
    out
}

fn execute(cfg: &RunConfig) -> Result<(String, bool), Failure> {
    match &cfg.command {
        Command::Solve(a) => {
            let t = plain(&a.input)?;
            let pts = solve_variational(&t, &a.solver())?;
            Ok((pretty(&json!({ "points": pts })), true))
        }
        Command::Bloch(a) => Ok((pretty(&bloch_report(&plain(&a.input)?, a)?), true)),
        Command::Cv(a) => {
            let t = plain(&a.input)?;
            let cv = cv_from_points(&t, &solve_variational(&t, &a.solver())?)?;
            Ok((pretty(&cv), true))
        }
        Command::Seq(a) => {
            let s = sequence(&special(&a.input)?, a.n_max, a.mode.into())?;
            Ok((if a.format == Format::Csv { series_csv(&s) } else { pretty(&s) }, true))
        }
        Command::Sing(a) => {
            let s = sequence(&special(&a.input)?, a.n_max.max(a.pade_n_max), a.mode.into())?;
            let mut g = growth_rate(&s.truncated(a.n_max))?;
            let p = pade_approximant(&s.truncated(a.pade_n_max), a.pade[0], a.pade[1])?;
            g.pade_poles = p.poles.iter().filter(|p| p.genuine).map(|p| p.z).collect();
            Ok((pretty(&json!({"estimate": g, "pade": p})), true))
        }
        Command::Check(a) => {
            let c = ConjectureConfig {
                n_max: a.n_max,
                pade_num: a.pade[0],
                pade_den: a.pade[1],
                pade_n_max: a.pade_n_max,
                solver: SolverConfig { starts: a.starts, seed: a.seed, ..Default::default() },
                radius_tol: a.radius_tol,
                pole_tol: a.pole_tol,
                ..Default::default()
            };
            c.solver.validate()?;
            Ok((pretty(&check_conjecture(&special(&a.input)?, &c)), true))
        }
        Command::Selftest(a) => {
            let reps = run_all(&SelftestConfig { seed: a.seed });
            let ok = reps.iter().all(|r| r.passed);
            let text = match a.format {
                Format::Json => pretty(&reps),
                Format::Csv => reps.iter().map(|r| r.line() + "\n").collect(),
            };
            Ok((text, ok))
        }
    }
}

fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Cap the global thread pool from `DILOG_THREADS` (ignored if unset or invalid).
pub fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Run one command; output goes to `out` (or the `--output` file), errors as
/// JSON to `err`. Returns the exit code.
pub fn run(cfg: &RunConfig, out: &mut impl std::io::Write, err: &mut impl std::io::Write) -> i32 {
    let res = execute(cfg).and_then(|(text, ok)| {
        match &cfg.output {
            Some(p) => write_atomic(p, &text).map_err(|e| io_failure(p, e))?,
            None => out.write_all(text.as_bytes()).map_err(|e| io_failure(Path::new("<stdout>"), e))?,
        }
        Ok(ok)
    });
    match res {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_NUMERICAL,
        Err(f) => {
            let _ = writeln!(err, "{}", f.report);
            f.code
        }
    }
}
