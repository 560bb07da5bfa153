use clap::Parser;
use qterm_cli::{init_threads, run, RunConfig};

fn main() {
    let cfg = RunConfig::parse();
    init_threads();
    let code = run(&cfg, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
