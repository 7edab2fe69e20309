use std::process::ExitCode;

use bhlab_cli::{emit, run, Cli, RunConfig};
use clap::Parser;

fn main() -> ExitCode {
    if let Some(threads) = std::env::var("BHLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    let cli = Cli::parse();
    let cfg = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let out = match run(&cfg) {
        Ok(o) => o,
        Err(bhlab::Error::BoundViolated(msg)) => {
            eprintln!("violated: {msg}");
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&cfg, &out) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if out.violated > 0 {
        eprintln!("{} violated verdict(s)", out.violated);
    }
    ExitCode::from(out.exit_code() as u8)
}
