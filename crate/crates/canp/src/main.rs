use std::path::PathBuf;
use std::process::ExitCode;

use canp::config::{extract_overrides, ConfigError, Experiment, RunConfig};
use canp::experiments::run_table;
use canp::validate::Validator;
use clap::Parser;

/// Figure data and validation for criticality-assisted metrology.
///
/// Any config field can be overridden with a dotted flag, e.g.
/// `--model.g=0.9` or `--axes.sqrtDelta_tc.points=50`.
#[derive(Debug, Parser)]
#[command(name = "canp", version)]
struct Cli {
    experiment: Experiment,

    /// JSON config layered over the experiment's defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output file; defaults to the config's `output`, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Print the effective config and exit.
    #[arg(long)]
    print_config: bool,
}

const RESERVED: &[&str] = &["config", "out", "print-config", "help", "version"];

fn thread_cap(cfg: &RunConfig) -> Option<usize> {
    let env = std::env::var("CANP_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0);
    match (cfg.threads, env) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn write_out(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn config_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("canp: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let (args, overrides) = match extract_overrides(std::env::args().collect(), RESERVED) {
        Ok(x) => x,
        Err(e) => return config_error(e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut cfg = match RunConfig::resolve(cli.experiment, cli.config.as_deref(), &overrides) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    if cli.out.is_some() {
        cfg.output = cli.out.clone();
    }
    if cli.print_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return ExitCode::SUCCESS;
    }

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap(&cfg) {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return config_error(ConfigError::Invalid(e.to_string())),
    };

    let (text, ok) = pool.install(|| {
        if cfg.experiment == Experiment::Validate {
            let report = Validator::new(&cfg).run(&cfg);
            for c in &report.checks {
                let verdict = match (c.skipped, c.passed) {
                    (true, _) => "SKIP",
                    (_, true) => "PASS",
                    _ => "FAIL",
                };
                eprintln!("{verdict} [{}] {}: {:e} (tol {:e})", c.criterion, c.name, c.measured, c.tolerance);
            }
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            (Ok(json + "\n"), report.passed)
        } else {
            (run_table(&cfg).map(|t| t.to_csv(&cfg)), true)
        }
    });
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("canp: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = write_out(cfg.output.as_ref(), &text) {
        eprintln!("canp: cannot write output: {e}");
        return ExitCode::from(1);
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
