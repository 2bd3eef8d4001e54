//! `sim`: scenario runner for the Kerr coupler simulator.
//!
//! ```text
//! sim run <config-file> [--out <path>] [--method integrate|spectral]
//! sim sweep <config-dir>
//! sim self-check
//! sim --version
//! ```
//!
//! Exit codes: 0 success, 1 validation error, 2 numeric error,
//! 3 self-check failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use kerr_coupler::evolve::Method;
use kerr_coupler::scenario::{load_config, run_sweep, run_to_file, sweep_jobs, RunError};
use kerr_coupler::selfcheck::{criterion_ids, run_criteria, SelfCheckOptions};

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_SELF_CHECK: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "sim", version = kerr_coupler::VERSION, about = "Pumped Kerr coupler simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario config and write its CSV time series.
    Run {
        config: PathBuf,
        /// Output CSV path; defaults to the config's `output_path`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the master-equation method of a damped scenario.
        #[arg(long)]
        method: Option<Method>,
    },
    /// Run every `*.conf` file in a directory, in parallel.
    Sweep { config_dir: PathBuf },
    /// Run the acceptance criteria and print one verdict per criterion.
    SelfCheck {
        /// Run only these criterion ids (comma-separated, e.g. `1,9,S1`).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Negative control: flip the sign of the pair-exchange coupling.
        #[arg(long, hide = true)]
        perturb_hamiltonian: bool,
    },
}

fn code(err: &RunError) -> u8 {
    match err.exit_code() {
        2 => EXIT_NUMERIC,
        _ => EXIT_VALIDATION,
    }
}

fn run(config: PathBuf, out: Option<PathBuf>, method: Option<Method>) -> ExitCode {
    let mut cfg = match load_config(&config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {}: {e}", config.display());
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    if let Some(m) = method {
        cfg.method = m;
    }
    match run_to_file(&cfg, out.as_deref()) {
        Ok((series, Some(path))) => {
            log::info!("wrote {} rows to {}", series.len(), path.display());
            ExitCode::SUCCESS
        }
        Ok((series, None)) => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout.write_all(series.to_csv().as_bytes()) {
                eprintln!("error: writing to stdout: {e}");
                return ExitCode::from(EXIT_VALIDATION);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(code(&e))
        }
    }
}

fn sweep(dir: PathBuf) -> ExitCode {
    let jobs = match sweep_jobs(&dir) {
        Ok(jobs) => jobs,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    if jobs.is_empty() {
        eprintln!("error: no *.conf files in {}", dir.display());
        return ExitCode::from(EXIT_VALIDATION);
    }
    let mut worst = 0u8;
    for outcome in run_sweep(&jobs) {
        match &outcome.result {
            Ok(()) => eprintln!(
                "ok    {} -> {}",
                outcome.job.config_path.display(),
                outcome.job.output_path.display()
            ),
            Err(e) => {
                eprintln!("FAIL  {}: {e}", outcome.job.config_path.display());
                worst = worst.max(code(e));
            }
        }
    }
    ExitCode::from(worst)
}

fn self_check(only: Vec<String>, perturb_hamiltonian: bool) -> ExitCode {
    if let Some(bad) = only.iter().find(|id| !criterion_ids().any(|known| known == id.as_str())) {
        let known: Vec<&str> = criterion_ids().collect();
        eprintln!("error: unknown criterion '{bad}' (known: {})", known.join(", "));
        return ExitCode::from(EXIT_VALIDATION);
    }
    let options = SelfCheckOptions { perturb_hamiltonian };
    let select = |id: &str| only.is_empty() || only.iter().any(|o| o == id);
    let report = run_criteria(options, select, |c| println!("{c}"));
    let total = report.criteria.len();
    let failed: Vec<&str> = report.failures().map(|c| c.id.as_str()).collect();
    if failed.is_empty() {
        println!("self-check: {total}/{total} passed");
        ExitCode::SUCCESS
    } else {
        println!(
            "self-check: {}/{total} passed; failing: {}",
            total - failed.len(),
            failed.join(", ")
        );
        ExitCode::from(EXIT_SELF_CHECK)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_VALIDATION),
            };
        }
    };

    match cli.command {
        Command::Run { config, out, method } => run(config, out, method),
        Command::Sweep { config_dir } => sweep(config_dir),
        Command::SelfCheck { only, perturb_hamiltonian } => self_check(only, perturb_hamiltonian),
    }
}
