use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use efr_core::driver::{parse_config, run_simulation, RunConfig};
use efr_core::Error;

#[derive(Parser)]
#[command(name = "efr-atmos", version, about = "Evolve-filter-relax solver for dry atmospheric benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark and write diagnostics, snapshots and a manifest.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "output")]
        output_dir: PathBuf,
        /// Single-threaded reductions. The solver is always single-threaded,
        /// so this only documents intent in scripts.
        #[arg(long)]
        deterministic: bool,
    },
    /// Validate a configuration file without running it.
    Check { config: PathBuf },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

fn load(path: &Path) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        key: None,
        line: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_config(&text)
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(if err.is_config() { EXIT_CONFIG } else { EXIT_RUNTIME })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { config } => match load(&config) {
            Ok(cfg) => {
                println!(
                    "{}: ok ({}, h = {} m, {} steps)",
                    config.display(),
                    cfg.benchmark,
                    cfg.h,
                    cfg.n_steps()
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Run { config, output_dir, deterministic: _ } => {
            let mut cfg = match load(&config) {
                Ok(cfg) => cfg,
                Err(e) => return fail(&e),
            };
            cfg.output_dir = Some(output_dir.clone());
            match run_simulation::<f64>(&cfg) {
                Ok(out) => {
                    if let Some(last) = out.diagnostics.last() {
                        let front = last.front_location.map_or("none".to_string(), |f| format!("{f:.1} m"));
                        println!(
                            "t = {} s after {} steps: theta' in [{:.4}, {:.4}] K, w in [{:.4}, {:.4}] m/s, front {front}",
                            last.t, out.steps, last.theta_prime_min, last.theta_prime_max, last.w_min, last.w_max
                        );
                    }
                    println!("output written to {}", output_dir.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
    }
}
