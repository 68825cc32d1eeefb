use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eof_cli::{CliError, CliResult, ExperimentConfig, SampleFamily};
use eof_core::entanglement::ConvexRoofConfig;
use eof_core::families::Condition;

/// Entanglement of formation and strong superadditivity experiments.
#[derive(Parser)]
#[command(name = "eof", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute S(rho_A1A2), R, the pair EoF sum and Delta E_F for the counterexample state.
    VerifyCounterexample {
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Sample four-qubit pure states and write a CSV histogram of Delta E_F.
    Histogram {
        #[arg(long, value_enum, default_value = "random")]
        family: SampleFamily,
        #[arg(long, default_value_t = 50_000)]
        samples: usize,
        #[arg(long, default_value_t = 30)]
        bins: usize,
        #[arg(long, env = "EOF_SEED", default_value_t = 0)]
        seed: u64,
        /// Worker threads (defaults to available parallelism).
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the structural conditions on a state or family file.
    Check {
        path: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [1u8, 2, 3])]
        conditions: Vec<u8>,
    },
    /// Entanglement of formation of a state file across `side | rest`.
    Eof {
        path: PathBuf,
        /// Labels on one side of the cut (defaults to the first subsystem).
        #[arg(long, value_delimiter = ',')]
        side: Vec<String>,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long)]
        ensemble_size: Option<usize>,
        #[arg(long, env = "EOF_SEED", default_value_t = 0)]
        seed: u64,
    },
}

fn to_json(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable output")
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::VerifyCounterexample { json } => {
            let report = eof_cli::verify_counterexample()?;
            if json {
                println!("{}", to_json(&report));
            } else {
                print!("{}", report.to_text());
            }
            let deviations = report.deviations();
            if !deviations.is_empty() {
                return Err(CliError::Deviation(deviations.join("; ")));
            }
        }
        Command::Histogram {
            family,
            samples,
            bins,
            seed,
            workers,
            out,
        } => {
            let config = ExperimentConfig {
                family,
                samples,
                bins,
                seed,
                workers: workers.unwrap_or_else(eof_cli::default_workers),
                output_path: out,
            };
            let result = eof_cli::run_delta_histogram(&config)?;
            eprintln!(
                "{} samples: min {} max {} negatives {} -> {}",
                samples,
                result.min_delta,
                result.max_delta,
                result.negative_count,
                config.output_path.display()
            );
        }
        Command::Check { path, conditions } => {
            let conditions = conditions
                .into_iter()
                .map(|n| {
                    Condition::from_number(n)
                        .ok_or_else(|| CliError::Validation(format!("unknown condition {n}; expected 1, 2 or 3")))
                })
                .collect::<CliResult<Vec<_>>>()?;
            let state = eof_cli::load_input(&path)?;
            println!("{}", to_json(&eof_cli::check_state(&state, &conditions)?));
        }
        Command::Eof {
            path,
            side,
            restarts,
            ensemble_size,
            seed,
        } => {
            let state = eof_cli::load_input(&path)?;
            let side = if side.is_empty() {
                vec![state.layout().labels()[0].to_string()]
            } else {
                side
            };
            let config = ConvexRoofConfig {
                restarts,
                ensemble_size,
                seed,
                ..ConvexRoofConfig::default()
            };
            println!("{}", to_json(&eof_cli::eof_state(&state, &side, &config)?));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
