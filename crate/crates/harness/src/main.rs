use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use teleamp_harness::config::RunConfig;
use teleamp_harness::error::{HarnessError, Result};
use teleamp_harness::figures::FigureSpec;
use teleamp_harness::solve::solve_mu;
use teleamp_harness::sweep::{run_sweep, write_csv};
use teleamp_harness::validate::{self, Mutations};

/// Teleportation-based noiseless amplifier simulator.
#[derive(Parser)]
#[command(name = "teleamp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the configured model over an α grid and write a CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Find μ giving the target small-signal gain; prints JSON.
    SolveMu {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        target: f64,
    },
    /// Run the built-in checks; one JSON line each.
    Validate {
        /// Only checks whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
        /// Deliberately break the model (used to test the checks themselves).
        #[arg(long, value_enum, hide = true)]
        mutate: Vec<Mutation>,
    },
    /// Write the per-panel CSVs of a figure.
    Figure {
        #[arg(long, value_parser = clap::value_parser!(u32).range(4..=6))]
        id: u32,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mutation {
    SplitterSign,
    FockD8,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let rows = run_sweep(&cfg)?;
            let file = std::fs::File::create(&out)?;
            write_csv(&rows, std::io::BufWriter::new(file))?;
            let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
            if failed > 0 {
                eprintln!("{failed} of {} points failed; see the error column", rows.len());
            }
        }
        Command::SolveMu { config, target } => {
            let cfg = RunConfig::load(&config)?;
            let sol = solve_mu(&cfg, target)?;
            println!("{}", serde_json::to_string(&sol).expect("solution serialises"));
        }
        Command::Validate { filter, mutate } => {
            let mut m = Mutations::default();
            for x in mutate {
                match x {
                    Mutation::SplitterSign => m.splitter_sign = true,
                    Mutation::FockD8 => m.fock_dim = Some(8),
                }
            }
            let stdout = std::io::stdout();
            let results = validate::run(filter.as_deref(), &m, stdout.lock())?;
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(HarnessError::Validation {
                    failed,
                    total: results.len(),
                });
            }
        }
        Command::Figure { id, out_dir } => {
            let spec = FigureSpec::builtin(id)?;
            let mut out = std::io::stdout().lock();
            for p in spec.write(&out_dir)? {
                writeln!(out, "{}", p.display())?;
            }
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
