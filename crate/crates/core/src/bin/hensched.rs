use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hensched::runs::{run_optimize, run_report, run_simulate, SwarmOverrides};
use hensched::{load_scenario, Error};

#[derive(Parser)]
#[command(name = "hensched", version, about = "Heat-exchanger network cleaning schedules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a fixed set of cleaning intervals.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// Comma-separated interval per exchanger in months, 0 = never clean.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        intervals: Vec<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search cleaning intervals with the particle swarm.
    Optimize {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        particles: Option<usize>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
        #[arg(long)]
        inertia_max: Option<f64>,
        #[arg(long)]
        inertia_min: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize the artifacts of a previous run.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate {
            scenario,
            intervals,
            out,
        } => {
            let scenario = load_scenario(&scenario)?;
            let artifacts = run_simulate(&scenario, &intervals, &out)?;
            eprintln!(
                "wrote {} (cleanings per exchanger: {:?})",
                out.display(),
                artifacts.cleaning_counts
            );
        }
        Command::Optimize {
            scenario,
            particles,
            iterations,
            seed,
            c1,
            c2,
            inertia_max,
            inertia_min,
            out,
        } => {
            let scenario = load_scenario(&scenario)?;
            let overrides = SwarmOverrides {
                particles,
                iterations,
                c1,
                c2,
                inertia_max,
                inertia_min,
            };
            let artifacts = run_optimize(&scenario, &overrides, seed, &out)?;
            eprintln!(
                "best intervals {:?}, total cost {:.0}; wrote {}",
                artifacts.gbest_intervals,
                artifacts.breakdowns.scheduled.total_j,
                out.display()
            );
        }
        Command::Report { input } => print!("{}", run_report(&input)?),
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
