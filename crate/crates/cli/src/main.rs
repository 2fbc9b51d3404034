use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use twophoton::{run, ExperimentConfig, Mode, RunOptions};

#[derive(Parser)]
#[command(name = "twophoton", version, about = "Two-photon laser entanglement sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Atomic steady state and master-equation coefficients at one point.
    Coeffs(Args),
    /// Moment trajectories from the vacuum.
    Evolve(Args),
    /// Steady states and stability over a grid.
    Steady(Args),
    /// Phase/control-frequency map of the Duan parameter.
    ScanReit(Args),
    /// Symmetric resonant scan; exits 3 if any stable point is entangled.
    ScanDrr(Args),
    /// Truncated Fock evolution against the moment equations.
    OracleCompare(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    /// Seed for randomized draws; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Coeffs(a) => (Mode::Coeffs, a),
        Command::Evolve(a) => (Mode::Evolve, a),
        Command::Steady(a) => (Mode::Steady, a),
        Command::ScanReit(a) => (Mode::ScanReit, a),
        Command::ScanDrr(a) => (Mode::ScanDrr, a),
        Command::OracleCompare(a) => (Mode::OracleCompare, a),
    };
    let opts = RunOptions {
        out_dir: args.out,
        workers: args.workers,
        seed: args.seed,
    };
    let result = ExperimentConfig::load(&args.config).and_then(|cfg| run(&cfg, mode, &opts));
    match result {
        Ok(m) => {
            for a in &m.artifacts {
                println!("{mode}: wrote {} ({} rows)", opts.out_dir.join(&a.file).display(), a.rows);
            }
            for f in &m.findings {
                println!("finding: {f}");
            }
            ExitCode::from(m.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
