use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ifp::{execute, exit, init_logging, Command, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "ifp",
    version,
    about = "Fixed points and convergence rates of interference mappings"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Sub {
    /// Run the fixed-point iteration; writes trace.csv and summary.txt.
    Solve(Common),
    /// Spectral radius of the asymptotic mapping; writes spectral.csv.
    Spectral(Common),
    /// Modulus of contraction of a convex mapping; writes contraction.csv.
    Contraction(Common),
    /// Generate a network and estimate its loads.
    Loadsim(Common),
    /// Error curves and lower bounds for several traffic levels.
    Fig1(Common),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() {
                exit::CONFIG
            } else {
                exit::SUCCESS
            };
            return ExitCode::from(code as u8);
        }
    };
    init_logging();
    let (command, args) = match cli.command {
        Sub::Solve(a) => (Command::Solve, a),
        Sub::Spectral(a) => (Command::Spectral, a),
        Sub::Contraction(a) => (Command::Contraction, a),
        Sub::Loadsim(a) => (Command::Loadsim, a),
        Sub::Fig1(a) => (Command::Fig1, a),
    };
    let result = ExperimentConfig::load(&args.config).and_then(|mut cfg| {
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        let out = cfg.output_dir(args.out.as_deref());
        log::info!("writing to {}", out.display());
        execute(command, &cfg, cfg.seed, &out)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ifp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
