use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hkle_cli::{exit, run, CliError, Command, RunConfig};

/// Karhunen–Loève reluctivity fields and inductance statistics.
#[derive(Parser)]
#[command(name = "hkle", version)]
struct Args {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG seed (overrides `seed`), at most 2^63 - 1.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override one config key, e.g. `--set kernel.d=[2,10,100]`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Eigenvalues, cumulative variance ratio and retained eigenfunctions.
    Eigens,
    /// H-matrix memory and accuracy study.
    Memory,
    /// Inductance mean and standard deviation by stochastic collocation.
    Uq,
    /// One reluctivity realization and its field solution.
    Sample {
        /// Explicit ξ, comma separated; default draws uniform values from the seed.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xi: Option<Vec<f64>>,
    },
    /// Region sizes and mesh checks.
    MeshInfo,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}

fn execute(args: Args) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = RunConfig::load(args.config.as_deref(), &args.set)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.output.dir = out;
    }
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::config("--threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError { code: exit::CONFIG, message: e.to_string() })?;
    }
    let command = match args.command {
        Cmd::Eigens => Command::Eigens,
        Cmd::Memory => Command::Memory,
        Cmd::Uq => Command::Uq,
        Cmd::Sample { xi } => Command::Sample { xi },
        Cmd::MeshInfo => Command::MeshInfo,
    };
    run(&command, &cfg)
}
