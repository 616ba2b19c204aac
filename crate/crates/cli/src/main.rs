use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

use commands::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "freefactor",
    version,
    about = "Factoriality and type data for free products of finite-dimensional algebras"
)]
struct Cli {
    /// Emit JSON instead of text where supported.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expansion factor of every algebra in the input.
    Ef { input: PathBuf },
    /// Factoriality test and T-invariant for a pair of algebras.
    Classify { input: PathBuf },
    /// Modular invariant group of every algebra in the input.
    Invariant { input: PathBuf },
    /// CSV of ef(M2, diag(λ, 1-λ)) over λ in [1/2, 99/100].
    Figure1 {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV of the certified region in the (λ, μ) square and its boundary.
    Figure2 {
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Region CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Boundary CSV; defaults to `<out>.boundary.csv`, or stdout after the region.
        #[arg(long)]
        boundary_out: Option<PathBuf>,
    },
    /// Truncated free-product space: dimension, modular residuals, centered moments.
    Fock {
        input: PathBuf,
        #[arg(long = "len", default_value_t = 4)]
        len: usize,
        #[arg(long = "t", default_value_t = 0.7, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the seeded property suites.
    Verify {
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn configure_threads() {
    if let Some(n) = std::env::var("FREEFACTOR_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a second initialization only happens in tests; ignoring it is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match cli.command {
        Command::Ef { input } => commands::ef(&input, cli.json),
        Command::Classify { input } => commands::classify(&input, cli.json),
        Command::Invariant { input } => commands::invariant(&input, cli.json),
        Command::Figure1 { samples, out } => commands::figure1(samples, out.as_deref()),
        Command::Figure2 {
            grid,
            out,
            boundary_out,
        } => commands::figure2(grid, out.as_deref(), boundary_out.as_deref()),
        Command::Fock {
            input,
            len,
            t,
            seed,
        } => commands::fock(&input, len, t, seed, cli.json),
        Command::Verify { trials, seed } => commands::verify(trials, seed, cli.json),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}
