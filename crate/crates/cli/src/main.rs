use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod context;
mod verify;

use context::Context;
use qblow_core::semisimple::DEFAULT_SAMPLES;

#[derive(Parser, Debug)]
#[command(
    name = "qblow",
    version,
    about = "Genus-zero Gromov-Witten invariants and small quantum cohomology of P^n and its point blow-ups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Largest c1(beta) of enumerated curve classes [default: 2n + 4]
    #[arg(long, global = true)]
    c1_bound: Option<i64>,

    /// Largest number of insertions per correlator [default: no limit]
    #[arg(long, global = true)]
    max_insertions: Option<usize>,

    /// Seed for sampled parameter points and elements
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Invariant cache (JSON lines) [default: $XDG_CACHE_HOME/qblow/invariants.jsonl]
    #[arg(long, global = true, env = "QBLOW_CACHE")]
    cache: Option<PathBuf>,

    /// Neither read nor write the cache
    #[arg(long, global = true)]
    no_cache: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// Same as --format json
    #[arg(long, global = true)]
    json: bool,

    /// Geometries processed in parallel (only without a cache)
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Read the geometry from a JSON document written by `qblow geometry --json`
    #[arg(long, global = true, value_name = "FILE")]
    geometry: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Basis, pairing and effective cone generators
    Geometry { specs: Vec<String> },
    /// Invariants within the window
    Invariants {
        specs: Vec<String>,
        /// Only the purely exceptional invariants of one blown-up point
        #[arg(long)]
        pure_only: bool,
        /// Only require the invariants the small quantum product needs
        #[arg(long)]
        three_point: bool,
        /// Re-derive pulled-back invariants by WDVV instead of importing them
        #[arg(long)]
        solve_pullback: bool,
    },
    /// Structure constants of the small quantum product at a point
    Qtable {
        specs: Vec<String>,
        /// Evaluate at q = 0
        #[arg(long)]
        classical: bool,
        /// Novikov variables, one per curve-lattice coordinate, comma separated
        /// (`--q 1,-1/2`) [default: sampled]
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        q: Vec<String>,
    },
    /// Generic semisimplicity verdict
    Semisimple {
        specs: Vec<String>,
        /// Force q = 0 at every sample
        #[arg(long)]
        classical: bool,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Blow up points one at a time, with a verdict and fibre check per stage
    Theorem {
        spec: Option<String>,
        #[arg(long, default_value_t = 1)]
        points: usize,
    },
    /// Checklist of the known identities for blow-ups of P^n
    VerifyPaper {
        #[arg(long, default_value_t = 5)]
        max_n: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = match Context::new(&cli) {
        Ok(ctx) => ctx,
        Err(e) => return report(&e),
    };
    let result = match &cli.command {
        Command::Geometry { specs } => commands::geometry(&ctx, specs),
        Command::Invariants {
            specs,
            pure_only,
            three_point,
            solve_pullback,
        } => commands::invariants(&ctx, specs, *pure_only, *three_point, *solve_pullback),
        Command::Qtable {
            specs,
            classical,
            q,
        } => commands::qtable(&ctx, specs, *classical, q),
        Command::Semisimple {
            specs,
            classical,
            samples,
        } => commands::semisimple(&ctx, specs, *classical, *samples),
        Command::Theorem { spec, points } => commands::theorem(&ctx, spec.as_deref(), *points),
        Command::VerifyPaper { max_n } => verify::run(&ctx, *max_n),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => report(&e),
    }
}

fn report(e: &anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    ExitCode::from(context::exit_code(e))
}
