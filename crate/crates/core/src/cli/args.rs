use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use super::DEFAULT_SEED;

#[derive(Debug, Clone, Parser)]
#[command(name = "moore-nogo", version)]
#[command(about = "Consistent-machine witnesses for finite records, and desk-scale no-go demonstrations")]
pub struct Cli {
    /// State bound for `enumerate`.
    #[arg(long, global = true, default_value_t = 3)]
    pub max_states: usize,

    /// Override the command's numerical tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Report)]
    pub format: Format,

    /// Write output here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Structured JSON report.
    Report,
    /// Comma-separated rows with a header line.
    Table,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Two record-identical, distinguishable machines for a trace.
    Witness {
        trace: PathBuf,
        #[command(flatten)]
        alphabets: AlphabetArgs,
    },
    /// All distinct machines consistent with a trace, per state bound.
    Enumerate {
        trace: PathBuf,
        #[command(flatten)]
        alphabets: AlphabetArgs,
    },
    /// Shortest experiment separating two machines.
    Distinguish { machine_a: PathBuf, machine_b: PathBuf },
    /// Minimal equivalent machine.
    Minimize { machine: PathBuf },
    /// CHSH value against the local-hidden-variable bound.
    Chsh {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also estimate S from this many sampled shots per correlator.
        #[arg(long)]
        shots: Option<usize>,
    },
    /// Peres-Mermin square and exhaustive classical assignment search.
    Ks,
    /// No-cloning overlap gap, with the record-level analogue.
    Noclone {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Trace for the record-level analogue (default: outputs 0, 1).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Number of seeded random qubit pairs.
        #[arg(long, default_value_t = 100)]
        random_pairs: usize,
    },
    /// Observer statistics for S versus S ⊗ φ under a blind observer.
    Exchange {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Count-rate records for point sources under one detector.
    Geiger {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also draw this many seeded Poisson one-second counts per source.
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct AlphabetArgs {
    /// Input alphabet, comma-separated, in order.
    #[arg(long, value_delimiter = ',')]
    pub inputs: Option<Vec<String>>,
    /// Output alphabet, comma-separated, in order.
    #[arg(long, value_delimiter = ',')]
    pub outputs: Option<Vec<String>>,
}
