//! `pqsla` — deterministic Monte Carlo simulator and analytics toolkit for
//! post-quantum signature deployment in payment networks.

mod commands;
mod corpus_io;
mod emit;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pqsla_core::Error;

#[derive(Parser)]
#[command(
    name = "pqsla",
    about = "Monte Carlo latency simulation and SLA analytics for post-quantum payment signing",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Configuration file (TOML); omitted fields take built-in defaults.
    #[arg(long, env = "PQSLA_CONFIG", global = true)]
    config: Option<PathBuf>,

    /// Output directory; defaults to `out/<timestamp>-seed<k>/`.
    #[arg(long, env = "PQSLA_OUT", global = true)]
    out: Option<PathBuf>,

    /// Master seed override (beats the config file value).
    #[arg(long, env = "PQSLA_SEED", global = true)]
    seed: Option<u64>,

    /// Number of simulation days.
    #[arg(long, env = "PQSLA_DAYS", global = true)]
    days: Option<u32>,

    /// Transactions sampled per day.
    #[arg(long, env = "PQSLA_SAMPLE", global = true)]
    sample: Option<u64>,

    /// Comma-separated algorithm filter (baseline always retained).
    #[arg(long, env = "PQSLA_ALGOS", value_delimiter = ',', global = true)]
    algos: Option<Vec<String>>,

    /// Run a single scenario instead of the seasonal mixture.
    #[arg(long, env = "PQSLA_SCENARIO", global = true)]
    scenario: Option<String>,

    /// HSM deployment tier (additive per-hop overhead).
    #[arg(long, env = "PQSLA_HSM", value_enum, global = true)]
    hsm: Option<HsmTier>,

    /// HSM signing servers per institution.
    #[arg(long, env = "PQSLA_SERVERS", global = true)]
    servers: Option<u32>,

    /// Emission format for tables.
    #[arg(long, env = "PQSLA_FORMAT", value_enum, default_value_t = Format::Both, global = true)]
    format: Format,

    /// Also emit static SVG charts.
    #[arg(long, env = "PQSLA_PLOTS", global = true)]
    plots: bool,

    /// Dump the generated transaction streams (one CSV per day) for audit.
    /// Streams are regenerable from the seed, so this is off by default.
    #[arg(long, env = "PQSLA_DUMP_TRANSACTIONS", global = true)]
    dump_transactions: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum HsmTier {
    /// CPU/software signing, no added hop latency.
    Software,
    /// PCIe-attached appliance, +0.5 ms per hop.
    Pcie,
    /// Network-attached service, +2.0 ms per hop.
    Network,
}

impl HsmTier {
    fn per_hop_ms(self) -> f64 {
        match self {
            HsmTier::Software => 0.0,
            HsmTier::Pcie => 0.5,
            HsmTier::Network => 2.0,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Blocks {
    /// 50-transaction blocks within the representative day (indicative).
    WithinDay,
    /// One maximum per corpus day.
    Daily,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the seasonally mixed corpus and emit per-day results.
    Run,
    /// Tail, goodness-of-fit, effect-size and variance analytics over an
    /// existing corpus directory.
    Analyze {
        /// Block-maxima source for the GEV fit.
        #[arg(long, value_enum, default_value_t = Blocks::WithinDay)]
        blocks: Blocks,
        /// Bootstrap resamples for GEV quantile CIs.
        #[arg(long, default_value_t = 500)]
        resamples: usize,
    },
    /// Deterministic decision tables: dilution, formats, routes, exposure,
    /// projections and costs.
    Report,
    /// Queue utilisation sweeps: TPS grid and hourly profiles.
    Sweep,
    /// run + analyze + report + sweep in one pass.
    All {
        #[arg(long, value_enum, default_value_t = Blocks::WithinDay)]
        blocks: Blocks,
        #[arg(long, default_value_t = 500)]
        resamples: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config(_) | Error::Parse(_) | Error::UnknownAlgorithm(_) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(3),
            }
        }
    }
}
