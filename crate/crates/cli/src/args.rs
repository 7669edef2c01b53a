//! Command-line surface. Three subcommands share the generator
//! mini-language (`path:N`, `cycle:N`, `random:N:P[:SEED]`,
//! `bipartite:A:B`, `chain:K`); `sweep` additionally accepts range sugar in
//! the first numeric slot (`chain:1..15`, `path:10..100..10`).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use maxmatch_core::mc::DEFAULT_TRANSITION_CAP;

#[derive(Parser, Debug)]
#[command(
    name = "maxmatch",
    version,
    about = "Self-stabilizing matching protocol workbench: run, sweep, model check"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one experiment and write trace, stats, and verification report.
    Run(RunArgs),
    /// Run a grid of experiments and tabulate moves against the bounds.
    Sweep(SweepArgs),
    /// Exhaustively check tiny instances under every daemon choice.
    Modelcheck(ModelcheckArgs),
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Experiment description file (TOML); exclusive with the flags below.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Generator spec, e.g. chain:3 or random:20:0.3:7.
    #[arg(long, value_name = "SPEC", conflicts_with = "graph")]
    pub generate: Option<String>,

    /// Graph+matching file (`n m` header, then `u v flag` lines).
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,

    /// Matching source: auto, greedy, or file.
    #[arg(long, value_name = "SOURCE")]
    pub matching: Option<String>,

    /// Initial configuration: clean, random, or a configuration file.
    #[arg(long, value_name = "INIT")]
    pub init: Option<String>,

    /// Daemon strategy: sync, central-lowest, central-random,
    /// distributed-random, adversarial, or replay:FILE.
    #[arg(long, value_name = "STRATEGY")]
    pub strategy: Option<String>,

    /// Seed for the run's randomness (init draw + daemon share one stream).
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,

    /// Abort after this many moves (default: theoretical bound + 1).
    #[arg(long, value_name = "N")]
    pub move_limit: Option<u64>,

    /// Repeat with seeds seed, seed+1, ... (output files gain -0, -1, ...).
    #[arg(long, value_name = "N")]
    pub repetitions: Option<u32>,

    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "maxmatch-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Generator specs, ranges allowed (chain:1..15, path:10..100..10).
    #[arg(long, value_name = "SPEC", required = true, num_args = 1..)]
    pub generate: Vec<String>,

    /// Comma-separated strategy list.
    #[arg(long, value_name = "LIST", default_value = "sync")]
    pub strategies: String,

    /// Seeds 0..N per cell.
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub seeds: u64,

    /// Initial configurations: clean, random, or both.
    #[arg(long, value_name = "INIT", default_value = "clean")]
    pub init: String,

    /// Abort each cell after this many moves (default: its bound + 1).
    #[arg(long, value_name = "N")]
    pub move_limit: Option<u64>,

    /// Output directory for summary.tsv.
    #[arg(long, value_name = "DIR", default_value = "maxmatch-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ModelcheckArgs {
    /// Named instances (k2, p3, p4, c4, chain1-foreign) or generator
    /// specs; empty means the default suite.
    #[arg(value_name = "INSTANCE")]
    pub instances: Vec<String>,

    /// Transition budget; larger state spaces are refused, not truncated.
    #[arg(long, value_name = "N", default_value_t = DEFAULT_TRANSITION_CAP)]
    pub cap: u64,

    /// Directory for modelcheck.tsv (printed to stdout either way).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}
