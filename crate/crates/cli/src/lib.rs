//! Command-line workbench for the self-stabilizing matching protocol:
//! experiment specifications, text file formats, and the `run` / `sweep` /
//! `modelcheck` subcommands. The protocol itself, the daemon engine, the
//! verification oracles, and the exhaustive model checker live in
//! `maxmatch-core`; this crate adds everything that needs `std` — files,
//! argument parsing, and parallel sweeps.

#![forbid(unsafe_code)]

pub mod args;
pub mod commands;
pub mod experiment;
pub mod formats;
