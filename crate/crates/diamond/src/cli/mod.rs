//! Configuration ingestion, figure-style reproduction presets, and the
//! command implementations behind the binary's subcommands.

pub mod commands;
pub mod config;
pub mod presets;

pub use commands::{
    cmd_optimize, cmd_reproduce, cmd_smatrix, cmd_sweep, cmd_verify, CSV_HEADER,
};
pub use config::RunConfig;
