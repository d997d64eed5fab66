//! Command-line pipeline and HTTP service around the `wirelay` library.

pub mod commands;
pub mod server;

pub use commands::{exit_code, run, Cli};
