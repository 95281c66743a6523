//! Sweeps, zero counting, cycle detection and verification suites built on
//! `cyclescope-core`, plus the file formats the command-line tool reads and writes.

pub mod commands;
pub mod error;
pub mod output;
pub mod parallel;
pub mod sampling;
pub mod spec_file;
pub mod verify;

pub use error::{exit, CliError, CliResult};
pub use spec_file::SpecFile;
