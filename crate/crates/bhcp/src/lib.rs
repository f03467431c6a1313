//! File formats, the parallel sweep driver and the command-line front end
//! for `bhcp-core`.

pub mod cli;
pub mod error;
pub mod field_file;
pub mod kappa;
pub mod manifest;
pub mod memo;
pub mod parallel;

pub use error::{CliError, Result};
