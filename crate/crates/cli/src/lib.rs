//! Command-line front end for `ehcap-core`: argument parsing, the bounds CSV
//! writer and the JSON format for intrinsic-volume sequences.

pub mod commands;
pub mod error;
pub mod seqfile;

pub use error::{CliError, CliResult};
