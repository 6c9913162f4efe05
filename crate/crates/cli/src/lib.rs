//! Command-line driver for `colotame-core`: configuration files, the
//! `invert`, `certify` and `selftest` commands, and their output files.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod selftest;

pub use commands::{
    certify, default_grading, invert, CertifyOutcome, InvertOutcome, GENERATOR_FILE, RESULT_FILE,
    SOLUTION_FILE,
};
pub use config::RunConfig;
pub use error::CliError;
