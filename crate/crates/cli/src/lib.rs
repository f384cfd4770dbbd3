#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Command implementations behind the `lti-pmp` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod specfile;
pub mod sweep_csv;

pub use commands::{run, write_outputs, Command, LemmaOptions, Outcome};
pub use config::AnalysisConfig;
pub use error::CliError;
pub use report::Report;
pub use specfile::{parse_system, parse_system_str, SystemSpec};
pub use sweep_csv::{read_sweep_csv, write_sweep_csv, SweepRow};

pub const EXIT_HOLDS: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;
