//! Batch front end for `bloch-core`: potential file I/O and one function per
//! subcommand, each returning a [`report::RunReport`] and an exit code.

pub mod commands;
pub mod error;
pub mod file;
pub mod report;
pub mod suites;

pub use commands::{GlobalOptions, Outcome};
pub use error::{CliError, CliResult};
pub use file::PotentialFile;
pub use report::RunReport;
pub use suites::Suite;
