//! Command line front end for crossjump-core: spec files in, verdicts and
//! tables out. Everything that can fail carries the process exit code it
//! maps to, so the binary in main.rs stays a thin dispatcher.

use std::fmt;
use std::io;
use std::path::PathBuf;

use crossjump_core::CrossingReport;

pub mod commands;
pub mod portrait;
pub mod report;
pub mod spec_file;

/// Command failure, sorted by which stage of the pipeline gave up.
///
/// Exit codes are part of the contract: scripts branch on them.
#[derive(Debug)]
pub enum CliError {
    /// The numbers do not describe a valid system (non-Hurwitz matrix,
    /// nonpositive jump parameter, negative slope, non-finite entry).
    Invalid(String),
    /// Valid matrices, but the fields do not cross the line consistently.
    NotCrossing(CrossingReport),
    /// The command itself failed: displacement undefined, simulation error,
    /// unwritable output file.
    Runtime(String),
    /// The spec file is not valid TOML or not a valid spec layout.
    Parse { path: PathBuf, message: String },
    /// The spec file cannot be read at all.
    Unreadable { path: PathBuf, source: io::Error },
}

impl CliError {
    /// Stable exit codes: 3 invalid system, 4 crossing violation, 5 runtime
    /// failure, 65 malformed spec (EX_DATAERR), 66 unreadable spec
    /// (EX_NOINPUT). Code 2 is taken by argument parsing.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 3,
            CliError::NotCrossing(_) => 4,
            CliError::Runtime(_) => 5,
            CliError::Parse { .. } => 65,
            CliError::Unreadable { .. } => 66,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(message) | CliError::Runtime(message) => f.write_str(message),
            CliError::NotCrossing(report) => write!(f, "{report}"),
            CliError::Parse { path, message } => {
                write!(f, "cannot parse {}: {message}", path.display())
            }
            CliError::Unreadable { path, source } => {
                write!(f, "cannot read {}: {source}", path.display())
            }
        }
    }
}

impl std::error::Error for CliError {}
