//! Command-line front end for `integral-balance`.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 I/O failure, 4 nothing
//! recovered.

pub mod commands;
pub mod persistence;

use std::fmt;
use std::process::ExitCode;

pub use commands::{run, Cli};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    NotFound(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::NotFound(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "invalid arguments: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::NotFound(m) => write!(f, "not found: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<integral_balance::Error> for CliError {
    fn from(e: integral_balance::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Formats `x` with 17 significant digits, plain decimal notation where
/// reasonable and `e` notation otherwise. Locale-independent.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-5..17).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        sci
    }
}
