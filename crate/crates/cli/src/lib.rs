//! Config-driven experiment harness: α sweeps, convergence tables, noise
//! sweeps and single-shot prediction dumps, written as CSV plus JSON
//! summaries.

pub mod commands;
pub mod config;

use std::fmt;

pub use commands::{alpha_sweep, convergence, noise_sweep, predict, Outcome};
pub use config::{DegreeRange, ExperimentConfig};

/// Slack added to every bound comparison for quadrature and truncation error.
pub const QUAD_BUDGET: f64 = 1e-8;

/// Failures that map to dedicated exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable, malformed or invalid configuration.
    Config(String),
    /// The signal is outside the class the bound requires.
    Refused(String),
    /// Output was written but at least one row broke its bound.
    BoundViolated(Vec<String>),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Refused(_) => 3,
            Failure::BoundViolated(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(msg) => write!(f, "config error: {msg}"),
            Failure::Refused(msg) => write!(f, "refused: {msg}"),
            Failure::BoundViolated(rows) => {
                write!(f, "bound violated in {} row(s)", rows.len())?;
                for row in rows {
                    write!(f, "\n  {row}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for Failure {}

/// Exit code for an error chain: dedicated codes for [`Failure`] and class
/// refusals raised by the library, `1` for anything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return f.exit_code();
        }
        if let Some(horizon::Error::SignalOutsideClass(_)) = cause.downcast_ref::<horizon::Error>() {
            return 3;
        }
    }
    1
}
