//! Front end of the `solid-angle` binary: cone files, reports and the
//! subcommands behind them.

pub mod input;
pub mod report;
pub mod run;

/// Why a run stopped short.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable or invalid input; exit code 2.
    Input(String),
    /// A cone could not be processed; exit code 3.
    Numeric,
}
