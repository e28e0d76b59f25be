//! Scenario files, the check runner and report emission behind the `smtlab`
//! binary.

pub mod bounds;
pub mod runner;
pub mod scenario;

pub use bounds::{compare_bounds, BoundsTable};
pub use runner::{run, select_checks, CheckOutcome, Report, RunOptions, SelectError, Status, CHECK_NAMES};
pub use scenario::{load_scenario, parse_scenario, Scenario, ScenarioError};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILED: i32 = 2;
    pub const SCENARIO_ERROR: i32 = 3;
    /// Bad command-line arguments, including unknown check names.
    pub const USAGE: i32 = 64;
}
