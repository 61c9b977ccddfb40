//! Multilevel runtime monitors: binding, evaluation, reports and coverage.

pub mod binding;
pub mod coverage;
pub mod engine;
pub mod report;
pub mod run;

pub use binding::{parse_bindings, BindingError, MonitorBinding};
pub use coverage::{coverage_matrix, Cell, CoverageError, CoverageMatrix};
pub use engine::{build_monitors, run_monitors, Alert, Monitor, MonitorError, OnlineMonitors, PropertyRun};
pub use report::{hazard_onsets, Detection, HazardOnset, ReportError, RunReport, EXIT_CLEAN, EXIT_MISSED_HAZARD, EXIT_VIOLATIONS};
pub use run::{RunError, RunOutcome, RunSetup};
