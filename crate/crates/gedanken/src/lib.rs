//! Command-line front end for `gedanken-core`: scenario listing, single runs,
//! parameter sweeps, and the JSON/CSV report formats.

pub mod cli;
pub mod report;
pub mod values;

pub use cli::{execute, Cli, Outcome};
pub use report::{ReportDoc, to_json, from_json};
