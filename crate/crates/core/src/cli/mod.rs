//! Command-line front end: scenario files in, CSV tables out.

mod commands;
pub mod scenario_file;
pub mod table;

pub use commands::{execute, parse_grid, run, Cli, THREADS_ENV};
pub use scenario_file::{load_scenario, parse_scenario, parse_scenario_str, serialize_scenario, ScenarioFile};
pub use table::{format_real, Cell, ResultTable};
