//! Batch front end for `retpot-core`: one JSON scenario file describes the
//! source, the discretization and the evaluation grid; commands write CSV
//! or JSON into an output directory.

pub mod run;
pub mod scenario;

use std::path::Path;

pub use run::{run, Command, Outcome, RunError};
pub use scenario::{parse_scenario, Issue, Scenario};

/// Reads, parses and runs a scenario file. Every error maps to exit status 1.
pub fn run_file(scenario: &Path, command: Command, out_dir: &Path) -> Result<Outcome, RunError> {
    let text = std::fs::read_to_string(scenario).map_err(|source| RunError::Io {
        path: scenario.to_path_buf(),
        source,
    })?;
    let scenario = parse_scenario(&text).map_err(RunError::Scenario)?;
    run(&scenario, command, out_dir)
}
