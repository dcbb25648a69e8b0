//! Scenario-driven front end: a JSON scenario selects one pipeline, whose
//! outputs (JSON, CSV, SVG) land in an output directory next to a
//! `summary.json`.

mod run;
mod scenario;

use std::path::Path;

use serde_json::json;

pub use run::{
    exit_code_for, run, scenario_hash, RunSummary, Stage, StageStatus, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_SCHEMA,
    EXIT_SOLVER,
};
pub use scenario::{
    parse_scenario, parse_scenario_str, BoundarySpec, ConductivitySpec, Geometry, MonotonicitySpec, OnedSpec,
    OutputSpec, ProbeSpec, Region, RellichSpec, Scenario, ScenarioKind, Shape, SolverSpec, WolffSpec,
    SCHEMA_VERSION,
};

use crate::{Error, Result};

fn write_error(out_dir: &Path, err: &Error, code: i32) {
    let body = json!({ "error": error_kind(err), "message": err.to_string(), "exit_code": code });
    let written = std::fs::create_dir_all(out_dir)
        .and_then(|_| std::fs::write(out_dir.join("error.json"), serde_json::to_string_pretty(&body).unwrap_or_default()));
    if let Err(e) = written {
        log::error!("could not write error.json: {e}");
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::InvalidExponent(_) => "invalid_exponent",
        Error::InvalidMesh(_) => "invalid_mesh",
        Error::InvalidField(_) => "invalid_field",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::Solver(_) => "solver",
        Error::UnresolvedProbe(_) => "unresolved_probe",
        Error::Integration(_) => "integration",
        Error::NotConverged(_) => "not_converged",
        Error::Reconstruction(_) => "reconstruction",
        Error::Scenario(_) => "scenario",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
        Error::Csv(_) => "csv",
    }
}

fn run_and_record(scenario_path: &Path, out_dir: &Path) -> Result<RunSummary> {
    let scenario = parse_scenario(scenario_path)?;
    let summary = run(&scenario, out_dir)?;
    std::fs::write(out_dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    Ok(summary)
}

/// Parses, runs, and writes `summary.json` (or `error.json` on failure).
/// Returns the process exit code: 0 ok, 2 schema error, 3 solver failure,
/// 4 inconclusive reconstruction.
pub fn execute(scenario_path: &Path, out_dir: &Path) -> (i32, Option<RunSummary>) {
    match run_and_record(scenario_path, out_dir) {
        Ok(summary) => (summary.exit_code(), Some(summary)),
        Err(err) => {
            let code = exit_code_for(&err);
            log::error!("{err}");
            write_error(out_dir, &err, code);
            (code, None)
        }
    }
}
