//! Plain-text solution files: one `name value` pair per line, `#` comments.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::milp::{validate_solution, MilpModel, MilpSolution, ModelError, SolveStatus, ViolationReport};

const IMPORT_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SolutionFileError {
    #[error("line {line}: unknown variable `{name}`")]
    UnknownVariable { line: usize, name: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("imported solution is infeasible:\n{0}")]
    Rejected(ViolationReport),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportedSolution {
    pub solution: MilpSolution,
    /// One entry per variable absent from the file (defaulted to 0).
    pub warnings: Vec<String>,
}

/// Writes every variable of `model` with its value in `sol`.
pub fn write_solution(model: &MilpModel, sol: &MilpSolution) -> String {
    let mut out = String::new();
    writeln!(out, "# status {}", sol.status).unwrap();
    writeln!(out, "# objective {}", sol.objective_value).unwrap();
    for (v, x) in model.variables().iter().zip(&sol.values) {
        // adding 0.0 turns -0 into 0
        writeln!(out, "{} {}", v.name, x + 0.0).unwrap();
    }
    out
}

pub fn save_solution(model: &MilpModel, sol: &MilpSolution, path: impl AsRef<Path>) -> Result<(), SolutionFileError> {
    std::fs::write(path, write_solution(model, sol))?;
    Ok(())
}

/// Parses a solution for `model` and validates it before returning.
pub fn parse_solution(model: &MilpModel, text: &str) -> Result<ImportedSolution, SolutionFileError> {
    let mut values = vec![0.0; model.num_vars()];
    let mut seen = HashSet::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(SolutionFileError::Parse { line, msg: format!("expected `name value`, got `{content}`") });
        };
        let id = model
            .var_by_name(name)
            .ok_or_else(|| SolutionFileError::UnknownVariable { line, name: name.to_string() })?;
        let value: f64 = value
            .parse()
            .map_err(|_| SolutionFileError::Parse { line, msg: format!("bad value `{value}` for `{name}`") })?;
        if !value.is_finite() {
            return Err(SolutionFileError::Parse { line, msg: format!("non-finite value for `{name}`") });
        }
        if !seen.insert(id) {
            return Err(SolutionFileError::Parse { line, msg: format!("`{name}` listed twice") });
        }
        values[id.0] = value;
    }
    let warnings: Vec<String> = model
        .variables()
        .iter()
        .enumerate()
        .filter(|(j, _)| !seen.contains(&crate::milp::VarId(*j)))
        .map(|(_, v)| format!("`{}` missing, defaulted to 0", v.name))
        .collect();
    let solution = MilpSolution {
        objective_value: model.objective_value(&values),
        values,
        status: SolveStatus::Feasible,
    };
    let report = validate_solution(model, &solution, IMPORT_TOL)?;
    if !report.is_empty() {
        return Err(SolutionFileError::Rejected(report));
    }
    Ok(ImportedSolution { solution, warnings })
}

pub fn import_solution(model: &MilpModel, path: impl AsRef<Path>) -> Result<ImportedSolution, SolutionFileError> {
    parse_solution(model, &std::fs::read_to_string(path)?)
}
