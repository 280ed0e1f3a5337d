//! Exact MILP solving and the file bridge to external solvers.
//!
//! [`solve`] runs a branch-and-bound over the binary variables of a
//! [`MilpModel`], bounding with LP relaxations from the dense dual simplex in
//! [`simplex`]. [`mps`] and [`solution_file`] move models and solutions
//! to and from external tools.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::milp::{MilpModel, MilpSolution, ModelError, SolveStatus};

mod bnb;
pub mod enumerate;
pub mod mps;
pub mod simplex;
pub mod solution_file;

pub use mps::{export_mps, import_mps, read_mps, write_mps, MpsError};
pub use solution_file::{
    import_solution, parse_solution, save_solution, write_solution, ImportedSolution, SolutionFileError,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub time_limit_s: f64,
    pub rel_gap_tol: f64,
    pub abs_tol: f64,
    pub node_limit: Option<u64>,
    pub worker_count: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { time_limit_s: 60.0, rel_gap_tol: 1e-4, abs_tol: 1e-6, node_limit: None, worker_count: 1 }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: &str| Err(ModelError::InvalidConfig(msg.to_string()));
        if !(self.time_limit_s > 0.0) {
            return bad("time_limit_s must be positive");
        }
        if !(self.rel_gap_tol >= 0.0) || !(self.abs_tol >= 0.0) {
            return bad("tolerances must be non-negative");
        }
        if self.node_limit == Some(0) {
            return bad("node_limit must be positive");
        }
        if self.worker_count == 0 {
            return bad("worker_count must be at least 1");
        }
        Ok(())
    }

    /// Pruning slack around an incumbent value.
    pub fn prune_tolerance(&self, incumbent: f64) -> f64 {
        self.abs_tol.max(self.rel_gap_tol * incumbent.abs())
    }

    pub(crate) fn deadline(&self, start: Instant) -> Option<Instant> {
        if self.time_limit_s >= 1e9 {
            None
        } else {
            Some(start + std::time::Duration::from_secs_f64(self.time_limit_s))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub solution: Option<MilpSolution>,
    pub incumbent_obj: Option<f64>,
    pub best_bound: f64,
    /// `(incumbent - bound) / max(|incumbent|, 1e-9)`; infinite without an
    /// incumbent.
    pub rel_gap: f64,
    pub nodes_explored: u64,
    pub wall_time_s: f64,
    pub status: SolveStatus,
}

pub fn relative_gap(incumbent: f64, bound: f64) -> f64 {
    (incumbent - bound) / incumbent.abs().max(1e-9)
}

/// Branch-and-bound solve from scratch.
pub fn solve(model: &MilpModel, cfg: &SolveConfig) -> Result<SolveResult, ModelError> {
    bnb::branch_and_bound(model, cfg, None)
}

/// Branch-and-bound seeded with a starting point. An infeasible start is
/// ignored with a warning.
pub fn solve_with_start(model: &MilpModel, cfg: &SolveConfig, start: &[f64]) -> Result<SolveResult, ModelError> {
    bnb::branch_and_bound(model, cfg, Some(start))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpRelaxation {
    pub status: SolveStatus,
    pub objective: f64,
    pub values: Vec<f64>,
}

/// Optimum of the LP relaxation (binaries relaxed to `[0, 1]`).
pub fn solve_relaxation(model: &MilpModel) -> LpRelaxation {
    let data = simplex::LpData::from_model(model);
    let mut lp = simplex::Simplex::new(&data);
    let status = match lp.solve(None, None) {
        simplex::LpStatus::Optimal => SolveStatus::Optimal,
        simplex::LpStatus::Infeasible => SolveStatus::Infeasible,
        simplex::LpStatus::Unbounded => SolveStatus::Unbounded,
        _ => SolveStatus::NumericError,
    };
    LpRelaxation { status, objective: lp.objective(), values: lp.values().to_vec() }
}
