use thiserror::Error;

use crate::evaluation::EvalError;
use crate::graph::GraphError;
use crate::heuristic::PlacementError;
use crate::instance::InstanceError;
use crate::milp::{ExtractError, ModelError};
use crate::plan_file::PlanFileError;
use crate::render::RenderError;
use crate::solver::mps::MpsError;
use crate::solver::solution_file::SolutionFileError;

/// Umbrella error for callers that drive the whole pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Mps(#[from] MpsError),
    #[error(transparent)]
    SolutionFile(#[from] SolutionFileError),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    PlanFile(#[from] PlanFileError),
    #[error(transparent)]
    Render(#[from] RenderError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
