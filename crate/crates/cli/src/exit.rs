//! Mapping from errors to process exit codes.

use std::fmt;

use frostgrid::evaluation::EvalError;
use frostgrid::heuristic::PlacementError;
use frostgrid::instance::InstanceError;
use frostgrid::milp::ModelError;
use frostgrid::plan_file::PlanFileError;
use frostgrid::solver::{MpsError, SolutionFileError};

pub const INVALID_INPUT: u8 = 2;
pub const INFEASIBLE: u8 = 3;
pub const NO_SOLUTION: u8 = 4;
pub const INTERNAL: u8 = 5;

/// A run that finished without producing its artifact.
#[derive(Debug)]
pub struct Failed {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for Failed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failed {}

pub fn failed(code: u8, message: impl Into<String>) -> anyhow::Error {
    Failed { code, message: message.into() }.into()
}

fn instance(e: &InstanceError) -> u8 {
    match e {
        InstanceError::Infeasible(_) => INFEASIBLE,
        _ => INVALID_INPUT,
    }
}

fn model(e: &ModelError) -> u8 {
    match e {
        ModelError::InfeasibleParameters(_) => INFEASIBLE,
        ModelError::InvalidConfig(_) => INVALID_INPUT,
        _ => INTERNAL,
    }
}

fn eval(e: &EvalError) -> u8 {
    match e {
        EvalError::Instance(i) => instance(i),
        EvalError::Graph(_) => INTERNAL,
        _ => INVALID_INPUT,
    }
}

fn placement(e: &PlacementError) -> u8 {
    match e {
        PlacementError::Instance(i) => instance(i),
        PlacementError::Graph(_) => INTERNAL,
        _ => INFEASIBLE,
    }
}

fn core(e: &frostgrid::Error) -> u8 {
    use frostgrid::Error as E;
    match e {
        E::Instance(i) => instance(i),
        E::Graph(_) | E::Extract(_) => INTERNAL,
        E::Model(m) => model(m),
        E::Mps(MpsError::UnencodableName(_)) => INTERNAL,
        E::Mps(_) => INVALID_INPUT,
        E::SolutionFile(SolutionFileError::Rejected(_)) => INFEASIBLE,
        E::SolutionFile(_) => INVALID_INPUT,
        E::Placement(p) => placement(p),
        E::Eval(v) => eval(v),
        E::PlanFile(PlanFileError::InvalidPlan(v)) => eval(v),
        E::PlanFile(_) | E::Render(_) => INVALID_INPUT,
    }
}

/// First classifiable error in the chain decides; unknown errors are internal.
pub fn code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Failed>() {
            return f.code;
        }
        if let Some(e) = cause.downcast_ref::<frostgrid::Error>() {
            return core(e);
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return INVALID_INPUT;
        }
    }
    INTERNAL
}

/// Converts any core error into [`frostgrid::Error`] so that [`code_for`]
/// can classify it.
pub trait CoreResult<T> {
    fn core(self) -> Result<T, frostgrid::Error>;
}

impl<T, E: Into<frostgrid::Error>> CoreResult<T> for Result<T, E> {
    fn core(self) -> Result<T, frostgrid::Error> {
        self.map_err(Into::into)
    }
}
