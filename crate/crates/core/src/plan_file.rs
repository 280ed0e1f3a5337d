//! JSON plan files: the plan, a digest of the instance it was made for and,
//! for solver output, a timing-free solve summary.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaluation::{DesignPlan, EvalError};
use crate::instance::OrchardInstance;
use crate::milp::SolveStatus;
use crate::solver::SolveResult;

pub const PLAN_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PlanFileError {
    #[error("unsupported plan schema_version {0}")]
    UnsupportedSchema(u32),
    #[error("plan was made for instance {expected}, not {actual}")]
    DigestMismatch { expected: String, actual: String },
    #[error(transparent)]
    InvalidPlan(#[from] EvalError),
    #[error("plan JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub best_bound: Option<f64>,
    pub rel_gap: Option<f64>,
    pub nodes_explored: u64,
}

impl From<&SolveResult> for SolveSummary {
    fn from(r: &SolveResult) -> Self {
        Self {
            status: r.status,
            objective: r.incumbent_obj,
            best_bound: r.best_bound.is_finite().then_some(r.best_bound),
            rel_gap: r.rel_gap.is_finite().then_some(r.rel_gap),
            nodes_explored: r.nodes_explored,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub schema_version: u32,
    pub instance_digest: String,
    #[serde(flatten)]
    pub plan: DesignPlan,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSummary>,
}

impl PlanFile {
    pub fn new(plan: DesignPlan, inst: &OrchardInstance, solve: Option<SolveSummary>) -> Self {
        Self { schema_version: PLAN_SCHEMA_VERSION, instance_digest: inst.digest(), plan, solve }
    }

    pub fn to_json(&self) -> Result<String, PlanFileError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Parses and checks structure (spanning tree, stored length).
    pub fn from_json(text: &str) -> Result<Self, PlanFileError> {
        let file: PlanFile = serde_json::from_str(text)?;
        if file.schema_version != PLAN_SCHEMA_VERSION {
            return Err(PlanFileError::UnsupportedSchema(file.schema_version));
        }
        file.plan.check_structure()?;
        Ok(file)
    }

    pub fn check_instance(&self, inst: &OrchardInstance) -> Result<(), PlanFileError> {
        let actual = inst.digest();
        if actual != self.instance_digest {
            return Err(PlanFileError::DigestMismatch { expected: self.instance_digest.clone(), actual });
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), PlanFileError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PlanFileError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
