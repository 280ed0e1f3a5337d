//! Solver-agnostic MILP representation.
//!
//! A [`MilpModel`] is a minimisation problem over named binary and continuous
//! variables with linear constraints. [`formulation`] emits the heater-design
//! model into it; [`crate::solver`] consumes it.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod extract;
pub mod formulation;
pub mod validate;

pub use extract::{extract_plan, ExtractError};
pub use formulation::{
    build_kmst_constraints, build_objective, build_robust_coverage, DesignModel, VariableCatalog,
};
pub use validate::{validate_solution, Violation, ViolationReport};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("duplicate constraint name `{0}`")]
    DuplicateConstraint(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{name}` has invalid bounds [{lower}, {upper}]")]
    InvalidBounds { name: String, lower: f64, upper: f64 },
    #[error("constraint `{name}` has a non-finite coefficient or rhs")]
    NonFinite { name: String },
    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),
    #[error("solution does not match the model: {0}")]
    Mapping(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v.0]).sum()
    }
}

/// Minimisation MILP. Variable ids are dense indices in creation order.
#[derive(Debug, Clone, Default)]
pub struct MilpModel {
    pub name: String,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<f64>,
    var_index: HashMap<String, VarId>,
    constraint_names: HashSet<String>,
}

impl MilpModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId, ModelError> {
        self.add_variable(name, VarKind::Binary, 0.0, 1.0)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Result<VarId, ModelError> {
        self.add_variable(name, VarKind::Continuous, lower, upper)
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, ModelError> {
        let name = name.into();
        let bad_bounds = lower.is_nan()
            || upper.is_nan()
            || lower > upper
            || lower == f64::INFINITY
            || upper == f64::NEG_INFINITY
            || (kind == VarKind::Binary && (lower < 0.0 || upper > 1.0));
        if bad_bounds {
            return Err(ModelError::InvalidBounds { name, lower, upper });
        }
        if self.var_index.contains_key(&name) {
            return Err(ModelError::DuplicateVariable(name));
        }
        let id = VarId(self.variables.len());
        self.var_index.insert(name.clone(), id);
        self.variables.push(Variable { name, kind, lower, upper });
        self.objective.push(0.0);
        Ok(id)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<(), ModelError> {
        let name = name.into();
        if let Some(&(v, _)) = terms.iter().find(|(v, _)| v.0 >= self.variables.len()) {
            return Err(ModelError::UnknownVariable(format!("#{} in constraint `{name}`", v.0)));
        }
        if !rhs.is_finite() || terms.iter().any(|(_, a)| !a.is_finite()) {
            return Err(ModelError::NonFinite { name });
        }
        if !self.constraint_names.insert(name.clone()) {
            return Err(ModelError::DuplicateConstraint(name));
        }
        self.constraints.push(Constraint { name, terms, sense, rhs });
        Ok(())
    }

    pub fn set_objective_coeff(&mut self, var: VarId, coeff: f64) -> Result<(), ModelError> {
        let slot = self
            .objective
            .get_mut(var.0)
            .ok_or_else(|| ModelError::UnknownVariable(format!("#{}", var.0)))?;
        *slot = coeff;
        Ok(())
    }

    pub fn set_bounds(&mut self, var: VarId, lower: f64, upper: f64) -> Result<(), ModelError> {
        let v = self
            .variables
            .get_mut(var.0)
            .ok_or_else(|| ModelError::UnknownVariable(format!("#{}", var.0)))?;
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(ModelError::InvalidBounds { name: v.name.clone(), lower, upper });
        }
        v.lower = lower;
        v.upper = upper;
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.var_index.get(name).copied()
    }

    /// Dense objective coefficients indexed by variable id.
    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    /// Non-zero objective terms in variable order.
    pub fn objective_terms(&self) -> impl Iterator<Item = (VarId, f64)> + '_ {
        self.objective
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, &c)| (VarId(i), c))
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().zip(values).map(|(c, x)| c * x).sum()
    }

    pub fn binaries(&self) -> impl Iterator<Item = VarId> + '_ {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(i, _)| VarId(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    Unbounded,
    LimitReached,
    NumericError,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::LimitReached => "limit-reached",
            SolveStatus::NumericError => "numeric-error",
        })
    }
}

/// Values for every variable of a model, indexed by [`VarId`].
#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub values: Vec<f64>,
    pub objective_value: f64,
    pub status: SolveStatus,
}

impl MilpSolution {
    pub fn value(&self, var: VarId) -> f64 {
        self.values[var.0]
    }

    pub fn is_set(&self, var: VarId) -> bool {
        self.values[var.0] > 0.5
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_rejects_duplicates_and_bad_refs() {
        let mut m = MilpModel::new("t");
        let x = m.add_binary("x").unwrap();
        assert_eq!(m.add_binary("x"), Err(ModelError::DuplicateVariable("x".into())));
        assert!(m.add_continuous("y", 2.0, 1.0).is_err());
        assert!(m.add_variable("b", VarKind::Binary, 0.0, 2.0).is_err());
        m.add_constraint("c", vec![(x, 1.0)], Sense::Le, 1.0).unwrap();
        assert!(m.add_constraint("c", vec![(x, 1.0)], Sense::Le, 1.0).is_err());
        assert!(m.add_constraint("d", vec![(VarId(7), 1.0)], Sense::Le, 1.0).is_err());
        assert!(m.add_constraint("e", vec![(x, f64::NAN)], Sense::Le, 1.0).is_err());
        assert_eq!(m.var_by_name("x"), Some(x));
        assert_eq!(m.binaries().collect::<Vec<_>>(), vec![x]);
    }

    #[test]
    fn objective_terms_skip_zeros() {
        let mut m = MilpModel::new("t");
        let a = m.add_binary("a").unwrap();
        let b = m.add_binary("b").unwrap();
        m.set_objective_coeff(b, 2.5).unwrap();
        assert_eq!(m.objective_terms().collect::<Vec<_>>(), vec![(b, 2.5)]);
        assert_eq!(m.objective_value(&[1.0, 2.0]), 5.0);
        let _ = a;
    }
}
