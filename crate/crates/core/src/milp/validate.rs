use std::fmt;

use super::{MilpModel, MilpSolution, ModelError, Sense, VarKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Constraint { name: String, activity: f64, sense: Sense, rhs: f64 },
    Integrality { name: String, value: f64 },
    Bound { name: String, value: f64, lower: f64, upper: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Constraint { name, activity, sense, rhs } => {
                write!(f, "constraint {name}: activity {activity} violates {sense} {rhs}")
            }
            Violation::Integrality { name, value } => write!(f, "binary {name} = {value} is fractional"),
            Violation::Bound { name, value, lower, upper } => {
                write!(f, "variable {name} = {value} outside [{lower}, {upper}]")
            }
        }
    }
}

/// Every violated row, bound and integrality condition of a solution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn mentions(&self, constraint_prefix: &str) -> bool {
        self.violations.iter().any(|v| match v {
            Violation::Constraint { name, .. } => name.starts_with(constraint_prefix),
            _ => false,
        })
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("no violations");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// Absolute-tolerance feasibility check of `sol` against `model`.
pub fn validate_solution(model: &MilpModel, sol: &MilpSolution, tol: f64) -> Result<ViolationReport, ModelError> {
    if sol.values.len() != model.num_vars() {
        return Err(ModelError::Mapping(format!(
            "solution has {} values, model has {} variables",
            sol.values.len(),
            model.num_vars()
        )));
    }
    let mut report = ViolationReport::default();
    for (var, &value) in model.variables().iter().zip(&sol.values) {
        if !value.is_finite() || value < var.lower - tol || value > var.upper + tol {
            report.violations.push(Violation::Bound {
                name: var.name.clone(),
                value,
                lower: var.lower,
                upper: var.upper,
            });
        } else if var.kind == VarKind::Binary && (value - value.round()).abs() > tol {
            report.violations.push(Violation::Integrality { name: var.name.clone(), value });
        }
    }
    for c in model.constraints() {
        let activity = c.activity(&sol.values);
        let bad = match c.sense {
            Sense::Le => activity > c.rhs + tol,
            Sense::Ge => activity < c.rhs - tol,
            Sense::Eq => (activity - c.rhs).abs() > tol,
        };
        if bad || !activity.is_finite() {
            report.violations.push(Violation::Constraint {
                name: c.name.clone(),
                activity,
                sense: c.sense,
                rhs: c.rhs,
            });
        }
    }
    Ok(report)
}
