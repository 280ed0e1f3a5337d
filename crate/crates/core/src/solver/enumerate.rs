//! Exhaustive projection of a MILP feasible set onto chosen binaries.
//!
//! Depth-first search over 0/1 fixings, projected variables first. A subtree
//! is cut when the LP relaxation with the current fixings is infeasible;
//! once every projected variable is fixed the search only looks for one
//! integral completion, which is checked with [`validate_solution`].

use std::collections::BTreeSet;

use super::simplex::{LpData, LpStatus, Simplex};
use crate::milp::{validate_solution, MilpModel, MilpSolution, ModelError, SolveStatus, VarId, VarKind};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Projection {
    /// Feasible assignments of the projected variables, in their given order.
    pub assignments: BTreeSet<Vec<bool>>,
    pub lp_solves: u64,
}

/// Every 0/1 assignment of `projected` that extends to a feasible point of
/// `model`.
pub fn feasible_projections(model: &MilpModel, projected: &[VarId]) -> Result<Projection, ModelError> {
    let mut order: Vec<usize> = Vec::with_capacity(model.num_vars());
    let mut seen = vec![false; model.num_vars()];
    for v in projected {
        let var = model
            .variables()
            .get(v.0)
            .ok_or_else(|| ModelError::UnknownVariable(format!("#{}", v.0)))?;
        if var.kind != VarKind::Binary {
            return Err(ModelError::Mapping(format!("`{}` is not binary", var.name)));
        }
        if !std::mem::replace(&mut seen[v.0], true) {
            order.push(v.0);
        }
    }
    let n_proj = order.len();
    order.extend(model.binaries().map(|v| v.0).filter(|&j| !seen[j]));

    let data = LpData::from_model(model);
    let mut search = Search {
        model,
        lp: Simplex::new(&data),
        lo: data.lo[..data.n].to_vec(),
        hi: data.hi[..data.n].to_vec(),
        order,
        n_proj,
        out: Projection::default(),
    };
    search.dfs(0);
    Ok(search.out)
}

struct Search<'m, 'd> {
    model: &'m MilpModel,
    lp: Simplex<'d>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    order: Vec<usize>,
    n_proj: usize,
    out: Projection,
}

impl Search<'_, '_> {
    /// False only when the relaxation is proven infeasible.
    fn relaxation_feasible(&mut self) -> bool {
        self.lp.set_structural_bounds(&self.lo, &self.hi);
        self.out.lp_solves += 1;
        match self.lp.solve(None, None) {
            LpStatus::Infeasible => false,
            LpStatus::Optimal => true,
            _ => {
                self.lp.reset_basis();
                self.lp.solve(None, None) != LpStatus::Infeasible
            }
        }
    }

    fn dfs(&mut self, depth: usize) -> bool {
        if !self.relaxation_feasible() {
            return false;
        }
        if depth == self.order.len() {
            let sol = MilpSolution {
                values: self.lp.values().to_vec(),
                objective_value: 0.0,
                status: SolveStatus::Feasible,
            };
            let ok = validate_solution(self.model, &sol, 1e-6).map(|r| r.is_empty()).unwrap_or(false);
            if ok {
                let key = self.order[..self.n_proj].iter().map(|&j| self.lo[j] > 0.5).collect();
                self.out.assignments.insert(key);
            }
            return ok;
        }
        let var = self.order[depth];
        let (lo0, hi0) = (self.lo[var], self.hi[var]);
        let mut any = false;
        for val in [0.0, 1.0] {
            if val < lo0 || val > hi0 {
                continue;
            }
            self.lo[var] = val;
            self.hi[var] = val;
            let found = self.dfs(depth + 1);
            self.lo[var] = lo0;
            self.hi[var] = hi0;
            any |= found;
            if found && depth >= self.n_proj {
                break;
            }
        }
        any
    }
}
