use thiserror::Error;

use crate::evaluation::{DesignPlan, Provenance};
use crate::instance::OrchardInstance;

use super::{validate_solution, DesignModel, MilpSolution, ModelError, ViolationReport};

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("refusing to interpret an infeasible solution:\n{0}")]
    Infeasible(ViolationReport),
    #[error(transparent)]
    Model(#[from] ModelError),
}

const EXTRACT_TOL: f64 = 1e-6;

/// Reads a design plan out of a feasible solution. The dummy edge to the
/// terminal node is dropped.
pub fn extract_plan(inst: &OrchardInstance, dm: &DesignModel, sol: &MilpSolution) -> Result<DesignPlan, ExtractError> {
    let report = validate_solution(&dm.model, sol, EXTRACT_TOL)?;
    if !report.is_empty() {
        return Err(ExtractError::Infeasible(report));
    }
    let cat = &dm.catalog;
    if cat.node_count != inst.n_sites() || cat.mu_lo.len() != inst.n_check_points() {
        return Err(ModelError::DimensionMismatch("model was not built from this instance".into()).into());
    }
    let site_ids: Vec<usize> = (0..cat.node_count).filter(|&i| sol.is_set(cat.ell[i])).collect();
    let mut position = vec![usize::MAX; cat.node_count];
    for (p, &s) in site_ids.iter().enumerate() {
        position[s] = p;
    }
    let heaters: Vec<_> = site_ids.iter().map(|&s| inst.candidate_sites[s]).collect();
    let mut pipe_edges = Vec::new();
    let mut length = 0.0;
    for ((i, j), z) in cat.real_edges() {
        if sol.is_set(z) {
            pipe_edges.push((position[i], position[j]));
            length += inst.candidate_sites[i].distance(&inst.candidate_sites[j]);
        }
    }
    let n_cp = inst.n_check_points();
    let violation_sum: f64 = cat
        .mu_lo
        .iter()
        .zip(&cat.mu_hi)
        .map(|(&lo, &hi)| sol.value(lo) + sol.value(hi))
        .sum();
    let obj_part2 = if n_cp == 0 { 0.0 } else { violation_sum / n_cp as f64 };
    Ok(DesignPlan {
        heaters,
        site_ids: Some(site_ids),
        pipe_edges,
        obj_part1_m: length,
        obj_part2: Some(obj_part2),
        alpha: inst.alpha,
        provenance: Provenance::Milp,
    })
}
