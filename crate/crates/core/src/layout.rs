//! End-to-end optimisation of an orchard instance.

use crate::evaluation::DesignPlan;
use crate::graph::kruskal_mst;
use crate::heuristic::{heuristic_plan, snap_to_sites};
use crate::instance::OrchardInstance;
use crate::milp::{extract_plan, DesignModel};
use crate::solver::{solve, solve_with_start, SolveConfig, SolveResult};
use crate::Result;

#[derive(Debug, Clone)]
pub struct LayoutOutcome {
    pub design: DesignModel,
    pub result: SolveResult,
    /// Present whenever the solver found a feasible solution.
    pub plan: Option<DesignPlan>,
}

/// Starting point built from the heuristic plan snapped to candidate sites.
pub fn heuristic_start(inst: &OrchardInstance, dm: &DesignModel) -> Result<Vec<f64>> {
    let snapped = snap_to_sites(inst, &heuristic_plan(inst)?)?;
    let sites = snapped.site_ids.expect("snapped plans carry site ids");
    let tree = kruskal_mst(&dm.graph, &sites)?;
    let edges: Vec<(usize, usize)> = tree.edges.into_iter().collect();
    Ok(dm.encode_tree(Some(inst), &sites, &edges)?)
}

/// Builds the design model, seeds it with the heuristic, solves it and
/// extracts the plan.
pub fn optimize_layout(inst: &OrchardInstance, cfg: &SolveConfig) -> Result<LayoutOutcome> {
    let design = DesignModel::build(inst)?;
    let result = match heuristic_start(inst, &design) {
        Ok(start) => solve_with_start(&design.model, cfg, &start)?,
        Err(e) => {
            log::info!("no heuristic start: {e}");
            solve(&design.model, cfg)?
        }
    };
    let plan = match &result.solution {
        Some(sol) => Some(extract_plan(inst, &design, sol)?),
        None => None,
    };
    Ok(LayoutOutcome { design, result, plan })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::{exhaustive_oracle, plan_objective};
    use crate::geometry::Point2D;
    use crate::milp::SolveStatus;

    fn grid_instance(alpha: f64, k: usize) -> OrchardInstance {
        let mut sites = Vec::new();
        for y in 0..3 {
            for x in 0..3 {
                sites.push(Point2D::new(10.0 + 20.0 * x as f64, 10.0 + 20.0 * y as f64));
            }
        }
        let cps = sites.iter().map(|p| Point2D::new(p.x + 5.0, p.y + 5.0)).collect();
        OrchardInstance {
            length_m: 60.0,
            width_m: 60.0,
            trees: vec![],
            candidate_sites: sites,
            check_points: cps,
            k,
            d_ht_m: 0.0,
            f_lo: 0.5,
            f_hi: 1.0,
            k_tun: 0.05,
            ku_lo: vec![0.8; 9],
            ku_hi: vec![1.0; 9],
            alpha,
            beta1_nor: 600.0,
            beta2_nor: 240.0,
        }
    }

    #[test]
    fn nine_site_instance_matches_oracle() {
        for alpha in [0.0, 5.0] {
            let inst = grid_instance(alpha, 3);
            let cfg = SolveConfig { rel_gap_tol: 0.0, abs_tol: 1e-9, ..Default::default() };
            let out = optimize_layout(&inst, &cfg).unwrap();
            assert_eq!(out.result.status, SolveStatus::Optimal);
            let plan = out.plan.unwrap();
            assert!(plan.check_structure().is_ok());
            let oracle = exhaustive_oracle(&inst, alpha).unwrap();
            let a = plan_objective(&plan, &inst).unwrap();
            let b = plan_objective(&oracle, &inst).unwrap();
            assert!((a - b).abs() < 1e-6, "alpha {alpha}: solver {a} vs oracle {b}");
            assert!((out.result.incumbent_obj.unwrap() - a).abs() < 1e-6);
        }
    }

    #[test]
    fn heuristic_start_is_feasible() {
        let inst = grid_instance(5.0, 4);
        let dm = DesignModel::build(&inst).unwrap();
        let x = heuristic_start(&inst, &dm).unwrap();
        let sol = crate::milp::MilpSolution { values: x, objective_value: 0.0, status: SolveStatus::Feasible };
        assert!(crate::milp::validate_solution(&dm.model, &sol, 1e-6).unwrap().is_empty());
    }
}
