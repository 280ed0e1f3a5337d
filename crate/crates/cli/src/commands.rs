use std::path::Path;

use anyhow::{Context, Result};
use frostgrid::evaluation::{
    exhaustive_oracle, pareto_csv, pareto_sweep, plan_objective, sampled_violations, worst_case_violations,
};
use frostgrid::heuristic::{heuristic_plan, snap_to_sites};
use frostgrid::instance::generate_instance;
use frostgrid::layout::{optimize_layout, LayoutOutcome};
use frostgrid::milp::{extract_plan, DesignModel, SolveStatus};
use frostgrid::plan_file::{PlanFile, SolveSummary};
use frostgrid::render::{render_svg, Layers, RenderSpec};
use frostgrid::solver::{export_mps, import_solution, save_solution, SolveConfig};
use frostgrid::{DesignPlan, OrchardInstance, Provenance};
use serde_json::json;

use crate::exit::{failed, CoreResult, INFEASIBLE, INTERNAL, NO_SOLUTION};
use crate::{EvaluateArgs, GenerateArgs, HeuristicArgs, OracleArgs, RenderArgs, SolveArgs, SolverArgs, SweepArgs};

fn load_instance(path: &Path) -> Result<OrchardInstance> {
    let inst = OrchardInstance::load(path).core().with_context(|| format!("reading {}", path.display()))?;
    inst.validate().core().with_context(|| format!("checking {}", path.display()))?;
    Ok(inst)
}

fn load_plan(path: &Path, inst: &OrchardInstance) -> Result<PlanFile> {
    let file = PlanFile::load(path).core().with_context(|| format!("reading {}", path.display()))?;
    file.check_instance(inst).core()?;
    Ok(file)
}

fn write_plan(path: &Path, plan: DesignPlan, inst: &OrchardInstance, solve: Option<SolveSummary>) -> Result<()> {
    PlanFile::new(plan, inst, solve).save(path).core().with_context(|| format!("writing {}", path.display()))
}

fn with_violations(mut plan: DesignPlan, inst: &OrchardInstance) -> Result<DesignPlan> {
    plan.obj_part2 = Some(worst_case_violations(&plan, inst).core()?.obj_part2);
    Ok(plan)
}

fn solve_config(a: &SolverArgs) -> Result<SolveConfig> {
    let cfg = SolveConfig {
        time_limit_s: a.time_limit,
        rel_gap_tol: a.gap,
        node_limit: a.node_limit,
        worker_count: a.workers,
        ..SolveConfig::default()
    };
    cfg.validate().core()?;
    Ok(cfg)
}

fn print_plan(plan: &DesignPlan, inst: &OrchardInstance) -> Result<()> {
    println!("heaters       {}", plan.heaters.len());
    println!("obj_part1_m   {:.6}", plan.obj_part1_m);
    if let Some(p2) = plan.obj_part2 {
        println!("obj_part2     {p2:.6}");
    }
    println!("objective     {:.9}", plan_objective(plan, inst).core()?);
    Ok(())
}

pub fn generate(a: &GenerateArgs) -> Result<()> {
    let inst = generate_instance(&a.params()).core()?;
    inst.save(&a.out).core().with_context(|| format!("writing {}", a.out.display()))?;
    println!(
        "wrote {} ({} trees, {} candidate sites, {} check points, k = {})",
        a.out.display(),
        inst.trees.len(),
        inst.n_sites(),
        inst.n_check_points(),
        inst.k
    );
    Ok(())
}

fn status_exit(status: SolveStatus) -> Result<()> {
    match status {
        SolveStatus::Optimal | SolveStatus::Feasible => Ok(()),
        SolveStatus::Infeasible => Err(failed(INFEASIBLE, "the model is infeasible")),
        SolveStatus::LimitReached => Err(failed(NO_SOLUTION, "limit reached before any feasible solution")),
        SolveStatus::Unbounded => Err(failed(INTERNAL, "the model is unbounded")),
        SolveStatus::NumericError => Err(failed(INTERNAL, "the solver hit numerical trouble")),
    }
}

pub fn solve(a: &SolveArgs) -> Result<()> {
    let mut inst = load_instance(&a.instance)?;
    if let Some(alpha) = a.alpha {
        inst = inst.with_alpha(alpha);
        inst.validate().core()?;
    }
    let design = DesignModel::build(&inst).core()?;
    if let Some(path) = &a.export_mps {
        export_mps(&design.model, path).core().with_context(|| format!("writing {}", path.display()))?;
        println!(
            "wrote {} ({} variables, {} rows)",
            path.display(),
            design.model.num_vars(),
            design.model.num_constraints()
        );
    }
    let Some(out) = &a.out else {
        return Ok(());
    };

    if let Some(path) = &a.import_solution {
        let imported = import_solution(&design.model, path)
            .core()
            .with_context(|| format!("importing {}", path.display()))?;
        for w in &imported.warnings {
            log::warn!("{w}");
        }
        let mut plan = extract_plan(&inst, &design, &imported.solution).core()?;
        plan.provenance = Provenance::Imported;
        print_plan(&plan, &inst)?;
        return write_plan(out, plan, &inst, None);
    }

    let cfg = solve_config(&a.solver)?;
    let outcome = optimize_layout(&inst, &cfg).core()?;
    report_solve(&outcome);
    status_exit(outcome.result.status)?;
    let plan = outcome.plan.expect("feasible status carries a plan");
    if let (Some(path), Some(sol)) = (&a.save_solution, &outcome.result.solution) {
        save_solution(&outcome.design.model, sol, path)
            .core()
            .with_context(|| format!("writing {}", path.display()))?;
    }
    print_plan(&plan, &inst)?;
    write_plan(out, plan, &inst, Some(SolveSummary::from(&outcome.result)))
}

fn report_solve(out: &LayoutOutcome) {
    let r = &out.result;
    println!("status        {}", r.status);
    println!("nodes         {}", r.nodes_explored);
    println!("best_bound    {:.9}", r.best_bound);
    if r.rel_gap.is_finite() {
        println!("rel_gap       {:.6}", r.rel_gap);
    }
    println!("wall_time_s   {:.3}", r.wall_time_s);
}

pub fn heuristic(a: &HeuristicArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let mut plan = heuristic_plan(&inst).core()?;
    if a.snap {
        plan = snap_to_sites(&inst, &plan).core()?;
    }
    let plan = with_violations(plan, &inst)?;
    print_plan(&plan, &inst)?;
    write_plan(&a.out, plan, &inst, None)
}

pub fn sweep(a: &SweepArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let cfg = solve_config(&a.solver)?;
    let records = pareto_sweep(&inst, &a.alphas, &cfg).core()?;
    let csv = pareto_csv(&records);
    std::fs::write(&a.out, &csv).with_context(|| format!("writing {}", a.out.display()))?;
    print!("{csv}");
    Ok(())
}

pub fn oracle(a: &OracleArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let inst = match a.alpha {
        Some(alpha) => inst.with_alpha(alpha),
        None => inst,
    };
    let plan = exhaustive_oracle(&inst, inst.alpha).core()?;
    print_plan(&plan, &inst)?;
    write_plan(&a.out, plan, &inst, None)
}

pub fn evaluate(a: &EvaluateArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let file = load_plan(&a.plan, &inst)?;
    let plan = &file.plan;
    let worst = worst_case_violations(plan, &inst).core()?;
    let sampled = sampled_violations(plan, &inst, a.seed, a.draws).core()?;
    let objective = plan_objective(plan, &inst).core()?;
    if a.json {
        let report = json!({
            "heaters": plan.heaters.len(),
            "provenance": plan.provenance,
            "obj_part1_m": plan.pipe_length(),
            "obj_part2_worst_case": worst.obj_part2,
            "obj_part2_sampled": sampled,
            "objective": objective,
        });
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("heaters                {}", plan.heaters.len());
        println!("obj_part1_m            {:.6}", plan.pipe_length());
        println!("obj_part2 worst-case   {:.6}", worst.obj_part2);
        println!(
            "obj_part2 sampled      mean {:.6}  max {:.6}  std {:.6}  ({} draws, seed {})",
            sampled.mean, sampled.max, sampled.std, sampled.draws, sampled.seed
        );
        println!("objective              {objective:.9}");
    }
    Ok(())
}

pub fn render(a: &RenderArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let file = a.plan.as_deref().map(|p| load_plan(p, &inst)).transpose()?;
    let spec = RenderSpec {
        canvas_px: (a.width_px, a.height_px),
        margin_px: a.margin_px,
        layers: Layers {
            trees: !a.no_trees,
            candidate_sites: !a.no_sites,
            check_points: !a.no_check_points,
            ..Layers::default()
        },
    };
    let svg = render_svg(&inst, file.as_ref().map(|f| &f.plan), &spec).core()?;
    std::fs::write(&a.out, svg).with_context(|| format!("writing {}", a.out.display()))?;
    println!("wrote {}", a.out.display());
    Ok(())
}
