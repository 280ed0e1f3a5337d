//! Best-bound branch-and-bound over binary variables.
//!
//! Open nodes live in a shared priority queue ordered by LP bound, newest
//! first on ties. A worker that branches keeps diving into the child on the
//! rounding side of the branching variable and queues the sibling. Each
//! worker owns one simplex workspace and re-solves every node from whatever
//! basis it last held: changing bounds preserves dual feasibility, so no
//! basis has to be stored with a node.
//!
//! Branching uses pseudocosts (objective change per unit of rounding,
//! learned from solved children) with the product score. Binaries whose
//! reduced cost proves they cannot lead below the incumbent are fixed before
//! branching.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::{Condvar, Mutex};
use std::time::Instant;

use super::simplex::{LpData, LpStatus, Simplex};
use super::{relative_gap, SolveConfig, SolveResult};
use crate::milp::{validate_solution, MilpModel, MilpSolution, ModelError, SolveStatus};

const INT_TOL: f64 = 1e-6;
const FEAS_TOL: f64 = 1e-6;

#[derive(Debug)]
struct Node {
    bound: f64,
    seq: u64,
    depth: u32,
    fixings: Vec<(u32, bool)>,
    origin: Option<Origin>,
}

/// The branching decision that created a node, for pseudocost updates.
#[derive(Debug, Clone, Copy)]
struct Origin {
    var: u32,
    up: bool,
    /// Distance the branching variable was rounded.
    dist: f64,
    parent_obj: f64,
}

#[derive(Debug, Default)]
struct Pseudocosts {
    sum: [Vec<f64>; 2],
    count: [Vec<u32>; 2],
}

impl Pseudocosts {
    fn new(n: usize) -> Self {
        Self { sum: [vec![0.0; n], vec![0.0; n]], count: [vec![0; n], vec![0; n]] }
    }

    fn record(&mut self, o: &Origin, obj: f64) {
        let side = o.up as usize;
        let gain = ((obj - o.parent_obj) / o.dist).max(0.0);
        self.sum[side][o.var as usize] += gain;
        self.count[side][o.var as usize] += 1;
    }

    /// Mean gain per side, over all variables when `var` has no history.
    fn estimate(&self, var: usize, up: bool, fallback: f64) -> f64 {
        let side = up as usize;
        match self.count[side][var] {
            0 => fallback,
            c => self.sum[side][var] / c as f64,
        }
    }

    fn averages(&self) -> [f64; 2] {
        let avg = |side: usize| {
            let c: u32 = self.count[side].iter().sum();
            if c == 0 {
                1.0
            } else {
                self.sum[side].iter().sum::<f64>() / c as f64
            }
        };
        [avg(0), avg(1)]
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // max-heap: the lowest bound is the greatest, then the newest
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(self.seq.cmp(&other.seq))
    }
}

struct Shared {
    heap: BinaryHeap<Node>,
    next_seq: u64,
    incumbent: Option<(f64, Vec<f64>)>,
    active: usize,
    nodes: u64,
    /// Lowest bound among nodes discarded within the pruning tolerance.
    pruned_min: f64,
    /// Lowest bound among nodes abandoned by a limit or a numeric failure.
    open_min: f64,
    stop: bool,
    limit_hit: bool,
    numeric: bool,
    unbounded: bool,
    pseudo: Pseudocosts,
}

impl Shared {
    fn cutoff(&self, cfg: &SolveConfig) -> f64 {
        match &self.incumbent {
            Some((obj, _)) => obj - cfg.prune_tolerance(*obj),
            None => f64::INFINITY,
        }
    }

    fn push(&mut self, bound: f64, depth: u32, fixings: Vec<(u32, bool)>, origin: Option<Origin>) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Node { bound, seq, depth, fixings, origin });
    }
}

struct Ctx<'a> {
    model: &'a MilpModel,
    cfg: &'a SolveConfig,
    data: LpData,
    binaries: Vec<usize>,
    is_binary: Vec<bool>,
    root_lo: Vec<f64>,
    root_hi: Vec<f64>,
    deadline: Option<Instant>,
    shared: Mutex<Shared>,
    cv: Condvar,
}

pub(crate) fn branch_and_bound(
    model: &MilpModel,
    cfg: &SolveConfig,
    start: Option<&[f64]>,
) -> Result<SolveResult, ModelError> {
    cfg.validate()?;
    let t0 = Instant::now();
    let data = LpData::from_model(model);
    let binaries: Vec<usize> = model.binaries().map(|v| v.0).collect();
    let mut is_binary = vec![false; data.n];
    for &j in &binaries {
        is_binary[j] = true;
    }
    let root_lo = data.lo[..data.n].to_vec();
    let root_hi = data.hi[..data.n].to_vec();

    let mut shared = Shared {
        heap: BinaryHeap::new(),
        next_seq: 0,
        incumbent: None,
        active: 0,
        nodes: 0,
        pruned_min: f64::INFINITY,
        open_min: f64::INFINITY,
        stop: false,
        limit_hit: false,
        numeric: false,
        unbounded: false,
        pseudo: Pseudocosts::new(data.n),
    };
    if let Some(x) = start {
        match accept_start(model, x) {
            Ok(obj) => shared.incumbent = Some((obj, x.to_vec())),
            Err(why) => log::warn!("ignoring start point: {why}"),
        }
    }
    shared.push(f64::NEG_INFINITY, 0, Vec::new(), None);

    let ctx = Ctx {
        model,
        cfg,
        data,
        is_binary,
        binaries,
        root_lo,
        root_hi,
        deadline: cfg.deadline(t0),
        shared: Mutex::new(shared),
        cv: Condvar::new(),
    };
    if cfg.worker_count == 1 {
        worker(&ctx);
    } else {
        std::thread::scope(|s| {
            for _ in 0..cfg.worker_count {
                s.spawn(|| worker(&ctx));
            }
        });
    }

    let sh = ctx.shared.into_inner().expect("solver lock poisoned");
    let heap_min = sh.heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    let open_bound = heap_min.min(sh.open_min).min(sh.pruned_min);
    let (incumbent_obj, solution_values) = match sh.incumbent {
        Some((obj, x)) => (Some(obj), Some(x)),
        None => (None, None),
    };
    let best_bound = match incumbent_obj {
        Some(obj) => open_bound.min(obj),
        None => open_bound,
    };
    let status = if sh.unbounded {
        SolveStatus::Unbounded
    } else if sh.numeric {
        SolveStatus::NumericError
    } else if sh.limit_hit {
        if incumbent_obj.is_some() {
            SolveStatus::Feasible
        } else {
            SolveStatus::LimitReached
        }
    } else if incumbent_obj.is_some() {
        SolveStatus::Optimal
    } else {
        SolveStatus::Infeasible
    };
    let rel_gap = match incumbent_obj {
        Some(obj) => relative_gap(obj, best_bound).max(0.0),
        None => f64::INFINITY,
    };
    let solution = solution_values.map(|values| MilpSolution {
        objective_value: incumbent_obj.unwrap_or_default(),
        values,
        status: if status == SolveStatus::Optimal { SolveStatus::Optimal } else { SolveStatus::Feasible },
    });
    Ok(SolveResult {
        solution,
        incumbent_obj,
        best_bound,
        rel_gap,
        nodes_explored: sh.nodes,
        wall_time_s: t0.elapsed().as_secs_f64(),
        status,
    })
}

fn accept_start(model: &MilpModel, x: &[f64]) -> Result<f64, String> {
    let sol = MilpSolution { values: x.to_vec(), objective_value: 0.0, status: SolveStatus::Feasible };
    let report = validate_solution(model, &sol, FEAS_TOL).map_err(|e| e.to_string())?;
    if report.is_empty() {
        Ok(model.objective_value(x))
    } else {
        Err(report.to_string())
    }
}

fn worker(ctx: &Ctx<'_>) {
    let mut lp = Simplex::new(&ctx.data);
    loop {
        let node = {
            let mut sh = ctx.shared.lock().expect("solver lock poisoned");
            loop {
                if sh.stop {
                    return;
                }
                if let Some(n) = sh.heap.pop() {
                    sh.active += 1;
                    break n;
                }
                if sh.active == 0 {
                    sh.stop = true;
                    ctx.cv.notify_all();
                    return;
                }
                sh = ctx.cv.wait(sh).expect("solver lock poisoned");
            }
        };
        dive(ctx, &mut lp, node);
        let mut sh = ctx.shared.lock().expect("solver lock poisoned");
        sh.active -= 1;
        ctx.cv.notify_all();
    }
}

enum Step {
    Done,
    Continue(Node),
}

fn dive(ctx: &Ctx<'_>, lp: &mut Simplex<'_>, mut node: Node) {
    loop {
        match process(ctx, lp, node) {
            Step::Done => return,
            Step::Continue(next) => node = next,
        }
    }
}

fn abandon(ctx: &Ctx<'_>, bound: f64, numeric: bool) {
    let mut sh = ctx.shared.lock().expect("solver lock poisoned");
    sh.open_min = sh.open_min.min(bound);
    if numeric {
        sh.numeric = true;
    } else {
        sh.limit_hit = true;
        sh.stop = true;
    }
    ctx.cv.notify_all();
}

fn process(ctx: &Ctx<'_>, lp: &mut Simplex<'_>, node: Node) -> Step {
    let cutoff = {
        let mut sh = ctx.shared.lock().expect("solver lock poisoned");
        if sh.stop {
            sh.open_min = sh.open_min.min(node.bound);
            return Step::Done;
        }
        let over_nodes = ctx.cfg.node_limit.is_some_and(|lim| sh.nodes >= lim);
        let over_time = ctx.deadline.is_some_and(|d| Instant::now() > d);
        if over_nodes || over_time {
            drop(sh);
            abandon(ctx, node.bound, false);
            return Step::Done;
        }
        let cutoff = sh.cutoff(ctx.cfg);
        if node.bound >= cutoff {
            sh.pruned_min = sh.pruned_min.min(node.bound);
            return Step::Done;
        }
        sh.nodes += 1;
        cutoff
    };

    lp.set_structural_bounds(&ctx.root_lo, &ctx.root_hi);
    for &(var, up) in &node.fixings {
        let v = if up { 1.0 } else { 0.0 };
        lp.set_bounds(var as usize, v, v);
    }
    let cut = cutoff.is_finite().then_some(cutoff);
    let mut status = lp.solve(ctx.deadline, cut);
    if matches!(status, LpStatus::Numeric | LpStatus::IterationLimit) {
        log::debug!("node {}: {status:?}, retrying from a fresh basis", node.seq);
        lp.reset_basis();
        status = lp.solve(ctx.deadline, cut);
    }
    match status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Step::Done,
        LpStatus::Cutoff => {
            let mut sh = ctx.shared.lock().expect("solver lock poisoned");
            sh.pruned_min = sh.pruned_min.min(cutoff.max(node.bound));
            return Step::Done;
        }
        LpStatus::TimeLimit => {
            abandon(ctx, node.bound, false);
            return Step::Done;
        }
        LpStatus::Unbounded if node.fixings.is_empty() => {
            let mut sh = ctx.shared.lock().expect("solver lock poisoned");
            sh.unbounded = true;
            sh.stop = true;
            ctx.cv.notify_all();
            return Step::Done;
        }
        LpStatus::Unbounded | LpStatus::Numeric | LpStatus::IterationLimit => {
            log::warn!("node {} abandoned: LP status {status:?}", node.seq);
            lp.reset_basis();
            abandon(ctx, node.bound, true);
            return Step::Done;
        }
    }

    let lp_obj = lp.objective();
    let obj = lp_obj.max(node.bound);
    let values = lp.values().to_vec();
    let fractional: Vec<(usize, f64)> = ctx
        .binaries
        .iter()
        .map(|&j| (j, values[j]))
        .filter(|&(_, v)| (v - v.round()).abs() > INT_TOL)
        .collect();
    if fractional.is_empty() {
        if let Some(o) = &node.origin {
            ctx.shared.lock().expect("solver lock poisoned").pseudo.record(o, obj);
        }
        offer_incumbent(ctx, lp, &node, values);
        return Step::Done;
    }

    let mut sh = ctx.shared.lock().expect("solver lock poisoned");
    if let Some(o) = &node.origin {
        sh.pseudo.record(o, obj);
    }
    let cutoff = sh.cutoff(ctx.cfg);
    if obj >= cutoff {
        sh.pruned_min = sh.pruned_min.min(obj);
        return Step::Done;
    }

    // reduced-cost fixing against the incumbent
    let mut fixings = node.fixings;
    if cutoff.is_finite() {
        let margin = 1e-9 * (1.0 + cutoff.abs());
        for (j, d, at_upper) in lp.bound_reduced_costs() {
            if !ctx.is_binary[j] || ctx.root_lo[j] == ctx.root_hi[j] || lp.bounds(j).0 == lp.bounds(j).1 {
                continue;
            }
            let other = lp_obj + d.abs();
            if other >= cutoff + margin && (d > 0.0) != at_upper {
                sh.pruned_min = sh.pruned_min.min(other);
                fixings.push((j as u32, at_upper));
            }
        }
    }

    let [avg_down, avg_up] = sh.pseudo.averages();
    let mut branch: Option<(usize, f64, f64)> = None;
    for &(j, v) in &fractional {
        let f = v - v.floor();
        let down = f * sh.pseudo.estimate(j, false, avg_down);
        let up = (1.0 - f) * sh.pseudo.estimate(j, true, avg_up);
        let score = down.max(1e-6) * up.max(1e-6);
        if branch.is_none_or(|(_, _, best)| score > best) {
            branch = Some((j, v, score));
        }
    }
    let (var, value, _) = branch.expect("fractional binaries exist");
    let f = value - value.floor();
    let origin = |up: bool| Origin { var: var as u32, up, dist: if up { 1.0 - f } else { f }, parent_obj: obj };
    let near_up = value >= 0.5;
    let mut far = fixings.clone();
    far.push((var as u32, !near_up));
    let mut near = fixings;
    near.push((var as u32, near_up));
    sh.push(obj, node.depth + 1, far, Some(origin(!near_up)));
    ctx.cv.notify_one();
    let seq = sh.next_seq;
    sh.next_seq += 1;
    Step::Continue(Node { bound: obj, seq, depth: node.depth + 1, fixings: near, origin: Some(origin(near_up)) })
}

/// Rounds an integral LP point and records it if it is feasible and better.
fn offer_incumbent(ctx: &Ctx<'_>, lp: &mut Simplex<'_>, node: &Node, mut x: Vec<f64>) {
    let model = ctx.model;
    for &j in &ctx.binaries {
        x[j] = x[j].round();
    }
    if let Err(why) = accept_start(model, &x) {
        // rounding drift: re-solve the continuous part with binaries pinned
        log::debug!("node {}: rounded point rejected ({why}), re-solving", node.seq);
        for &j in &ctx.binaries {
            lp.set_bounds(j, x[j], x[j]);
        }
        if lp.solve(ctx.deadline, None) != LpStatus::Optimal {
            log::warn!("node {}: integral LP point could not be repaired", node.seq);
            return;
        }
        x = lp.values().to_vec();
        for &j in &ctx.binaries {
            x[j] = x[j].round();
        }
        if let Err(why) = accept_start(model, &x) {
            log::warn!("node {}: integral LP point rejected: {why}", node.seq);
            return;
        }
    }
    let obj = model.objective_value(&x);
    let mut sh = ctx.shared.lock().expect("solver lock poisoned");
    if sh.incumbent.as_ref().is_none_or(|(best, _)| obj < *best) {
        log::debug!("incumbent {obj} at node {} (depth {})", node.seq, node.depth);
        sh.incumbent = Some((obj, x));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2D;
    use crate::graph::complete_graph;
    use crate::milp::{DesignModel, Sense};

    fn unit_square() -> Vec<Point2D> {
        vec![Point2D::new(0.0, 0.0), Point2D::new(1.0, 0.0), Point2D::new(1.0, 1.0), Point2D::new(0.0, 1.0)]
    }

    #[test]
    fn knapsack() {
        // max 5a + 4b + 3c s.t. 2a + 3b + c <= 5, 4a + b + 2c <= 11, 3a + 4b + 2c <= 8
        let mut m = MilpModel::new("knap");
        let a = m.add_binary("a").unwrap();
        let b = m.add_binary("b").unwrap();
        let c = m.add_binary("c").unwrap();
        for (v, w) in [(a, -5.0), (b, -4.0), (c, -3.0)] {
            m.set_objective_coeff(v, w).unwrap();
        }
        m.add_constraint("r1", vec![(a, 2.0), (b, 3.0), (c, 1.0)], Sense::Le, 5.0).unwrap();
        m.add_constraint("r2", vec![(a, 4.0), (b, 1.0), (c, 2.0)], Sense::Le, 11.0).unwrap();
        m.add_constraint("r3", vec![(a, 3.0), (b, 4.0), (c, 2.0)], Sense::Le, 8.0).unwrap();
        let r = branch_and_bound(&m, &SolveConfig::default(), None).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.incumbent_obj, Some(-9.0));
    }

    #[test]
    fn toy_kmst_is_two() {
        let dm = DesignModel::kmst(&complete_graph(&unit_square()), 3).unwrap();
        let r = branch_and_bound(&dm.model, &SolveConfig::default(), None).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.incumbent_obj.unwrap() - 2.0).abs() < 1e-9);
        assert!(r.best_bound <= r.incumbent_obj.unwrap() + 1e-9);
        let sol = r.solution.unwrap();
        assert!(validate_solution(&dm.model, &sol, 1e-6).unwrap().is_empty());
    }

    #[test]
    fn infeasible_integer_program() {
        // 2x = 1 has no binary solution but a fractional one
        let mut m = MilpModel::new("odd");
        let x = m.add_binary("x").unwrap();
        m.add_constraint("c", vec![(x, 2.0)], Sense::Eq, 1.0).unwrap();
        let r = branch_and_bound(&m, &SolveConfig::default(), None).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.solution.is_none());
        assert_eq!(r.rel_gap, f64::INFINITY);
    }

    #[test]
    fn unbounded_relaxation() {
        let mut m = MilpModel::new("unb");
        let b = m.add_binary("b").unwrap();
        let y = m.add_continuous("y", 0.0, f64::INFINITY).unwrap();
        m.set_objective_coeff(y, -1.0).unwrap();
        m.add_constraint("c", vec![(y, 1.0), (b, -1.0)], Sense::Ge, 0.0).unwrap();
        let r = branch_and_bound(&m, &SolveConfig::default(), None).unwrap();
        assert_eq!(r.status, SolveStatus::Unbounded);
    }

    #[test]
    fn node_limit_without_incumbent() {
        let dm = DesignModel::kmst(&complete_graph(&unit_square()), 3).unwrap();
        let cfg = SolveConfig { node_limit: Some(1), ..Default::default() };
        let r = branch_and_bound(&dm.model, &cfg, None).unwrap();
        assert!(r.nodes_explored <= 1);
        if r.incumbent_obj.is_none() {
            assert_eq!(r.status, SolveStatus::LimitReached);
        }
        assert!(r.best_bound <= 2.0 + 1e-9);
    }

    #[test]
    fn start_point_seeds_incumbent() {
        let dm = DesignModel::kmst(&complete_graph(&unit_square()), 3).unwrap();
        // a worse tree (uses the diagonal) is accepted as the first incumbent
        let x = dm.encode_tree(None, &[0, 1, 2], &[(0, 2), (1, 2)]).unwrap();
        let cfg = SolveConfig { node_limit: Some(1), ..Default::default() };
        let r = branch_and_bound(&dm.model, &cfg, Some(&x)).unwrap();
        assert!(r.incumbent_obj.unwrap() <= 1.0 + 2f64.sqrt() + 1e-12);
        let full = branch_and_bound(&dm.model, &SolveConfig::default(), Some(&x)).unwrap();
        assert!((full.incumbent_obj.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn bad_start_is_ignored() {
        let dm = DesignModel::kmst(&complete_graph(&unit_square()), 3).unwrap();
        let x = vec![0.0; dm.model.num_vars()];
        let r = branch_and_bound(&dm.model, &SolveConfig::default(), Some(&x)).unwrap();
        assert!((r.incumbent_obj.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn deterministic_single_worker_and_parallel_agreement() {
        let pts: Vec<Point2D> = (0..7).map(|i| Point2D::new((i * 37 % 11) as f64, (i * 53 % 7) as f64)).collect();
        let dm = DesignModel::kmst(&complete_graph(&pts), 4).unwrap();
        let cfg = SolveConfig { rel_gap_tol: 0.0, abs_tol: 1e-9, ..Default::default() };
        let a = branch_and_bound(&dm.model, &cfg, None).unwrap();
        let b = branch_and_bound(&dm.model, &cfg, None).unwrap();
        assert_eq!(a.solution, b.solution);
        assert_eq!(a.nodes_explored, b.nodes_explored);
        assert_eq!(a.best_bound, b.best_bound);
        let par = branch_and_bound(&dm.model, &SolveConfig { worker_count: 3, ..cfg }, None).unwrap();
        assert_eq!(par.status, SolveStatus::Optimal);
        assert!((par.incumbent_obj.unwrap() - a.incumbent_obj.unwrap()).abs() < 1e-9);
    }
}
