//! Two-stage baseline: split the orchard into `k` equal cells, put a heater
//! at each cell centre (pushed away from trees that are too close), then
//! connect the heaters with a Kruskal MST.

use thiserror::Error;

use crate::evaluation::{DesignPlan, Provenance};
use crate::geometry::Point2D;
use crate::graph::{complete_graph, kruskal_mst, GraphError};
use crate::instance::{InstanceError, OrchardInstance};

pub const MAX_PUSHES: usize = 10;
const MAX_ASPECT_DEVIATION: f64 = 4.0;

#[derive(Debug, Error)]
pub enum PlacementError {
    #[error("heater {heater} at {point} could not be cleared of trees within {MAX_PUSHES} pushes")]
    NoClearPoint { heater: usize, point: Point2D },
    #[error("cannot snap {heaters} heaters to {sites} candidate sites")]
    TooFewSites { heaters: usize, sites: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionScheme {
    pub rows: usize,
    pub cols: usize,
    pub cell_w: f64,
    pub cell_h: f64,
}

fn deviation(rows: usize, cols: usize, aspect: f64) -> f64 {
    (cols as f64 / rows as f64 - aspect).abs()
}

/// Grid of `rows x cols` equal cells for `k` heaters.
///
/// Exact factorisations `rows * cols = k` are preferred, choosing the one
/// whose cell-count ratio `cols / rows` is closest to `L / W`. If every
/// factorisation is off by more than 4, the smallest grid with at least `k`
/// cells and acceptable deviation is used instead (its first `k` cells in
/// row-major order receive heaters).
pub fn partition(inst: &OrchardInstance) -> PartitionScheme {
    let k = inst.k.max(1);
    let aspect = inst.length_m / inst.width_m;
    let scheme = |rows: usize, cols: usize| PartitionScheme {
        rows,
        cols,
        cell_w: inst.length_m / cols as f64,
        cell_h: inst.width_m / rows as f64,
    };

    let mut best: Option<(f64, usize, usize)> = None;
    for rows in (1..=k).filter(|r| k.is_multiple_of(*r)) {
        let d = deviation(rows, k / rows, aspect);
        if best.is_none_or(|b| d < b.0) {
            best = Some((d, rows, k / rows));
        }
    }
    let (d, rows, cols) = best.expect("k >= 1 has the factorisation 1 x k");
    if d <= MAX_ASPECT_DEVIATION {
        return scheme(rows, cols);
    }

    // smallest excess first, then aspect; fall back to aspect alone
    let mut fallback: Option<(usize, f64, usize, usize)> = None;
    let mut closest: Option<(f64, usize, usize, usize)> = None;
    for rows in 1..=k {
        for cols in k.div_ceil(rows)..=k {
            let excess = rows * cols - k;
            let d = deviation(rows, cols, aspect);
            if d <= MAX_ASPECT_DEVIATION && fallback.is_none_or(|f| (excess, d) < (f.0, f.1)) {
                fallback = Some((excess, d, rows, cols));
            }
            if closest.is_none_or(|c| (d, excess) < (c.0, c.1)) {
                closest = Some((d, excess, rows, cols));
            }
        }
    }
    let (rows, cols) = match (fallback, closest) {
        (Some((_, _, r, c)), _) | (None, Some((_, _, r, c))) => (r, c),
        (None, None) => unreachable!("rows range is non-empty"),
    };
    scheme(rows, cols)
}

/// Moves `p` out of the clearance disc of every tree. A point sitting
/// exactly on a tree is pushed along +x.
fn clear_of_trees(p: Point2D, trees: &[Point2D], d_ht: f64) -> Option<Point2D> {
    let nearest_offender = |p: Point2D| {
        trees
            .iter()
            .map(|t| (p.distance(t), *t))
            .filter(|(d, _)| *d < d_ht)
            .min_by(|a, b| a.0.total_cmp(&b.0))
    };
    let mut p = p;
    for _ in 0..MAX_PUSHES {
        let Some((dist, tree)) = nearest_offender(p) else {
            return Some(p);
        };
        let (ux, uy) = if dist == 0.0 { (1.0, 0.0) } else { ((p.x - tree.x) / dist, (p.y - tree.y) / dist) };
        p = Point2D::new(tree.x + ux * d_ht, tree.y + uy * d_ht);
    }
    nearest_offender(p).is_none().then_some(p)
}

/// Cell centres of the first `k` cells (row-major from the origin corner),
/// each cleared of trees.
pub fn place_heaters(inst: &OrchardInstance, scheme: &PartitionScheme) -> Result<Vec<Point2D>, PlacementError> {
    let mut out = Vec::with_capacity(inst.k);
    'cells: for r in 0..scheme.rows {
        for c in 0..scheme.cols {
            if out.len() == inst.k {
                break 'cells;
            }
            let centre = Point2D::new((c as f64 + 0.5) * scheme.cell_w, (r as f64 + 0.5) * scheme.cell_h);
            let p = clear_of_trees(centre, &inst.trees, inst.d_ht_m)
                .ok_or(PlacementError::NoClearPoint { heater: out.len(), point: centre })?;
            out.push(p);
        }
    }
    Ok(out)
}

fn mst_plan(heaters: Vec<Point2D>, site_ids: Option<Vec<usize>>, alpha: f64) -> Result<DesignPlan, PlacementError> {
    let g = complete_graph(&heaters);
    let all: Vec<usize> = (0..heaters.len()).collect();
    let tree = kruskal_mst(&g, &all)?;
    Ok(DesignPlan {
        heaters,
        site_ids,
        pipe_edges: tree.edges.into_iter().collect(),
        obj_part1_m: tree.total_weight,
        obj_part2: None,
        alpha,
        provenance: Provenance::Heuristic,
    })
}

/// The baseline plan. Heaters are off-grid; violations are left to the
/// evaluation module.
pub fn heuristic_plan(inst: &OrchardInstance) -> Result<DesignPlan, PlacementError> {
    inst.validate()?;
    let heaters = place_heaters(inst, &partition(inst))?;
    mst_plan(heaters, None, inst.alpha)
}

/// Moves each heater to its nearest unused candidate site (heaters in order,
/// ties to the lower site id) and rebuilds the MST over the chosen sites.
pub fn snap_to_sites(inst: &OrchardInstance, plan: &DesignPlan) -> Result<DesignPlan, PlacementError> {
    let n = inst.n_sites();
    if plan.heaters.len() > n {
        return Err(PlacementError::TooFewSites { heaters: plan.heaters.len(), sites: n });
    }
    let mut used = vec![false; n];
    let mut chosen = Vec::with_capacity(plan.heaters.len());
    for h in &plan.heaters {
        let best = (0..n)
            .filter(|&s| !used[s])
            .min_by(|&a, &b| h.distance(&inst.candidate_sites[a]).total_cmp(&h.distance(&inst.candidate_sites[b])))
            .expect("fewer heaters than sites");
        used[best] = true;
        chosen.push(best);
    }
    chosen.sort_unstable();
    let heaters = chosen.iter().map(|&s| inst.candidate_sites[s]).collect();
    mst_plan(heaters, Some(chosen), plan.alpha)
}
