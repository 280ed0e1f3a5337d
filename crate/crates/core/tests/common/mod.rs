#![allow(dead_code)]

use frostgrid::graph::WeightedGraph;
use frostgrid::{OrchardInstance, Point2D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Square orchard with uniformly scattered sites and check points, no trees
/// and per-site factor intervals inside [0.6, 1.1].
pub fn random_instance(seed: u64, n_sites: usize, n_cp: usize, k: usize, alpha: f64) -> OrchardInstance {
    let mut r = rng(seed);
    let side = 60.0;
    let mut pts = |c: usize| -> Vec<Point2D> {
        (0..c).map(|_| Point2D::new(r.gen_range(0.0..side), r.gen_range(0.0..side))).collect()
    };
    let candidate_sites = pts(n_sites);
    let check_points = pts(n_cp);
    let ku_lo: Vec<f64> = (0..n_sites).map(|_| r.gen_range(0.6..0.9)).collect();
    let ku_hi: Vec<f64> = ku_lo.iter().map(|&v| v + r.gen_range(0.0..0.2)).collect();
    OrchardInstance {
        length_m: side,
        width_m: side,
        trees: Vec::new(),
        candidate_sites,
        check_points,
        k,
        d_ht_m: 0.0,
        f_lo: 0.5,
        f_hi: 1.0,
        k_tun: 0.03,
        ku_lo,
        ku_hi,
        alpha,
        beta1_nor: 600.0,
        beta2_nor: 240.0,
    }
}

/// Connected graph: a random spanning tree plus each remaining pair with
/// probability `density`. Weights are integers in 1..=100 when `integral`.
pub fn random_connected_graph(r: &mut ChaCha8Rng, n: usize, density: f64, integral: bool) -> WeightedGraph {
    let mut edges = Vec::new();
    let mut present = vec![vec![false; n]; n];
    let weight = |r: &mut ChaCha8Rng| if integral { r.gen_range(1..=100) as f64 } else { r.gen_range(0.01..100.0) };
    for v in 1..n {
        let u = r.gen_range(0..v);
        present[u][v] = true;
        edges.push((u, v, weight(r)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !present[i][j] && r.gen_bool(density) {
                edges.push((i, j, weight(r)));
            }
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

/// Prim's algorithm over an adjacency matrix; total weight of a minimum
/// spanning forest of `nodes`.
pub fn prim_total(g: &WeightedGraph, nodes: &[usize]) -> f64 {
    let n = g.node_count();
    let mut w = vec![vec![f64::INFINITY; n]; n];
    for e in g.edges() {
        w[e.i][e.j] = w[e.i][e.j].min(e.weight);
        w[e.j][e.i] = w[e.j][e.i].min(e.weight);
    }
    let mut in_set = vec![false; n];
    for &v in nodes {
        in_set[v] = true;
    }
    let mut done = vec![false; n];
    let mut total = 0.0;
    for &start in nodes {
        if done[start] {
            continue;
        }
        let mut best = vec![f64::INFINITY; n];
        best[start] = 0.0;
        loop {
            let next = (0..n).filter(|&v| in_set[v] && !done[v] && best[v].is_finite()).min_by(|&a, &b| {
                best[a].total_cmp(&best[b])
            });
            let Some(v) = next else { break };
            done[v] = true;
            total += best[v];
            for u in 0..n {
                if in_set[u] && !done[u] && w[v][u] < best[u] {
                    best[u] = w[v][u];
                }
            }
        }
    }
    total
}

/// MST plan over the given candidate sites.
pub fn plan_for_sites(inst: &OrchardInstance, ids: &[usize], alpha: f64) -> frostgrid::DesignPlan {
    let heaters: Vec<Point2D> = ids.iter().map(|&i| inst.candidate_sites[i]).collect();
    let g = frostgrid::graph::complete_graph(&heaters);
    let nodes: Vec<usize> = (0..heaters.len()).collect();
    let t = frostgrid::graph::kruskal_mst(&g, &nodes).unwrap();
    frostgrid::DesignPlan {
        heaters,
        site_ids: Some(ids.to_vec()),
        pipe_edges: t.edges.iter().copied().collect(),
        obj_part1_m: t.total_weight,
        obj_part2: None,
        alpha,
        provenance: frostgrid::Provenance::Oracle,
    }
}
