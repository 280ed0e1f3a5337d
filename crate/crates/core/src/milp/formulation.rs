//! The heater-design MILP.
//!
//! The pipe network is a k-node tree chosen from a graph over candidate sites.
//! Every undirected edge `{i, j}` gets a selector `z_i_j` and two arc variables
//! `w_i_j`, `w_j_i`; a dummy terminal node `tau` (id `n`) collects exactly one
//! arc, and node potentials `u` forbid directed cycles (MTZ). Each selected
//! node has exactly one outgoing arc, so the arcs form an in-tree rooted at the
//! node attached to `tau`.
//!
//! Heat coverage at each check point is robust against the per-site output
//! factor: the lower-coverage row uses `ku_lo` and the upper row `ku_hi`, with
//! non-negative slack `mul_s` / `muh_s` that is penalised in the objective.
//!
//! Variable names: `z_i_j` (`i < j`, `j = n` for dummy edges), `w_i_j`, `l_i`,
//! `u_i` (`u_n` for `tau`), `mul_s`, `muh_s`. Variables are created in the
//! order z (real), z (dummy), w, l, u, mu.

use std::collections::BTreeMap;

use crate::graph::{complete_graph, WeightedGraph};
use crate::instance::{build_influence_matrix, InfluenceMatrix, OrchardInstance};

use super::{MilpModel, ModelError, Sense, VarId};

/// Ids of every decision variable, keyed by the graph element it models.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableCatalog {
    pub node_count: usize,
    pub k: usize,
    /// Edge selectors; `(i, n)` keys are the dummy edges to `tau`.
    pub z: BTreeMap<(usize, usize), VarId>,
    /// Arc variables; `n` stands for `tau`.
    pub w: BTreeMap<(usize, usize), VarId>,
    pub ell: Vec<VarId>,
    /// Node potentials; index `n` is `tau`.
    pub u: Vec<VarId>,
    pub mu_lo: Vec<VarId>,
    pub mu_hi: Vec<VarId>,
}

impl VariableCatalog {
    /// Creates all variables for a graph, heater count and check-point count.
    ///
    /// Potentials range over `[0, k]`: the node attached to `tau` has
    /// potential at least 1 and every arc adds one, so a path-shaped tree
    /// rooted at an endpoint needs `k`.
    pub fn declare(model: &mut MilpModel, g: &WeightedGraph, k: usize, n_cp: usize) -> Result<Self, ModelError> {
        let n = g.node_count();
        let tau = n;
        let mut z = BTreeMap::new();
        for e in g.edges() {
            z.insert((e.i, e.j), model.add_binary(format!("z_{}_{}", e.i, e.j))?);
        }
        for i in 0..n {
            z.insert((i, tau), model.add_binary(format!("z_{i}_{tau}"))?);
        }
        let mut w = BTreeMap::new();
        for e in g.edges() {
            w.insert((e.i, e.j), model.add_binary(format!("w_{}_{}", e.i, e.j))?);
            w.insert((e.j, e.i), model.add_binary(format!("w_{}_{}", e.j, e.i))?);
        }
        for i in 0..n {
            w.insert((i, tau), model.add_binary(format!("w_{i}_{tau}"))?);
            w.insert((tau, i), model.add_binary(format!("w_{tau}_{i}"))?);
        }
        let ell = (0..n)
            .map(|i| model.add_binary(format!("l_{i}")))
            .collect::<Result<Vec<_>, _>>()?;
        let u = (0..=n)
            .map(|i| model.add_continuous(format!("u_{i}"), 0.0, k as f64))
            .collect::<Result<Vec<_>, _>>()?;
        let mu_lo = (0..n_cp)
            .map(|s| model.add_continuous(format!("mul_{s}"), 0.0, f64::INFINITY))
            .collect::<Result<Vec<_>, _>>()?;
        let mu_hi = (0..n_cp)
            .map(|s| model.add_continuous(format!("muh_{s}"), 0.0, f64::INFINITY))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { node_count: n, k, z, w, ell, u, mu_lo, mu_hi })
    }

    pub fn tau(&self) -> usize {
        self.node_count
    }

    /// Selectors of real (non-dummy) edges.
    pub fn real_edges(&self) -> impl Iterator<Item = ((usize, usize), VarId)> + '_ {
        let tau = self.tau();
        self.z.iter().filter(move |((_, j), _)| *j != tau).map(|(&e, &v)| (e, v))
    }

    pub fn dummy_edge(&self, i: usize) -> VarId {
        self.z[&(i, self.tau())]
    }
}

/// Emits the k-MST rows: arc/edge linking, edge endpoints, out- and
/// in-degree, terminal rows, MTZ potentials and the cardinality row.
///
/// The endpoint rows `z_i_j <= l_i`, `z_i_j <= l_j` hold for every integer
/// solution of the remaining rows; they only tighten the LP relaxation.
pub fn build_kmst_constraints(
    g: &WeightedGraph,
    k: usize,
    model: &mut MilpModel,
    cat: &VariableCatalog,
) -> Result<(), ModelError> {
    let n = g.node_count();
    if k == 0 || k > n {
        return Err(ModelError::InfeasibleParameters(format!(
            "need 1 <= k <= |V|, got k = {k} with |V| = {n}"
        )));
    }
    if cat.node_count != n {
        return Err(ModelError::DimensionMismatch(format!(
            "catalog has {} nodes, graph has {n}",
            cat.node_count
        )));
    }
    let tau = n;
    let kf = k as f64;

    for (&(i, j), &z) in &cat.z {
        model.add_constraint(
            format!("link_{i}_{j}"),
            vec![(z, 1.0), (cat.w[&(i, j)], -1.0), (cat.w[&(j, i)], -1.0)],
            Sense::Eq,
            0.0,
        )?;
        for end in [i, j].into_iter().filter(|&e| e != tau) {
            model.add_constraint(format!("end_{i}_{j}_{end}"), vec![(z, 1.0), (cat.ell[end], -1.0)], Sense::Le, 0.0)?;
        }
    }

    let adj = g.adjacency();
    for i in 0..n {
        let mut out: Vec<(VarId, f64)> = adj[i].iter().map(|&j| (cat.w[&(i, j)], 1.0)).collect();
        out.push((cat.w[&(i, tau)], 1.0));
        out.push((cat.ell[i], -1.0));
        model.add_constraint(format!("out_{i}"), out, Sense::Eq, 0.0)?;
    }
    for i in 0..n {
        let mut inc: Vec<(VarId, f64)> = adj[i].iter().map(|&j| (cat.w[&(j, i)], 1.0)).collect();
        inc.push((cat.ell[i], -(kf - 1.0)));
        model.add_constraint(format!("in_{i}"), inc, Sense::Le, 0.0)?;
    }
    model.add_constraint(
        "tau_out",
        (0..n).map(|j| (cat.w[&(tau, j)], 1.0)).collect(),
        Sense::Eq,
        0.0,
    )?;
    model.add_constraint(
        "tau_in",
        (0..n).map(|i| (cat.w[&(i, tau)], 1.0)).collect(),
        Sense::Eq,
        1.0,
    )?;

    // u_i >= u_j + w_ij - k (1 - w_ij); absent arcs make the row redundant.
    for (&(i, j), &w) in &cat.w {
        if i == tau {
            continue;
        }
        model.add_constraint(
            format!("mtz_{i}_{j}"),
            vec![(cat.u[i], 1.0), (cat.u[j], -1.0), (w, -(kf + 1.0))],
            Sense::Ge,
            -kf,
        )?;
    }
    model.add_constraint("utau", vec![(cat.u[tau], 1.0)], Sense::Eq, 0.0)?;
    for i in 0..n {
        model.add_constraint(format!("ulo_{i}"), vec![(cat.u[i], 1.0), (cat.ell[i], -1.0)], Sense::Ge, 0.0)?;
        model.add_constraint(format!("uhi_{i}"), vec![(cat.u[i], 1.0), (cat.ell[i], -kf)], Sense::Le, 0.0)?;
    }
    model.add_constraint("card", cat.ell.iter().map(|&l| (l, 1.0)).collect(), Sense::Eq, kf)?;
    Ok(())
}

/// Emits the two robust coverage rows per check point.
pub fn build_robust_coverage(
    inst: &OrchardInstance,
    h: &InfluenceMatrix,
    model: &mut MilpModel,
    cat: &VariableCatalog,
) -> Result<(), ModelError> {
    let n = inst.n_sites();
    let n_cp = inst.n_check_points();
    if h.rows() != n || h.cols() != n_cp || cat.ell.len() != n || cat.mu_lo.len() != n_cp {
        return Err(ModelError::DimensionMismatch(format!(
            "influence matrix {}x{}, catalog {} sites / {} check points, instance {n}x{n_cp}",
            h.rows(),
            h.cols(),
            cat.ell.len(),
            cat.mu_lo.len()
        )));
    }
    for s in 0..n_cp {
        let mut lo: Vec<(VarId, f64)> = (0..n).map(|i| (cat.ell[i], inst.ku_lo[i] * h.get(i, s))).collect();
        lo.push((cat.mu_lo[s], 1.0));
        model.add_constraint(format!("covl_{s}"), lo, Sense::Ge, inst.f_lo)?;
    }
    for s in 0..n_cp {
        let mut hi: Vec<(VarId, f64)> = (0..n).map(|i| (cat.ell[i], inst.ku_hi[i] * h.get(i, s))).collect();
        hi.push((cat.mu_hi[s], -1.0));
        model.add_constraint(format!("covh_{s}"), hi, Sense::Le, inst.f_hi)?;
    }
    Ok(())
}

/// Normalised pipe length plus `alpha`-weighted normalised violation sum.
pub fn build_objective(
    inst: &OrchardInstance,
    g: &WeightedGraph,
    model: &mut MilpModel,
    cat: &VariableCatalog,
) -> Result<(), ModelError> {
    if !(inst.beta1_nor > 0.0 && inst.beta2_nor > 0.0) {
        return Err(ModelError::InfeasibleParameters("normalisation constants must be positive".into()));
    }
    set_length_objective(g, 1.0 / inst.beta1_nor, model, cat)?;
    let penalty = inst.alpha / inst.beta2_nor;
    for (&lo, &hi) in cat.mu_lo.iter().zip(&cat.mu_hi) {
        model.set_objective_coeff(lo, penalty)?;
        model.set_objective_coeff(hi, penalty)?;
    }
    Ok(())
}

fn set_length_objective(
    g: &WeightedGraph,
    scale: f64,
    model: &mut MilpModel,
    cat: &VariableCatalog,
) -> Result<(), ModelError> {
    for e in g.edges() {
        model.set_objective_coeff(cat.z[&(e.i, e.j)], e.weight * scale)?;
    }
    for i in 0..g.node_count() {
        model.set_objective_coeff(cat.dummy_edge(i), 0.0)?;
    }
    Ok(())
}

/// A built model together with everything needed to interpret its solutions.
#[derive(Debug, Clone)]
pub struct DesignModel {
    pub model: MilpModel,
    pub catalog: VariableCatalog,
    pub graph: WeightedGraph,
    pub influence: Option<InfluenceMatrix>,
}

impl DesignModel {
    /// Full robust multi-objective model for an orchard instance.
    pub fn build(inst: &OrchardInstance) -> Result<Self, crate::Error> {
        inst.validate()?;
        let graph = complete_graph(&inst.candidate_sites);
        let h = build_influence_matrix(inst)?;
        let mut model = MilpModel::new("frostgrid");
        let catalog = VariableCatalog::declare(&mut model, &graph, inst.k, inst.n_check_points())?;
        build_kmst_constraints(&graph, inst.k, &mut model, &catalog)?;
        build_robust_coverage(inst, &h, &mut model, &catalog)?;
        build_objective(inst, &graph, &mut model, &catalog)?;
        Ok(Self { model, catalog, graph, influence: Some(h) })
    }

    /// Pure k-MST model: minimise total (unnormalised) edge weight.
    pub fn kmst(g: &WeightedGraph, k: usize) -> Result<Self, ModelError> {
        let mut model = MilpModel::new("kmst");
        let catalog = VariableCatalog::declare(&mut model, g, k, 0)?;
        build_kmst_constraints(g, k, &mut model, &catalog)?;
        set_length_objective(g, 1.0, &mut model, &catalog)?;
        Ok(Self { model, catalog, graph: g.clone(), influence: None })
    }

    /// Values for every variable encoding the tree `edges` over `sites`.
    ///
    /// The tree is rooted at its smallest site; arcs point towards the root
    /// and the root's arc goes to `tau`. Potentials are depths counted from 1
    /// at the root. Violation slacks take their tight values
    /// `max(0, f_lo - lower coverage)` and `max(0, upper coverage - f_hi)`.
    pub fn encode_tree(
        &self,
        inst: Option<&OrchardInstance>,
        sites: &[usize],
        edges: &[(usize, usize)],
    ) -> Result<Vec<f64>, ModelError> {
        let cat = &self.catalog;
        let n = cat.node_count;
        let mut x = vec![0.0; self.model.num_vars()];
        if sites.len() != cat.k || edges.len() + 1 != sites.len() {
            return Err(ModelError::Mapping(format!(
                "need a tree on {} sites, got {} sites and {} edges",
                cat.k,
                sites.len(),
                edges.len()
            )));
        }
        let mut adj: BTreeMap<usize, Vec<usize>> = sites.iter().map(|&s| (s, Vec::new())).collect();
        for &(a, b) in edges {
            if !adj.contains_key(&a) || !adj.contains_key(&b) {
                return Err(ModelError::Mapping(format!("edge ({a}, {b}) leaves the site set")));
            }
            adj.get_mut(&a).unwrap().push(b);
            adj.get_mut(&b).unwrap().push(a);
        }
        let root = *adj.keys().next().expect("k >= 1");
        let mut depth: BTreeMap<usize, usize> = BTreeMap::from([(root, 1)]);
        let mut stack = vec![root];
        let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
        while let Some(v) = stack.pop() {
            for &nb in &adj[&v] {
                if !depth.contains_key(&nb) {
                    depth.insert(nb, depth[&v] + 1);
                    parent.insert(nb, v);
                    stack.push(nb);
                }
            }
        }
        if depth.len() != sites.len() {
            return Err(ModelError::Mapping("edges do not connect the selected sites".into()));
        }
        for (&v, &d) in &depth {
            x[cat.ell[v].0] = 1.0;
            x[cat.u[v].0] = d as f64;
        }
        x[cat.dummy_edge(root).0] = 1.0;
        x[cat.w[&(root, n)].0] = 1.0;
        for (&child, &par) in &parent {
            let arc = cat
                .w
                .get(&(child, par))
                .ok_or_else(|| ModelError::Mapping(format!("no edge ({child}, {par}) in graph")))?;
            x[arc.0] = 1.0;
            let key = (child.min(par), child.max(par));
            x[cat.z[&key].0] = 1.0;
        }
        if let (Some(inst), Some(h)) = (inst, self.influence.as_ref()) {
            for s in 0..cat.mu_lo.len() {
                let lower: f64 = depth.keys().map(|&i| inst.ku_lo[i] * h.get(i, s)).sum();
                let upper: f64 = depth.keys().map(|&i| inst.ku_hi[i] * h.get(i, s)).sum();
                x[cat.mu_lo[s].0] = (inst.f_lo - lower).max(0.0);
                x[cat.mu_hi[s].0] = (upper - inst.f_hi).max(0.0);
            }
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2D;
    use crate::milp::validate_solution;
    use crate::milp::{MilpSolution, SolveStatus, VarKind};

    fn unit_square() -> WeightedGraph {
        complete_graph(&[
            Point2D::new(0.0, 0.0),
            Point2D::new(1.0, 0.0),
            Point2D::new(1.0, 1.0),
            Point2D::new(0.0, 1.0),
        ])
    }

    fn count_prefix(m: &MilpModel, prefix: &str) -> usize {
        m.variables().iter().filter(|v| v.name.starts_with(prefix)).count()
    }

    #[test]
    fn k4_variable_counts() {
        let dm = DesignModel::kmst(&unit_square(), 3).unwrap();
        let cat = &dm.catalog;
        assert_eq!(cat.real_edges().count(), 6);
        assert_eq!(cat.z.len() - 6, 4);
        let real_w = cat.w.keys().filter(|(i, j)| *i < 4 && *j < 4).count();
        assert_eq!(real_w, 12);
        assert_eq!(cat.w.len() - real_w, 8);
        assert_eq!(cat.ell.len(), 4);
        assert_eq!(cat.u.len(), 5);
        assert_eq!(count_prefix(&dm.model, "w_"), 20);
        assert_eq!(dm.model.num_vars(), 10 + 20 + 4 + 5);
    }

    #[test]
    fn variable_order_and_names() {
        let dm = DesignModel::kmst(&unit_square(), 2).unwrap();
        let names: Vec<&str> = dm.model.variables().iter().map(|v| v.name.as_str()).collect();
        assert_eq!(&names[..7], &["z_0_1", "z_0_2", "z_0_3", "z_1_2", "z_1_3", "z_2_3", "z_0_4"]);
        assert_eq!(names[10], "w_0_1");
        assert_eq!(names[11], "w_1_0");
        assert_eq!(names[30], "l_0");
        assert_eq!(names[34], "u_0");
        assert_eq!(names[38], "u_4");
        let u = &dm.model.variables()[38];
        assert_eq!((u.kind, u.lower, u.upper), (VarKind::Continuous, 0.0, 2.0));
    }

    #[test]
    fn k_larger_than_graph_is_rejected() {
        assert!(matches!(
            DesignModel::kmst(&unit_square(), 5),
            Err(ModelError::InfeasibleParameters(_))
        ));
        assert!(DesignModel::kmst(&unit_square(), 0).is_err());
    }

    #[test]
    fn single_node_tree_is_feasible() {
        let dm = DesignModel::kmst(&unit_square(), 1).unwrap();
        let x = dm.encode_tree(None, &[2], &[]).unwrap();
        let sol = MilpSolution { objective_value: 0.0, values: x, status: SolveStatus::Feasible };
        assert!(validate_solution(&dm.model, &sol, 1e-6).unwrap().is_empty());
        assert_eq!(dm.model.objective_value(&sol.values), 0.0);
    }

    #[test]
    fn path_tree_encodes_feasibly_for_every_root_depth() {
        let dm = DesignModel::kmst(&unit_square(), 4).unwrap();
        // path 0-1-2-3 rooted at endpoint 0 reaches potential 4 = k
        let x = dm.encode_tree(None, &[0, 1, 2, 3], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let sol = MilpSolution { objective_value: 3.0, values: x, status: SolveStatus::Feasible };
        assert!(validate_solution(&dm.model, &sol, 1e-6).unwrap().is_empty());
        assert!((dm.model.objective_value(&sol.values) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn coverage_rows_and_objective_coefficients() {
        let inst = crate::instance::generate_instance(&crate::instance::GridParams::default()).unwrap();
        let g = complete_graph(&inst.candidate_sites);
        let h = build_influence_matrix(&inst).unwrap();
        let mut model = MilpModel::new("cov");
        let cat = VariableCatalog::declare(&mut model, &g, inst.k, inst.n_check_points()).unwrap();
        build_robust_coverage(&inst, &h, &mut model, &cat).unwrap();
        assert_eq!(model.num_constraints(), 432);
        assert_eq!(cat.mu_lo.len() + cat.mu_hi.len(), 432);
        build_objective(&inst, &g, &mut model, &cat).unwrap();
        let e = g.edges()[5];
        assert_eq!(model.objective()[cat.z[&(e.i, e.j)].0], e.weight / 600.0);
        assert_eq!(model.objective()[cat.mu_lo[0].0], 5.0 / 240.0);
        assert_eq!(model.objective()[cat.dummy_edge(3).0], 0.0);
    }

    #[test]
    fn zero_alpha_leaves_only_length() {
        let mut inst = crate::instance::generate_instance(&crate::instance::GridParams {
            length_m: 40.0,
            width_m: 30.0,
            k: 2,
            alpha: 0.0,
            ..Default::default()
        })
        .unwrap();
        inst.alpha = 0.0;
        let dm = DesignModel::build(&inst).unwrap();
        for &v in dm.catalog.mu_lo.iter().chain(&dm.catalog.mu_hi) {
            assert_eq!(dm.model.objective()[v.0], 0.0);
        }
    }

    fn single_site_instance(ku_lo: f64) -> OrchardInstance {
        OrchardInstance {
            length_m: 10.0,
            width_m: 10.0,
            trees: vec![],
            candidate_sites: vec![Point2D::new(5.0, 5.0)],
            check_points: vec![Point2D::new(5.0, 5.0)],
            k: 1,
            d_ht_m: 0.0,
            f_lo: 0.5,
            f_hi: 1.0,
            k_tun: 0.01,
            ku_lo: vec![ku_lo],
            ku_hi: vec![1.0],
            alpha: 1.0,
            beta1_nor: 600.0,
            beta2_nor: 240.0,
        }
    }

    #[test]
    fn coincident_site_needs_no_slack() {
        let inst = single_site_instance(0.8);
        let dm = DesignModel::build(&inst).unwrap();
        let x = dm.encode_tree(Some(&inst), &[0], &[]).unwrap();
        assert_eq!(x[dm.catalog.mu_lo[0].0], 0.0);
        assert_eq!(x[dm.catalog.mu_hi[0].0], 0.0);
        let sol = MilpSolution { objective_value: 0.0, values: x, status: SolveStatus::Feasible };
        assert!(validate_solution(&dm.model, &sol, 1e-9).unwrap().is_empty());
    }

    #[test]
    fn empty_selection_forces_lower_slack() {
        let inst = single_site_instance(0.8);
        let dm = DesignModel::build(&inst).unwrap();
        let row = dm.model.constraints().iter().find(|c| c.name == "covl_0").unwrap();
        let mut values = vec![0.0; dm.model.num_vars()];
        // with no heater the row reduces to mul_0 >= f_lo
        values[dm.catalog.mu_lo[0].0] = 0.5;
        assert!((row.activity(&values) - 0.5).abs() < 1e-15);
        values[dm.catalog.mu_lo[0].0] = 0.49;
        assert!(row.activity(&values) < row.rhs);
    }

    #[test]
    fn objective_matches_hand_substitution() {
        let inst = OrchardInstance {
            length_m: 20.0,
            width_m: 10.0,
            trees: vec![],
            candidate_sites: vec![Point2D::new(0.0, 0.0), Point2D::new(10.0, 0.0)],
            check_points: vec![Point2D::new(5.0, 0.0)],
            k: 2,
            d_ht_m: 0.0,
            f_lo: 0.5,
            f_hi: 2.0,
            k_tun: 0.01,
            ku_lo: vec![0.8; 2],
            ku_hi: vec![1.0; 2],
            alpha: 5.0,
            beta1_nor: 600.0,
            beta2_nor: 240.0,
        };
        let dm = DesignModel::build(&inst).unwrap();
        let x = dm.encode_tree(Some(&inst), &[0, 1], &[(0, 1)]).unwrap();
        let sol = MilpSolution { objective_value: 0.0, values: x, status: SolveStatus::Feasible };
        assert!(validate_solution(&dm.model, &sol, 1e-9).unwrap().is_empty());
        assert!((dm.model.objective_value(&sol.values) - 10.0 / 600.0).abs() < 1e-15);
    }
}
