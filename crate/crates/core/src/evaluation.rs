//! Design plans and everything that scores them: worst-case and sampled
//! coverage violations, the scalarised objective, Pareto sweeps over the
//! weight `alpha`, and an exhaustive oracle over site subsets.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point2D;
use crate::graph::{GraphError, UnionFind};
use crate::instance::{build_influence_matrix, influence, InfluenceMatrix, InstanceError, OrchardInstance};
use crate::milp::SolveStatus;
use crate::solver::SolveConfig;

/// Largest number of subsets the oracle will enumerate.
pub const ORACLE_BUDGET: u128 = 1_000_000;
pub const DEFAULT_DRAWS: usize = 1000;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("oracle would enumerate {count} subsets (budget {budget})")]
    OracleBudget { count: u128, budget: u128 },
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Milp,
    Heuristic,
    Oracle,
    Imported,
}

/// A heater layout with its pipe tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignPlan {
    pub heaters: Vec<Point2D>,
    /// Candidate-site index of each heater, for plans on the grid.
    #[serde(default)]
    pub site_ids: Option<Vec<usize>>,
    /// Pairs of indices into `heaters`.
    pub pipe_edges: Vec<(usize, usize)>,
    pub obj_part1_m: f64,
    /// Average violation per check point.
    #[serde(default)]
    pub obj_part2: Option<f64>,
    pub alpha: f64,
    pub provenance: Provenance,
}

impl DesignPlan {
    pub fn pipe_length(&self) -> f64 {
        self.pipe_edges.iter().map(|&(a, b)| self.heaters[a].distance(&self.heaters[b])).sum()
    }

    /// Checks that the pipes form a spanning tree over the heaters and that
    /// the stored length matches the geometry.
    pub fn check_structure(&self) -> Result<(), EvalError> {
        let n = self.heaters.len();
        if let Some(ids) = &self.site_ids {
            if ids.len() != n {
                return Err(EvalError::InvalidPlan(format!("{} site ids for {n} heaters", ids.len())));
            }
        }
        if self.heaters.iter().any(|p| !p.is_finite()) {
            return Err(EvalError::InvalidPlan("non-finite heater coordinate".into()));
        }
        let expected_edges = n.saturating_sub(1);
        if self.pipe_edges.len() != expected_edges {
            return Err(EvalError::InvalidPlan(format!(
                "{} pipe edges for {n} heaters, expected {expected_edges}",
                self.pipe_edges.len()
            )));
        }
        let mut uf = UnionFind::new(n);
        for &(a, b) in &self.pipe_edges {
            if a >= n || b >= n || a == b {
                return Err(EvalError::InvalidPlan(format!("bad pipe edge ({a}, {b})")));
            }
            if !uf.union(a, b) {
                return Err(EvalError::InvalidPlan(format!("pipe edge ({a}, {b}) closes a cycle")));
            }
        }
        let length = self.pipe_length();
        if (length - self.obj_part1_m).abs() > 1e-9 * (1.0 + length) {
            return Err(EvalError::InvalidPlan(format!(
                "stored pipe length {} differs from geometry {length}",
                self.obj_part1_m
            )));
        }
        Ok(())
    }

    /// Uncertainty interval of each heater: per-site bounds for grid plans,
    /// the instance envelope otherwise.
    pub fn heater_bounds(&self, inst: &OrchardInstance) -> Result<Vec<(f64, f64)>, EvalError> {
        match &self.site_ids {
            Some(ids) => ids
                .iter()
                .map(|&s| {
                    if s < inst.n_sites() {
                        Ok((inst.ku_lo[s], inst.ku_hi[s]))
                    } else {
                        Err(EvalError::InvalidPlan(format!("site id {s} out of range")))
                    }
                })
                .collect(),
            None => {
                let env = inst.scalar_ku_bounds();
                Ok(vec![env; self.heaters.len()])
            }
        }
    }
}

/// Per-check-point violations under the worst-case uncertainty realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct Violations {
    pub mu_lo: Vec<f64>,
    pub mu_hi: Vec<f64>,
    pub obj_part2: f64,
}

impl Violations {
    pub fn total(&self) -> f64 {
        self.mu_lo.iter().sum::<f64>() + self.mu_hi.iter().sum::<f64>()
    }
}

fn heater_influence(plan: &DesignPlan, inst: &OrchardInstance) -> Result<Vec<Vec<f64>>, EvalError> {
    plan.heaters
        .iter()
        .map(|&h| inst.check_points.iter().map(|&cp| influence(h, cp, inst.k_tun)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(EvalError::from)
}

fn average(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        values.sum::<f64>() / n as f64
    }
}

/// Smallest violations compatible with the robust coverage rows for a fixed
/// placement: `mu_lo = max(0, f_lo - sum ku_lo f)`, `mu_hi = max(0, sum ku_hi f - f_hi)`.
pub fn worst_case_violations(plan: &DesignPlan, inst: &OrchardInstance) -> Result<Violations, EvalError> {
    let bounds = plan.heater_bounds(inst)?;
    let f = heater_influence(plan, inst)?;
    let n_cp = inst.n_check_points();
    let mut mu_lo = Vec::with_capacity(n_cp);
    let mut mu_hi = Vec::with_capacity(n_cp);
    for s in 0..n_cp {
        let lower: f64 = bounds.iter().zip(&f).map(|(b, row)| b.0 * row[s]).sum();
        let upper: f64 = bounds.iter().zip(&f).map(|(b, row)| b.1 * row[s]).sum();
        mu_lo.push((inst.f_lo - lower).max(0.0));
        mu_hi.push((upper - inst.f_hi).max(0.0));
    }
    let obj_part2 = average(mu_lo.iter().zip(&mu_hi).map(|(a, b)| a + b), n_cp);
    Ok(Violations { mu_lo, mu_hi, obj_part2 })
}

/// Summary of the average violation over Monte Carlo draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationStats {
    pub draws: usize,
    pub seed: u64,
    pub mean: f64,
    pub max: f64,
    pub std: f64,
}

/// Samples every heater's factor uniformly in its interval (ChaCha8 seeded
/// from `seed`) and reports the average violation per check point across
/// `draws` realisations. `std` is the population standard deviation.
pub fn sampled_violations(
    plan: &DesignPlan,
    inst: &OrchardInstance,
    seed: u64,
    draws: usize,
) -> Result<ViolationStats, EvalError> {
    if draws == 0 {
        return Err(EvalError::InvalidArgument("draws must be at least 1".into()));
    }
    let bounds = plan.heater_bounds(inst)?;
    let f = heater_influence(plan, inst)?;
    let n_cp = inst.n_check_points();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ku = vec![0.0; bounds.len()];
    let mut samples = Vec::with_capacity(draws);
    for _ in 0..draws {
        for (k, &(lo, hi)) in ku.iter_mut().zip(&bounds) {
            let u: f64 = rng.gen();
            *k = lo + (hi - lo) * u;
        }
        let per_cp = (0..n_cp).map(|s| {
            let power: f64 = ku.iter().zip(&f).map(|(k, row)| k * row[s]).sum();
            (inst.f_lo - power).max(0.0) + (power - inst.f_hi).max(0.0)
        });
        samples.push(average(per_cp, n_cp));
    }
    let mean = samples.iter().sum::<f64>() / draws as f64;
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / draws as f64;
    Ok(ViolationStats { draws, seed, mean, max, std: var.sqrt() })
}

/// `obj_part1 / beta1 + alpha * n_cp * obj_part2 / beta2`, i.e. the MILP
/// objective written with the averaged violation.
pub fn scalarized_objective(inst: &OrchardInstance, obj_part1_m: f64, obj_part2: f64) -> f64 {
    obj_part1_m / inst.beta1_nor + inst.alpha * inst.n_check_points() as f64 * obj_part2 / inst.beta2_nor
}

/// Scalarised objective of a plan with its worst-case violations.
pub fn plan_objective(plan: &DesignPlan, inst: &OrchardInstance) -> Result<f64, EvalError> {
    let v = worst_case_violations(plan, inst)?;
    Ok(scalarized_objective(inst, plan.pipe_length(), v.obj_part2))
}

/// One row of a Pareto sweep. Quantities of failed solves are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoRecord {
    pub alpha: f64,
    pub obj_part1_m: Option<f64>,
    pub obj_part2: Option<f64>,
    pub rel_gap: Option<f64>,
    pub wall_time_s: f64,
    pub status: SolveStatus,
}

pub const PARETO_CSV_HEADER: &str = "alpha,obj_part1_m,obj_part2,rel_gap,wall_time_s,status";

/// Solves the design model once per `alpha`. Failures are recorded in their
/// row; the output is sorted by `alpha`.
pub fn pareto_sweep(inst: &OrchardInstance, alphas: &[f64], cfg: &SolveConfig) -> Result<Vec<ParetoRecord>, EvalError> {
    if alphas.is_empty() {
        return Err(EvalError::InvalidArgument("no alpha values".into()));
    }
    if let Some(a) = alphas.iter().find(|a| !a.is_finite() || **a < 0.0) {
        return Err(EvalError::InvalidArgument(format!("alpha {a} must be finite and >= 0")));
    }
    inst.validate()?;
    let mut records: Vec<ParetoRecord> = alphas
        .par_iter()
        .map(|&alpha| {
            let t0 = std::time::Instant::now();
            let variant = inst.with_alpha(alpha);
            match crate::layout::optimize_layout(&variant, cfg) {
                Ok(out) => {
                    let (p1, p2) = match &out.plan {
                        Some(plan) => (Some(plan.obj_part1_m), plan.obj_part2),
                        None => (None, None),
                    };
                    ParetoRecord {
                        alpha,
                        obj_part1_m: p1,
                        obj_part2: p2,
                        rel_gap: out.result.rel_gap.is_finite().then_some(out.result.rel_gap),
                        wall_time_s: t0.elapsed().as_secs_f64(),
                        status: out.result.status,
                    }
                }
                Err(e) => {
                    log::warn!("alpha {alpha}: {e}");
                    ParetoRecord {
                        alpha,
                        obj_part1_m: None,
                        obj_part2: None,
                        rel_gap: None,
                        wall_time_s: t0.elapsed().as_secs_f64(),
                        status: SolveStatus::NumericError,
                    }
                }
            }
        })
        .collect();
    records.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    Ok(records)
}

/// CSV with LF endings; missing values are empty fields.
pub fn pareto_csv(records: &[ParetoRecord]) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from(PARETO_CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.alpha,
            opt(r.obj_part1_m),
            opt(r.obj_part2),
            opt(r.rel_gap),
            r.wall_time_s,
            r.status
        )
        .unwrap();
    }
    out
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// Kruskal over the complete graph on `subset`; ties by (weight, i, j).
fn subset_mst(points: &[Point2D], subset: &[usize]) -> (f64, Vec<(usize, usize)>) {
    let mut edges = Vec::with_capacity(subset.len() * subset.len() / 2);
    for (a, &i) in subset.iter().enumerate() {
        for (b, &j) in subset.iter().enumerate().skip(a + 1) {
            edges.push((points[i].distance(&points[j]), a, b));
        }
    }
    edges.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut uf = UnionFind::new(subset.len());
    let mut total = 0.0;
    let mut tree = Vec::with_capacity(subset.len().saturating_sub(1));
    for (w, a, b) in edges {
        if uf.union(a, b) {
            total += w;
            tree.push((a, b));
        }
    }
    (total, tree)
}

fn subset_violation_sum(inst: &OrchardInstance, h: &InfluenceMatrix, subset: &[usize]) -> f64 {
    (0..inst.n_check_points())
        .map(|s| {
            let lower: f64 = subset.iter().map(|&i| inst.ku_lo[i] * h.get(i, s)).sum();
            let upper: f64 = subset.iter().map(|&i| inst.ku_hi[i] * h.get(i, s)).sum();
            (inst.f_lo - lower).max(0.0) + (upper - inst.f_hi).max(0.0)
        })
        .sum()
}

/// Advances `c` to the next k-combination of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exact optimum by enumerating every k-subset of candidate sites. Ties go to
/// the lexicographically smallest subset.
pub fn exhaustive_oracle(inst: &OrchardInstance, alpha: f64) -> Result<DesignPlan, EvalError> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(EvalError::InvalidArgument(format!("alpha {alpha} must be finite and >= 0")));
    }
    let inst = inst.with_alpha(alpha);
    inst.validate()?;
    let (n, k) = (inst.n_sites(), inst.k);
    let count = binomial(n, k);
    if count > ORACLE_BUDGET {
        return Err(EvalError::OracleBudget { count, budget: ORACLE_BUDGET });
    }
    let h = build_influence_matrix(&inst)?;
    let score = |subset: &[usize]| {
        let (len, _) = subset_mst(&inst.candidate_sites, subset);
        len / inst.beta1_nor + inst.alpha * subset_violation_sum(&inst, &h, subset) / inst.beta2_nor
    };
    let better = |a: &(f64, Vec<usize>), b: &(f64, Vec<usize>)| a.0 < b.0 || (a.0 == b.0 && a.1 < b.1);

    // one task per first element; each scans its block in lexicographic order
    let best = (0..=n - k)
        .into_par_iter()
        .filter_map(|first| {
            let mut tail: Vec<usize> = (first + 1..first + k).collect();
            let mut best: Option<(f64, Vec<usize>)> = None;
            loop {
                let mut subset = Vec::with_capacity(k);
                subset.push(first);
                subset.extend(tail.iter().copied());
                let cand = (score(&subset), subset);
                if best.as_ref().is_none_or(|b| better(&cand, b)) {
                    best = Some(cand);
                }
                if !next_tail(&mut tail, first, n) {
                    break;
                }
            }
            best
        })
        .reduce_with(|a, b| if better(&b, &a) { b } else { a })
        .expect("k <= n_sites was validated");

    let subset = best.1;
    let (len, tree) = subset_mst(&inst.candidate_sites, &subset);
    let heaters: Vec<Point2D> = subset.iter().map(|&i| inst.candidate_sites[i]).collect();
    let n_cp = inst.n_check_points();
    let total = subset_violation_sum(&inst, &h, &subset);
    Ok(DesignPlan {
        heaters,
        site_ids: Some(subset),
        pipe_edges: tree,
        obj_part1_m: len,
        obj_part2: Some(if n_cp == 0 { 0.0 } else { total / n_cp as f64 }),
        alpha,
        provenance: Provenance::Oracle,
    })
}

/// Next combination of the elements after `first` (values in `first+1..n`).
fn next_tail(tail: &mut [usize], first: usize, n: usize) -> bool {
    let mut shifted: Vec<usize> = tail.iter().map(|&t| t - first - 1).collect();
    let more = next_combination(&mut shifted, n - first - 1);
    if more {
        for (t, s) in tail.iter_mut().zip(shifted) {
            *t = s + first + 1;
        }
    }
    more
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inst_with(sites: Vec<Point2D>, cps: Vec<Point2D>, k: usize) -> OrchardInstance {
        let n = sites.len();
        OrchardInstance {
            length_m: 100.0,
            width_m: 100.0,
            trees: vec![],
            candidate_sites: sites,
            check_points: cps,
            k,
            d_ht_m: 0.0,
            f_lo: 0.5,
            f_hi: 1.0,
            k_tun: 0.01,
            ku_lo: vec![0.8; n],
            ku_hi: vec![1.0; n],
            alpha: 0.0,
            beta1_nor: 1.0,
            beta2_nor: 1.0,
        }
    }

    fn unit_square() -> Vec<Point2D> {
        vec![Point2D::new(0.0, 0.0), Point2D::new(1.0, 0.0), Point2D::new(1.0, 1.0), Point2D::new(0.0, 1.0)]
    }

    fn plan(heaters: Vec<Point2D>, site_ids: Option<Vec<usize>>) -> DesignPlan {
        DesignPlan {
            heaters,
            site_ids,
            pipe_edges: vec![],
            obj_part1_m: 0.0,
            obj_part2: None,
            alpha: 0.0,
            provenance: Provenance::Heuristic,
        }
    }

    #[test]
    fn zero_heaters_violate_by_f_lo() {
        let inst = inst_with(unit_square(), vec![Point2D::new(3.0, 3.0), Point2D::new(5.0, 5.0)], 1);
        let v = worst_case_violations(&plan(vec![], None), &inst).unwrap();
        assert_eq!(v.obj_part2, 0.5);
        assert_eq!(v.mu_lo, vec![0.5, 0.5]);
        assert_eq!(v.mu_hi, vec![0.0, 0.0]);
    }

    #[test]
    fn heater_on_checkpoint_has_no_violation() {
        let inst = inst_with(vec![Point2D::new(0.0, 0.0)], vec![Point2D::new(0.0, 0.0)], 1);
        let v = worst_case_violations(&plan(vec![Point2D::new(0.0, 0.0)], Some(vec![0])), &inst).unwrap();
        assert_eq!((v.mu_lo[0], v.mu_hi[0], v.obj_part2), (0.0, 0.0, 0.0));
    }

    #[test]
    fn grid_plans_use_site_bounds_and_others_the_envelope() {
        let mut inst = inst_with(unit_square(), vec![Point2D::new(0.0, 0.0)], 1);
        inst.ku_lo = vec![0.3, 0.8, 0.8, 0.8];
        inst.ku_hi = vec![0.4, 1.0, 1.0, 1.2];
        let p = plan(vec![Point2D::new(0.0, 0.0)], Some(vec![0]));
        assert_eq!(p.heater_bounds(&inst).unwrap(), vec![(0.3, 0.4)]);
        let q = plan(vec![Point2D::new(0.0, 0.0)], None);
        assert_eq!(q.heater_bounds(&inst).unwrap(), vec![(0.3, 1.2)]);
        let v = worst_case_violations(&p, &inst).unwrap();
        assert!((v.mu_lo[0] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn structure_checks() {
        let mut p = plan(unit_square(), None);
        p.pipe_edges = vec![(0, 1), (1, 2), (2, 3)];
        p.obj_part1_m = 3.0;
        assert!(p.check_structure().is_ok());
        p.obj_part1_m = 3.1;
        assert!(p.check_structure().is_err());
        p.obj_part1_m = 3.0;
        p.pipe_edges = vec![(0, 1), (1, 0), (2, 3)];
        assert!(p.check_structure().is_err());
        p.pipe_edges = vec![(0, 1), (1, 2)];
        assert!(p.check_structure().is_err());
        let single = plan(vec![Point2D::new(1.0, 1.0)], None);
        assert!(single.check_structure().is_ok());
    }

    #[test]
    fn sampling_is_deterministic_and_degenerate_intervals_match() {
        let mut inst = inst_with(unit_square(), vec![Point2D::new(0.0, 0.0), Point2D::new(50.0, 0.0)], 2);
        let p = plan(vec![Point2D::new(0.0, 0.0), Point2D::new(1.0, 0.0)], Some(vec![0, 1]));
        let a = sampled_violations(&p, &inst, 7, 200).unwrap();
        let b = sampled_violations(&p, &inst, 7, 200).unwrap();
        assert_eq!(a, b);
        let wc = worst_case_violations(&p, &inst).unwrap().obj_part2;
        assert!(a.mean <= wc + 1e-12);
        inst.ku_lo = vec![0.9; 4];
        inst.ku_hi = vec![0.9; 4];
        let s = sampled_violations(&p, &inst, 3, 10).unwrap();
        let wc = worst_case_violations(&p, &inst).unwrap().obj_part2;
        assert!((s.mean - wc).abs() < 1e-12 && (s.max - wc).abs() < 1e-12);
        assert!(s.std < 1e-12);
        assert!(sampled_violations(&p, &inst, 3, 0).is_err());
    }

    #[test]
    fn oracle_on_unit_square() {
        let inst = inst_with(unit_square(), vec![], 3);
        let p = exhaustive_oracle(&inst, 0.0).unwrap();
        assert_eq!(p.obj_part1_m, 2.0);
        assert_eq!(p.site_ids, Some(vec![0, 1, 2]));
        assert!(p.check_structure().is_ok());
        let all = exhaustive_oracle(&inst_with(unit_square(), vec![], 4), 0.0).unwrap();
        assert_eq!(all.obj_part1_m, 3.0);
        assert_eq!(all.pipe_edges.len(), 3);
    }

    #[test]
    fn oracle_budget_is_enforced() {
        let sites: Vec<Point2D> = (0..40).map(|i| Point2D::new(i as f64, 0.0)).collect();
        let inst = inst_with(sites, vec![], 10);
        match exhaustive_oracle(&inst, 0.0) {
            Err(EvalError::OracleBudget { count, .. }) => assert_eq!(count, binomial(40, 10)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oracle_matches_brute_force_scores() {
        let sites = vec![
            Point2D::new(0.0, 0.0),
            Point2D::new(30.0, 0.0),
            Point2D::new(0.0, 40.0),
            Point2D::new(60.0, 60.0),
            Point2D::new(90.0, 10.0),
        ];
        let cps = vec![Point2D::new(10.0, 10.0), Point2D::new(70.0, 50.0)];
        let mut inst = inst_with(sites, cps, 2);
        inst.beta1_nor = 600.0;
        inst.beta2_nor = 240.0;
        for alpha in [0.0, 5.0, 1000.0] {
            let p = exhaustive_oracle(&inst, alpha).unwrap();
            let variant = inst.with_alpha(alpha);
            let best = plan_objective(&p, &variant).unwrap();
            let mut c = vec![0, 1];
            loop {
                let (len, tree) = subset_mst(&inst.candidate_sites, &c);
                let q = DesignPlan {
                    heaters: c.iter().map(|&i| inst.candidate_sites[i]).collect(),
                    site_ids: Some(c.clone()),
                    pipe_edges: tree,
                    obj_part1_m: len,
                    obj_part2: None,
                    alpha,
                    provenance: Provenance::Oracle,
                };
                assert!(plan_objective(&q, &variant).unwrap() >= best - 1e-12);
                if !next_combination(&mut c, 5) {
                    break;
                }
            }
        }
    }

    #[test]
    fn combinations_in_order() {
        let mut c = vec![0, 1];
        let mut all = vec![c.clone()];
        while next_combination(&mut c, 4) {
            all.push(c.clone());
        }
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(binomial(187, 2), 17391);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn csv_layout() {
        let recs = vec![
            ParetoRecord {
                alpha: 0.1,
                obj_part1_m: Some(2.5),
                obj_part2: Some(0.25),
                rel_gap: Some(0.0),
                wall_time_s: 1.5,
                status: SolveStatus::Optimal,
            },
            ParetoRecord {
                alpha: 5.0,
                obj_part1_m: None,
                obj_part2: None,
                rel_gap: None,
                wall_time_s: 0.5,
                status: SolveStatus::LimitReached,
            },
        ];
        assert_eq!(
            pareto_csv(&recs),
            "alpha,obj_part1_m,obj_part2,rel_gap,wall_time_s,status\n0.1,2.5,0.25,0,1.5,optimal\n5,,,,0.5,limit-reached\n"
        );
    }

    proptest! {
        #[test]
        fn widening_intervals_never_helps(
            xs in prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), 1..5),
            cps in prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), 1..6),
            lo in 0.3f64..0.9, width in 0.0f64..0.3, widen_lo in 0.0f64..0.2, widen_hi in 0.0f64..0.5,
        ) {
            let sites: Vec<Point2D> = xs.iter().map(|&(x, y)| Point2D::new(x, y)).collect();
            let cps: Vec<Point2D> = cps.iter().map(|&(x, y)| Point2D::new(x, y)).collect();
            let n = sites.len();
            let mut inst = inst_with(sites.clone(), cps, 1);
            inst.ku_lo = vec![lo; n];
            inst.ku_hi = vec![lo + width; n];
            let p = plan(sites, Some((0..n).collect()));
            let narrow = worst_case_violations(&p, &inst).unwrap().obj_part2;
            inst.ku_lo = vec![(lo - widen_lo).max(1e-3); n];
            inst.ku_hi = vec![lo + width + widen_hi; n];
            let wide = worst_case_violations(&p, &inst).unwrap().obj_part2;
            prop_assert!(wide >= narrow - 1e-12);
        }

        #[test]
        fn adding_a_heater_never_raises_lower_violations(
            xs in prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), 2..6),
            cps in prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), 1..6),
        ) {
            let sites: Vec<Point2D> = xs.iter().map(|&(x, y)| Point2D::new(x, y)).collect();
            let inst = inst_with(sites.clone(), cps.iter().map(|&(x, y)| Point2D::new(x, y)).collect(), 1);
            let n = sites.len();
            let small = worst_case_violations(&plan(sites[..n - 1].to_vec(), Some((0..n - 1).collect())), &inst).unwrap();
            let big = worst_case_violations(&plan(sites.clone(), Some((0..n).collect())), &inst).unwrap();
            for s in 0..small.mu_lo.len() {
                prop_assert!(big.mu_lo[s] <= small.mu_lo[s] + 1e-15);
                prop_assert!(big.mu_hi[s] >= small.mu_hi[s] - 1e-15);
            }
        }

        #[test]
        fn mst_length_scales_linearly(
            xs in prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), 1..8),
            c in 0.1f64..10.0,
        ) {
            let pts: Vec<Point2D> = xs.iter().map(|&(x, y)| Point2D::new(x, y)).collect();
            let scaled: Vec<Point2D> = pts.iter().map(|p| p.scaled(c)).collect();
            let all: Vec<usize> = (0..pts.len()).collect();
            let (a, _) = subset_mst(&pts, &all);
            let (b, _) = subset_mst(&scaled, &all);
            prop_assert!((b - c * a).abs() <= 1e-9 * (1.0 + b));
        }
    }
}
