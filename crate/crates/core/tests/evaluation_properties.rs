mod common;

use common::{plan_for_sites, random_instance};
use frostgrid::evaluation::{
    exhaustive_oracle, pareto_sweep, plan_objective, sampled_violations, scalarized_objective,
    worst_case_violations,
};
use frostgrid::solver::SolveConfig;
use proptest::prelude::*;

fn subset(n: usize, mask: u32, k: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
    let mut fill = 0;
    while ids.len() < k {
        if !ids.contains(&fill) {
            ids.push(fill);
        }
        fill += 1;
    }
    ids.sort_unstable();
    ids
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn widening_intervals_never_lowers_worst_case(
        seed in 0u64..1000,
        mask in 0u32..(1 << 10),
        widen_lo in 0.0f64..0.3,
        widen_hi in 0.0f64..0.3,
    ) {
        let inst = random_instance(seed, 10, 12, 3, 5.0);
        let ids = subset(10, mask, 1);
        let plan = plan_for_sites(&inst, &ids, 5.0);
        let narrow = worst_case_violations(&plan, &inst).unwrap();
        let mut wide = inst.clone();
        for v in &mut wide.ku_lo {
            *v = (*v - widen_lo).max(1e-3);
        }
        for v in &mut wide.ku_hi {
            *v += widen_hi;
        }
        let widened = worst_case_violations(&plan, &wide).unwrap();
        prop_assert!(widened.obj_part2 >= narrow.obj_part2);
        for s in 0..inst.n_check_points() {
            prop_assert!(widened.mu_lo[s] >= narrow.mu_lo[s]);
            prop_assert!(widened.mu_hi[s] >= narrow.mu_hi[s]);
        }
    }

    #[test]
    fn degenerate_intervals_make_sampling_exact(seed in 0u64..1000, mask in 1u32..(1 << 8)) {
        let mut inst = random_instance(seed, 8, 10, 1, 1.0);
        inst.ku_hi = inst.ku_lo.clone();
        let plan = plan_for_sites(&inst, &subset(8, mask, 1), 1.0);
        let wc = worst_case_violations(&plan, &inst).unwrap().obj_part2;
        let s = sampled_violations(&plan, &inst, seed, 50).unwrap();
        prop_assert!((s.mean - wc).abs() <= 1e-12);
        prop_assert!((s.max - wc).abs() <= 1e-12);
        prop_assert!(s.std <= 1e-12);
    }

    #[test]
    fn sampled_mean_dominated_by_worst_case(seed in 0u64..1000, mask in 1u32..(1 << 8)) {
        let inst = random_instance(seed, 8, 10, 1, 1.0);
        let plan = plan_for_sites(&inst, &subset(8, mask, 1), 1.0);
        let wc = worst_case_violations(&plan, &inst).unwrap().obj_part2;
        let s = sampled_violations(&plan, &inst, seed, 200).unwrap();
        prop_assert!(s.mean <= wc + 1e-12);
        prop_assert!(s.max <= wc + 1e-12);
        prop_assert_eq!(&s, &sampled_violations(&plan, &inst, seed, 200).unwrap());
    }

    #[test]
    fn adding_a_heater_is_monotone_per_check_point(
        seed in 0u64..1000,
        mask in 1u32..(1 << 9),
        extra in 0usize..10,
    ) {
        let inst = random_instance(seed, 10, 12, 1, 1.0);
        let ids: Vec<usize> = (0..9).filter(|&i| mask >> i & 1 == 1).collect();
        let extra = if ids.contains(&extra) { 9 } else { extra };
        let mut more = ids.clone();
        more.push(extra);
        more.sort_unstable();
        let a = worst_case_violations(&plan_for_sites(&inst, &ids, 1.0), &inst).unwrap();
        let b = worst_case_violations(&plan_for_sites(&inst, &more, 1.0), &inst).unwrap();
        for s in 0..inst.n_check_points() {
            prop_assert!(b.mu_lo[s] <= a.mu_lo[s]);
            prop_assert!(b.mu_hi[s] >= a.mu_hi[s]);
        }
    }
}

#[test]
fn oracle_with_all_sites_is_their_mst() {
    let inst = random_instance(3, 6, 8, 6, 5.0);
    let plan = exhaustive_oracle(&inst, 5.0).unwrap();
    let all = plan_for_sites(&inst, &[0, 1, 2, 3, 4, 5], 5.0);
    assert_eq!(plan.site_ids.as_deref(), Some(&[0, 1, 2, 3, 4, 5][..]));
    assert!((plan.obj_part1_m - all.obj_part1_m).abs() < 1e-9);
}

#[test]
fn exact_sweep_is_monotone_and_non_dominated() {
    let alphas = [0.0, 0.1, 1.0, 5.0, 10.0, 100.0, 1000.0];
    let cfg = SolveConfig { rel_gap_tol: 0.0, abs_tol: 1e-9, time_limit_s: 120.0, ..Default::default() };
    for seed in 0..4 {
        let inst = random_instance(100 + seed, 9, 12, 3, 0.0);
        let records = pareto_sweep(&inst, &alphas, &cfg).unwrap();
        assert_eq!(records.len(), alphas.len());
        for (r, &a) in records.iter().zip(&alphas) {
            assert_eq!(r.alpha, a);
            let variant = inst.with_alpha(a);
            let expected = plan_objective(&exhaustive_oracle(&variant, a).unwrap(), &variant).unwrap();
            let got = scalarized_objective(&variant, r.obj_part1_m.unwrap(), r.obj_part2.unwrap());
            assert!((got - expected).abs() < 1e-6, "seed {seed} alpha {a}: {got} vs {expected}");
        }
        for w in records.windows(2) {
            let (p, q) = (&w[0], &w[1]);
            assert!(q.obj_part2.unwrap() <= p.obj_part2.unwrap() + 1e-9);
            assert!(q.obj_part1_m.unwrap() >= p.obj_part1_m.unwrap() - 1e-9);
        }
        for a in &records {
            for b in &records {
                let strictly = b.obj_part1_m.unwrap() < a.obj_part1_m.unwrap() - 1e-9
                    && b.obj_part2.unwrap() < a.obj_part2.unwrap() - 1e-9;
                assert!(!strictly);
            }
        }
    }
}
