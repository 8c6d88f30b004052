use planar_cc::bound::{omega_violation, BoundOptions};
use planar_cc::cut_oracle::two_coloring;
use planar_cc::instances::{gen_grid, gen_random_planar, Instance, WeightModel};
use planar_cc::oracle::{brute_cc, brute_cc2, brute_cck, full_lp_bound};
use planar_cc::{
    best_decode, cut_energy, decode_recursive, decode_rounding, lower_bound_value, optimize_lower_bound,
    optimize_lower_bound_with, solve_instance, CutOracle, CutPool, CutVector, DecodeMethod, DecodeOptions, Execution,
    SolveOptions,
};
use proptest::prelude::*;

fn planar(max_n: usize) -> impl Strategy<Value = Instance> {
    (3..=max_n, any::<u64>()).prop_map(|(n, seed)| gen_random_planar(n, seed).unwrap())
}

fn energy_of(inst: &Instance, labels: &planar_cc::Partition) -> f64 {
    cut_energy(&inst.theta, &inst.graph.cut_from_partition(labels))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn bound_is_sound_and_feasible(inst in planar(9)) {
        let r = optimize_lower_bound(&inst.graph, &inst.theta, 1e-6).unwrap();
        let (_, cc) = brute_cc(&inst.graph, &inst.theta).unwrap();
        prop_assert!(r.converged);
        prop_assert!(r.bound <= cc + 1e-9, "bound {} above optimum {}", r.bound, cc);
        prop_assert!(r.bound <= 1e-12);
        for (e, (&l, &t)) in r.lambda.0.iter().zip(inst.theta.0.iter()).enumerate() {
            prop_assert!(l >= t - 1e-9 && l <= t.max(0.0) + 1e-9, "edge {e}: lambda {l} theta {t}");
        }
        // converged multipliers leave no violated bipartition
        prop_assert!(omega_violation(&inst.graph, &r.lambda.0, 1e-6).is_none());
        prop_assert!(r.final_violation >= -1e-6);
        prop_assert!((r.bound - lower_bound_value(&inst.theta, &r.lambda.0)).abs() < 1e-9);
        for w in r.objective_history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9, "history rose: {:?}", r.objective_history);
        }
        let mut seen = std::collections::HashSet::new();
        for c in r.pool.cuts() {
            prop_assert!(two_coloring(&inst.graph, c).is_some());
            prop_assert!(!c.is_empty_cut());
            prop_assert!(seen.insert(c.clone()));
        }
    }

    #[test]
    fn converged_bound_equals_full_lp(inst in planar(8)) {
        let r = optimize_lower_bound(&inst.graph, &inst.theta, 1e-9).unwrap();
        let full = full_lp_bound(&inst.graph, &inst.theta, true).unwrap();
        prop_assert!((r.bound - full).abs() < 1e-6, "cutting planes {} vs full LP {}", r.bound, full);
    }

    #[test]
    fn decoders_return_valid_clusterings(inst in planar(10), seed in any::<u64>()) {
        let r = optimize_lower_bound(&inst.graph, &inst.theta, 1e-6).unwrap();
        let rec = decode_recursive(&inst.graph, &inst.theta, &r.lambda.0, seed, 0);
        prop_assert_eq!(rec.partition.len(), inst.graph.vertex_count());
        prop_assert_eq!(rec.energy, energy_of(&inst, &rec.partition));
        prop_assert!(rec.energy <= 0.0);
        prop_assert!(rec.energy >= r.bound - 1e-9);
        let rnd = decode_rounding(&inst.graph, &inst.theta, &r.pool, 0.5).unwrap();
        prop_assert_eq!(rnd.energy, energy_of(&inst, &rnd.partition));
        prop_assert!(rnd.energy >= r.bound - 1e-9);
        let best = best_decode(&inst.graph, &inst.theta, &r, &DecodeOptions { seed, ..DecodeOptions::default() }).unwrap();
        prop_assert!(best.energy <= rec.energy.min(rnd.energy));
        prop_assert_eq!(best.certificate, best.energy - r.bound <= 1e-6);
    }

    #[test]
    fn oracles_agree(inst in planar(8)) {
        let (p, cc) = brute_cc(&inst.graph, &inst.theta).unwrap();
        prop_assert_eq!(cc, energy_of(&inst, &p));
        let (_, cc2) = brute_cc2(&inst.graph, &inst.theta).unwrap();
        prop_assert!(cc2 >= cc);
        // four colours suffice on planar graphs
        prop_assert!((brute_cck(&inst.graph, &inst.theta, 4).unwrap() - cc).abs() < 1e-12);
        let full = full_lp_bound(&inst.graph, &inst.theta, true).unwrap();
        let loose = full_lp_bound(&inst.graph, &inst.theta, false).unwrap();
        prop_assert!(full <= cc + 1e-9);
        prop_assert!((full - loose).abs() < 1e-9);
    }
}

#[test]
fn rounding_over_every_bipartition_is_exact_when_tight() {
    let mut tight = 0;
    for seed in 0..80u64 {
        let inst = gen_random_planar(6, seed).unwrap();
        let g = &inst.graph;
        let mut pool = CutPool::new(g.edge_count());
        for mask in 1..1u64 << (g.vertex_count() - 1) {
            let side = |v: usize| v > 0 && (mask >> (v - 1)) & 1 == 1;
            pool.insert(CutVector(g.edges().iter().map(|&(u, v)| side(u) != side(v)).collect()));
        }
        let (_, cc) = brute_cc(g, &inst.theta).unwrap();
        let full = full_lp_bound(g, &inst.theta, true).unwrap();
        if (full - cc).abs() > 1e-9 {
            continue;
        }
        tight += 1;
        let rnd = decode_rounding(g, &inst.theta, &pool, 0.5).unwrap();
        assert!(rnd.energy <= cc + 1e-9, "seed {seed}: rounding {} optimum {}", rnd.energy, cc);
    }
    assert!(tight > 60, "only {tight} tight instances");
}

#[test]
fn grid_bounds_certify_and_agree_across_execution_modes() {
    for seed in 0..4u64 {
        let inst = gen_grid(8, 7, WeightModel::GpbLike { beta: 0.27 }, seed).unwrap();
        let seq = SolveOptions { execution: Execution::Sequential, ..SolveOptions::default() };
        let par = SolveOptions { execution: Execution::Parallel, ..SolveOptions::default() };
        let a = solve_instance(&inst.graph, &inst.theta, &seq).unwrap();
        let b = solve_instance(&inst.graph, &inst.theta, &par).unwrap();
        assert_eq!(a.bound, b.bound);
        assert_eq!(a.decode.partition, b.decode.partition);
        assert_eq!(a.decode.method, b.decode.method);
        assert_eq!(a.decode.restart, b.decode.restart);
        assert!(a.gap >= -1e-9);
    }
}

#[test]
fn batch_limit_keeps_a_valid_bound() {
    for seed in 0..20u64 {
        let inst = gen_random_planar(9, seed).unwrap();
        let (_, cc) = brute_cc(&inst.graph, &inst.theta).unwrap();
        let oracle = CutOracle::new(&inst.graph);
        let r = optimize_lower_bound_with(&oracle, &inst.theta, &BoundOptions { tol: 1e-6, max_batches: 1 }).unwrap();
        assert!(r.batches <= 1);
        assert!(r.bound <= cc + 1e-9, "seed {seed}: {} > {}", r.bound, cc);
        if !r.converged {
            assert!(r.bound <= lower_bound_value(&inst.theta, &r.lambda.0) + 1e-9);
        }
    }
}

#[test]
fn all_attractive_needs_no_cut() {
    let inst = gen_grid(5, 5, WeightModel::Uniform { low: 0.1, high: 1.0 }, 3).unwrap();
    let report = solve_instance(&inst.graph, &inst.theta, &SolveOptions::default()).unwrap();
    assert_eq!(report.bound.bound, 0.0);
    assert_eq!(report.decode.energy, 0.0);
    assert_eq!(report.decode.partition.cluster_count(), 1);
    assert!(report.certificate);
}

#[test]
fn restarts_are_reproducible() {
    let inst = gen_grid(10, 10, WeightModel::GpbLike { beta: 0.3 }, 5).unwrap();
    let r = optimize_lower_bound(&inst.graph, &inst.theta, 1e-6).unwrap();
    let opts = DecodeOptions { seed: 11, ..DecodeOptions::default() };
    let a = best_decode(&inst.graph, &inst.theta, &r, &opts).unwrap();
    let b = best_decode(&inst.graph, &inst.theta, &r, &opts).unwrap();
    assert_eq!(a, b);
    if a.method == DecodeMethod::Recursive {
        assert!(a.restart.is_some());
    }
}
