use planar_cc::cut_oracle::{expand_dual, two_coloring, CutOracle};
use planar_cc::graph::{cut_energy, CutVector, PlanarGraph};
use planar_cc::instances::{gen_grid, gen_random_planar, Instance, WeightModel};
use planar_cc::oracle::brute_cc2;
use planar_cc::{min_cut_2color, min_weight_perfect_matching, split_into_basic_cuts};
use proptest::prelude::*;

fn planar(max_n: usize) -> impl Strategy<Value = Instance> {
    (3..=max_n, any::<u64>()).prop_map(|(n, seed)| gen_random_planar(n, seed).unwrap())
}

/// Bipartition cut from a label mask (vertex 0 keeps side 0).
fn mask_cut(g: &PlanarGraph, mask: u64) -> CutVector {
    let side = |v: usize| v > 0 && (mask >> (v - 1)) & 1 == 1;
    CutVector(g.edges().iter().map(|&(u, v)| side(u) != side(v)).collect())
}

fn brute_forced(g: &PlanarGraph, w: &[f64], e: usize) -> f64 {
    let n = g.vertex_count();
    (0..1u64 << (n - 1))
        .map(|m| mask_cut(g, m))
        .filter(|c| c[e])
        .map(|c| cut_energy(w, &c))
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn oracle_matches_enumeration(inst in planar(11)) {
        let sol = min_cut_2color(&inst.graph, &inst.theta);
        let (_, exact) = brute_cc2(&inst.graph, &inst.theta).unwrap();
        prop_assert_eq!(sol.value, exact);
        prop_assert_eq!(sol.value, cut_energy(&inst.theta, &sol.cut));
        prop_assert!(two_coloring(&inst.graph, &sol.cut).is_some());
        prop_assert!(sol.value <= 0.0);
    }

    #[test]
    fn forced_cut_matches_enumeration(inst in planar(9), pick in any::<prop::sample::Index>()) {
        let e = pick.index(inst.graph.edge_count());
        let oracle = CutOracle::new(&inst.graph);
        let sol = oracle.min_cut_forced(&inst.theta, e);
        prop_assert!(sol.cut[e]);
        prop_assert!(two_coloring(&inst.graph, &sol.cut).is_some());
        prop_assert_eq!(sol.value, brute_forced(&inst.graph, &inst.theta, e));
    }

    #[test]
    fn cuts_and_gadget_matchings_correspond(inst in planar(10), mask in any::<u64>()) {
        let g = &inst.graph;
        let cut = mask_cut(g, mask & ((1 << (g.vertex_count() - 1)) - 1));
        let dual = expand_dual(g);
        let matched = dual.matching_for_cut(&cut).expect("every cut has a matching");
        let mut covered = vec![0u8; dual.vertex_count()];
        let problem = dual.problem(&inst.theta);
        for &k in &matched {
            let (u, v, _) = problem.edges[k];
            covered[u] += 1;
            covered[v] += 1;
        }
        prop_assert!(covered.iter().all(|&c| c == 1), "not a perfect matching");
        let weight: f64 = matched.iter().map(|&k| problem.edges[k].2).sum();
        prop_assert!((weight + dual.offset() - cut_energy(&inst.theta, &cut)).abs() < 1e-9);
        prop_assert_eq!(dual.cut_from_matching(&matched), cut);
    }

    #[test]
    fn optimal_matching_weight_is_cut_weight(inst in planar(10)) {
        let dual = expand_dual(&inst.graph);
        let m = min_weight_perfect_matching(&dual.problem(&inst.theta)).unwrap();
        let cut = dual.cut_from_matching(&m.edges);
        prop_assert_eq!(m.total_weight + dual.offset(), cut_energy(&inst.theta, &cut));
        for k in 0..dual.edge_count() {
            prop_assert_eq!(dual.back_map(k).is_some(), k < inst.graph.edge_count());
        }
    }

    #[test]
    fn basic_cuts_decompose_a_multicut(inst in planar(10), raw in prop::collection::vec(any::<bool>(), 30)) {
        let g = &inst.graph;
        let x = CutVector(raw[..g.edge_count()].to_vec());
        let repaired = g.repair_cut(&x);
        let basics = split_into_basic_cuts(g, &x);
        let mut count = vec![0usize; g.edge_count()];
        for b in &basics {
            prop_assert!(two_coloring(g, b).is_some());
            for e in b.cut_edges() {
                count[e] += 1;
            }
        }
        // every multicut edge separates exactly two components; with two
        // components both isolating cuts coincide and dedup keeps one
        let expected = if basics.len() == 1 { 1 } else { 2 };
        for e in 0..g.edge_count() {
            prop_assert_eq!(count[e], if repaired[e] { expected } else { 0 });
        }
    }
}

#[test]
fn non_cuts_have_no_matching() {
    let g = planar_cc::testing::triangle();
    let dual = expand_dual(&g);
    assert!(dual.matching_for_cut(&CutVector::from_edges(3, &[0])).is_none());
    assert!(dual.matching_for_cut(&CutVector::from_edges(3, &[0, 1, 2])).is_none());
}

#[test]
fn one_expansion_serves_many_weightings() {
    let inst = gen_grid(6, 5, WeightModel::Uniform { low: -1.0, high: 1.0 }, 9).unwrap();
    let oracle = CutOracle::new(&inst.graph);
    for shift in [0.0, 0.25, -0.5] {
        let w: Vec<f64> = inst.theta.iter().map(|t| t + shift).collect();
        assert_eq!(oracle.min_cut(&w), min_cut_2color(&inst.graph, &w));
    }
}

#[test]
fn grids_with_bridges_and_leaves() {
    // a 3x3 grid with a pendant path attached to a corner
    let (mut edges, mut rotation) = planar_cc::instances::grid_topology(3, 3);
    let e1 = edges.len();
    edges.push((8, 9));
    edges.push((9, 10));
    rotation[8].insert(0, e1);
    rotation.push(vec![e1, e1 + 1]);
    rotation.push(vec![e1 + 1]);
    let g = PlanarGraph::new(11, edges, rotation).unwrap();
    assert!(g.is_bridge(e1) && g.is_bridge(e1 + 1));
    let m = g.edge_count();
    for seed in 0..30u64 {
        let w: Vec<f64> = (0..m).map(|e| ((e as u64 * 31 + seed * 17) % 9) as f64 - 4.0).collect();
        let sol = min_cut_2color(&g, &w);
        assert_eq!(sol.value, brute_cc2(&g, &w).unwrap().1);
    }
}
