//! Optimal 2-colorable partitions of a plane graph.
//!
//! Cuts of a connected plane graph are exactly the edge sets whose dual
//! edges form an even subgraph (every face meets an even number of them).
//! Even subgraphs of the dual are turned into perfect matchings by
//! expanding each face into a gadget:
//!
//! * every side of a non-bridge edge gets one "port" node in the gadget of
//!   the face on that side, and the two ports of an edge are joined by a
//!   gadget edge carrying the edge's weight;
//! * the ports of a face (plus one padding node when their number is odd)
//!   form a clique of zero-weight edges;
//! * a bridge has the same face on both sides, so it contributes 2 to that
//!   face and never affects parity. It gets its own 4-cycle
//!   `x -w- y -0- b -0- a -0- x`, matched either as `{xy, ab}` (cut) or
//!   `{xa, yb}` (uncut).
//!
//! A perfect matching uses the weighted edge of an original edge exactly
//! when that edge is cut; the remaining ports of each face are paired
//! inside its clique, which is possible precisely when an even number of
//! them was used. So matchings map onto cuts with weight equal to the cut
//! weight (the additive constant is zero), and every cut, including the
//! empty one, has a matching.

use std::collections::HashSet;

use crate::graph::{cut_energy, CutVector, PlanarGraph};
use crate::matching::{min_weight_perfect_matching, MatchingProblem};

const NONE: usize = usize::MAX;

/// Face-gadget expansion of the planar dual. Topology only: weights are
/// bound per query, so one expansion serves every weight vector on the
/// same graph.
#[derive(Clone, Debug)]
pub struct ExpandedDual {
    vertex_count: usize,
    /// Gadget edges. Index `e < E` is the weighted edge of original edge `e`.
    edges: Vec<(usize, usize)>,
    original_edges: usize,
    /// Per face: port nodes in clique order with the original edge they
    /// serve (`NONE` for the padding node), and the index of the face's
    /// first clique edge.
    faces: Vec<FaceGadget>,
    /// Per original edge: `[x, y, a, b]` for bridges.
    bridges: Vec<Option<[usize; 4]>>,
    /// Index of the first internal edge of each bridge gadget (`xa`, then `yb`, `ab`).
    bridge_edges: Vec<usize>,
}

#[derive(Clone, Debug)]
struct FaceGadget {
    ports: Vec<(usize, usize)>,
    clique_offset: usize,
}

impl FaceGadget {
    fn clique_edge(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let d = self.ports.len();
        self.clique_offset + i * d - i * (i + 1) / 2 + (j - i - 1)
    }
}

impl ExpandedDual {
    pub fn new(graph: &PlanarGraph) -> ExpandedDual {
        let m = graph.edge_count();
        let mut node = 0;
        let mut dart_node = vec![NONE; 2 * m];
        let mut faces = Vec::with_capacity(graph.face_count());
        for darts in graph.face_darts() {
            let mut ports = Vec::new();
            for &d in darts {
                let e = d / 2;
                if graph.is_bridge(e) {
                    continue;
                }
                dart_node[d] = node;
                ports.push((node, e));
                node += 1;
            }
            if ports.len() % 2 == 1 {
                ports.push((node, NONE));
                node += 1;
            }
            faces.push(FaceGadget { ports, clique_offset: 0 });
        }

        let mut edges = Vec::new();
        let mut bridges = vec![None; m];
        for e in 0..m {
            if graph.is_bridge(e) {
                let quad = [node, node + 1, node + 2, node + 3];
                node += 4;
                bridges[e] = Some(quad);
                edges.push((quad[0], quad[1]));
            } else {
                edges.push((dart_node[2 * e], dart_node[2 * e + 1]));
            }
        }
        let mut bridge_edges = vec![NONE; m];
        for e in 0..m {
            if let Some([x, y, a, b]) = bridges[e] {
                bridge_edges[e] = edges.len();
                edges.push((x, a));
                edges.push((y, b));
                edges.push((a, b));
            }
        }
        for face in &mut faces {
            face.clique_offset = edges.len();
            let d = face.ports.len();
            for i in 0..d {
                for j in i + 1..d {
                    edges.push((face.ports[i].0, face.ports[j].0));
                }
            }
        }
        ExpandedDual { vertex_count: node, edges, original_edges: m, faces, bridges, bridge_edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Additive constant between matching weight and cut weight.
    pub fn offset(&self) -> f64 {
        0.0
    }

    /// Original edge carried by a gadget edge, `None` for gadget-internal edges.
    pub fn back_map(&self, gadget_edge: usize) -> Option<usize> {
        (gadget_edge < self.original_edges).then_some(gadget_edge)
    }

    /// Binds per-edge weights to the gadget topology.
    pub fn problem(&self, weights: &[f64]) -> MatchingProblem {
        assert_eq!(weights.len(), self.original_edges);
        MatchingProblem {
            vertex_count: self.vertex_count,
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(k, &(u, v))| (u, v, if k < self.original_edges { weights[k] } else { 0.0 }))
                .collect(),
        }
    }

    /// Reads the cut off a perfect matching (gadget edge indices).
    pub fn cut_from_matching(&self, matched: &[usize]) -> CutVector {
        let mut cut = CutVector::empty(self.original_edges);
        for &k in matched {
            if k < self.original_edges {
                cut[k] = true;
            }
        }
        cut
    }

    /// A perfect matching representing `cut`, which must be a cut
    /// (every face meets an even number of its edges).
    pub fn matching_for_cut(&self, cut: &CutVector) -> Option<Vec<usize>> {
        let mut matched = Vec::new();
        for e in 0..self.original_edges {
            match self.bridges[e] {
                Some(_) => {
                    let base = self.bridge_edges[e];
                    if cut[e] {
                        matched.extend([e, base + 2]);
                    } else {
                        matched.extend([base, base + 1]);
                    }
                }
                None if cut[e] => matched.push(e),
                None => {}
            }
        }
        for face in &self.faces {
            let free: Vec<usize> = (0..face.ports.len())
                .filter(|&i| {
                    let e = face.ports[i].1;
                    e == NONE || !cut[e]
                })
                .collect();
            if free.len() % 2 == 1 {
                return None;
            }
            for pair in free.chunks(2) {
                matched.push(face.clique_edge(pair[0], pair[1]));
            }
        }
        matched.sort_unstable();
        Some(matched)
    }
}

/// Result of a cut query: the cut and its weight under the query weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CutSolution {
    pub cut: CutVector,
    pub value: f64,
}

/// Minimum-weight cut oracle for one graph, reusing its dual expansion.
#[derive(Clone, Debug)]
pub struct CutOracle<'g> {
    graph: &'g PlanarGraph,
    dual: ExpandedDual,
}

impl<'g> CutOracle<'g> {
    pub fn new(graph: &'g PlanarGraph) -> CutOracle<'g> {
        CutOracle { graph, dual: ExpandedDual::new(graph) }
    }

    pub fn graph(&self) -> &'g PlanarGraph {
        self.graph
    }

    pub fn expanded_dual(&self) -> &ExpandedDual {
        &self.dual
    }

    /// Minimum of `sum_e w_e X_e` over all bipartitions (empty cut included).
    pub fn min_cut(&self, weights: &[f64]) -> CutSolution {
        let cut = self.solve(weights);
        let value = cut_energy(weights, &cut);
        CutSolution { cut, value }
    }

    /// Minimum over bipartitions that cut edge `e`, valued in `weights`.
    pub fn min_cut_forced(&self, weights: &[f64], e: usize) -> CutSolution {
        assert!(e < self.graph.edge_count(), "edge {e} out of range");
        let big = 1.0 + weights.iter().map(|w| w.abs()).sum::<f64>();
        let mut shifted = weights.to_vec();
        shifted[e] -= big;
        let cut = self.solve(&shifted);
        assert!(cut[e], "forced edge {e} missing from the optimal cut");
        let value = cut_energy(weights, &cut);
        CutSolution { cut, value }
    }

    fn solve(&self, weights: &[f64]) -> CutVector {
        assert_eq!(weights.len(), self.graph.edge_count());
        if weights.is_empty() {
            return CutVector::empty(0);
        }
        // nonnegative weights: the empty cut is optimal
        if weights.iter().all(|&w| w >= 0.0) {
            return CutVector::empty(weights.len());
        }
        let matching = min_weight_perfect_matching(&self.dual.problem(weights))
            .expect("face gadgets always admit a perfect matching");
        let cut = self.dual.cut_from_matching(&matching.edges);
        debug_assert!(two_coloring(self.graph, &cut).is_some());
        cut
    }
}

/// The gadget graph for a given weight vector.
pub fn expand_dual(graph: &PlanarGraph) -> ExpandedDual {
    ExpandedDual::new(graph)
}

pub fn min_cut_2color(graph: &PlanarGraph, weights: &[f64]) -> CutSolution {
    CutOracle::new(graph).min_cut(weights)
}

pub fn min_cut_forced(graph: &PlanarGraph, weights: &[f64], e: usize) -> CutSolution {
    CutOracle::new(graph).min_cut_forced(weights, e)
}

/// Two labels whose disagreement set is `cut`, if `cut` is a bipartition cut.
pub fn two_coloring(graph: &PlanarGraph, cut: &CutVector) -> Option<Vec<u8>> {
    let n = graph.vertex_count();
    let mut side = vec![u8::MAX; n];
    side[0] = 0;
    let mut stack = vec![0];
    while let Some(u) = stack.pop() {
        for &e in &graph.rotation()[u] {
            let w = graph.other_end(e, u);
            let want = side[u] ^ cut[e] as u8;
            if side[w] == u8::MAX {
                side[w] = want;
                stack.push(w);
            } else if side[w] != want {
                return None;
            }
        }
    }
    Some(side)
}

/// One isolating cut per component of the (repaired) multicut, deduplicated.
pub fn split_into_basic_cuts(graph: &PlanarGraph, cut: &CutVector) -> Vec<CutVector> {
    let partition = graph.partition_from_cut(cut);
    let k = partition.cluster_count();
    if k <= 1 {
        return Vec::new();
    }
    let labels = partition.labels();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for c in 0..k {
        let basic = CutVector(graph.edges().iter().map(|&(u, v)| (labels[u] == c) != (labels[v] == c)).collect());
        if seen.insert(basic.clone()) {
            out.push(basic);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{cycle, grid, k4, star, triangle};

    /// Minimum over all 2^(V-1) labelings with vertex 0 fixed.
    fn brute(graph: &PlanarGraph, w: &[f64], forced: Option<usize>) -> f64 {
        let n = graph.vertex_count();
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << (n - 1)) {
            let label = |v: usize| if v == 0 { 0 } else { (mask >> (v - 1)) & 1 };
            let cut: Vec<bool> = graph.edges().iter().map(|&(u, v)| label(u) != label(v)).collect();
            if let Some(e) = forced {
                if !cut[e] {
                    continue;
                }
            }
            best = best.min(cut_energy(w, &cut));
        }
        best
    }

    #[test]
    fn empty_cut_is_representable() {
        let t = triangle();
        let dual = expand_dual(&t);
        assert_eq!(dual.vertex_count() % 2, 0);
        let m = dual.matching_for_cut(&CutVector::empty(3)).unwrap();
        assert_eq!(m.len(), dual.vertex_count() / 2);
        assert!(dual.cut_from_matching(&m).is_empty_cut());
    }

    #[test]
    fn four_cycle_mixed_weights() {
        let c = cycle(4);
        let w = [-1.0, 1.0, 1.0, -1.0];
        let sol = min_cut_2color(&c, &w);
        assert_eq!(sol.value, -2.0);
        assert_eq!(sol.cut.cut_edges(), vec![0, 3]);
        assert_eq!(brute(&c, &w, None), -2.0);
    }

    #[test]
    fn positive_weights_give_empty_cut() {
        let g = grid(3, 3);
        let w = vec![0.5; g.edge_count()];
        let sol = min_cut_2color(&g, &w);
        assert!(sol.cut.is_empty_cut());
        assert_eq!(sol.value, 0.0);
    }

    #[test]
    fn triangle_examples() {
        let t = triangle();
        let sol = min_cut_2color(&t, &[-1.0, -1.0, -1.0]);
        assert_eq!(sol.value, -2.0);
        assert_eq!(sol.cut.count(), 2);
        let sol = min_cut_2color(&t, &[-1.0, 2.0, 2.0]);
        assert_eq!(sol.value, 0.0);
        assert!(sol.cut.is_empty_cut());
    }

    #[test]
    fn forced_examples() {
        let t = triangle();
        let sol = min_cut_forced(&t, &[0.0, 0.0, 0.0], 0);
        assert!(sol.cut[0]);
        assert_eq!(sol.value, 0.0);
        let sol = min_cut_forced(&t, &[1.0, 1.0, 1.0], 0);
        assert_eq!(sol.value, 2.0);
        let c = cycle(4);
        let sol = min_cut_forced(&c, &[-1.0, 1.0, 1.0, -1.0], 1);
        assert_eq!(sol.value, 0.0);
        assert!(sol.cut[1]);
    }

    #[test]
    fn bridges_can_be_cut() {
        let s = star(3);
        let sol = min_cut_2color(&s, &[-1.0, 2.0, -0.5]);
        assert_eq!(sol.cut.cut_edges(), vec![0, 2]);
        assert_eq!(sol.value, -1.5);
        let sol = min_cut_forced(&s, &[1.0, 2.0, 3.0], 1);
        assert_eq!(sol.cut.cut_edges(), vec![1]);
    }

    #[test]
    fn k4_all_negative() {
        let g = k4();
        let w = vec![-1.0; 6];
        // best bipartition of K4 is 2|2 with 4 cut edges
        assert_eq!(min_cut_2color(&g, &w).value, -4.0);
        assert_eq!(brute(&g, &w, None), -4.0);
    }

    #[test]
    fn basic_cut_examples() {
        let t = triangle();
        let basics = split_into_basic_cuts(&t, &CutVector(vec![true; 3]));
        assert_eq!(basics.len(), 3);
        assert!(basics.iter().all(|b| b.count() == 2));
        let c = cycle(4);
        let two = CutVector(vec![true, false, true, false]);
        assert_eq!(split_into_basic_cuts(&c, &two), vec![two.clone()]);
        assert!(split_into_basic_cuts(&c, &CutVector::empty(4)).is_empty());
    }

    #[test]
    fn matches_brute_force_on_grids() {
        let g = grid(3, 4);
        let m = g.edge_count();
        for seed in 0..20u64 {
            let w: Vec<f64> =
                (0..m).map(|e| (((e as u64 * 7919 + seed * 104729) % 201) as f64 - 100.0) / 50.0).collect();
            let sol = min_cut_2color(&g, &w);
            assert_eq!(sol.value, brute(&g, &w, None), "seed {seed}");
            assert!(two_coloring(&g, &sol.cut).is_some());
            let e = (seed as usize) % m;
            assert_eq!(min_cut_forced(&g, &w, e).value, brute(&g, &w, Some(e)));
        }
    }
}
