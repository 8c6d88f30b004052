//! Planar graphs given by a rotation system, plus the cut / partition
//! algebra used throughout the solver.

use std::collections::VecDeque;
use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::EnergyEvaluator;

/// A dart is one orientation of an edge: `2 * e` runs `u -> v`, `2 * e + 1`
/// runs `v -> u` for edge `e = (u, v)`.
pub type Dart = usize;

/// Connected, simple plane graph. The embedding is the rotation system
/// (per-vertex cyclic order of incident edges); faces are traced from it.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    rotation: Vec<Vec<usize>>,
    /// Position of edge `e` in the rotation of its `u` (index 0) and `v` (index 1) endpoint.
    rotation_pos: Vec<[usize; 2]>,
    faces: Vec<Vec<Dart>>,
    dart_face: Vec<usize>,
}

impl PlanarGraph {
    /// Validates the edge list and rotation system and traces the faces.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>, rotation: Vec<Vec<usize>>) -> Result<PlanarGraph> {
        if vertex_count == 0 {
            return Err(Error::MalformedInput("graph has no vertices".into()));
        }
        if rotation.len() != vertex_count {
            return Err(Error::MalformedInput(format!(
                "rotation lists {} vertices, expected {}",
                rotation.len(),
                vertex_count
            )));
        }
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for (e, &(u, v)) in edges.iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::MalformedInput(format!("edge {e} = ({u}, {v}) references a vertex out of range")));
            }
            if u == v {
                return Err(Error::MalformedInput(format!("edge {e} is a self-loop at {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::MalformedInput(format!("edge {e} = ({u}, {v}) duplicates an earlier edge")));
            }
        }

        const UNSET: usize = usize::MAX;
        let mut rotation_pos = vec![[UNSET; 2]; edges.len()];
        for (vertex, order) in rotation.iter().enumerate() {
            for (pos, &e) in order.iter().enumerate() {
                let &(u, v) = edges.get(e).ok_or_else(|| {
                    Error::MalformedInput(format!("rotation of vertex {vertex} lists unknown edge {e}"))
                })?;
                let side = if u == vertex {
                    0
                } else if v == vertex {
                    1
                } else {
                    return Err(Error::MalformedInput(format!(
                        "rotation of vertex {vertex} lists edge {e} which is not incident to it"
                    )));
                };
                if rotation_pos[e][side] != UNSET {
                    return Err(Error::MalformedInput(format!("rotation of vertex {vertex} lists edge {e} twice")));
                }
                rotation_pos[e][side] = pos;
            }
        }
        if let Some(e) = rotation_pos.iter().position(|p| p[0] == UNSET || p[1] == UNSET) {
            return Err(Error::MalformedInput(format!(
                "edge {e} is missing from the rotation of one of its endpoints"
            )));
        }

        let mut graph =
            PlanarGraph { vertex_count, edges, rotation, rotation_pos, faces: Vec::new(), dart_face: Vec::new() };
        if !graph.is_connected() {
            return Err(Error::MalformedInput("graph is not connected".into()));
        }
        graph.trace_faces();
        let euler = graph.vertex_count as i64 - graph.edges.len() as i64 + graph.faces.len() as i64;
        if euler != 2 {
            return Err(Error::EulerViolation {
                vertices: graph.vertex_count,
                edges: graph.edges.len(),
                faces: graph.faces.len(),
                euler,
            });
        }
        Ok(graph)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &e in &self.rotation[u] {
                let w = self.other_end(e, u);
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        reached == self.vertex_count
    }

    /// Face tracing: the dart after `u -> v` leaves `v` along the edge that
    /// follows `(u, v)` in the rotation of `v`.
    fn trace_faces(&mut self) {
        let darts = 2 * self.edges.len();
        self.dart_face = vec![usize::MAX; darts];
        self.faces.clear();
        if darts == 0 {
            self.faces.push(Vec::new());
            return;
        }
        for start in 0..darts {
            if self.dart_face[start] != usize::MAX {
                continue;
            }
            let face_id = self.faces.len();
            let mut cycle = Vec::new();
            let mut d = start;
            loop {
                self.dart_face[d] = face_id;
                cycle.push(d);
                d = self.next_dart(d);
                if d == start {
                    break;
                }
            }
            self.faces.push(cycle);
        }
    }

    fn next_dart(&self, d: Dart) -> Dart {
        let e = d / 2;
        // the head of the dart and which side of the edge it is
        let head_side = if d.is_multiple_of(2) { 1 } else { 0 };
        let head = if head_side == 1 { self.edges[e].1 } else { self.edges[e].0 };
        let order = &self.rotation[head];
        let pos = self.rotation_pos[e][head_side];
        let f = order[(pos + 1) % order.len()];
        if self.edges[f].0 == head {
            2 * f
        } else {
            2 * f + 1
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn rotation(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Face boundaries as dart cycles.
    pub fn face_darts(&self) -> &[Vec<Dart>] {
        &self.faces
    }

    /// Face boundaries as edge-id sequences (a bridge appears twice in its face).
    pub fn faces(&self) -> Vec<Vec<usize>> {
        self.faces.iter().map(|f| f.iter().map(|d| d / 2).collect()).collect()
    }

    /// Face on the left of dart `d` in the traced orientation.
    pub fn dart_face(&self, d: Dart) -> usize {
        self.dart_face[d]
    }

    /// An edge whose two sides belong to the same face, i.e. a bridge.
    pub fn is_bridge(&self, e: usize) -> bool {
        self.dart_face[2 * e] == self.dart_face[2 * e + 1]
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Connected components of the subgraph of uncut edges.
    pub fn partition_from_cut(&self, cut: &CutVector) -> Partition {
        assert_eq!(cut.len(), self.edge_count(), "cut length must match edge count");
        let mut labels = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.vertex_count {
            if labels[s] != usize::MAX {
                continue;
            }
            labels[s] = next;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &e in &self.rotation[u] {
                    if cut[e] {
                        continue;
                    }
                    let w = self.other_end(e, u);
                    if labels[w] == usize::MAX {
                        labels[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        Partition { labels }
    }

    /// Edges joining different clusters.
    pub fn cut_from_partition(&self, partition: &Partition) -> CutVector {
        assert_eq!(partition.len(), self.vertex_count, "partition must label every vertex");
        CutVector(self.edges.iter().map(|&(u, v)| partition.labels[u] != partition.labels[v]).collect())
    }

    /// Every cut edge joins two different components of the uncut subgraph.
    pub fn is_valid_multicut(&self, cut: &CutVector) -> bool {
        let p = self.partition_from_cut(cut);
        self.edges.iter().zip(cut.iter()).all(|(&(u, v), &c)| !c || p.labels[u] != p.labels[v])
    }

    /// The consistent multicut induced by `cut` (never cuts more than `cut`).
    pub fn repair_cut(&self, cut: &CutVector) -> CutVector {
        self.cut_from_partition(&self.partition_from_cut(cut))
    }
}

/// Real value per edge: instance weights, Lagrange multipliers and the like.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeWeights(pub Vec<f64>);

impl EdgeWeights {
    pub fn new(values: Vec<f64>) -> Result<EdgeWeights> {
        if let Some(e) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("weight of edge {e} is not finite")));
        }
        Ok(EdgeWeights(values))
    }

    pub fn zeros(len: usize) -> EdgeWeights {
        EdgeWeights(vec![0.0; len])
    }
}

impl Deref for EdgeWeights {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for EdgeWeights {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

/// Per-edge cut indicator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CutVector(pub Vec<bool>);

impl CutVector {
    pub fn empty(len: usize) -> CutVector {
        CutVector(vec![false; len])
    }

    pub fn from_edges(len: usize, cut_edges: &[usize]) -> CutVector {
        let mut bits = vec![false; len];
        for &e in cut_edges {
            bits[e] = true;
        }
        CutVector(bits)
    }

    /// Ids of the cut edges in increasing order.
    pub fn cut_edges(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &c)| c).map(|(e, _)| e).collect()
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&c| c).count()
    }

    pub fn is_empty_cut(&self) -> bool {
        !self.0.iter().any(|&c| c)
    }

    /// Elementwise OR.
    pub fn union(&self, other: &CutVector) -> CutVector {
        assert_eq!(self.len(), other.len());
        CutVector(self.0.iter().zip(&other.0).map(|(&a, &b)| a || b).collect())
    }

    /// Elementwise `self <= other`.
    pub fn is_subset_of(&self, other: &CutVector) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| !a || b)
    }
}

impl Deref for CutVector {
    type Target = [bool];
    fn deref(&self) -> &[bool] {
        &self.0
    }
}

impl DerefMut for CutVector {
    fn deref_mut(&mut self) -> &mut [bool] {
        &mut self.0
    }
}

/// Cluster label per vertex, renumbered by first occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
}

impl Partition {
    /// Canonicalizes arbitrary labels (first occurrence gets 0, the next new label 1, ...).
    pub fn new(raw: &[usize]) -> Partition {
        let mut map = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Partition { labels }
    }

    pub fn single_cluster(vertex_count: usize) -> Partition {
        Partition { labels: vec![0; vertex_count] }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cluster_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }
}

/// `sum_e theta_e X_e`; exact on decimal weights. No validity check on `cut`.
pub fn cut_energy(theta: &[f64], cut: &[bool]) -> f64 {
    assert_eq!(theta.len(), cut.len(), "weights and cut must have equal length");
    EnergyEvaluator::new(theta).sum_where(|e| cut[e])
}

/// `sum_e min(theta_e - lambda_e, 0)`.
pub fn lower_bound_value(theta: &[f64], lambda: &[f64]) -> f64 {
    assert_eq!(theta.len(), lambda.len());
    theta.iter().zip(lambda).map(|(t, l)| (t - l).min(0.0)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{cycle, grid, triangle};

    #[test]
    fn triangle_and_square_satisfy_euler() {
        let t = triangle();
        assert_eq!(t.face_count(), 2);
        let c = cycle(4);
        assert_eq!(c.face_count(), 2);
        for g in [&t, &c] {
            let total: usize = g.faces().iter().map(|f| f.len()).sum();
            assert_eq!(total, 2 * g.edge_count());
        }
    }

    #[test]
    fn grid_faces() {
        let g = grid(3, 3);
        assert_eq!(g.edge_count(), 12);
        assert_eq!(g.face_count(), 5);
        let mut sizes: Vec<usize> = g.faces().iter().map(|f| f.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![4, 4, 4, 4, 8]);
    }

    #[test]
    fn single_vertex_graph() {
        let g = PlanarGraph::new(1, vec![], vec![vec![]]).unwrap();
        assert_eq!(g.face_count(), 1);
    }

    #[test]
    fn path_is_all_bridges() {
        let g = PlanarGraph::new(3, vec![(0, 1), (1, 2)], vec![vec![0], vec![0, 1], vec![1]]).unwrap();
        assert_eq!(g.face_count(), 1);
        assert!(g.is_bridge(0) && g.is_bridge(1));
        assert_eq!(g.faces()[0].len(), 4);
    }

    #[test]
    fn rejects_bad_inputs() {
        let loops = PlanarGraph::new(2, vec![(0, 0)], vec![vec![0], vec![]]);
        assert!(matches!(loops, Err(Error::MalformedInput(_))));
        let dup = PlanarGraph::new(2, vec![(0, 1), (1, 0)], vec![vec![0, 1], vec![0, 1]]);
        assert!(matches!(dup, Err(Error::MalformedInput(_))));
        let disconnected = PlanarGraph::new(4, vec![(0, 1), (2, 3)], vec![vec![0], vec![0], vec![1], vec![1]]);
        assert!(matches!(disconnected, Err(Error::MalformedInput(_))));
        let missing = PlanarGraph::new(2, vec![(0, 1)], vec![vec![0], vec![]]);
        assert!(matches!(missing, Err(Error::MalformedInput(_))));
        let twice = PlanarGraph::new(2, vec![(0, 1)], vec![vec![0, 0], vec![0]]);
        assert!(matches!(twice, Err(Error::MalformedInput(_))));
    }

    #[test]
    fn k5_rotations_violate_euler() {
        // K5 with a handful of rotation systems, all must fail
        let mut edges = Vec::new();
        for u in 0..5 {
            for v in u + 1..5 {
                edges.push((u, v));
            }
        }
        let incident = |v: usize| -> Vec<usize> {
            edges.iter().enumerate().filter(|(_, &(a, b))| a == v || b == v).map(|(e, _)| e).collect()
        };
        for variant in 0..24usize {
            let rotation: Vec<Vec<usize>> = (0..5)
                .map(|v| {
                    let mut inc = incident(v);
                    let k = (variant + v) % inc.len();
                    inc.swap(0, k);
                    if variant % 2 == 1 {
                        inc.swap(1, 3);
                    }
                    inc
                })
                .collect();
            let res = PlanarGraph::new(5, edges.clone(), rotation);
            assert!(matches!(res, Err(Error::EulerViolation { .. })), "variant {variant}");
        }
    }

    #[test]
    fn energy_examples() {
        let theta = [-1.0, -1.0, -1.0];
        assert_eq!(cut_energy(&theta, &[true, true, true]), -3.0);
        assert_eq!(cut_energy(&theta, &[false, false, false]), 0.0);
        assert_eq!(cut_energy(&theta, &[true, true, false]), -2.0);
    }

    #[test]
    fn partition_examples() {
        let t = triangle();
        let all = CutVector(vec![true; 3]);
        assert_eq!(t.partition_from_cut(&all).cluster_count(), 3);
        let one = CutVector(vec![true, false, false]);
        assert_eq!(t.partition_from_cut(&one).cluster_count(), 1);
        let c = cycle(4);
        let opposite = CutVector(vec![true, false, true, false]);
        let p = c.partition_from_cut(&opposite);
        assert_eq!(p.cluster_count(), 2);
        let mut sizes = [0; 2];
        for &l in p.labels() {
            sizes[l] += 1;
        }
        assert_eq!(sizes, [2, 2]);
    }

    #[test]
    fn cut_from_partition_examples() {
        let t = triangle();
        assert_eq!(t.cut_from_partition(&Partition::new(&[0, 1, 2])).count(), 3);
        assert!(t.cut_from_partition(&Partition::single_cluster(3)).is_empty_cut());
        let c = cycle(4);
        // cycle edges are (0,1), (1,2), (2,3), (3,0)
        let cut = c.cut_from_partition(&Partition::new(&[0, 0, 1, 1]));
        assert_eq!(cut.cut_edges(), vec![1, 3]);
        assert!(c.is_valid_multicut(&cut));
    }

    #[test]
    fn multicut_validity_examples() {
        let t = triangle();
        assert!(t.is_valid_multicut(&CutVector(vec![true, true, false])));
        assert!(!t.is_valid_multicut(&CutVector(vec![true, false, false])));
        assert!(t.is_valid_multicut(&CutVector::empty(3)));
    }

    #[test]
    fn labels_are_canonical() {
        let p = Partition::new(&[7, 7, 3, 9, 3]);
        assert_eq!(p.labels(), &[0, 0, 1, 2, 1]);
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound_value(&[-1.0, 2.0], &[-1.0, 2.0]), 0.0);
        assert_eq!(lower_bound_value(&[-1.0, -1.0, -1.0], &[0.0; 3]), -3.0);
        assert_eq!(lower_bound_value(&[-1.0, 2.0, 2.0], &[0.0, 2.0, 2.0]), -1.0);
    }
}
