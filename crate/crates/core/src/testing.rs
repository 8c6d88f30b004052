//! Small fixed graphs shared by unit and integration tests.

use crate::graph::PlanarGraph;
use crate::instances::grid_topology;

/// Triangle with edges (0,1), (1,2), (2,0).
pub fn triangle() -> PlanarGraph {
    cycle(3)
}

/// Cycle with edges (i, i+1 mod n).
pub fn cycle(n: usize) -> PlanarGraph {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let rotation = (0..n).map(|i| vec![(i + n - 1) % n, i]).collect();
    PlanarGraph::new(n, edges, rotation).expect("cycle is planar")
}

/// Star with centre 0 and `leaves` leaves; every edge is a bridge.
pub fn star(leaves: usize) -> PlanarGraph {
    let edges: Vec<(usize, usize)> = (1..=leaves).map(|i| (0, i)).collect();
    let mut rotation = vec![(0..leaves).collect::<Vec<_>>()];
    rotation.extend((0..leaves).map(|e| vec![e]));
    PlanarGraph::new(leaves + 1, edges, rotation).expect("star is planar")
}

/// K4 drawn as a triangle 0,1,2 with vertex 3 in the middle.
pub fn k4() -> PlanarGraph {
    let edges = vec![(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)];
    // counterclockwise orders for the straight-line drawing
    let rotation = vec![vec![0, 3, 2], vec![1, 4, 0], vec![2, 5, 1], vec![5, 3, 4]];
    PlanarGraph::new(4, edges, rotation).expect("K4 is planar")
}

/// `width x height` grid graph.
pub fn grid(width: usize, height: usize) -> PlanarGraph {
    let (edges, rotation) = grid_topology(width, height);
    PlanarGraph::new(width * height, edges, rotation).expect("grid is planar")
}
