//! Instance generators, the boundary-probability weight transform and the
//! JSON instance format.
//!
//! An instance file looks like
//!
//! ```json
//! {
//!   "name": "tri",
//!   "vertex_count": 3,
//!   "edges": [[0, 1, "-1.00000"], [1, 2, "-1.00000"], [2, 0, "-1.00000"]],
//!   "rotation": [[2, 0], [0, 1], [1, 2]],
//!   "metadata": {"generator": "manual", "params": null, "seed": null}
//! }
//! ```
//!
//! Weights are decimal strings so that five-decimal values survive a round
//! trip bit for bit.

use std::collections::{HashMap, VecDeque};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{round_half_even_5, ScaledWeights};
use crate::graph::{EdgeWeights, PlanarGraph};

/// Threshold presets used for boundary-probability grids.
pub const BETA_PRESETS: [f64; 4] = [0.35, 0.27, 0.20, 0.12];

/// `ln((1 - gpb) / gpb) + beta`.
pub fn gpb_to_theta(gpb: f64, beta: f64) -> Result<f64> {
    if !(gpb > 0.0 && gpb < 1.0) {
        return Err(Error::Domain(format!("boundary probability {gpb} is not in (0, 1)")));
    }
    Ok(((1.0 - gpb) / gpb).ln() + beta)
}

/// Rounds every weight to five decimals, ties to even.
pub fn round_theta(theta: &[f64]) -> EdgeWeights {
    EdgeWeights(theta.iter().map(|&t| round_half_even_5(t)).collect())
}

/// How edge weights of a generated grid are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightModel {
    /// `theta ~ U[low, high]`.
    Uniform { low: f64, high: f64 },
    /// Boundary probabilities from a random piecewise-constant "image":
    /// edges between regions get high probabilities, interior edges low
    /// ones; then `theta = gpb_to_theta(gpb, beta)`.
    GpbLike { beta: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub generator: String,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Metadata {
    pub fn manual() -> Metadata {
        Metadata { generator: "manual".into(), params: serde_json::Value::Null, seed: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub name: String,
    pub graph: PlanarGraph,
    pub theta: EdgeWeights,
    pub metadata: Metadata,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        graph: PlanarGraph,
        theta: EdgeWeights,
        metadata: Metadata,
    ) -> Result<Instance> {
        if theta.len() != graph.edge_count() {
            return Err(Error::MalformedInput(format!("{} weights for {} edges", theta.len(), graph.edge_count())));
        }
        Ok(Instance { name: name.into(), graph, theta, metadata })
    }
}

/// Edges and counterclockwise rotation of a `width x height` grid. Vertex
/// `(x, y)` has id `y * width + x`; horizontal edges come first.
pub fn grid_topology(width: usize, height: usize) -> (Vec<(usize, usize)>, Vec<Vec<usize>>) {
    let id = |x: usize, y: usize| y * width + x;
    let mut edges = Vec::new();
    let mut index = HashMap::new();
    for y in 0..height {
        for x in 0..width.saturating_sub(1) {
            index.insert((id(x, y), id(x + 1, y)), edges.len());
            edges.push((id(x, y), id(x + 1, y)));
        }
    }
    for y in 0..height.saturating_sub(1) {
        for x in 0..width {
            index.insert((id(x, y), id(x, y + 1)), edges.len());
            edges.push((id(x, y), id(x, y + 1)));
        }
    }
    let mut rotation = vec![Vec::new(); width * height];
    for y in 0..height {
        for x in 0..width {
            let v = id(x, y);
            let r = &mut rotation[v];
            if x + 1 < width {
                r.push(index[&(v, id(x + 1, y))]);
            }
            if y + 1 < height {
                r.push(index[&(v, id(x, y + 1))]);
            }
            if x > 0 {
                r.push(index[&(id(x - 1, y), v)]);
            }
            if y > 0 {
                r.push(index[&(id(x, y - 1), v)]);
            }
        }
    }
    (edges, rotation)
}

/// Grid instance with weights drawn from `model`; rounded to five decimals.
pub fn gen_grid(width: usize, height: usize, model: WeightModel, seed: u64) -> Result<Instance> {
    if width < 2 || height < 2 {
        return Err(Error::Domain(format!("grid {width}x{height} is smaller than 2x2")));
    }
    let (edges, rotation) = grid_topology(width, height);
    let graph = PlanarGraph::new(width * height, edges, rotation)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = match model {
        WeightModel::Uniform { low, high } => {
            if !(low <= high) || !low.is_finite() || !high.is_finite() {
                return Err(Error::Domain(format!("bad uniform range [{low}, {high}]")));
            }
            (0..graph.edge_count()).map(|_| if low == high { low } else { rng.random_range(low..=high) }).collect()
        }
        WeightModel::GpbLike { beta } => gpb_like_grid(&graph, width, height, beta, &mut rng)?,
    };
    let (label, params) = match model {
        WeightModel::Uniform { .. } => {
            ("uniform", serde_json::json!({"width": width, "height": height, "model": model}))
        }
        WeightModel::GpbLike { .. } => {
            ("gpb_like", serde_json::json!({"width": width, "height": height, "model": model}))
        }
    };
    Instance::new(
        format!("grid{width}x{height}_{label}_s{seed}"),
        graph,
        round_theta(&raw),
        Metadata { generator: "grid".into(), params, seed: Some(seed) },
    )
}

/// Voronoi regions around random seed points stand in for image segments.
fn gpb_like_grid(
    graph: &PlanarGraph,
    width: usize,
    height: usize,
    beta: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let regions = ((width * height) as f64).sqrt() / 2.0;
    let k = (regions.ceil() as usize).max(2);
    let sites: Vec<(f64, f64)> =
        (0..k).map(|_| (rng.random_range(0.0..width as f64), rng.random_range(0.0..height as f64))).collect();
    let region = |v: usize| {
        let (x, y) = ((v % width) as f64 + 0.5, (v / width) as f64 + 0.5);
        let mut best = (f64::INFINITY, 0);
        for (i, &(sx, sy)) in sites.iter().enumerate() {
            let d = (x - sx).powi(2) + (y - sy).powi(2);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    };
    let labels: Vec<usize> = (0..graph.vertex_count()).map(region).collect();
    let boundary = Beta::new(5.0, 2.0).expect("valid beta parameters");
    let interior = Beta::new(1.5, 8.0).expect("valid beta parameters");
    graph
        .edges()
        .iter()
        .map(|&(u, v)| {
            let g: f64 = if labels[u] != labels[v] { boundary.sample(rng) } else { interior.sample(rng) };
            gpb_to_theta(g.clamp(1e-4, 1.0 - 1e-4), beta)
        })
        .collect()
}

/// Random connected planar graph on `n` vertices: a stacked triangulation
/// built by repeatedly splitting a random triangular face, then thinned by
/// deleting random edges while staying connected. Weights `U[-1, 1]`,
/// rounded to five decimals.
pub fn gen_random_planar(n: usize, seed: u64) -> Result<Instance> {
    if n < 3 {
        return Err(Error::Domain(format!("random planar graphs need n >= 3, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = vec![(0, 1), (1, 2), (2, 0)];
    let mut rotation: Vec<Vec<usize>> = vec![vec![2, 0], vec![0, 1], vec![1, 2]];
    let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
    for (e, &(u, v)) in edges.iter().enumerate() {
        lookup.insert((u.min(v), u.max(v)), e);
    }
    // triangles as vertex triples in face-walk order a -> b -> c -> a
    let mut faces: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1]];
    for d in 3..n {
        let f = rng.random_range(0..faces.len());
        let [a, b, c] = faces[f];
        let key = |x: usize, y: usize| (x.min(y), x.max(y));
        let mut new_edge = |x: usize, edges: &mut Vec<(usize, usize)>| {
            edges.push((x, d));
            lookup.insert(key(x, d), edges.len() - 1);
            edges.len() - 1
        };
        let da = new_edge(a, &mut edges);
        let db = new_edge(b, &mut edges);
        let dc = new_edge(c, &mut edges);
        // at each corner the new edge goes right after the edge the walk arrives on
        for (corner, from, new) in [(a, c, da), (b, a, db), (c, b, dc)] {
            let incoming = lookup[&key(from, corner)];
            let r = &mut rotation[corner];
            let pos = r.iter().position(|&e| e == incoming).expect("incoming edge in rotation");
            r.insert(pos + 1, new);
        }
        rotation.push(vec![db, da, dc]);
        faces[f] = [a, b, d];
        faces.push([b, c, d]);
        faces.push([c, a, d]);
    }

    // thin out, keeping the graph connected
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.shuffle(&mut rng);
    let mut removed = vec![false; edges.len()];
    for e in order {
        if rng.random_bool(0.35) {
            removed[e] = true;
            if !connected(n, &edges, &removed) {
                removed[e] = false;
            }
        }
    }
    let mut renumber = vec![usize::MAX; edges.len()];
    let mut kept = Vec::new();
    for (e, &uv) in edges.iter().enumerate() {
        if !removed[e] {
            renumber[e] = kept.len();
            kept.push(uv);
        }
    }
    let rotation: Vec<Vec<usize>> =
        rotation.into_iter().map(|r| r.into_iter().filter(|&e| !removed[e]).map(|e| renumber[e]).collect()).collect();
    let graph = PlanarGraph::new(n, kept, rotation)?;
    let theta: Vec<f64> = (0..graph.edge_count()).map(|_| rng.random_range(-1.0..=1.0)).collect();
    Instance::new(
        format!("planar{n}_s{seed}"),
        graph,
        round_theta(&theta),
        Metadata { generator: "random_planar".into(), params: serde_json::json!({"n": n}), seed: Some(seed) },
    )
}

fn connected(n: usize, edges: &[(usize, usize)], removed: &[bool]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for (e, &(u, v)) in edges.iter().enumerate() {
        if !removed[e] {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == n
}

#[derive(Deserialize)]
struct InstanceFile {
    name: String,
    vertex_count: usize,
    edges: Vec<(usize, usize, String)>,
    rotation: Vec<Vec<usize>>,
    metadata: Metadata,
}

/// Decimal string for a weight: five fixed digits when the value is on the
/// 1e-5 grid, otherwise the shortest round-trip representation.
pub fn format_theta(value: f64) -> String {
    let value = if value == 0.0 { 0.0 } else { value };
    match ScaledWeights::detect(&[value]) {
        Some(s) if s.decimals <= 5 => format!("{value:.5}"),
        _ => format!("{value}"),
    }
}

/// Serializes one edge and one rotation list per line.
pub fn instance_to_json(instance: &Instance) -> String {
    let quote = |text: &str| serde_json::to_string(text).expect("strings serialize");
    let mut out = String::from("{\n");
    out += &format!("  \"name\": {},\n", quote(&instance.name));
    out += &format!("  \"vertex_count\": {},\n", instance.graph.vertex_count());
    let edges: Vec<String> = instance
        .graph
        .edges()
        .iter()
        .zip(instance.theta.iter())
        .map(|(&(u, v), &t)| format!("    [{u}, {v}, \"{}\"]", format_theta(t)))
        .collect();
    out += &format!("  \"edges\": [\n{}\n  ],\n", edges.join(",\n"));
    let rotation: Vec<String> = instance
        .graph
        .rotation()
        .iter()
        .map(|r| {
            let ids: Vec<String> = r.iter().map(|e| e.to_string()).collect();
            format!("    [{}]", ids.join(", "))
        })
        .collect();
    out += &format!("  \"rotation\": [\n{}\n  ],\n", rotation.join(",\n"));
    let metadata = serde_json::to_string(&instance.metadata).expect("metadata serializes");
    out += &format!("  \"metadata\": {metadata}\n}}");
    out
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("{e}")))?;
    let mut edges = Vec::with_capacity(file.edges.len());
    let mut theta = Vec::with_capacity(file.edges.len());
    for (e, (u, v, t)) in file.edges.into_iter().enumerate() {
        let value: f64 =
            t.trim().parse().map_err(|_| Error::Parse(format!("edges[{e}]: weight {t:?} is not a decimal number")))?;
        if !value.is_finite() {
            return Err(Error::Parse(format!("edges[{e}]: weight {t:?} is not finite")));
        }
        edges.push((u, v));
        theta.push(value);
    }
    let graph =
        PlanarGraph::new(file.vertex_count, edges, file.rotation).map_err(|e| Error::Validation(Box::new(e)))?;
    Instance::new(file.name, graph, EdgeWeights(theta), file.metadata)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
    instance_from_json(&text)
}

pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = instance_to_json(instance);
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}
