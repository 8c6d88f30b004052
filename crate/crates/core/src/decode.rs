//! Turning optimized multipliers into clusterings (upper bounds).
//!
//! Two decoders:
//!
//! * recursive bipartitioning: walk the edges whose multiplier absorbed
//!   negative weight (`theta_e - lambda_e < 0`) in random order, force each
//!   one into an optimal cut of the current multipliers, and keep the
//!   union of cuts whenever the repaired clustering does not get worse;
//! * rounding: re-solve the LP over the cut cone spanned by the pool,
//!   `min theta.z + sum_{theta_e<0} |theta_e| max(z_e - 1, 0)` with
//!   `z = sum_i alpha_i X_i`, and threshold `z`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bound::{BoundResult, CutPool};
use crate::cut_oracle::CutOracle;
use crate::error::{Error, Result};
use crate::exact::EnergyEvaluator;
use crate::graph::{CutVector, Partition, PlanarGraph};
use crate::lp::{solve_lp, LpProblem, LpStatus};
use crate::par::Execution;

pub const DEFAULT_RESTARTS: usize = 10;
pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const CERTIFICATE_TOL: f64 = 1e-6;
/// Recursive restarts run in groups of this size; a group is finished
/// before checking for a certificate, which keeps results independent of
/// the thread count.
const RESTART_CHUNK: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeMethod {
    Rounding,
    Recursive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub partition: Partition,
    pub energy: f64,
    pub method: DecodeMethod,
    /// Recursive restart that produced this result.
    pub restart: Option<usize>,
    /// `energy - bound <= certificate_tol` against the bound it was checked with.
    pub certificate: bool,
}

impl DecodeResult {
    fn certify(mut self, bound: f64, tol: f64) -> DecodeResult {
        self.certificate = self.energy - bound <= tol;
        self
    }

    fn order_key(&self) -> (f64, DecodeMethod, usize) {
        (self.energy, self.method, self.restart.unwrap_or(0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeOptions {
    pub restarts: usize,
    pub seed: u64,
    pub threshold: f64,
    pub certificate_tol: f64,
    pub execution: Execution,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        DecodeOptions {
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            threshold: DEFAULT_THRESHOLD,
            certificate_tol: CERTIFICATE_TOL,
            execution: Execution::default(),
        }
    }
}

/// Random order of `items` for restart `restart` under `seed`.
fn restart_order(items: &mut [usize], seed: u64, restart: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    items.shuffle(&mut rng);
}

pub fn decode_recursive(graph: &PlanarGraph, theta: &[f64], lambda: &[f64], seed: u64, restart: usize) -> DecodeResult {
    decode_recursive_with(&CutOracle::new(graph), theta, lambda, seed, restart)
}

/// Recursive bipartitioning. Cut edges already in the running cut are
/// skipped; forcing them again would only repeat work on removed edges.
/// Multipliers of newly cut edges are zeroed when a step is accepted.
pub fn decode_recursive_with(
    oracle: &CutOracle<'_>,
    theta: &[f64],
    lambda: &[f64],
    seed: u64,
    restart: usize,
) -> DecodeResult {
    let graph = oracle.graph();
    let m = graph.edge_count();
    assert_eq!(theta.len(), m);
    assert_eq!(lambda.len(), m);
    let eval = EnergyEvaluator::new(theta);
    let mut work = lambda.to_vec();
    let mut order: Vec<usize> = (0..m).filter(|&e| theta[e] - lambda[e] < -1e-9).collect();
    restart_order(&mut order, seed, restart);

    let mut current = CutVector::empty(m);
    let mut current_key = eval.key_where(|_| false);
    for e in order {
        if current[e] {
            continue;
        }
        let forced = oracle.min_cut_forced(&work, e).cut;
        let candidate = current.union(&forced);
        let repaired = graph.partition_from_cut(&candidate);
        let key = eval.labeling_key(graph.edges(), repaired.labels());
        if key <= current_key {
            current = candidate;
            current_key = key;
            for f in forced.cut_edges() {
                work[f] = 0.0;
            }
        }
    }
    let partition = graph.partition_from_cut(&current);
    let energy = eval.labeling_energy(graph.edges(), partition.labels());
    DecodeResult { partition, energy, method: DecodeMethod::Recursive, restart: Some(restart), certificate: false }
}

/// Rounding over the pool's cut cone. Coefficients are boxed to `[0, 1]`:
/// lowering an `alpha_i > 1` to 1 leaves every `z_e >= 1` on that cut, so
/// it changes the objective by `-(alpha_i - 1) * sum_{e in X_i} max(theta_e, 0)`
/// at most, which is never an increase.
pub fn decode_rounding(graph: &PlanarGraph, theta: &[f64], pool: &CutPool, threshold: f64) -> Result<DecodeResult> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Domain(format!("threshold {threshold} is not in (0, 1)")));
    }
    let m = graph.edge_count();
    assert_eq!(theta.len(), m);
    let eval = EnergyEvaluator::new(theta);
    let single = |eval: &EnergyEvaluator| DecodeResult {
        partition: Partition::single_cluster(graph.vertex_count()),
        energy: eval.sum_where(|_| false),
        method: DecodeMethod::Rounding,
        restart: None,
        certificate: false,
    };
    if pool.is_empty() {
        return Ok(single(&eval));
    }
    let cuts = pool.cuts();
    let k = cuts.len();
    let covered: Vec<usize> = (0..m).filter(|&e| theta[e] < 0.0 && cuts.iter().any(|c| c[e])).collect();
    let s = covered.len();

    // maximize -(sum_i alpha_i theta.X_i + sum_e |theta_e| s_e)
    let mut objective = Vec::with_capacity(k + s);
    for cut in cuts {
        objective.push(-eval.sum_where(|e| cut[e]));
    }
    for &e in &covered {
        objective.push(theta[e]);
    }
    let mut lower = vec![0.0; k + s];
    let mut upper = vec![1.0; k];
    upper.extend(std::iter::repeat_n(k as f64, s));
    lower.truncate(k + s);
    let mut problem = LpProblem::new(objective, lower, upper);
    for (j, &e) in covered.iter().enumerate() {
        // s_e - sum_{i: X_ie} alpha_i >= -1
        let mut row = vec![0.0; k + s];
        for (i, cut) in cuts.iter().enumerate() {
            if cut[e] {
                row[i] = -1.0;
            }
        }
        row[k + j] = 1.0;
        problem.add_constraint(row, -1.0);
    }
    let solution = solve_lp(&problem)?;
    if solution.status != LpStatus::Optimal {
        return Err(Error::Internal("rounding LP infeasible although zero is feasible".into()));
    }
    let alpha = &solution.x[..k];
    let mut z = vec![0.0; m];
    for (cut, &a) in cuts.iter().zip(alpha) {
        if a != 0.0 {
            for e in cut.cut_edges() {
                z[e] += a;
            }
        }
    }
    let rounded = CutVector(z.iter().map(|&ze| ze >= threshold - 1e-9).collect());
    let partition = graph.partition_from_cut(&rounded);
    let energy = eval.labeling_energy(graph.edges(), partition.labels());
    Ok(DecodeResult { partition, energy, method: DecodeMethod::Rounding, restart: None, certificate: false })
}

pub fn best_decode(
    graph: &PlanarGraph,
    theta: &[f64],
    bound: &BoundResult,
    options: &DecodeOptions,
) -> Result<DecodeResult> {
    best_decode_with(&CutOracle::new(graph), theta, bound, options)
}

/// Rounding first, then recursive restarts until one meets the bound.
/// Ties are resolved by (energy, method, restart index).
pub fn best_decode_with(
    oracle: &CutOracle<'_>,
    theta: &[f64],
    bound: &BoundResult,
    options: &DecodeOptions,
) -> Result<DecodeResult> {
    if options.restarts == 0 {
        return Err(Error::Domain("at least one restart is required".into()));
    }
    let graph = oracle.graph();
    let certify = |r: DecodeResult| r.certify(bound.bound, options.certificate_tol);
    let mut best = certify(decode_rounding(graph, theta, &bound.pool, options.threshold)?);
    if best.certificate {
        return Ok(best);
    }
    let mut start = 0;
    while start < options.restarts {
        let end = (start + RESTART_CHUNK).min(options.restarts);
        let results = options
            .execution
            .map_range(end - start, |i| decode_recursive_with(oracle, theta, &bound.lambda, options.seed, start + i));
        for r in results {
            let r = certify(r);
            if r.order_key() < best.order_key() {
                best = r;
            }
        }
        if best.certificate {
            break;
        }
        start = end;
    }
    Ok(best)
}
