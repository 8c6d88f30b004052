//! Cutting-plane optimization of the lower bound
//!
//! ```text
//! max  sum_e (theta_e - lambda_e)
//! s.t. theta_e <= lambda_e <= max(0, theta_e)
//!      sum_e lambda_e X_e >= 0   for every bipartition cut X
//! ```
//!
//! Any `lambda` satisfying the cut constraints has clustering optimum 0, so
//! `theta - lambda` carries all of the (negative) cost and the objective
//! bounds the clustering optimum from below. Only the cuts found so far by
//! the matching oracle are kept in the LP.

use std::collections::HashSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cut_oracle::{split_into_basic_cuts, CutOracle};
use crate::error::{Error, Result};
use crate::graph::{lower_bound_value, CutVector, EdgeWeights, PlanarGraph};
use crate::lp::{solve_lp, LpProblem, LpStatus};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_BATCHES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundOptions {
    /// The oracle value must reach `-tol` for convergence.
    pub tol: f64,
    pub max_batches: usize,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions { tol: DEFAULT_TOL, max_batches: DEFAULT_MAX_BATCHES }
    }
}

/// Cut constraints materialized so far, without duplicates, in insertion order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CutPool {
    edge_count: usize,
    cuts: Vec<CutVector>,
    index: HashSet<CutVector>,
}

impl CutPool {
    pub fn new(edge_count: usize) -> CutPool {
        CutPool { edge_count, ..CutPool::default() }
    }

    /// Adds `cut` unless already present; returns whether it was new.
    pub fn insert(&mut self, cut: CutVector) -> bool {
        assert_eq!(cut.len(), self.edge_count, "cut length differs from the pool's edge count");
        if self.index.contains(&cut) {
            return false;
        }
        self.index.insert(cut.clone());
        self.cuts.push(cut);
        true
    }

    pub fn contains(&self, cut: &CutVector) -> bool {
        self.index.contains(cut)
    }

    pub fn cuts(&self) -> &[CutVector] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }
}

#[derive(Serialize, Deserialize)]
struct PoolRecord {
    edge_count: usize,
    cuts: Vec<Vec<usize>>,
}

impl Serialize for CutPool {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PoolRecord { edge_count: self.edge_count, cuts: self.cuts.iter().map(|c| c.cut_edges()).collect() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CutPool {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let record = PoolRecord::deserialize(deserializer)?;
        let mut pool = CutPool::new(record.edge_count);
        for edges in record.cuts {
            if let Some(&e) = edges.iter().find(|&&e| e >= record.edge_count) {
                return Err(serde::de::Error::custom(format!("cut edge {e} out of range")));
            }
            pool.insert(CutVector::from_edges(record.edge_count, &edges));
        }
        Ok(pool)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub lambda: EdgeWeights,
    /// Certified lower bound on the clustering optimum. Equals
    /// `sum_e (theta_e - lambda_e)` when `converged`.
    pub bound: f64,
    pub pool: CutPool,
    pub batches: usize,
    pub oracle_calls: usize,
    pub converged: bool,
    /// LP optimum after each batch (non-increasing).
    pub objective_history: Vec<f64>,
    /// Oracle value at the final `lambda`.
    pub final_violation: f64,
}

/// A cut of `lambda`-weight below `-tol`, if one exists.
pub fn omega_violation(graph: &PlanarGraph, lambda: &[f64], tol: f64) -> Option<CutVector> {
    assert!(tol > 0.0, "tolerance must be positive");
    let sol = CutOracle::new(graph).min_cut(lambda);
    (sol.value < -tol).then_some(sol.cut)
}

pub fn optimize_lower_bound(graph: &PlanarGraph, theta: &[f64], tol: f64) -> Result<BoundResult> {
    let options = BoundOptions { tol, ..BoundOptions::default() };
    optimize_lower_bound_with(&CutOracle::new(graph), theta, &options)
}

/// Cutting-plane loop reusing a prepared oracle.
///
/// If the batch limit is hit first, `bound` is
/// `sum (theta - lambda) + 1.5 * min(0, CC2(lambda))` maximized over the
/// iterates: the clustering optimum of `lambda` is at least 1.5 times its
/// best bipartition value, so this stays a valid lower bound.
pub fn optimize_lower_bound_with(oracle: &CutOracle<'_>, theta: &[f64], options: &BoundOptions) -> Result<BoundResult> {
    let graph = oracle.graph();
    let m = graph.edge_count();
    if theta.len() != m {
        return Err(Error::MalformedInput(format!("{} weights for {m} edges", theta.len())));
    }
    if !(options.tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {} must be positive", options.tol)));
    }
    let mut lambda: Vec<f64> = theta.iter().map(|&t| t.max(0.0)).collect();
    let free: Vec<usize> = (0..m).filter(|&e| theta[e] < 0.0).collect();
    let mut pool = CutPool::new(m);
    let mut history = Vec::new();
    let mut batches = 0;
    let mut calls = 0;
    // lambda = max(0, theta) satisfies every cut constraint
    let mut best_valid = lower_bound_value(theta, &lambda);
    if !free.is_empty() {
        // the LP over an empty pool puts every free multiplier at its lower bound
        for &e in &free {
            lambda[e] = theta[e];
        }
        history.push(lower_bound_value(theta, &lambda));
    }

    let (converged, violation) = loop {
        let sol = oracle.min_cut(&lambda);
        calls += 1;
        let current = lower_bound_value(theta, &lambda);
        if sol.value >= -options.tol {
            break (true, sol.value);
        }
        best_valid = best_valid.max(current + 1.5 * sol.value);
        if batches >= options.max_batches {
            break (false, sol.value);
        }
        let mut added = 0;
        for basic in split_into_basic_cuts(graph, &sol.cut) {
            added += pool.insert(basic) as usize;
        }
        if added == 0 && !pool.insert(sol.cut.clone()) {
            // every separating cut is already enforced; the LP cannot move
            break (false, sol.value);
        }
        batches += 1;
        let objective = solve_restricted(theta, &free, &pool, &mut lambda)?;
        history.push(objective);
    };

    let sum = lower_bound_value(theta, &lambda);
    let bound = if converged { sum } else { best_valid };
    Ok(BoundResult {
        lambda: EdgeWeights(lambda),
        bound,
        pool,
        batches,
        oracle_calls: calls,
        converged,
        objective_history: history,
        final_violation: violation,
    })
}

/// Solves the LP over the pool for the free multipliers (`theta_e < 0`),
/// writing them into `lambda`. Returns `sum_e (theta_e - lambda_e)`.
fn solve_restricted(theta: &[f64], free: &[usize], pool: &CutPool, lambda: &mut [f64]) -> Result<f64> {
    let k = free.len();
    let mut problem = LpProblem::new(vec![-1.0; k], free.iter().map(|&e| theta[e]).collect(), vec![0.0; k]);
    for cut in pool.cuts() {
        let fixed: f64 = cut.iter().enumerate().filter(|&(e, &c)| c && theta[e] >= 0.0).map(|(e, _)| theta[e]).sum();
        let row: Vec<f64> = free.iter().map(|&e| if cut[e] { 1.0 } else { 0.0 }).collect();
        if row.iter().all(|&a| a == 0.0) {
            continue;
        }
        problem.add_constraint(row, -fixed);
    }
    let solution = solve_lp(&problem)?;
    if solution.status != LpStatus::Optimal {
        return Err(Error::Internal("bound LP infeasible although lambda = max(0, theta) is feasible".into()));
    }
    for (i, &e) in free.iter().enumerate() {
        lambda[e] = snap(solution.x[i]);
    }
    Ok(lower_bound_value(theta, lambda))
}

/// Removes simplex round-off so multipliers land back on short decimals
/// when they are meant to.
fn snap(x: f64) -> f64 {
    let scaled = x * 1e9;
    if (scaled - scaled.round()).abs() < 1e-3 {
        scaled.round() / 1e9
    } else {
        x
    }
}
