//! Bound, then decode: the full solve for one instance.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bound::{optimize_lower_bound_with, BoundOptions, BoundResult, DEFAULT_MAX_BATCHES, DEFAULT_TOL};
use crate::cut_oracle::CutOracle;
use crate::decode::{
    best_decode_with, DecodeOptions, DecodeResult, CERTIFICATE_TOL, DEFAULT_RESTARTS, DEFAULT_THRESHOLD,
};
use crate::error::Result;
use crate::graph::PlanarGraph;
use crate::par::Execution;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    pub threshold: f64,
    pub max_batches: usize,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: DEFAULT_TOL,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            threshold: DEFAULT_THRESHOLD,
            max_batches: DEFAULT_MAX_BATCHES,
            execution: Execution::default(),
        }
    }
}

impl SolveOptions {
    pub fn bound_options(&self) -> BoundOptions {
        BoundOptions { tol: self.tol, max_batches: self.max_batches }
    }

    pub fn decode_options(&self) -> DecodeOptions {
        DecodeOptions {
            restarts: self.restarts,
            seed: self.seed,
            threshold: self.threshold,
            certificate_tol: CERTIFICATE_TOL.max(self.tol),
            execution: self.execution,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub bound: BoundResult,
    pub decode: DecodeResult,
    pub gap: f64,
    pub certificate: bool,
    pub ms_bound: f64,
    pub ms_decode: f64,
}

pub fn solve_instance(graph: &PlanarGraph, theta: &[f64], options: &SolveOptions) -> Result<SolveReport> {
    let oracle = CutOracle::new(graph);
    let started = Instant::now();
    let bound = optimize_lower_bound_with(&oracle, theta, &options.bound_options())?;
    let ms_bound = started.elapsed().as_secs_f64() * 1e3;
    let started = Instant::now();
    let decode = best_decode_with(&oracle, theta, &bound, &options.decode_options())?;
    let ms_decode = started.elapsed().as_secs_f64() * 1e3;
    let gap = decode.energy - bound.bound;
    Ok(SolveReport { certificate: decode.certificate, gap, bound, decode, ms_bound, ms_decode })
}
