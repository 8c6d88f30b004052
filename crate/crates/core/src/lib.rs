//! Correlation clustering on planar graphs with certified optimality.
//!
//! The solver computes a lower bound on the clustering cost by a
//! cutting-plane method whose separation oracle finds minimum-weight
//! bipartitions through perfect matchings in an expanded planar dual, then
//! decodes clusterings (upper bounds) from the optimized multipliers. When
//! the two meet, the clustering is provably optimal.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bound;
pub mod cut_oracle;
pub mod decode;
pub mod error;
pub mod exact;
pub mod graph;
pub mod instances;
pub mod lp;
pub mod matching;
pub mod oracle;
pub mod par;
pub mod pipeline;
#[doc(hidden)]
pub mod testing;

pub use bound::{optimize_lower_bound, optimize_lower_bound_with, BoundOptions, BoundResult, CutPool};
pub use cut_oracle::{min_cut_2color, min_cut_forced, split_into_basic_cuts, CutOracle, CutSolution, ExpandedDual};
pub use decode::{best_decode, decode_recursive, decode_rounding, DecodeMethod, DecodeOptions, DecodeResult};
pub use error::{Error, Result};
pub use graph::{cut_energy, lower_bound_value, CutVector, EdgeWeights, Partition, PlanarGraph};
pub use instances::{gen_grid, gen_random_planar, read_instance, write_instance, Instance, WeightModel};
pub use lp::{solve_lp, LpProblem, LpSolution, LpStatus};
pub use matching::{min_weight_perfect_matching, Matching, MatchingProblem};
pub use par::Execution;
pub use pipeline::{solve_instance, SolveOptions, SolveReport};
