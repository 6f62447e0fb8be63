//! Optimal unambiguous discrimination of N linearly independent pure states.
//!
//! Given states `u_j` with priors `p_j` and values `C_j`, the measurement
//! uses one rank-one detector `k_j |v_j><v_j|` per state, built on the dual
//! vectors `v_j` (orthogonal to every other state), plus an inconclusive
//! element `A_0 = 1 - sum_j k_j |v_j><v_j|`. The weights `k_j` are chosen to
//! maximize the expected value of identified signals while keeping `A_0`
//! positive semidefinite.
//!
//! ```
//! use povm_core::{fixtures, optimize};
//!
//! let solution = optimize(&fixtures::subspace()).unwrap();
//! assert!((solution.inconclusive_probability - 0.4).abs() < 1e-12);
//! ```

#![forbid(unsafe_code)]
// `!(x >= tol)` is used on purpose so NaN lands on the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod optimizer;
pub mod posterior;
pub mod povm;
pub mod problem;
pub mod simulate;

pub use error::{Error, Result};
pub use linalg::{
    canonical_reduce, dual_vectors, gram_data, inner_product, CanonicalForm, DualSystem, GramData,
    StateEnsemble, StateVector, C64,
};
pub use optimizer::{
    face_tangency, grid_oracle, optimize, optimize_with, surface_sample, GainWeights,
    OptimizerOptions, OracleResult, Solution, SurfaceSample,
};
pub use posterior::{decompose_inconclusive, posterior_report, PosteriorReport, SpectralOutcome};
pub use povm::{
    build_povm, det_inconclusive, is_feasible, outcome_probabilities, CoefficientVector,
    OutcomeProbabilities, PovmElement, PovmSet,
};
pub use problem::{InputOptions, ProblemFile};
pub use simulate::{run_simulation, SimulationConfig, SimulationReport};
