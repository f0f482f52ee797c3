//! Counting constrained subcodes of Reed-Muller codes.
//!
//! The crate provides GF(2) linear algebra, RM code construction, RLL and
//! constant-weight energies, a Metropolis chain on codewords, telescoping
//! partition-function estimators and an exhaustive oracle for small codes.
//!
//! ```
//! use rmcount::{estimate_adaptive, Constraint, EstimatorConfig, RmCode};
//!
//! let code = RmCode::new(4, 2).unwrap();
//! let cfg = EstimatorConfig::with_samples(20, 200);
//! let est = estimate_adaptive(&code, &Constraint::Rll(1), 0.01, &cfg, 0).unwrap();
//! assert!(est.rate > 0.0 && est.rate < code.rate());
//! ```

pub mod constraint;
pub mod error;
pub mod estimator;
pub mod gf2;
pub mod gibbs;
pub mod oracle;
pub mod reference;
pub mod rm;
pub mod rng;

pub use constraint::{energy_rll, energy_weight, is_satisfied, Constraint, EnergyFunction};
pub use error::{Error, Result};
pub use estimator::{
    estimate_adaptive, estimate_fixed_schedule, estimate_with_stream, median, median_amplify,
    rll_rate_lower_bound, sample_budget, AdaptiveOrdering, CoolingSchedule, EstimateResult, EstimatorConfig,
    LowerBoundReading, MedianEstimate, RateLowerBound, SampleBudget, Schedule,
};
pub use gf2::{full_rank_probability, mat_vec_mul, sample_full_rank_matrix, BitMatrix, BitVector};
pub use gibbs::{metropolis_step, run_chain, ChainState, GibbsParams, InitMode, Metropolis};
pub use oracle::{
    exact_constrained_count, exact_gibbs_distribution, exact_partition_function, weight_enumerator,
    weight_enumerator_via_dual,
    EnergyHistogram, OracleResult,
};
pub use rm::{MinWeightSampler, RmCode, DEFAULT_EXHAUSTIVE_K, EXTENDED_EXHAUSTIVE_K};
pub use rng::{RngStream, StreamRng};
