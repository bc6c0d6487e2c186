//! Truncated Wiener–Hermite chaos expansions and their Wick algebra.

mod expansion;
mod kernel;
mod multi_index;
mod policy;
mod sampling;
mod vage;

pub use expansion::{ChaosExpansion, TruncationLoss};
pub use kernel::{kernel_k, membership_kk, EvaluationPoint, KernelValue};
pub use multi_index::MultiIndex;
pub use policy::{order_gap, TruncationPolicy, WeightOrder};
pub use sampling::{
    eval_hermite_functional, hermite_poly, mc_moment, orthogonality_suite, random_expansion,
    wick_expectation_suite, GaussianSample, MomentCheck, MomentEstimate,
};
pub use vage::{vage_bracket, vage_constant, vage_partial_product, VageBracket};
