//! Discrete-time random systems `y_n = Σ_m h_{n−m} ◊ u_m`.

mod certify;
mod convolve;
mod dissipative;
mod rational;
mod realization;
mod schur;
mod signal;
mod transfer;

pub use certify::{bibo_probe, bibo_sufficient, default_probes, l1l2_certify, l1l2_probe, normalize_k};
pub use convolve::{double_convolution_oracle, wick_convolve, wick_convolve_causal, Convolution};
pub use dissipative::{dissipativity_check, BlockToeplitz, TOEPLITZ_MAX_DIM};
pub use rational::{rational_expand, PolyMatrix, RationalExpansion, RationalSpec};
pub use realization::{
    default_realization_probes, realization_residuals, realization_verify, Realization,
    RealizationCheck, ZetaSeries,
};
pub use schur::{random_points, schur_kernel_gram, schur_kernel_gram_with, GramSummary, KernelDomain};
pub use signal::DiscreteSignal;
pub use transfer::{transfer_eval, TransferFunction};
