//! The Wick multiplication operator `T_h : u ↦ h ◊ u` on the truncated `ℋ_k`.
//!
//! Matrices are written in the weighted orthonormal basis
//! `e_α = H_α / ‖H_α‖_k`, where coordinates are `ũ_α = u_α (2N)^{−kα/2}`.
//! Truncated norms are lower bounds for the norm on the full space; the Våge
//! inequality and the triangle inequality give upper bounds.

mod linear;
mod multiplier;

pub use linear::{
    dense_svd_norm, operator_norm, power_iteration_norm, LinearMap, NormEstimate, NormMethod,
    DENSE_SVD_MAX_DIM, POWER_MAX_ITERATIONS, POWER_TOLERANCE,
};
pub use multiplier::{
    adjoint_apply, assemble, multiplier_norm_bound, vage_upper_bound, BasisEnumeration,
    MultiplierMatrix, DENSE_STORAGE_MAX_DIM,
};
