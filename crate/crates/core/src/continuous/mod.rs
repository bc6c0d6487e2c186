//! Continuous-time random systems `y(t) = ∫ h(s) ◊ u(t − s) ds` on uniform
//! grids with trapezoidal quadrature.

mod certify;
mod convolve;
mod grid;
mod transfer;

pub use certify::{
    cont_bibo_probe, cont_bibo_sufficient, default_grid_probes, l2linf_certify, l2linf_probe,
    DEFAULT_EPSILON,
};
pub use convolve::{grid_convolution_oracle, wick_convolve_grid, GridConvolution};
pub use grid::{trapezoid_weights, GridSignal};
pub use transfer::{cont_transfer_check, laplace_transform};
