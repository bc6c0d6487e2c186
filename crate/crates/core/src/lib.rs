//! Random linear systems in the Wick calculus.
//!
//! Impulse responses and signals are truncated Wiener–Hermite chaos
//! expansions; systems act by Wick convolution. The crate simulates such
//! systems in discrete and continuous time and brackets their stability
//! constants: Våge-type sums give rigorous upper bounds, finite truncations
//! and probe inputs give lower bounds with explicit witnesses.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`chaos`] | multi-indices, Wick product, `‖·‖_k` norms, Våge constant, kernels, sampling |
//! | [`operators`] | the Wick multiplier `T_h` as a matrix, its adjoint and norm bounds |
//! | [`discrete`] | Wick convolution, transfer functions, BIBO / ℓ1-ℓ2 / dissipativity checks |
//! | [`continuous`] | grid convolution, continuous BIBO and L2–L∞ checks |
//! | [`report`] | the shared stability report |
//! | [`io`] | JSON system descriptions |
//!
//! ```
//! use wicksys::chaos::{ChaosExpansion, MultiIndex, TruncationPolicy, WeightOrder};
//!
//! let policy = TruncationPolicy::new(2, 3).unwrap();
//! let h1 = ChaosExpansion::monomial(policy, MultiIndex::unit(1), 1.0).unwrap();
//! let (h11, loss) = h1.wick(&h1);
//! assert!(loss.is_lossless());
//! assert_eq!(h11.coeff(&MultiIndex::power(1, 2)).re, 1.0);
//! assert_eq!(h1.norm_k(WeightOrder::new(2).unwrap()), 0.5);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chaos;
pub mod continuous;
pub mod discrete;
mod error;
pub mod io;
pub mod operators;
pub mod report;

pub use error::{Error, Result};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/chaos.md")]
    struct Chaos;
    #[doc = include_str!("../../../book/src/operators.md")]
    struct Operators;
    #[doc = include_str!("../../../book/src/discrete.md")]
    struct Discrete;
    #[doc = include_str!("../../../book/src/continuous.md")]
    struct Continuous;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
