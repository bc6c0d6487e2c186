use thiserror::Error;

/// Errors raised by the chaos algebra, the operator layer and the certifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("weight (2N)^(q*alpha) overflows f64 for alpha = {alpha}, q = {q}")]
    WeightOverflow { alpha: String, q: f64 },

    #[error("the Vage sum diverges for q = {0}; it needs q > 1")]
    VageDivergence(f64),

    #[error("weight orders k = {k}, l = {l} violate k > l + 1")]
    OrderViolation { k: u32, l: u32 },

    #[error("multi-index {alpha} lies outside the truncation policy (J = {max_var}, D = {max_degree})")]
    PolicyViolation {
        alpha: String,
        max_var: u32,
        max_degree: u32,
    },

    #[error("policy mismatch: expected (J = {expected_var}, D = {expected_degree}), found (J = {found_var}, D = {found_degree})")]
    PolicyMismatch {
        expected_var: u32,
        expected_degree: u32,
        found_var: u32,
        found_degree: u32,
    },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("matrix size {size} exceeds the cap of {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("power iteration did not converge after {iterations} iterations; norm lies in [{lower}, {upper}]")]
    NoConvergence {
        iterations: usize,
        lower: f64,
        upper: f64,
    },

    #[error("Neumann series diverges: contraction bound {bound} >= 1")]
    NeumannDivergence { bound: f64 },

    #[error("inadmissible evaluation point: {0}")]
    InadmissiblePoint(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by coefficients that do not fit a truncation policy.
    pub fn is_policy_violation(&self) -> bool {
        matches!(self, Error::PolicyViolation { .. } | Error::PolicyMismatch { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
