use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Wick-convolve the impulse with the input signal
    Simulate,
    /// Bracket a stability constant and issue a verdict
    Certify,
    /// Monte Carlo checks of the chaos algebra
    McValidate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionArg {
    Bibo,
    L1l2,
    Dissipative,
    L2linf,
}

/// Random linear systems in the Wick calculus.
#[derive(Debug, Parser, Serialize)]
#[command(name = "wicksys", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// System description (simulate, certify) or Monte Carlo settings (mc-validate)
    #[arg(long)]
    pub input: PathBuf,

    /// JSON result file; simulate also writes a CSV beside it
    #[arg(long)]
    pub output: PathBuf,

    #[arg(long, value_enum)]
    pub criterion: Option<CriterionArg>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Random probe vectors added to the basis and singular-vector probes
    #[arg(long, default_value_t = 16)]
    pub probes: usize,

    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,

    #[arg(long)]
    pub max_degree: Option<u32>,

    #[arg(long)]
    pub max_var: Option<u32>,
}
