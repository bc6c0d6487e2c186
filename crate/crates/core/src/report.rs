//! Stability reports shared by the discrete and continuous certifiers.
//!
//! Truncated computations and probe inputs produce lower bounds; Våge and
//! triangle sums produce upper bounds. A verdict is issued only from the
//! conclusive side: `certified` needs an upper bound, `refuted` needs a lower
//! bound backed by a concrete witness input.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chaos::TruncationPolicy;
use crate::continuous::GridSignal;
use crate::discrete::DiscreteSignal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Bibo,
    L1l2,
    Dissipative,
    L2linf,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Bibo => "bibo",
            Criterion::L1l2 => "l1l2",
            Criterion::Dissipative => "dissipative",
            Criterion::L2linf => "l2linf",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeDomain {
    Discrete,
    Continuous,
}

/// A bound with a short description of how it was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub provenance: String,
}

/// An input signal exhibiting a lower bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "signal", rename_all = "lowercase")]
pub enum Witness {
    Discrete(DiscreteSignal),
    Continuous(GridSignal),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportParameters {
    pub k: u32,
    pub l: Option<u32>,
    pub policy: TruncationPolicy,
    pub tol: f64,
    pub target_gain: Option<f64>,
    pub n_time: Option<usize>,
    pub dt: Option<f64>,
    pub probes: Option<usize>,
    pub seed: Option<u64>,
}

impl ReportParameters {
    pub fn new(k: u32, policy: TruncationPolicy, tol: f64) -> Self {
        Self {
            k,
            l: None,
            policy,
            tol,
            target_gain: None,
            n_time: None,
            dt: None,
            probes: None,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub criterion: Criterion,
    pub domain: TimeDomain,
    pub verdict: Verdict,
    pub lower_bound: Option<Bound>,
    pub upper_bound: Option<Bound>,
    pub witness: Option<Witness>,
    pub parameters: ReportParameters,
    /// True when the system is empty and every bound is trivially zero.
    pub vacuous: bool,
    /// Named intermediate quantities (constants, norms, quadrature mass).
    pub quantities: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl StabilityReport {
    pub fn new(criterion: Criterion, domain: TimeDomain, parameters: ReportParameters) -> Self {
        Self {
            criterion,
            domain,
            verdict: Verdict::Inconclusive,
            lower_bound: None,
            upper_bound: None,
            witness: None,
            parameters,
            vacuous: false,
            quantities: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn lower(&self) -> Option<f64> {
        self.lower_bound.as_ref().map(|b| b.value)
    }

    pub fn upper(&self) -> Option<f64> {
        self.upper_bound.as_ref().map(|b| b.value)
    }

    pub fn set_lower(&mut self, value: f64, provenance: impl Into<String>) {
        self.lower_bound = Some(Bound {
            value,
            provenance: provenance.into(),
        });
    }

    pub fn set_upper(&mut self, value: f64, provenance: impl Into<String>) {
        self.upper_bound = Some(Bound {
            value,
            provenance: provenance.into(),
        });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn quantity(&mut self, name: &str, value: f64) {
        self.quantities.insert(name.to_string(), value);
    }

    /// Folds the lower bound, witness, quantities and notes of a probe report
    /// into this (upper-bound) report.
    pub fn absorb_lower(&mut self, probe: StabilityReport) {
        if let Some(b) = probe.lower_bound {
            let better = self.lower().is_none_or(|cur| b.value > cur);
            if better {
                self.lower_bound = Some(b);
                self.witness = probe.witness;
            }
        }
        self.parameters.probes = probe.parameters.probes.or(self.parameters.probes);
        self.parameters.seed = probe.parameters.seed.or(self.parameters.seed);
        for (k, v) in probe.quantities {
            self.quantities.entry(k).or_insert(v);
        }
        self.notes.extend(probe.notes);
        self.vacuous &= probe.vacuous;
    }

    /// Issues the verdict against a gain budget.
    ///
    /// With a target `M`: certified when the upper bound is at most
    /// `M (1 + tol)`, refuted when a witnessed lower bound exceeds it,
    /// inconclusive otherwise. Without a target: certified whenever a finite
    /// upper bound exists.
    pub fn decide(&mut self, target: Option<f64>) {
        let tol = self.parameters.tol;
        self.parameters.target_gain = target;
        self.verdict = match target {
            Some(m) => {
                let limit = m * (1.0 + tol);
                if self.upper().is_some_and(|u| u <= limit) {
                    Verdict::Certified
                } else if self.witness.is_some() && self.lower().is_some_and(|l| l > limit) {
                    Verdict::Refuted
                } else {
                    Verdict::Inconclusive
                }
            }
            None => {
                if self.upper().is_some_and(f64::is_finite) {
                    Verdict::Certified
                } else {
                    Verdict::Inconclusive
                }
            }
        };
        if let (Some(l), Some(u)) = (self.lower(), self.upper()) {
            if l > u * (1.0 + 1e-12) {
                self.note(format!("lower bound {l} exceeds upper bound {u}"));
            }
        }
    }
}
