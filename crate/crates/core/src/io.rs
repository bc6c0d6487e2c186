//! JSON system descriptions.
//!
//! ```json
//! {"kind": "discrete", "k": 4, "l": 2, "policy": {"J": 2, "D": 3},
//!  "impulse": {"0": <expansion>, "1": <expansion>}, "causal": true,
//!  "input": {"0": <expansion>}, "target_gain": 2.0, "n_time": 64}
//!
//! {"kind": "continuous", "t0": 0.0, "dt": 0.01, "k": 4, "l": 2,
//!  "impulse": [<expansion>, ...],
//!  "input": {"t0": 0.0, "samples": [<expansion>, ...]},
//!  "target_gain": 2.0, "tail_bound": 1e-6}
//! ```
//!
//! `policy` is optional; without it the join of the expansions' own policies
//! is used. Parsing keeps policy errors ([`Error::is_policy_violation`])
//! apart from malformed documents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chaos::{ChaosExpansion, TruncationPolicy, WeightOrder};
use crate::continuous::GridSignal;
use crate::discrete::DiscreteSignal;
use crate::error::{Error, Result};

/// Command-line replacements for the policy bounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PolicyOverride {
    pub max_var: Option<u32>,
    pub max_degree: Option<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSystem {
    pub k: WeightOrder,
    pub l: Option<WeightOrder>,
    pub policy: TruncationPolicy,
    pub impulse: DiscreteSignal,
    pub causal: bool,
    pub input: Option<DiscreteSignal>,
    pub target_gain: Option<f64>,
    pub n_time: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousSystem {
    pub k: WeightOrder,
    pub l: Option<WeightOrder>,
    pub policy: TruncationPolicy,
    pub impulse: GridSignal,
    pub input: Option<GridSignal>,
    pub target_gain: Option<f64>,
    pub tail_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SystemDescription {
    Discrete(DiscreteSystem),
    Continuous(ContinuousSystem),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGridInput {
    t0: f64,
    samples: Vec<Value>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawSystem {
    Discrete {
        k: u32,
        l: Option<u32>,
        policy: Option<TruncationPolicy>,
        impulse: BTreeMap<String, Value>,
        #[serde(default)]
        causal: bool,
        input: Option<BTreeMap<String, Value>>,
        target_gain: Option<f64>,
        n_time: Option<usize>,
    },
    Continuous {
        t0: f64,
        dt: f64,
        k: u32,
        l: Option<u32>,
        policy: Option<TruncationPolicy>,
        impulse: Vec<Value>,
        input: Option<RawGridInput>,
        target_gain: Option<f64>,
        tail_bound: Option<f64>,
    },
}

const DISCRETE_KEYS: &[&str] = &["kind", "k", "l", "policy", "impulse", "causal", "input", "target_gain", "n_time"];
const CONTINUOUS_KEYS: &[&str] = &["kind", "t0", "dt", "k", "l", "policy", "impulse", "input", "target_gain", "tail_bound"];

fn parse_expansions<'a>(values: impl IntoIterator<Item = &'a Value>) -> Result<Vec<ChaosExpansion>> {
    values
        .into_iter()
        .map(|v| ChaosExpansion::from_json_value(v.clone()))
        .collect()
}

fn time_keys(m: &BTreeMap<String, Value>) -> Result<Vec<i64>> {
    m.keys()
        .map(|key| {
            key.parse()
                .map_err(|_| Error::Malformed(format!("time index \"{key}\" is not an integer")))
        })
        .collect()
}

fn resolve_policy(
    explicit: Option<TruncationPolicy>,
    parts: &[&[ChaosExpansion]],
    over: PolicyOverride,
) -> Result<TruncationPolicy> {
    let base = match explicit {
        Some(p) => TruncationPolicy::new(p.max_var, p.max_degree)?,
        None => parts
            .iter()
            .flat_map(|s| s.iter())
            .map(ChaosExpansion::policy)
            .reduce(|a, b| a.join(&b))
            .ok_or_else(|| Error::Malformed("no policy and no expansions to infer it from".into()))?,
    };
    TruncationPolicy::new(
        over.max_var.unwrap_or(base.max_var),
        over.max_degree.unwrap_or(base.max_degree),
    )
}

fn orders(k: u32, l: Option<u32>) -> Result<(WeightOrder, Option<WeightOrder>)> {
    Ok((WeightOrder::new(k)?, l.map(WeightOrder::new).transpose()?))
}

fn check_finite(name: &str, v: Option<f64>) -> Result<()> {
    match v {
        Some(x) if !x.is_finite() || x < 0.0 => Err(Error::Malformed(format!("{name} must be finite and non-negative"))),
        _ => Ok(()),
    }
}

impl SystemDescription {
    pub fn from_json_str(text: &str, over: PolicyOverride) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_json_value(value, over)
    }

    pub fn from_json_value(value: Value, over: PolicyOverride) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Malformed("system description must be a JSON object".into()))?;
        let allowed = match obj.get("kind").and_then(Value::as_str) {
            Some("discrete") => DISCRETE_KEYS,
            Some("continuous") => CONTINUOUS_KEYS,
            _ => return Err(Error::Malformed("\"kind\" must be \"discrete\" or \"continuous\"".into())),
        };
        if let Some(key) = obj.keys().find(|key| !allowed.contains(&key.as_str())) {
            return Err(Error::Malformed(format!("unknown field \"{key}\"")));
        }
        match serde_json::from_value::<RawSystem>(value)? {
            RawSystem::Discrete {
                k,
                l,
                policy,
                impulse,
                causal,
                input,
                target_gain,
                n_time,
            } => {
                let (k, l) = orders(k, l)?;
                check_finite("target_gain", target_gain)?;
                let h = parse_expansions(impulse.values())?;
                let u = match &input {
                    Some(m) => parse_expansions(m.values())?,
                    None => Vec::new(),
                };
                let policy = resolve_policy(policy, &[&h, &u], over)?;
                let impulse = DiscreteSignal::from_samples(policy, time_keys(&impulse)?.into_iter().zip(h))?;
                if causal && !impulse.is_causal() {
                    return Err(Error::Malformed("causal system with an impulse sample at n < 0".into()));
                }
                let input = match input {
                    Some(m) => Some(DiscreteSignal::from_samples(policy, time_keys(&m)?.into_iter().zip(u))?),
                    None => None,
                };
                if n_time == Some(0) {
                    return Err(Error::Malformed("n_time must be positive".into()));
                }
                Ok(Self::Discrete(DiscreteSystem {
                    k,
                    l,
                    policy,
                    impulse,
                    causal,
                    input,
                    target_gain,
                    n_time,
                }))
            }
            RawSystem::Continuous {
                t0,
                dt,
                k,
                l,
                policy,
                impulse,
                input,
                target_gain,
                tail_bound,
            } => {
                let (k, l) = orders(k, l)?;
                check_finite("target_gain", target_gain)?;
                check_finite("tail_bound", tail_bound)?;
                let h = parse_expansions(&impulse)?;
                let u = match &input {
                    Some(g) => parse_expansions(&g.samples)?,
                    None => Vec::new(),
                };
                let policy = resolve_policy(policy, &[&h, &u], over)?;
                let impulse = GridSignal::new(t0, dt, policy, h)?;
                let input = match input {
                    Some(g) => Some(GridSignal::new(g.t0, dt, policy, u)?),
                    None => None,
                };
                Ok(Self::Continuous(ContinuousSystem {
                    k,
                    l,
                    policy,
                    impulse,
                    input,
                    target_gain,
                    tail_bound,
                }))
            }
        }
    }

    pub fn k(&self) -> WeightOrder {
        match self {
            Self::Discrete(s) => s.k,
            Self::Continuous(s) => s.k,
        }
    }

    pub fn l(&self) -> Option<WeightOrder> {
        match self {
            Self::Discrete(s) => s.l,
            Self::Continuous(s) => s.l,
        }
    }

    pub fn policy(&self) -> TruncationPolicy {
        match self {
            Self::Discrete(s) => s.policy,
            Self::Continuous(s) => s.policy,
        }
    }

    pub fn target_gain(&self) -> Option<f64> {
        match self {
            Self::Discrete(s) => s.target_gain,
            Self::Continuous(s) => s.target_gain,
        }
    }

    /// The canonical JSON form; parsing it gives back an equal description.
    pub fn to_json_value(&self) -> Value {
        let mut v = match self {
            Self::Discrete(s) => {
                let mut v = json!({
                    "kind": "discrete",
                    "k": s.k.get(),
                    "policy": s.policy,
                    "impulse": samples_map(&s.impulse),
                    "causal": s.causal,
                });
                if let Some(u) = &s.input {
                    v["input"] = samples_map(u);
                }
                if let Some(n) = s.n_time {
                    v["n_time"] = json!(n);
                }
                v
            }
            Self::Continuous(s) => {
                let mut v = json!({
                    "kind": "continuous",
                    "t0": s.impulse.t0(),
                    "dt": s.impulse.dt(),
                    "k": s.k.get(),
                    "policy": s.policy,
                    "impulse": s.impulse.samples(),
                });
                if let Some(u) = &s.input {
                    v["input"] = json!({"t0": u.t0(), "samples": u.samples()});
                }
                if let Some(t) = s.tail_bound {
                    v["tail_bound"] = json!(t);
                }
                v
            }
        };
        if let Some(l) = self.l() {
            v["l"] = json!(l.get());
        }
        if let Some(t) = self.target_gain() {
            v["target_gain"] = json!(t);
        }
        v
    }
}

fn samples_map(s: &DiscreteSignal) -> Value {
    let m: serde_json::Map<String, Value> = s
        .iter()
        .map(|(n, f)| (n.to_string(), serde_json::to_value(f).expect("expansions serialize")))
        .collect();
    Value::Object(m)
}

/// A signal as written by the simulator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "signal", rename_all = "lowercase")]
pub enum SignalDocument {
    Discrete(DiscreteSignal),
    Continuous(GridSignal),
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISCRETE: &str = r#"{
        "kind": "discrete", "k": 4, "l": 2, "policy": {"J": 2, "D": 2},
        "impulse": {"0": {"policy": {"J": 1, "D": 1}, "terms": [{"alpha": [], "re": 0.5, "im": 0.0}]},
                    "2": {"policy": {"J": 2, "D": 2}, "terms": [{"alpha": [[2, 1]], "re": 0.0, "im": 1.0}]}},
        "causal": true
    }"#;

    #[test]
    fn discrete_round_trip() {
        let s = SystemDescription::from_json_str(DISCRETE, PolicyOverride::default()).unwrap();
        let SystemDescription::Discrete(d) = &s else { panic!() };
        assert_eq!(d.impulse.len(), 2);
        assert_eq!(d.policy, TruncationPolicy::new(2, 2).unwrap());
        let v = s.to_json_value();
        let again = SystemDescription::from_json_value(v.clone(), PolicyOverride::default()).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.to_json_value(), v);
    }

    #[test]
    fn override_outside_terms_is_a_policy_error() {
        let over = PolicyOverride {
            max_var: Some(1),
            max_degree: None,
        };
        let err = SystemDescription::from_json_str(DISCRETE, over).unwrap_err();
        assert!(err.is_policy_violation(), "{err}");
    }

    #[test]
    fn malformed_documents() {
        for bad in [
            "not json",
            r#"{"kind": "weird"}"#,
            r#"{"kind": "discrete", "k": 4, "impulse": {}, "extra": 1}"#,
            r#"{"kind": "discrete", "k": 0, "policy": {"J": 1, "D": 1}, "impulse": {}}"#,
            r#"{"kind": "discrete", "k": 4, "policy": {"J": 1, "D": 1}, "causal": true,
                "impulse": {"-1": {"policy": {"J": 1, "D": 1}, "terms": [{"alpha": [], "re": 1.0, "im": 0.0}]}}}"#,
            r#"{"kind": "continuous", "t0": 0.0, "dt": -1.0, "k": 4, "policy": {"J": 1, "D": 1}, "impulse": []}"#,
        ] {
            let err = SystemDescription::from_json_str(bad, PolicyOverride::default()).unwrap_err();
            assert!(!err.is_policy_violation(), "{bad}: {err}");
        }
    }

    #[test]
    fn continuous_with_inferred_policy() {
        let text = r#"{"kind": "continuous", "t0": 0.0, "dt": 0.5, "k": 4, "l": 2,
            "impulse": [{"policy": {"J": 1, "D": 2}, "terms": [{"alpha": [[1, 2]], "re": 1.0, "im": 0.0}]},
                        {"policy": {"J": 3, "D": 1}, "terms": []}],
            "input": {"t0": -1.0, "samples": [{"policy": {"J": 1, "D": 1}, "terms": []}]}}"#;
        let s = SystemDescription::from_json_str(text, PolicyOverride::default()).unwrap();
        assert_eq!(s.policy(), TruncationPolicy::new(3, 2).unwrap());
        let SystemDescription::Continuous(c) = &s else { panic!() };
        assert_eq!(c.input.as_ref().unwrap().t0(), -1.0);
        let again = SystemDescription::from_json_value(s.to_json_value(), PolicyOverride::default()).unwrap();
        assert_eq!(again, s);
    }
}
