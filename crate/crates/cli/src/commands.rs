use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use wicksys::chaos::{orthogonality_suite, wick_expectation_suite, MomentCheck, TruncationPolicy, WeightOrder};
use wicksys::continuous::{
    cont_bibo_probe, cont_bibo_sufficient, default_grid_probes, l2linf_certify, l2linf_probe, wick_convolve_grid,
    DEFAULT_EPSILON,
};
use wicksys::discrete::{
    bibo_probe, bibo_sufficient, default_probes, dissipativity_check, l1l2_certify, l1l2_probe, wick_convolve,
};
use wicksys::io::{ContinuousSystem, DiscreteSystem, PolicyOverride, SignalDocument, SystemDescription};
use wicksys::report::{StabilityReport, Verdict};

use crate::args::{Cli, Command, CriterionArg};
use crate::error::CliError;

/// Block-Toeplitz horizon when the system does not set `n_time`.
const DEFAULT_N_TIME: usize = 64;

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return Err(CliError::Usage(format!("--tol must be finite and non-negative, got {}", cli.tol)));
    }
    match cli.command {
        Command::Simulate => simulate(cli),
        Command::Certify => certify(cli),
        Command::McValidate => mc_validate(cli),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn envelope(cli: &Cli) -> Value {
    json!({
        "wicksys_version": wicksys::VERSION,
        "config": cli,
    })
}

fn load_system(cli: &Cli) -> Result<SystemDescription, CliError> {
    let over = PolicyOverride {
        max_var: cli.max_var,
        max_degree: cli.max_degree,
    };
    Ok(SystemDescription::from_json_str(&read(&cli.input)?, over)?)
}

fn csv_path(output: &Path) -> PathBuf {
    output.with_extension("csv")
}

fn simulate(cli: &Cli) -> Result<u8, CliError> {
    let system = load_system(cli)?;
    let k = system.k();
    let (document, loss, rows) = match &system {
        SystemDescription::Discrete(s) => {
            let u = s
                .input
                .as_ref()
                .ok_or_else(|| CliError::Usage("simulate needs an \"input\" signal".into()))?;
            let c = wick_convolve(&s.impulse, u)?;
            let rows = match c.output.support() {
                Some((lo, hi)) => (lo..=hi).map(|n| row(n.to_string(), &c.output.sample(n), k)).collect(),
                None => Vec::new(),
            };
            (SignalDocument::Discrete(c.output), c.loss, rows)
        }
        SystemDescription::Continuous(s) => {
            let u = s
                .input
                .as_ref()
                .ok_or_else(|| CliError::Usage("simulate needs an \"input\" signal".into()))?;
            let c = wick_convolve_grid(&s.impulse, u)?;
            let y = &c.output;
            let rows = (0..y.len()).map(|i| row(y.time(i).to_string(), &y.samples()[i], k)).collect();
            (SignalDocument::Continuous(c.output), c.loss, rows)
        }
    };
    let mut out = envelope(cli);
    out["k"] = json!(k.get());
    out["truncation_loss"] = json!(loss);
    out["lossless"] = json!(loss.is_lossless());
    out["output"] = serde_json::to_value(&document).expect("signals serialize");
    write_json(&cli.output, &out)?;
    write_csv(&csv_path(&cli.output), &rows)?;
    Ok(0)
}

#[derive(Serialize)]
struct CsvRow {
    n_or_t: String,
    norm_k: f64,
    alpha0_re: f64,
    alpha0_im: f64,
}

fn row(n_or_t: String, f: &wicksys::chaos::ChaosExpansion, k: WeightOrder) -> CsvRow {
    let m = f.mean();
    CsvRow {
        n_or_t,
        norm_k: f.norm_k(k),
        alpha0_re: m.re,
        alpha0_im: m.im,
    }
}

fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<(), CliError> {
    let wrap = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    if rows.is_empty() {
        w.write_record(["n_or_t", "norm_k", "alpha0_re", "alpha0_im"]).map_err(wrap)?;
    }
    for r in rows {
        w.serialize(r).map_err(wrap)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn require_l(l: Option<WeightOrder>, criterion: CriterionArg) -> Result<WeightOrder, CliError> {
    l.ok_or_else(|| CliError::Usage(format!("criterion {criterion:?} needs the weight order \"l\" in the system").to_lowercase()))
}

fn certify(cli: &Cli) -> Result<u8, CliError> {
    let criterion = cli
        .criterion
        .ok_or_else(|| CliError::Usage("certify needs --criterion".into()))?;
    let system = load_system(cli)?;
    let mut report = match &system {
        SystemDescription::Discrete(s) => certify_discrete(cli, s, criterion)?,
        SystemDescription::Continuous(s) => certify_continuous(cli, s, criterion)?,
    };
    report.parameters.seed = Some(cli.seed);
    let mut out = envelope(cli);
    out["report"] = serde_json::to_value(&report).expect("reports serialize");
    write_json(&cli.output, &out)?;
    Ok(match report.verdict {
        Verdict::Certified => 0,
        Verdict::Refuted => 1,
        Verdict::Inconclusive => 4,
    })
}

fn certify_discrete(cli: &Cli, s: &DiscreteSystem, criterion: CriterionArg) -> Result<StabilityReport, CliError> {
    let h = &s.impulse;
    let k = s.k;
    let report = match criterion {
        CriterionArg::Bibo => {
            let mut r = bibo_sufficient(h, k, require_l(s.l, criterion)?, cli.tol)?;
            let probes = default_probes(h, k, cli.probes, cli.seed)?;
            r.absorb_lower(bibo_probe(h, k, &probes)?);
            r.decide(s.target_gain);
            r
        }
        CriterionArg::L1l2 => {
            let mut r = l1l2_certify(h, k, require_l(s.l, criterion)?, cli.tol)?;
            let probes = default_probes(h, k, cli.probes, cli.seed)?;
            r.absorb_lower(l1l2_probe(h, k, &probes)?);
            r.decide(s.target_gain);
            r
        }
        CriterionArg::Dissipative => {
            dissipativity_check(h, k, s.l, s.policy, s.n_time.unwrap_or(DEFAULT_N_TIME), cli.tol)?
        }
        CriterionArg::L2linf => {
            return Err(CliError::Usage("criterion l2linf applies to continuous systems".into()));
        }
    };
    Ok(report)
}

fn certify_continuous(cli: &Cli, s: &ContinuousSystem, criterion: CriterionArg) -> Result<StabilityReport, CliError> {
    let h = &s.impulse;
    let k = s.k;
    let mut report = match criterion {
        CriterionArg::Bibo => {
            let mut r = cont_bibo_sufficient(h, k, require_l(s.l, criterion)?, cli.tol, s.tail_bound)?;
            let probes = default_grid_probes(h, k, cli.probes, cli.seed)?;
            r.absorb_lower(cont_bibo_probe(h, k, &probes, DEFAULT_EPSILON)?);
            r
        }
        CriterionArg::L2linf => {
            let mut r = l2linf_certify(h, k, require_l(s.l, criterion)?, cli.tol, s.tail_bound)?;
            let probes = default_grid_probes(h, k, cli.probes, cli.seed)?;
            r.absorb_lower(l2linf_probe(h, k, &probes)?);
            r
        }
        CriterionArg::L1l2 | CriterionArg::Dissipative => {
            return Err(CliError::Usage(
                "criteria l1l2 and dissipative apply to discrete systems".into(),
            ));
        }
    };
    report.decide(s.target_gain);
    Ok(report)
}

/// Monte Carlo settings read from `--input`.
#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct McSettings {
    max_var: u32,
    max_degree: u32,
    samples: usize,
    threshold: f64,
    #[serde(default = "default_pairs")]
    wick_pairs: usize,
}

fn default_pairs() -> usize {
    8
}

fn mc_validate(cli: &Cli) -> Result<u8, CliError> {
    let mut settings: McSettings = serde_json::from_str(&read(&cli.input)?).map_err(wicksys::Error::from)?;
    if let Some(j) = cli.max_var {
        settings.max_var = j;
    }
    if let Some(d) = cli.max_degree {
        settings.max_degree = d;
    }
    if !(settings.threshold.is_finite() && settings.threshold > 0.0) {
        return Err(CliError::Usage("threshold must be positive".into()));
    }
    let policy = TruncationPolicy::new(settings.max_var, settings.max_degree)?;
    let ortho = orthogonality_suite(policy, settings.samples, cli.seed, settings.threshold)?;
    let wick = wick_expectation_suite(policy, settings.wick_pairs, settings.samples, cli.seed, settings.threshold)?;
    let failures = |rows: &[MomentCheck]| rows.iter().filter(|r| !r.pass).count();
    let failed = failures(&ortho) + failures(&wick);
    let mut out = envelope(cli);
    out["settings"] = json!(settings);
    out["failures"] = json!(failed);
    out["pass"] = json!(failed == 0);
    out["orthogonality"] = json!(ortho);
    out["wick_expectation"] = json!(wick);
    write_json(&cli.output, &out)?;
    Ok(if failed == 0 { 0 } else { 1 })
}
