//! Plain-text scenario configuration: `[section]` headers with
//! `key = value` lines, `#` comments, blank lines ignored.
//!
//! Schema (sections in any order):
//!
//! ```text
//! [oscillators]          # masses and bare angular frequencies
//! m_1 = 1.0
//! m_2 = 1.0
//! omega_1 = 1.0
//! omega_2 = 2.0
//!
//! [couplings]            # bilinear couplings
//! lambda_11 = 0.1
//! lambda_12 = 0.0
//! lambda_21 = 0.0
//! lambda_22 = 0.1
//!
//! [reservoir]
//! topology = distinct    # or: common
//! gamma_1 = 0.001        # distinct: gamma_1/gamma_2/T_1/T_2
//! gamma_2 = 0.001        # common:   gamma/T
//! T_1 = 1000.0
//! T_2 = 1000.0
//! cutoff_enabled = false # optional; cutoff = Ω^C when enabled
//!
//! [state]
//! kind = psi1            # psi1 | psi2 | psi3 | cat
//! sigma_ref = 1.0        # optional magnitude overrides
//!
//! [time]
//! t_max_scaled = 3e-5    # γ₁·t_max of curve outputs
//! samples = 200
//!
//! [output]
//! dir = out
//!
//! [sweep]                # only read by the sweep subcommand
//! axis = lambda_22
//! values = 0.0, 0.1, 0.5
//! times_scaled = 1e-5, 2e-5, 3e-5
//! ```
//!
//! Serialization uses the shortest round-trip float representation, so
//! parse ∘ serialize ∘ parse is the identity on every scenario.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::decoherence::{StateKind, StateMagnitudes};
use crate::model::{CouplingParams, CutoffSpec, ModelParams, OscillatorParams, ReservoirSpec};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing section [{0}]")]
    MissingSection(&'static str),
    #[error("missing key `{key}` in section [{section}]")]
    MissingKey { section: &'static str, key: &'static str },
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("invalid sweep axis `{0}` (expected lambda_11, lambda_12, lambda_21, lambda_22, gamma or T)")]
    InvalidAxis(String),
}

/// A full run description: model, benchmark state, time grid and output
/// location.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub model: ModelParams,
    pub state_kind: StateKind,
    pub magnitudes: StateMagnitudes,
    /// γ₁·t_max of curve outputs.
    pub t_max_scaled: f64,
    pub samples: usize,
    pub out_dir: String,
}

impl Scenario {
    /// The benchmark scenario used when no config file is given:
    /// the standard model with λ₁₁ = λ₂₂ = 0.1 over distinct reservoirs.
    pub fn default_scenario() -> Self {
        Scenario {
            model: crate::decoherence::standard_model(
                false,
                crate::decoherence::CouplingForm::QqPp.couplings(0.1),
            ),
            state_kind: StateKind::Psi1,
            magnitudes: StateMagnitudes::defaults(),
            t_max_scaled: 3e-5,
            samples: 200,
            out_dir: "out".to_string(),
        }
    }
}

/// One scalar sweep over a model parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub times_scaled: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Lambda11,
    Lambda12,
    Lambda21,
    Lambda22,
    Gamma,
    Temperature,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Lambda11 => "lambda_11",
            SweepAxis::Lambda12 => "lambda_12",
            SweepAxis::Lambda21 => "lambda_21",
            SweepAxis::Lambda22 => "lambda_22",
            SweepAxis::Gamma => "gamma",
            SweepAxis::Temperature => "T",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        Ok(match s {
            "lambda_11" => SweepAxis::Lambda11,
            "lambda_12" => SweepAxis::Lambda12,
            "lambda_21" => SweepAxis::Lambda21,
            "lambda_22" => SweepAxis::Lambda22,
            "gamma" => SweepAxis::Gamma,
            "T" => SweepAxis::Temperature,
            other => return Err(ConfigError::InvalidAxis(other.to_string())),
        })
    }

    /// The scenario's model with this axis set to `value`.
    pub fn apply(&self, model: &ModelParams, value: f64) -> ModelParams {
        let mut m = model.clone();
        match self {
            SweepAxis::Lambda11 => m.couplings.lambda_11 = value,
            SweepAxis::Lambda12 => m.couplings.lambda_12 = value,
            SweepAxis::Lambda21 => m.couplings.lambda_21 = value,
            SweepAxis::Lambda22 => m.couplings.lambda_22 = value,
            SweepAxis::Gamma => match &mut m.reservoir {
                ReservoirSpec::Distinct { gamma_1, gamma_2, .. } => {
                    *gamma_1 = value;
                    *gamma_2 = value;
                }
                ReservoirSpec::Common { gamma, .. } => *gamma = value,
            },
            SweepAxis::Temperature => match &mut m.reservoir {
                ReservoirSpec::Distinct { t_1, t_2, .. } => {
                    *t_1 = value;
                    *t_2 = value;
                }
                ReservoirSpec::Common { t, .. } => *t = value,
            },
        }
        m
    }
}

type Sections = BTreeMap<String, BTreeMap<String, (usize, String)>>;

fn split_sections(text: &str) -> Result<Sections, ConfigError> {
    let mut sections: Sections = BTreeMap::new();
    let mut current = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if body.is_empty() {
            continue;
        }
        if body.starts_with('[') {
            if !body.ends_with(']') || body.len() < 3 {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("malformed section header `{body}`"),
                });
            }
            current = body[1..body.len() - 1].trim().to_string();
            sections.entry(current.clone()).or_default();
            continue;
        }
        let Some(eq) = body.find('=') else {
            return Err(ConfigError::Parse {
                line,
                message: format!("expected `key = value`, got `{body}`"),
            });
        };
        if current.is_empty() {
            return Err(ConfigError::Parse {
                line,
                message: "key outside of any [section]".to_string(),
            });
        }
        let key = body[..eq].trim().to_string();
        let value = body[eq + 1..].trim().to_string();
        sections
            .get_mut(&current)
            .unwrap()
            .insert(key, (line, value));
    }
    Ok(sections)
}

fn require<'a>(
    sections: &'a Sections,
    section: &'static str,
) -> Result<&'a BTreeMap<String, (usize, String)>, ConfigError> {
    sections
        .get(section)
        .ok_or(ConfigError::MissingSection(section))
}

fn get_f64(
    map: &BTreeMap<String, (usize, String)>,
    section: &'static str,
    key: &'static str,
) -> Result<f64, ConfigError> {
    let (_, raw) = map
        .get(key)
        .ok_or(ConfigError::MissingKey { section, key })?;
    raw.parse::<f64>().map_err(|e| ConfigError::InvalidValue {
        key: key.to_string(),
        message: format!("`{raw}`: {e}"),
    })
}

fn get_f64_opt(
    map: &BTreeMap<String, (usize, String)>,
    key: &str,
) -> Result<Option<f64>, ConfigError> {
    match map.get(key) {
        None => Ok(None),
        Some((_, raw)) => raw
            .parse::<f64>()
            .map(Some)
            .map_err(|e| ConfigError::InvalidValue {
                key: key.to_string(),
                message: format!("`{raw}`: {e}"),
            }),
    }
}

fn get_bool_opt(
    map: &BTreeMap<String, (usize, String)>,
    key: &str,
) -> Result<Option<bool>, ConfigError> {
    match map.get(key) {
        None => Ok(None),
        Some((_, raw)) => match raw.as_str() {
            "true" => Ok(Some(true)),
            "false" => Ok(Some(false)),
            other => Err(ConfigError::InvalidValue {
                key: key.to_string(),
                message: format!("expected true/false, got `{other}`"),
            }),
        },
    }
}

fn get_f64_list(
    map: &BTreeMap<String, (usize, String)>,
    section: &'static str,
    key: &'static str,
) -> Result<Vec<f64>, ConfigError> {
    let (_, raw) = map
        .get(key)
        .ok_or(ConfigError::MissingKey { section, key })?;
    raw.split(',')
        .map(|v| {
            v.trim().parse::<f64>().map_err(|e| ConfigError::InvalidValue {
                key: key.to_string(),
                message: format!("`{v}`: {e}"),
            })
        })
        .collect()
}

/// Parses a scenario from config text.
pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    let sections = split_sections(text)?;

    let osc = require(&sections, "oscillators")?;
    let oscillators = OscillatorParams {
        m_1: get_f64(osc, "oscillators", "m_1")?,
        m_2: get_f64(osc, "oscillators", "m_2")?,
        omega_1: get_f64(osc, "oscillators", "omega_1")?,
        omega_2: get_f64(osc, "oscillators", "omega_2")?,
    };

    let cpl = require(&sections, "couplings")?;
    let couplings = CouplingParams {
        lambda_11: get_f64(cpl, "couplings", "lambda_11")?,
        lambda_12: get_f64(cpl, "couplings", "lambda_12")?,
        lambda_21: get_f64(cpl, "couplings", "lambda_21")?,
        lambda_22: get_f64(cpl, "couplings", "lambda_22")?,
    };

    let res = require(&sections, "reservoir")?;
    let topology = res
        .get("topology")
        .map(|(_, v)| v.as_str())
        .ok_or(ConfigError::MissingKey {
            section: "reservoir",
            key: "topology",
        })?;
    let cutoff = match (get_bool_opt(res, "cutoff_enabled")?, get_f64_opt(res, "cutoff")?) {
        (None, None) => None,
        (enabled, omega_c) => Some(CutoffSpec {
            enabled: enabled.unwrap_or(false),
            omega_c: omega_c.unwrap_or(0.0),
        }),
    };
    let reservoir = match topology {
        "distinct" => ReservoirSpec::Distinct {
            gamma_1: get_f64(res, "reservoir", "gamma_1")?,
            gamma_2: get_f64(res, "reservoir", "gamma_2")?,
            t_1: get_f64(res, "reservoir", "T_1")?,
            t_2: get_f64(res, "reservoir", "T_2")?,
            cutoff,
        },
        "common" => ReservoirSpec::Common {
            gamma: get_f64(res, "reservoir", "gamma")?,
            t: get_f64(res, "reservoir", "T")?,
            cutoff,
        },
        other => {
            return Err(ConfigError::InvalidValue {
                key: "topology".to_string(),
                message: format!("expected distinct or common, got `{other}`"),
            })
        }
    };

    let state = require(&sections, "state")?;
    let kind_raw = state
        .get("kind")
        .map(|(_, v)| v.as_str())
        .ok_or(ConfigError::MissingKey {
            section: "state",
            key: "kind",
        })?;
    let state_kind = StateKind::parse(kind_raw).ok_or_else(|| ConfigError::InvalidValue {
        key: "kind".to_string(),
        message: format!("expected psi1/psi2/psi3/cat, got `{kind_raw}`"),
    })?;
    let sigma_ref = get_f64_opt(state, "sigma_ref")?.unwrap_or(1.0);
    let mut magnitudes = StateMagnitudes::scaled(sigma_ref);
    if let Some(v) = get_f64_opt(state, "q_large")? {
        magnitudes.q_large = v;
    }
    if let Some(v) = get_f64_opt(state, "q_small")? {
        magnitudes.q_small = v;
    }
    if let Some(v) = get_f64_opt(state, "sigma_psi3")? {
        magnitudes.sigma_psi3 = v;
    }
    if let Some(v) = get_f64_opt(state, "q1_psi3")? {
        magnitudes.q1_psi3 = v;
    }
    if let Some(v) = get_f64_opt(state, "q2_psi3")? {
        magnitudes.q2_psi3 = v;
    }
    if let Some(v) = get_f64_opt(state, "cat_q")? {
        magnitudes.cat_q = v;
    }
    if let Some(v) = get_f64_opt(state, "cat_sigma")? {
        magnitudes.cat_sigma = v;
    }

    let time = require(&sections, "time")?;
    let t_max_scaled = get_f64(time, "time", "t_max_scaled")?;
    let samples = get_f64(time, "time", "samples")? as usize;

    let out_dir = sections
        .get("output")
        .and_then(|m| m.get("dir"))
        .map(|(_, v)| v.clone())
        .unwrap_or_else(|| "out".to_string());

    Ok(Scenario {
        model: ModelParams {
            oscillators,
            couplings,
            reservoir,
        },
        state_kind,
        magnitudes,
        t_max_scaled,
        samples,
        out_dir,
    })
}

/// Parses the optional `[sweep]` section.
pub fn parse_sweep(text: &str) -> Result<Option<SweepSpec>, ConfigError> {
    let sections = split_sections(text)?;
    let Some(sweep) = sections.get("sweep") else {
        return Ok(None);
    };
    let axis_raw = sweep
        .get("axis")
        .map(|(_, v)| v.as_str())
        .ok_or(ConfigError::MissingKey {
            section: "sweep",
            key: "axis",
        })?;
    Ok(Some(SweepSpec {
        axis: SweepAxis::parse(axis_raw)?,
        values: get_f64_list(sweep, "sweep", "values")?,
        times_scaled: get_f64_list(sweep, "sweep", "times_scaled")?,
    }))
}

fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Canonical serialization; `parse_scenario(serialize_scenario(s)) == s`.
pub fn serialize_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    let o = &s.model.oscillators;
    let _ = writeln!(out, "[oscillators]");
    let _ = writeln!(out, "m_1 = {}", fmt_f64(o.m_1));
    let _ = writeln!(out, "m_2 = {}", fmt_f64(o.m_2));
    let _ = writeln!(out, "omega_1 = {}", fmt_f64(o.omega_1));
    let _ = writeln!(out, "omega_2 = {}", fmt_f64(o.omega_2));
    let c = &s.model.couplings;
    let _ = writeln!(out, "\n[couplings]");
    let _ = writeln!(out, "lambda_11 = {}", fmt_f64(c.lambda_11));
    let _ = writeln!(out, "lambda_12 = {}", fmt_f64(c.lambda_12));
    let _ = writeln!(out, "lambda_21 = {}", fmt_f64(c.lambda_21));
    let _ = writeln!(out, "lambda_22 = {}", fmt_f64(c.lambda_22));
    let _ = writeln!(out, "\n[reservoir]");
    match &s.model.reservoir {
        ReservoirSpec::Distinct {
            gamma_1,
            gamma_2,
            t_1,
            t_2,
            cutoff,
        } => {
            let _ = writeln!(out, "topology = distinct");
            let _ = writeln!(out, "gamma_1 = {}", fmt_f64(*gamma_1));
            let _ = writeln!(out, "gamma_2 = {}", fmt_f64(*gamma_2));
            let _ = writeln!(out, "T_1 = {}", fmt_f64(*t_1));
            let _ = writeln!(out, "T_2 = {}", fmt_f64(*t_2));
            if let Some(cut) = cutoff {
                let _ = writeln!(out, "cutoff_enabled = {}", cut.enabled);
                let _ = writeln!(out, "cutoff = {}", fmt_f64(cut.omega_c));
            }
        }
        ReservoirSpec::Common { gamma, t, cutoff } => {
            let _ = writeln!(out, "topology = common");
            let _ = writeln!(out, "gamma = {}", fmt_f64(*gamma));
            let _ = writeln!(out, "T = {}", fmt_f64(*t));
            if let Some(cut) = cutoff {
                let _ = writeln!(out, "cutoff_enabled = {}", cut.enabled);
                let _ = writeln!(out, "cutoff = {}", fmt_f64(cut.omega_c));
            }
        }
    }
    let m = &s.magnitudes;
    let _ = writeln!(out, "\n[state]");
    let _ = writeln!(out, "kind = {}", s.state_kind.name());
    let _ = writeln!(out, "sigma_ref = {}", fmt_f64(m.sigma_ref));
    let _ = writeln!(out, "q_large = {}", fmt_f64(m.q_large));
    let _ = writeln!(out, "q_small = {}", fmt_f64(m.q_small));
    let _ = writeln!(out, "sigma_psi3 = {}", fmt_f64(m.sigma_psi3));
    let _ = writeln!(out, "q1_psi3 = {}", fmt_f64(m.q1_psi3));
    let _ = writeln!(out, "q2_psi3 = {}", fmt_f64(m.q2_psi3));
    let _ = writeln!(out, "cat_q = {}", fmt_f64(m.cat_q));
    let _ = writeln!(out, "cat_sigma = {}", fmt_f64(m.cat_sigma));
    let _ = writeln!(out, "\n[time]");
    let _ = writeln!(out, "t_max_scaled = {}", fmt_f64(s.t_max_scaled));
    let _ = writeln!(out, "samples = {}", s.samples);
    let _ = writeln!(out, "\n[output]");
    let _ = writeln!(out, "dir = {}", s.out_dir);
    out
}
