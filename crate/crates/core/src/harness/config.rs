//! Flat `key = value` configuration with command-line overrides.
//!
//! ```text
//! # comment
//! model = B
//! n = 1000
//! q = 0, 0.05, 0.1, 0.2      # a list makes q a sweep axis
//! pmin = 0.25, 0.5, 1
//! couple = pmax = 2 * pmin
//! replicates = 5
//! ```
//!
//! Lists are accepted for `q`, `n`, `pmin` and `pmax`; at most two keys may
//! be lists. Later assignments override earlier ones, except `couple`,
//! which accumulates.

use std::collections::BTreeMap;

use thiserror::Error;

use super::sweep::{Axis, AxisName, Coupling, SweepSpec};
use crate::metrics::MetricSet;
use crate::params::{ModelKind, Params};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("invalid value '{value}' for {key}: {reason}")]
    Value {
        key: String,
        value: String,
        reason: String,
    },
    #[error("at most two sweep axes are supported, got {0}")]
    TooManyAxes(usize),
    #[error("{0} is a list, but this command runs a single parameter point")]
    UnexpectedAxis(String),
    #[error(transparent)]
    Params(#[from] crate::params::ParamsError),
}

/// Canonical keys in output order.
const KEYS: [&str; 13] = [
    "model",
    "n",
    "q",
    "pmin",
    "pmax",
    "delta",
    "seed",
    "equil",
    "measure",
    "sample_interval",
    "trials",
    "replicates",
    "metrics",
];

const AXIS_KEYS: [&str; 4] = ["n", "q", "pmin", "pmax"];

fn canonical(key: &str) -> Option<&'static str> {
    let key = key.trim().trim_start_matches("--");
    let canon = match key {
        "n_agents" => "n",
        "p_min" => "pmin",
        "p_max" => "pmax",
        "equil_steps" => "equil",
        "measure_steps" => "measure",
        "sample-interval" => "sample_interval",
        "robustness_trials" => "trials",
        "couple" => return Some("couple"),
        other => other,
    };
    KEYS.iter().copied().find(|k| *k == canon)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<&'static str, String>,
    couplings: Vec<String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = Config::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: no + 1,
                    message: format!("expected 'key = value', got '{line}'"),
                });
            };
            config.set(key, value).map_err(|e| ConfigError::Syntax {
                line: no + 1,
                message: e.to_string(),
            })?;
        }
        Ok(config)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let canon =
            canonical(key).ok_or_else(|| ConfigError::UnknownKey(key.trim().to_string()))?;
        let value = value.trim().to_string();
        if canon == "couple" {
            parse_coupling(&value)?;
            self.couplings.push(value);
        } else {
            self.values.insert(canon, value);
        }
        Ok(())
    }

    /// `key = value` lines describing the whole configuration.
    pub fn render(&self) -> Vec<String> {
        let mut out: Vec<String> = KEYS
            .iter()
            .filter_map(|k| self.values.get(k).map(|v| format!("{k} = {v}")))
            .collect();
        out.extend(self.couplings.iter().map(|c| format!("couple = {c}")));
        out
    }

    pub fn to_sweep_spec(&self) -> Result<SweepSpec, ConfigError> {
        let mut base = Params::default();
        let mut axes = Vec::new();
        for key in KEYS {
            let Some(raw) = self.values.get(key) else {
                continue;
            };
            let items: Vec<&str> = raw.split(',').map(str::trim).collect();
            if items.len() > 1 || (AXIS_KEYS.contains(&key) && raw.contains(',')) {
                if !AXIS_KEYS.contains(&key) {
                    return Err(value_err(
                        key,
                        raw,
                        "lists are only allowed for n, q, pmin, pmax",
                    ));
                }
                let values = items
                    .iter()
                    .map(|v| parse_number(key, v))
                    .collect::<Result<Vec<f64>, _>>()?;
                if key == "n" && values.iter().any(|v| v.fract() != 0.0 || *v < 0.0) {
                    return Err(value_err(key, raw, "agent counts must be whole numbers"));
                }
                axes.push(Axis {
                    name: AxisName::parse(key).unwrap(),
                    values,
                });
                continue;
            }
            apply_scalar(&mut base, key, raw)?;
        }
        if axes.len() > 2 {
            return Err(ConfigError::TooManyAxes(axes.len()));
        }
        let replicates = match self.values.get("replicates") {
            Some(v) => parse_int("replicates", v)? as usize,
            None => 5,
        };
        let metrics = match self.values.get("metrics").map(String::as_str) {
            None | Some("full") => MetricSet::Full,
            Some("basic") => MetricSet::Basic,
            Some(other) => return Err(value_err("metrics", other, "expected full or basic")),
        };
        let couplings = self
            .couplings
            .iter()
            .map(|c| parse_coupling(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SweepSpec {
            base,
            axes,
            replicates,
            couplings,
            metrics,
        })
    }

    /// The single point this configuration describes, with couplings
    /// applied. Lists are rejected.
    pub fn to_params(&self) -> Result<(Params, MetricSet), ConfigError> {
        let spec = self.to_sweep_spec()?;
        if let Some(axis) = spec.axes.first() {
            return Err(ConfigError::UnexpectedAxis(axis.name.to_string()));
        }
        let params = spec.points().remove(0);
        params.validate()?;
        Ok((params, spec.metrics))
    }
}

fn value_err(key: &str, value: &str, reason: &str) -> ConfigError {
    ConfigError::Value {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

fn parse_number(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| value_err(key, v, "expected a number"))
}

fn parse_int(key: &str, v: &str) -> Result<u64, ConfigError> {
    v.parse::<u64>()
        .map_err(|_| value_err(key, v, "expected a non-negative integer"))
}

fn apply_scalar(p: &mut Params, key: &'static str, v: &str) -> Result<(), ConfigError> {
    match key {
        "model" => p.model = v.parse::<ModelKind>()?,
        "n" => p.n_agents = parse_int(key, v)? as usize,
        "q" => p.q = parse_number(key, v)?,
        "pmin" => p.p_min = parse_number(key, v)?,
        "pmax" => p.p_max = parse_number(key, v)?,
        "delta" => p.delta = parse_number(key, v)?,
        "seed" => p.seed = parse_int(key, v)?,
        "equil" => p.equil_steps = parse_int(key, v)?,
        "measure" => p.measure_steps = parse_int(key, v)?,
        "sample_interval" => p.sample_interval = parse_int(key, v)?,
        "trials" => p.robustness_trials = parse_int(key, v)? as usize,
        // handled by the caller
        "replicates" | "metrics" => {}
        _ => return Err(ConfigError::UnknownKey(key.to_string())),
    }
    Ok(())
}

/// `target = factor * source` or `target = source`.
fn parse_coupling(text: &str) -> Result<Coupling, ConfigError> {
    let bad = |reason: &str| value_err("couple", text, reason);
    let (target, expr) = text
        .split_once('=')
        .ok_or_else(|| bad("expected 'target = factor * source'"))?;
    let target = AxisName::parse(target).ok_or_else(|| bad("unknown target parameter"))?;
    let (factor, source) = match expr.split_once('*') {
        Some((a, b)) => match (a.trim().parse::<f64>(), AxisName::parse(b)) {
            (Ok(f), Some(s)) => (f, s),
            _ => match (b.trim().parse::<f64>(), AxisName::parse(a)) {
                (Ok(f), Some(s)) => (f, s),
                _ => return Err(bad("expected 'factor * source'")),
            },
        },
        None => (
            1.0,
            AxisName::parse(expr).ok_or_else(|| bad("unknown source parameter"))?,
        ),
    };
    if target == source {
        return Err(bad("a parameter cannot be coupled to itself"));
    }
    Ok(Coupling {
        target,
        factor,
        source,
    })
}
