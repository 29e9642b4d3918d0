//! Experiment configuration.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// How deficit agents choose link partners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    /// Every attachment attempt flips its own coin: random partner with
    /// probability `q`, closest feasible partner otherwise.
    A,
    /// Each agent is born either random-attaching (probability `q`) or
    /// local-attaching and keeps that strategy for life.
    B,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::A => "A",
            ModelKind::B => "B",
        })
    }
}

impl FromStr for ModelKind {
    type Err = ParamsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(ModelKind::A),
            "B" | "b" => Ok(ModelKind::B),
            other => Err(ParamsError::UnknownModel(other.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("unknown model '{0}', expected A or B")]
    UnknownModel(String),
    #[error("n_agents must be at least 2, got {0}")]
    TooFewAgents(usize),
    #[error("power budget must satisfy 0 < p_min <= p_max, got p_min={p_min} p_max={p_max}")]
    Budget { p_min: f64, p_max: f64 },
    #[error("q must lie in [0, 1], got {0}")]
    Q(f64),
    #[error("delta must be a finite non-negative exponent, got {0}")]
    Delta(f64),
    #[error("sample_interval must be at least 1")]
    SampleInterval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub n_agents: usize,
    /// Path-loss exponent.
    pub delta: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub model: ModelKind,
    /// Weight of random attachment: per-attempt probability under model A,
    /// population fraction of random-attaching agents under model B.
    pub q: f64,
    pub seed: u64,
    pub equil_steps: u64,
    pub measure_steps: u64,
    pub sample_interval: u64,
    pub robustness_trials: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            n_agents: 1000,
            delta: 2.0,
            p_min: 1.0,
            p_max: 2.0,
            model: ModelKind::A,
            q: 0.1,
            seed: 1,
            equil_steps: 100_000,
            measure_steps: 100_000,
            sample_interval: 100,
            robustness_trials: 10,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.n_agents < 2 {
            return Err(ParamsError::TooFewAgents(self.n_agents));
        }
        if !(self.p_min > 0.0 && self.p_min <= self.p_max && self.p_max.is_finite()) {
            return Err(ParamsError::Budget {
                p_min: self.p_min,
                p_max: self.p_max,
            });
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(ParamsError::Q(self.q));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(ParamsError::Delta(self.delta));
        }
        if self.sample_interval == 0 {
            return Err(ParamsError::SampleInterval);
        }
        Ok(())
    }

    /// `(key, value)` pairs for every field, in a fixed order. Floats use the
    /// shortest representation that parses back to the same bits.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("model", self.model.to_string()),
            ("n_agents", self.n_agents.to_string()),
            ("delta", self.delta.to_string()),
            ("p_min", self.p_min.to_string()),
            ("p_max", self.p_max.to_string()),
            ("q", self.q.to_string()),
            ("seed", self.seed.to_string()),
            ("equil_steps", self.equil_steps.to_string()),
            ("measure_steps", self.measure_steps.to_string()),
            ("sample_interval", self.sample_interval.to_string()),
            ("robustness_trials", self.robustness_trials.to_string()),
        ]
    }
}
