//! Parameter sweeps over one or two axes with seeded replicates.

use std::fmt;

use rayon::prelude::*;

use super::run::{run_single, RunOutput};
use super::stats::{aggregate, SummaryRow};
use super::RunError;
use crate::metrics::MetricSet;
use crate::params::Params;
use crate::seed::derive_seed;

/// A sweepable parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisName {
    Q,
    PMin,
    PMax,
    NAgents,
}

impl AxisName {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "q" => Some(AxisName::Q),
            "pmin" | "p_min" => Some(AxisName::PMin),
            "pmax" | "p_max" => Some(AxisName::PMax),
            "n" | "n_agents" => Some(AxisName::NAgents),
            _ => None,
        }
    }

    fn get(self, p: &Params) -> f64 {
        match self {
            AxisName::Q => p.q,
            AxisName::PMin => p.p_min,
            AxisName::PMax => p.p_max,
            AxisName::NAgents => p.n_agents as f64,
        }
    }

    fn set(self, p: &mut Params, v: f64) {
        match self {
            AxisName::Q => p.q = v,
            AxisName::PMin => p.p_min = v,
            AxisName::PMax => p.p_max = v,
            AxisName::NAgents => p.n_agents = v.round() as usize,
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxisName::Q => "q",
            AxisName::PMin => "p_min",
            AxisName::PMax => "p_max",
            AxisName::NAgents => "n_agents",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

/// `target = factor * source`, applied after the axis values are set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub target: AxisName,
    pub factor: f64,
    pub source: AxisName,
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} * {}", self.target, self.factor, self.source)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Params,
    /// At most two; the first axis varies slowest.
    pub axes: Vec<Axis>,
    pub replicates: usize,
    pub couplings: Vec<Coupling>,
    pub metrics: MetricSet,
}

impl SweepSpec {
    pub fn single(base: Params, replicates: usize, metrics: MetricSet) -> Self {
        Self {
            base,
            axes: Vec::new(),
            replicates,
            couplings: Vec::new(),
            metrics,
        }
    }

    /// Parameters of every point, in row order. The seed is the base seed;
    /// replicate seeds are derived from it.
    pub fn points(&self) -> Vec<Params> {
        let mut points = vec![self.base.clone()];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.values.iter().map(move |&v| {
                        let mut q = p.clone();
                        axis.name.set(&mut q, v);
                        q
                    })
                })
                .collect();
        }
        for p in &mut points {
            for c in &self.couplings {
                let v = c.factor * c.source.get(p);
                c.target.set(p, v);
            }
        }
        points
    }
}

/// Failure of one (point, replicate) run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub point: usize,
    pub replicate: usize,
    pub seed: u64,
    pub message: String,
    /// True for runtime faults, false for invalid parameters at the point.
    pub runtime: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SummaryRow>,
    pub failures: Vec<RunFailure>,
}

impl SweepResult {
    pub fn has_runtime_failure(&self) -> bool {
        self.failures.iter().any(|f| f.runtime)
    }
}

/// Runs every `(point, replicate)` pair on a pool of `workers` threads.
/// Output depends only on `spec`, never on scheduling.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> SweepResult {
    let points = spec.points();
    let jobs: Vec<(usize, usize, Params)> = points
        .iter()
        .enumerate()
        .flat_map(|(pi, p)| {
            (0..spec.replicates).map(move |r| {
                let params = Params {
                    seed: derive_seed(p.seed, pi as u64, r as u64),
                    ..p.clone()
                };
                (pi, r, params)
            })
        })
        .collect();

    let execute = |jobs: &[(usize, usize, Params)]| -> Vec<Result<RunOutput, RunError>> {
        jobs.par_iter()
            .map(|(_, _, p)| run_single(p, spec.metrics))
            .collect()
    };
    let outcomes = match rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
    {
        Ok(pool) => pool.install(|| execute(&jobs)),
        Err(_) => jobs
            .iter()
            .map(|(_, _, p)| run_single(p, spec.metrics))
            .collect(),
    };

    let mut per_point: Vec<Vec<RunOutput>> = vec![Vec::new(); points.len()];
    let mut failures = Vec::new();
    for ((pi, r, params), outcome) in jobs.into_iter().zip(outcomes) {
        match outcome {
            Ok(out) => per_point[pi].push(out),
            Err(e) => failures.push(RunFailure {
                point: pi,
                replicate: r,
                seed: params.seed,
                message: e.to_string(),
                runtime: !matches!(e, RunError::Params(_)),
            }),
        }
    }
    let rows = points
        .iter()
        .zip(&per_point)
        .map(|(p, runs)| aggregate(p, runs))
        .collect();
    SweepResult { rows, failures }
}
