//! Aggregation of samples into summary rows.

use super::run::RunOutput;
use crate::metrics::{connectivity_transform, MetricsSample};
use crate::params::{ModelKind, Params};

/// Mean and standard error (sample standard deviation over `sqrt(count)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub count: usize,
}

impl MeanSe {
    pub fn of(values: &[f64]) -> Self {
        let count = values.len();
        if count == 0 {
            return Self {
                mean: f64::NAN,
                se: f64::NAN,
                count,
            };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let se = if count < 2 {
            f64::NAN
        } else {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (count - 1) as f64).sqrt() / (count as f64).sqrt()
        };
        Self { mean, se, count }
    }
}

/// One CSV row: a parameter point aggregated over all its samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub model: ModelKind,
    pub q: f64,
    pub n_agents: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub delta: f64,
    pub seed: u64,
    pub replicates: usize,
    pub samples: usize,
    /// Samples taken while disconnected; they count towards degree and
    /// power but not towards distance-type metrics.
    pub skipped: usize,
    pub phi: f64,
    pub neg_lg_one_minus_phi: f64,
    pub censored: bool,
    pub degree: MeanSe,
    pub power: MeanSe,
    pub avg_distance: MeanSe,
    pub diameter: MeanSe,
    pub rho: MeanSe,
    pub spectral_gap: MeanSe,
    pub delta_avg_distance: MeanSe,
    pub delta_diameter: MeanSe,
}

fn collect(samples: &[&MetricsSample], f: impl Fn(&MetricsSample) -> Option<f64>) -> MeanSe {
    let values: Vec<f64> = samples.iter().filter_map(|s| f(s)).collect();
    MeanSe::of(&values)
}

/// Pools every sample of `runs` (in the given order) into one row. `params`
/// supplies the identifying columns.
pub fn aggregate(params: &Params, runs: &[RunOutput]) -> SummaryRow {
    let samples: Vec<&MetricsSample> = runs.iter().flat_map(|r| r.samples.iter()).collect();
    let connected: u64 = runs.iter().map(|r| r.connected_steps).sum();
    let measured: u64 = runs.iter().map(|r| r.measured_steps).sum();
    let (phi, transformed, censored) = if measured == 0 {
        (f64::NAN, f64::NAN, false)
    } else {
        let phi = connected as f64 / measured as f64;
        let (t, c) = connectivity_transform(phi, measured);
        (phi, t, c)
    };
    SummaryRow {
        model: params.model,
        q: params.q,
        n_agents: params.n_agents,
        p_min: params.p_min,
        p_max: params.p_max,
        delta: params.delta,
        seed: params.seed,
        replicates: runs.len(),
        samples: samples.len(),
        skipped: samples.iter().filter(|s| !s.connected).count(),
        phi,
        neg_lg_one_minus_phi: transformed,
        censored,
        degree: collect(&samples, |s| Some(s.mean_degree)),
        power: collect(&samples, |s| Some(s.mean_power)),
        avg_distance: collect(&samples, |s| s.avg_distance),
        diameter: collect(&samples, |s| s.diameter),
        rho: collect(&samples, |s| s.rho),
        spectral_gap: collect(&samples, |s| s.spectral_gap),
        delta_avg_distance: collect(&samples, |s| s.delta_avg_distance),
        delta_diameter: collect(&samples, |s| s.delta_diameter),
    }
}
