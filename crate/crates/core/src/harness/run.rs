use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::RunError;
use crate::churn::SimState;
use crate::metrics::{self, MetricSet, MetricsSample};
use crate::params::Params;
use crate::seed::sample_seed;

/// Raw outcome of one replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub params: Params,
    pub samples: Vec<MetricsSample>,
    /// Measurement-window steps after which the graph was connected.
    pub connected_steps: u64,
    pub measured_steps: u64,
    /// Largest relative ledger deviation found at any sample.
    pub worst_ledger_deviation: f64,
}

/// Bootstrap, `equil_steps` unmeasured steps, then `measure_steps` steps
/// with connectivity checked after every step and a full sample every
/// `sample_interval` steps. The ledger is verified at every sample.
pub fn run_single(params: &Params, set: MetricSet) -> Result<RunOutput, RunError> {
    let (output, _) = run_with_state(params, set)?;
    Ok(output)
}

/// [`run_single`] that also hands back the final state.
pub fn run_with_state(params: &Params, set: MetricSet) -> Result<(RunOutput, SimState), RunError> {
    let mut state = SimState::bootstrap(params.clone())?;
    for _ in 0..params.equil_steps {
        state.churn_step()?;
    }
    let mut samples = Vec::new();
    let mut connected_steps = 0;
    let mut worst = 0.0f64;
    for t in 1..=params.measure_steps {
        state.churn_step()?;
        if metrics::is_connected(&state.net) {
            connected_steps += 1;
        }
        if t % params.sample_interval == 0 {
            worst = worst.max(state.net.verify_ledger()?);
            let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(params.seed, samples.len() as u64));
            samples.push(metrics::measure(
                &state.net,
                state.step(),
                set,
                params.robustness_trials,
                &mut rng,
            ));
        }
    }
    Ok((
        RunOutput {
            params: params.clone(),
            samples,
            connected_steps,
            measured_steps: params.measure_steps,
            worst_ledger_deviation: worst,
        },
        state,
    ))
}
