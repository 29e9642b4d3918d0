//! Spectral gap `lambda1 - lambda2` of the adjacency matrix by power
//! iteration with deflation.
//!
//! Both phases iterate on a shifted operator `A + cI` so that the wanted
//! eigenvalue is also the largest in magnitude: `c = 1` while finding
//! `lambda1`, and `c = lambda1` (which bounds every `|lambda_i|`) while
//! finding `lambda2` with the iterate kept orthogonal to the leading
//! eigenvector.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::csr::CsrGraph;
use crate::metrics::is_connected;
use crate::network::Network;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum SpectralError {
    #[error("spectral gap needs a connected graph")]
    NotConnected,
    #[error("spectral gap needs at least 2 agents, have {0}")]
    TooSmall(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOptions {
    /// Relative tolerance on successive eigenvalue estimates.
    pub tol: f64,
    pub max_iter: usize,
    /// Amplitude of the seeded perturbation added to the all-ones start.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 100_000,
            noise: 1e-3,
            seed: 0x5EED_F00D,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralResult {
    pub lambda1: f64,
    pub lambda2: f64,
    pub gap: f64,
    /// Total iterations over both phases.
    pub iterations: usize,
    pub converged: bool,
    /// Set when a round-off negative gap was clamped to zero.
    pub clamped: bool,
}

pub fn spectral_gap(net: &Network) -> Result<SpectralResult, SpectralError> {
    if net.len() < 2 {
        return Err(SpectralError::TooSmall(net.len()));
    }
    if !is_connected(net) {
        return Err(SpectralError::NotConnected);
    }
    spectral_gap_csr(&CsrGraph::from_network(net), &SpectralOptions::default())
}

/// Same as [`spectral_gap`] on a prepared snapshot. Connectivity is checked
/// from the snapshot itself.
pub fn spectral_gap_csr(
    csr: &CsrGraph,
    opts: &SpectralOptions,
) -> Result<SpectralResult, SpectralError> {
    let n = csr.len();
    if n < 2 {
        return Err(SpectralError::TooSmall(n));
    }
    let mut dist = vec![0u32; n];
    let mut queue = Vec::with_capacity(n);
    csr.bfs(0, None, &mut dist, &mut queue);
    if queue.len() != n {
        return Err(SpectralError::NotConnected);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..n)
            .map(|_| 1.0 + opts.noise * (2.0 * rng.gen::<f64>() - 1.0))
            .collect()
    };

    let mut x = start(&mut rng);
    let first = dominant(csr, &mut x, 1.0, None, opts);
    let lambda1 = first.value;
    let v1 = x;

    let mut y = start(&mut rng);
    let second = dominant(csr, &mut y, lambda1.max(1.0), Some(&v1), opts);
    let lambda2 = second.value;

    let mut gap = lambda1 - lambda2;
    let mut clamped = false;
    if gap < 0.0 && gap > -opts.tol * lambda1.abs().max(1.0) {
        gap = 0.0;
        clamped = true;
    }
    Ok(SpectralResult {
        lambda1,
        lambda2,
        gap,
        iterations: first.iterations + second.iterations,
        converged: first.converged && second.converged,
        clamped,
    })
}

struct Phase {
    value: f64,
    iterations: usize,
    converged: bool,
}

/// Power iteration on `A + shift I`, optionally restricted to the
/// orthogonal complement of the unit vector `deflate`. On return `x` holds
/// the normalised eigenvector estimate.
fn dominant(
    csr: &CsrGraph,
    x: &mut Vec<f64>,
    shift: f64,
    deflate: Option<&[f64]>,
    opts: &SpectralOptions,
) -> Phase {
    let n = csr.len();
    if let Some(v) = deflate {
        project_out(x, v);
    }
    normalize(x);
    let mut y = vec![0.0; n];
    let mut prev = f64::NAN;
    let mut prev_step = f64::NAN;
    let mut value = 0.0;
    for iter in 1..=opts.max_iter {
        matvec_shifted(csr, x, shift, &mut y);
        if let Some(v) = deflate {
            project_out(&mut y, v);
        }
        // Rayleigh quotient of the shifted operator at the unit vector x
        let rq: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        value = rq - shift;
        let norm = normalize(&mut y);
        std::mem::swap(x, &mut y);
        // relative to the shifted scale, which stays away from zero even
        // when the eigenvalue itself is 0
        let scale = rq.abs().max(shift.abs());
        if norm <= f64::EPSILON * scale {
            return Phase {
                value,
                iterations: iter,
                converged: true,
            };
        }
        let step = (value - prev).abs();
        // successive changes shrink geometrically once the iterate has
        // settled, so the distance left to travel is about step * r / (1 - r)
        let ratio = step / prev_step;
        let remaining = if step == 0.0 {
            0.0
        } else if ratio.is_finite() && ratio < 1.0 {
            step.max(step * ratio / (1.0 - ratio))
        } else {
            f64::INFINITY
        };
        if remaining <= opts.tol * scale {
            return Phase {
                value,
                iterations: iter,
                converged: true,
            };
        }
        prev_step = step;
        prev = value;
    }
    Phase {
        value,
        iterations: opts.max_iter,
        converged: false,
    }
}

fn matvec_shifted(csr: &CsrGraph, x: &[f64], shift: f64, out: &mut [f64]) {
    for (v, o) in out.iter_mut().enumerate() {
        let s: f64 = csr.neighbors(v).iter().map(|&w| x[w as usize]).sum();
        *o = s + shift * x[v];
    }
}

fn project_out(x: &mut [f64], v: &[f64]) {
    let dot: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
    for (a, b) in x.iter_mut().zip(v) {
        *a -= dot * b;
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 0.0 {
        for a in x.iter_mut() {
            *a /= norm;
        }
    }
    norm
}
