//! Structural measurements on a network snapshot.
//!
//! Distance-based quantities are defined on connected snapshots only. The
//! one exception is the after-deletion state inside [`robustness_deltas`],
//! where the average runs over still-connected pairs and the diameter over
//! the largest remaining component.

use rand::Rng;
use thiserror::Error;

use crate::csr::{CsrGraph, UNREACHED};
use crate::network::{AgentId, Network};
use crate::spectral::{self, SpectralOptions};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum MetricsError {
    #[error("graph is not connected")]
    Disconnected,
    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
    #[error("need at least {needed} agents, have {have}")]
    TooSmall { needed: usize, have: usize },
}

/// True iff a single BFS reaches every living agent. Vacuously true for
/// zero or one agent.
pub fn is_connected(net: &Network) -> bool {
    let n = net.len();
    let Some(start) = net.ids().next() else {
        return true;
    };
    let mut seen = vec![false; net.id_bound()];
    let mut stack = vec![start];
    seen[start.index()] = true;
    let mut reached = 1;
    while let Some(u) = stack.pop() {
        for link in net.links(u).unwrap() {
            let w = link.to.index();
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                stack.push(link.to);
            }
        }
    }
    reached == n
}

/// Hop counts from `source`, indexed by [`AgentId::index`]. `None` marks
/// agents that are unreachable or not alive.
pub fn hop_distances(net: &Network, source: AgentId) -> Result<Vec<Option<u32>>, MetricsError> {
    let csr = CsrGraph::from_network(net);
    let s = csr
        .dense_index(source)
        .ok_or(MetricsError::UnknownAgent(source))?;
    let mut dist = vec![UNREACHED; csr.len()];
    let mut queue = Vec::new();
    csr.bfs(s, None, &mut dist, &mut queue);
    let mut out = vec![None; net.id_bound()];
    for (k, &d) in dist.iter().enumerate() {
        if d != UNREACHED {
            out[csr.ids[k].index()] = Some(d);
        }
    }
    Ok(out)
}

/// Power-efficiency ratio with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rho {
    pub value: f64,
    /// Pairs entering the average.
    pub pairs: u64,
    /// Pairs at identical positions, left out because their direct power is zero.
    pub coincident_pairs: u64,
}

/// Average distance, diameter and power-efficiency ratio from one sweep of
/// per-source searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSummary {
    pub avg_distance: f64,
    pub diameter: u32,
    pub rho: Rho,
}

/// `(d_avg, d_max)` over all unordered pairs of a connected network.
pub fn avg_distance_and_diameter(net: &Network) -> Result<(f64, u32), MetricsError> {
    let csr = CsrGraph::from_network(net);
    let s = distance_summary(&csr)?;
    Ok((s.avg_distance, s.diameter))
}

/// Pair-averaged ratio of the summed link power along the route to the
/// power of a direct link. The route between two agents is a minimum-hop
/// path; among those, the one with the least summed power.
pub fn power_efficiency_rho(net: &Network) -> Result<Rho, MetricsError> {
    let csr = CsrGraph::from_network(net);
    Ok(distance_summary(&csr)?.rho)
}

/// Computes every distance-based quantity in one pass of `n` searches.
///
/// Pair `(i, j)` with `i < j` (dense order) contributes the route power
/// summed outward from `i`. Per-source contributions are summed in
/// ascending `j`, then the per-source partials in ascending `i`.
pub fn distance_summary(csr: &CsrGraph) -> Result<DistanceSummary, MetricsError> {
    let n = csr.len();
    if n < 2 {
        return Err(MetricsError::TooSmall { needed: 2, have: n });
    }
    let mut dist = vec![UNREACHED; n];
    let mut best = vec![0.0; n];
    let mut queue = Vec::with_capacity(n);
    let mut hop_sum: u64 = 0;
    let mut diameter = 0u32;
    let mut rho_sum = 0.0;
    let mut pairs = 0u64;
    let mut coincident = 0u64;
    for s in 0..n {
        csr.bfs_min_power(s, &mut dist, &mut best, &mut queue);
        if queue.len() != n {
            return Err(MetricsError::Disconnected);
        }
        let mut partial = 0.0;
        for t in s + 1..n {
            hop_sum += dist[t] as u64;
            diameter = diameter.max(dist[t]);
            let direct = csr.direct_power(s, t);
            if direct == 0.0 {
                coincident += 1;
            } else {
                partial += best[t] / direct;
                pairs += 1;
            }
        }
        rho_sum += partial;
    }
    let n_pairs = (n as u64) * (n as u64 - 1) / 2;
    let value = if pairs == 0 {
        0.0
    } else {
        rho_sum / pairs as f64
    };
    Ok(DistanceSummary {
        avg_distance: hop_sum as f64 / n_pairs as f64,
        diameter,
        rho: Rho {
            value,
            pairs,
            coincident_pairs: coincident,
        },
    })
}

/// Average distance and diameter after deleting dense node `removed`,
/// under the still-connected-pairs / largest-component convention.
fn after_deletion(
    csr: &CsrGraph,
    removed: usize,
    dist: &mut [u32],
    queue: &mut Vec<u32>,
) -> (f64, u32) {
    let n = csr.len();
    // components of the remainder; the largest wins, ties to the one
    // holding the smallest index
    let mut comp = vec![u32::MAX; n];
    let mut sizes: Vec<usize> = Vec::new();
    for v in 0..n {
        if v == removed || comp[v] != u32::MAX {
            continue;
        }
        csr.bfs(v, Some(removed), dist, queue);
        let label = sizes.len() as u32;
        for &w in queue.iter() {
            comp[w as usize] = label;
        }
        sizes.push(queue.len());
    }
    let mut largest = 0u32;
    for (label, &size) in sizes.iter().enumerate() {
        if size > sizes[largest as usize] {
            largest = label as u32;
        }
    }

    let mut hop_sum: u64 = 0;
    let mut connected_pairs: u64 = 0;
    let mut diameter = 0u32;
    for (s, &label) in comp.iter().enumerate() {
        if s == removed {
            continue;
        }
        csr.bfs(s, Some(removed), dist, queue);
        for &t in queue.iter().skip(1) {
            let t = t as usize;
            if t > s {
                hop_sum += dist[t] as u64;
                connected_pairs += 1;
            }
        }
        if label == largest {
            if let Some(&last) = queue.last() {
                diameter = diameter.max(dist[last as usize]);
            }
        }
    }
    let avg = if connected_pairs == 0 {
        0.0
    } else {
        hop_sum as f64 / connected_pairs as f64
    };
    (avg, diameter)
}

/// Mean change `(delta_avg_distance, delta_diameter)` over `trials` distinct
/// uniformly chosen single-node deletions. `trials >= n` deletes every node
/// once, so the result is the exhaustive mean. Deletions are evaluated in
/// ascending id order, independent of the draw order.
pub fn robustness_deltas<R: Rng + ?Sized>(
    net: &Network,
    rng: &mut R,
    trials: usize,
) -> Result<(f64, f64), MetricsError> {
    let csr = CsrGraph::from_network(net);
    let before = distance_summary(&csr)?;
    robustness_from(&csr, &before, rng, trials)
}

pub(crate) fn robustness_from<R: Rng + ?Sized>(
    csr: &CsrGraph,
    before: &DistanceSummary,
    rng: &mut R,
    trials: usize,
) -> Result<(f64, f64), MetricsError> {
    let n = csr.len();
    if n < 3 {
        return Err(MetricsError::TooSmall { needed: 3, have: n });
    }
    let k = trials.min(n);
    if k == 0 {
        return Ok((0.0, 0.0));
    }
    let mut chosen = rand::seq::index::sample(rng, n, k).into_vec();
    chosen.sort_unstable();
    let mut dist = vec![UNREACHED; n];
    let mut queue = Vec::with_capacity(n);
    let (mut sum_avg, mut sum_diam) = (0.0, 0.0);
    for v in chosen {
        let (avg, diam) = after_deletion(csr, v, &mut dist, &mut queue);
        sum_avg += avg - before.avg_distance;
        sum_diam += diam as f64 - before.diameter as f64;
    }
    Ok((sum_avg / k as f64, sum_diam / k as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub mean_degree: f64,
    pub mean_power: f64,
    pub min_power: f64,
    pub max_power: f64,
}

/// Mean degree `2|E| / N` and power statistics from freshly recomputed ledgers.
pub fn degree_and_power_stats(net: &Network) -> DegreeStats {
    let n = net.len();
    if n == 0 {
        return DegreeStats {
            mean_degree: 0.0,
            mean_power: 0.0,
            min_power: 0.0,
            max_power: 0.0,
        };
    }
    let powers: Vec<f64> = net.ids().map(|i| net.recompute_power(i).unwrap()).collect();
    DegreeStats {
        mean_degree: 2.0 * net.edge_count() as f64 / n as f64,
        mean_power: powers.iter().sum::<f64>() / n as f64,
        min_power: powers.iter().copied().fold(f64::INFINITY, f64::min),
        max_power: powers.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// `-log10(1 - phi)`. A perfect `phi = 1` is censored: the value returned
/// is the resolution limit `-log10(1 / (samples + 1))` and the flag is set.
pub fn connectivity_transform(phi: f64, samples: u64) -> (f64, bool) {
    if phi >= 1.0 {
        ((samples as f64 + 1.0).log10(), true)
    } else {
        (-(1.0 - phi).log10(), false)
    }
}

/// Which quantities a sample computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricSet {
    /// Degree, power and connectivity only.
    Basic,
    /// Everything, including distances, rho, spectral gap and robustness.
    Full,
}

/// One measurement of a snapshot. Distance-type fields are `None` when the
/// snapshot is disconnected or the metric set excludes them.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsSample {
    pub step: u64,
    pub mean_degree: f64,
    pub mean_power: f64,
    pub min_power: f64,
    pub max_power: f64,
    pub connected: bool,
    pub avg_distance: Option<f64>,
    pub diameter: Option<f64>,
    pub rho: Option<f64>,
    pub spectral_gap: Option<f64>,
    pub spectral_converged: Option<bool>,
    pub delta_avg_distance: Option<f64>,
    pub delta_diameter: Option<f64>,
}

/// Measures `net`. `rng` only feeds the robustness deletions.
pub fn measure<R: Rng + ?Sized>(
    net: &Network,
    step: u64,
    set: MetricSet,
    trials: usize,
    rng: &mut R,
) -> MetricsSample {
    let stats = degree_and_power_stats(net);
    let connected = is_connected(net);
    let mut sample = MetricsSample {
        step,
        mean_degree: stats.mean_degree,
        mean_power: stats.mean_power,
        min_power: stats.min_power,
        max_power: stats.max_power,
        connected,
        avg_distance: None,
        diameter: None,
        rho: None,
        spectral_gap: None,
        spectral_converged: None,
        delta_avg_distance: None,
        delta_diameter: None,
    };
    if set == MetricSet::Basic || !connected || net.len() < 2 {
        return sample;
    }
    let csr = CsrGraph::from_network(net);
    let summary = distance_summary(&csr).expect("connected snapshot");
    sample.avg_distance = Some(summary.avg_distance);
    sample.diameter = Some(summary.diameter as f64);
    sample.rho = Some(summary.rho.value);
    let gap =
        spectral::spectral_gap_csr(&csr, &SpectralOptions::default()).expect("connected snapshot");
    sample.spectral_gap = Some(gap.gap);
    sample.spectral_converged = Some(gap.converged);
    if csr.len() >= 3 {
        let (da, dd) = robustness_from(&csr, &summary, rng, trials).expect("n >= 3");
        sample.delta_avg_distance = Some(da);
        sample.delta_diameter = Some(dd);
    }
    sample
}
