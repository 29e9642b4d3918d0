//! Compact read-only adjacency snapshot used by the measurement code.

use crate::geometry::{pair_power, Position};
use crate::network::{AgentId, Network};

pub(crate) const UNREACHED: u32 = u32::MAX;

/// Living agents renumbered `0..n` in ascending id order, with neighbour
/// lists sorted by dense index.
#[derive(Debug, Clone)]
pub struct CsrGraph {
    pub ids: Vec<AgentId>,
    pub positions: Vec<Position>,
    pub offsets: Vec<usize>,
    pub targets: Vec<u32>,
    /// Link power, parallel to `targets`.
    pub powers: Vec<f64>,
    pub delta: f64,
}

impl CsrGraph {
    pub fn from_network(net: &Network) -> Self {
        let ids: Vec<AgentId> = net.ids().collect();
        let mut dense = vec![u32::MAX; net.id_bound()];
        for (k, id) in ids.iter().enumerate() {
            dense[id.index()] = k as u32;
        }
        let mut offsets = Vec::with_capacity(ids.len() + 1);
        let mut targets = Vec::with_capacity(2 * net.edge_count());
        let mut powers = Vec::with_capacity(2 * net.edge_count());
        let mut positions = Vec::with_capacity(ids.len());
        offsets.push(0);
        for &id in &ids {
            positions.push(net.agent(id).unwrap().pos);
            let mut row: Vec<(u32, f64)> = net
                .links(id)
                .unwrap()
                .iter()
                .map(|l| (dense[l.to.index()], l.power))
                .collect();
            row.sort_unstable_by_key(|&(t, _)| t);
            for (t, p) in row {
                targets.push(t);
                powers.push(p);
            }
            offsets.push(targets.len());
        }
        Self {
            ids,
            positions,
            offsets,
            targets,
            powers,
            delta: net.delta(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn neighbor_powers(&self, v: usize) -> &[f64] {
        &self.powers[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.len()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Direct-link power between any two agents.
    #[inline]
    pub fn direct_power(&self, a: usize, b: usize) -> f64 {
        pair_power(self.positions[a], self.positions[b], self.delta)
    }

    pub fn dense_index(&self, id: AgentId) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    /// Breadth-first hop counts from `source`, never entering `removed`.
    /// `dist` must have length `len()`; unreached entries hold `UNREACHED`.
    pub(crate) fn bfs(
        &self,
        source: usize,
        removed: Option<usize>,
        dist: &mut [u32],
        queue: &mut Vec<u32>,
    ) {
        dist.fill(UNREACHED);
        queue.clear();
        dist[source] = 0;
        queue.push(source as u32);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            let next = dist[u] + 1;
            for &w in self.neighbors(u) {
                let w = w as usize;
                if dist[w] == UNREACHED && Some(w) != removed {
                    dist[w] = next;
                    queue.push(w as u32);
                }
            }
        }
    }

    /// BFS that also carries, for every reached node, the smallest summed
    /// link power over all minimum-hop paths from `source`. Sums accumulate
    /// outward from the source.
    pub(crate) fn bfs_min_power(
        &self,
        source: usize,
        dist: &mut [u32],
        best: &mut [f64],
        queue: &mut Vec<u32>,
    ) {
        dist.fill(UNREACHED);
        best.fill(f64::INFINITY);
        queue.clear();
        dist[source] = 0;
        best[source] = 0.0;
        queue.push(source as u32);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            let next = dist[u] + 1;
            let base = best[u];
            let lo = self.offsets[u];
            for (k, &w) in self.neighbors(u).iter().enumerate() {
                let w = w as usize;
                if dist[w] == UNREACHED {
                    dist[w] = next;
                    queue.push(w as u32);
                }
                if dist[w] == next {
                    let cand = base + self.powers[lo + k];
                    if cand < best[w] {
                        best[w] = cand;
                    }
                }
            }
        }
    }
}
