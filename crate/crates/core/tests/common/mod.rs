//! Independent reference implementations used by the integration and
//! acceptance tests. Everything here works on plain adjacency matrices built
//! from the public `Network` API and shares no code with the library's
//! search routines.

#![allow(dead_code, clippy::needless_range_loop)]

use churnnet::{AgentId, Attachment, Network, Position};
use nalgebra::DMatrix;
use rand::Rng;

pub const INF: u32 = u32::MAX;

/// Random connected graph on `n` agents: a random recursive tree plus each
/// remaining pair with probability `extra`. The budget is effectively
/// unlimited so every requested link is accepted.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, extra: f64) -> Network {
    let mut net = Network::new(2.0, 1e12);
    for _ in 0..n {
        net.add_agent(Position::random(rng), Attachment::Local);
    }
    for k in 1..n {
        let parent = rng.gen_range(0..k);
        net.add_link(AgentId(k as u32), AgentId(parent as u32), Attachment::Local)
            .unwrap();
    }
    for a in 0..n {
        for b in a + 1..n {
            let (ia, ib) = (AgentId(a as u32), AgentId(b as u32));
            if !net.has_link(ia, ib) && rng.gen_bool(extra) {
                net.add_link(ia, ib, Attachment::Random).unwrap();
            }
        }
    }
    net
}

/// Dense view of a network: ids in ascending order, 0/1 adjacency and the
/// power of every pair as if directly linked.
pub struct Dense {
    pub ids: Vec<AgentId>,
    pub adj: Vec<Vec<bool>>,
    pub pair: Vec<Vec<f64>>,
}

impl Dense {
    pub fn of(net: &Network) -> Self {
        let ids: Vec<AgentId> = net.ids().collect();
        let n = ids.len();
        let mut adj = vec![vec![false; n]; n];
        let mut pair = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in 0..n {
                adj[a][b] = net.has_link(ids[a], ids[b]);
                if a != b {
                    pair[a][b] = net.pair_power(ids[a], ids[b]).unwrap();
                }
            }
        }
        Dense { ids, adj, pair }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    /// All-pairs hop distances, `INF` when unreachable, optionally with one
    /// vertex deleted.
    pub fn floyd_warshall(&self, removed: Option<usize>) -> Vec<Vec<u32>> {
        let n = self.len();
        let mut d = vec![vec![INF; n]; n];
        for a in 0..n {
            if Some(a) == removed {
                continue;
            }
            d[a][a] = 0;
            for b in 0..n {
                if self.adj[a][b] && Some(b) != removed {
                    d[a][b] = 1;
                }
            }
        }
        for k in 0..n {
            for a in 0..n {
                if d[a][k] == INF {
                    continue;
                }
                for b in 0..n {
                    if d[k][b] != INF && d[a][k] + d[k][b] < d[a][b] {
                        d[a][b] = d[a][k] + d[k][b];
                    }
                }
            }
        }
        d
    }

    /// Every simple path from `s` to `t` with exactly `hops` links.
    pub fn paths(&self, s: usize, t: usize, hops: u32) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut path = vec![s];
        self.extend(t, hops, &mut path, &mut out);
        out
    }

    fn extend(&self, t: usize, hops: u32, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if path.len() as u32 - 1 == hops {
            if last == t {
                out.push(path.clone());
            }
            return;
        }
        for next in 0..self.len() {
            if self.adj[last][next] && !path.contains(&next) {
                path.push(next);
                self.extend(t, hops, path, out);
                path.pop();
            }
        }
    }

    /// Summed link power along `path`, added from its first vertex onwards.
    pub fn path_power(&self, path: &[usize]) -> f64 {
        let mut sum = 0.0;
        for w in path.windows(2) {
            sum += self.pair[w[0]][w[1]];
        }
        sum
    }
}

/// `(d_avg, d_max)` of a connected graph from Floyd-Warshall.
pub fn distance_oracle(dense: &Dense) -> (f64, u32) {
    let d = dense.floyd_warshall(None);
    let n = dense.len();
    let (mut sum, mut max, mut pairs) = (0u64, 0u32, 0u64);
    for a in 0..n {
        for b in a + 1..n {
            assert_ne!(d[a][b], INF, "oracle called on a disconnected graph");
            sum += d[a][b] as u64;
            max = max.max(d[a][b]);
            pairs += 1;
        }
    }
    (sum as f64 / pairs as f64, max)
}

/// Power-efficiency ratio by enumerating every minimum-hop path. Pair terms
/// are summed per source in ascending target order, then across sources in
/// ascending order. Also checks that each route numerator is at least the
/// cheapest link on it.
pub fn rho_oracle(dense: &Dense) -> f64 {
    let d = dense.floyd_warshall(None);
    let n = dense.len();
    let mut total = 0.0;
    let mut pairs = 0u64;
    for s in 0..n {
        let mut partial = 0.0;
        for t in s + 1..n {
            let direct = dense.pair[s][t];
            if direct == 0.0 {
                continue;
            }
            let mut best = f64::INFINITY;
            let mut best_path = Vec::new();
            for path in dense.paths(s, t, d[s][t]) {
                let p = dense.path_power(&path);
                if p < best {
                    best = p;
                    best_path = path;
                }
            }
            let cheapest = best_path
                .windows(2)
                .map(|w| dense.pair[w[0]][w[1]])
                .fold(f64::INFINITY, f64::min);
            assert!(best >= cheapest);
            partial += best / direct;
            pairs += 1;
        }
        total += partial;
    }
    total / pairs as f64
}

/// Mean change of `(d_avg, d_max)` over deleting every vertex in turn. After
/// a deletion the average runs over still-connected pairs and the diameter
/// over the largest remaining component (ties to the component holding the
/// smallest vertex).
pub fn robustness_oracle(dense: &Dense) -> (f64, f64) {
    let n = dense.len();
    let (avg0, diam0) = distance_oracle(dense);
    let (mut sum_avg, mut sum_diam) = (0.0, 0.0);
    for v in 0..n {
        let d = dense.floyd_warshall(Some(v));
        // label components by their smallest vertex
        let mut label = vec![usize::MAX; n];
        for a in 0..n {
            if a == v || label[a] != usize::MAX {
                continue;
            }
            for b in 0..n {
                if b != v && d[a][b] != INF {
                    label[b] = a;
                }
            }
        }
        let mut size = vec![0usize; n];
        for a in 0..n {
            if a != v {
                size[label[a]] += 1;
            }
        }
        let mut largest = usize::MAX;
        for root in 0..n {
            if size[root] > 0 && (largest == usize::MAX || size[root] > size[largest]) {
                largest = root;
            }
        }
        let (mut hop, mut pairs, mut diam) = (0u64, 0u64, 0u32);
        for a in 0..n {
            for b in a + 1..n {
                if a == v || b == v || d[a][b] == INF {
                    continue;
                }
                hop += d[a][b] as u64;
                pairs += 1;
                if label[a] == largest {
                    diam = diam.max(d[a][b]);
                }
            }
        }
        let avg = if pairs == 0 {
            0.0
        } else {
            hop as f64 / pairs as f64
        };
        sum_avg += avg - avg0;
        sum_diam += diam as f64 - diam0 as f64;
    }
    (sum_avg / n as f64, sum_diam / n as f64)
}

/// Two largest adjacency eigenvalues from a dense symmetric solver.
pub fn top_eigenvalues(dense: &Dense) -> (f64, f64) {
    let n = dense.len();
    let m = DMatrix::from_fn(n, n, |a, b| if dense.adj[a][b] { 1.0 } else { 0.0 });
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    (ev[0], ev[1])
}

/// Linear-scan feasible partners of `i`, ascending by id.
pub fn feasible_scan(net: &Network, i: AgentId) -> Vec<AgentId> {
    let p_i = net.power(i).unwrap();
    let cap = net.p_max();
    net.ids()
        .filter(|&j| j != i && !net.has_link(i, j))
        .filter(|&j| {
            let p = net.pair_power(i, j).unwrap();
            p_i + p <= cap && net.power(j).unwrap() + p <= cap
        })
        .collect()
}

/// Linear-scan nearest feasible partner, exact ties to the smaller id.
pub fn nearest_scan(net: &Network, i: AgentId) -> Option<AgentId> {
    let pos = net.agent(i).unwrap().pos;
    feasible_scan(net, i)
        .into_iter()
        .map(|j| (pos.dist_sq(&net.agent(j).unwrap().pos), j))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, j)| j)
}
