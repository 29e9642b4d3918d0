mod common;

use churnnet::csr::CsrGraph;
use churnnet::metrics::{self, distance_summary, robustness_deltas};
use churnnet::spectral::{spectral_gap_csr, SpectralOptions};
use churnnet::{GridIndex, ModelKind, Params, SimState};
use common::{Dense, INF};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graphs(seed: u64, count: usize, n_max: usize) -> impl Iterator<Item = churnnet::Network> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(move |_| {
        let n = rng.gen_range(2..=n_max);
        let extra = rng.gen_range(0.0..0.3);
        common::random_connected(&mut rng, n, extra)
    })
}

#[test]
fn hop_distances_match_floyd_warshall() {
    for net in graphs(1, 200, 60) {
        let dense = Dense::of(&net);
        let fw = dense.floyd_warshall(None);
        for (a, &id) in dense.ids.iter().enumerate() {
            let hops = metrics::hop_distances(&net, id).unwrap();
            for (b, &other) in dense.ids.iter().enumerate() {
                let want = (fw[a][b] != INF).then_some(fw[a][b]);
                assert_eq!(hops[other.index()], want);
            }
        }
        let (avg, diam) = metrics::avg_distance_and_diameter(&net).unwrap();
        let (oracle_avg, oracle_diam) = common::distance_oracle(&dense);
        assert_eq!(avg, oracle_avg);
        assert_eq!(diam, oracle_diam);
        assert!(avg <= diam as f64);
    }
}

#[test]
fn rho_matches_path_enumeration() {
    for net in graphs(2, 200, 12) {
        let dense = Dense::of(&net);
        let rho = metrics::power_efficiency_rho(&net).unwrap();
        assert_eq!(rho.value.to_bits(), common::rho_oracle(&dense).to_bits());
        assert_eq!(rho.coincident_pairs, 0);
        // a second evaluation agrees bit for bit
        assert_eq!(metrics::power_efficiency_rho(&net).unwrap(), rho);
    }
}

#[test]
fn exhaustive_robustness_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for net in graphs(3, 60, 30).filter(|net| net.len() >= 3) {
        let (avg, diam) = robustness_deltas(&net, &mut rng, net.len()).unwrap();
        let (oracle_avg, oracle_diam) = common::robustness_oracle(&Dense::of(&net));
        assert!((avg - oracle_avg).abs() <= 1e-12, "{avg} vs {oracle_avg}");
        assert!(
            (diam - oracle_diam).abs() <= 1e-12,
            "{diam} vs {oracle_diam}"
        );
    }
}

#[test]
fn spectral_gap_matches_dense_solver() {
    for net in graphs(4, 200, 200) {
        let dense = Dense::of(&net);
        let csr = CsrGraph::from_network(&net);
        let r = spectral_gap_csr(&csr, &SpectralOptions::default()).unwrap();
        let (l1, l2) = common::top_eigenvalues(&dense);
        assert!(r.converged);
        assert!((r.lambda1 - l1).abs() <= 1e-6, "{r:?} vs {l1}");
        assert!((r.lambda2 - l2).abs() <= 1e-6, "{r:?} vs {l2}");
        assert!((r.gap - (l1 - l2)).abs() <= 1e-6);
        assert!(r.gap >= 0.0);
        let mean_degree = 2.0 * net.edge_count() as f64 / net.len() as f64;
        assert!(r.lambda1 >= mean_degree - 1e-9);
        assert!(r.lambda1 <= csr.max_degree() as f64 + 1e-9);
    }
}

#[test]
fn spectral_gap_on_simulated_networks() {
    for (k, &q) in [0.0, 0.1, 0.5, 1.0].iter().enumerate() {
        let params = Params {
            n_agents: 150,
            q,
            seed: 70 + k as u64,
            ..Params::default()
        };
        let mut state = SimState::bootstrap(params).unwrap();
        for _ in 0..500 {
            state.churn_step().unwrap();
        }
        if !metrics::is_connected(&state.net) {
            continue;
        }
        let r = churnnet::spectral_gap(&state.net).unwrap();
        let (l1, l2) = common::top_eigenvalues(&Dense::of(&state.net));
        assert!(
            (r.lambda1 - l1).abs() <= 1e-6 && (r.lambda2 - l2).abs() <= 1e-6,
            "q={q}: {r:?} vs {l1} {l2}"
        );
    }
}

fn check_queries(state: &SimState, rng: &mut ChaCha8Rng) {
    let net = &state.net;
    for i in net.ids() {
        let want = common::feasible_scan(net, i);
        let mut got = state.index.feasible_set(net, i).unwrap();
        got.sort_unstable();
        assert_eq!(got, want, "feasible set of {i}");
        assert!(!got.contains(&i));
        assert!(got.iter().all(|&j| !net.has_link(i, j)));
        assert_eq!(
            state.index.nearest_feasible(net, i).unwrap(),
            common::nearest_scan(net, i)
        );
        match state.index.random_feasible(net, i, rng).unwrap() {
            Some(j) => assert!(want.binary_search(&j).is_ok()),
            None => assert!(want.is_empty()),
        }
    }
}

#[test]
fn spatial_queries_match_linear_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let points = [
        (500, ModelKind::A, 0.0, 1.0, 2.0),
        (500, ModelKind::B, 0.3, 0.5, 1.0),
        (200, ModelKind::A, 0.1, 1.0, 2.0),
        (300, ModelKind::B, 1.0, 0.25, 0.5),
        (64, ModelKind::A, 0.5, 0.1, 0.15),
    ];
    for (k, &(n, model, q, p_min, p_max)) in points.iter().enumerate() {
        let params = Params {
            n_agents: n,
            model,
            q,
            p_min,
            p_max,
            seed: 10 + k as u64,
            ..Params::default()
        };
        let mut state = SimState::bootstrap(params).unwrap();
        check_queries(&state, &mut rng);
        for _ in 0..200 {
            state.churn_step().unwrap();
        }
        check_queries(&state, &mut rng);
    }
}

#[test]
fn deficit_pass_leaves_only_stuck_agents_short() {
    for seed in 0..5 {
        let params = Params {
            n_agents: 100,
            p_min: 0.1,
            p_max: 0.15,
            q: 0.2 * seed as f64,
            model: if seed % 2 == 0 {
                ModelKind::A
            } else {
                ModelKind::B
            },
            seed,
            ..Params::default()
        };
        let mut state = SimState::bootstrap(params).unwrap();
        for step in 0..300 {
            if step % 50 == 0 {
                for i in state.net.ids() {
                    assert!(
                        state.net.power(i).unwrap() >= state.params.p_min
                            || common::feasible_scan(&state.net, i).is_empty(),
                        "agent {i} is short with partners available"
                    );
                }
            }
            state.churn_step().unwrap();
        }
    }
}

#[test]
fn grid_updates_match_rebuild() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let params = Params {
        n_agents: 150,
        q: 0.3,
        seed: 6,
        ..Params::default()
    };
    let mut state = SimState::bootstrap(params).unwrap();
    for _ in 0..300 {
        state.churn_step().unwrap();
        if rng.gen_bool(0.1) {
            let fresh = GridIndex::build(&state.net);
            for cy in 0..fresh.side() {
                for cx in 0..fresh.side() {
                    assert_eq!(state.index.cell(cx, cy), fresh.cell(cx, cy));
                }
            }
            assert_eq!(state.index.len(), fresh.len());
        }
    }
}

#[test]
fn summary_counts_match_pair_total() {
    for net in graphs(7, 50, 40) {
        let s = distance_summary(&CsrGraph::from_network(&net)).unwrap();
        let n = net.len() as u64;
        assert_eq!(s.rho.pairs + s.rho.coincident_pairs, n * (n - 1) / 2);
        assert!(s.rho.value >= 0.0);
    }
}

#[test]
fn churn_keeps_population_and_invariants() {
    let params = Params {
        n_agents: 80,
        q: 0.5,
        model: ModelKind::B,
        seed: 8,
        ..Params::default()
    };
    let mut state = SimState::bootstrap(params).unwrap();
    for _ in 0..500 {
        let report = state.churn_step().unwrap();
        assert!(state.net.contains(report.added));
        assert_eq!(state.net.len(), 80);
        state.net.check_invariants().unwrap();
    }
}
