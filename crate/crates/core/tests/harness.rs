use std::process::Command;

use churnnet::harness::config::Config;
use churnnet::harness::csv::{summary_csv, SUMMARY_COLUMNS};
use churnnet::harness::snapshot::{parse_snapshot, render_snapshot};
use churnnet::harness::{
    aggregate, export_snapshot, import_snapshot, run_single, run_sweep, SweepSpec,
};
use churnnet::seed::derive_seed;
use churnnet::{analytic_degree_q0, MetricSet, ModelKind, Params, SimState};

fn small(n: usize, q: f64, seed: u64) -> Params {
    Params {
        n_agents: n,
        q,
        seed,
        equil_steps: 200,
        measure_steps: 300,
        sample_interval: 50,
        robustness_trials: 5,
        ..Params::default()
    }
}

#[test]
fn empty_measurement_window() {
    let params = Params {
        measure_steps: 0,
        ..small(50, 0.1, 1)
    };
    let out = run_single(&params, MetricSet::Full).unwrap();
    assert!(out.samples.is_empty());
    let row = aggregate(&params, &[out]);
    assert_eq!(row.samples, 0);
    assert_eq!(row.degree.count, 0);
}

#[test]
fn repeated_run_gives_identical_csv() {
    let params = small(80, 0.2, 9);
    let a = aggregate(&params, &[run_single(&params, MetricSet::Full).unwrap()]);
    let b = aggregate(&params, &[run_single(&params, MetricSet::Full).unwrap()]);
    assert_eq!(summary_csv(&[], &[a]), summary_csv(&[], &[b]));
}

#[test]
fn degree_near_analytic_value_at_q0() {
    let params = Params {
        n_agents: 200,
        q: 0.0,
        model: ModelKind::A,
        p_min: 1.0,
        p_max: 2.0,
        seed: 3,
        equil_steps: 10_000,
        measure_steps: 10_000,
        sample_interval: 100,
        ..Params::default()
    };
    let row = aggregate(&params, &[run_single(&params, MetricSet::Basic).unwrap()]);
    let analytic = analytic_degree_q0(200.0, 2.0, 1.0);
    let ratio = row.degree.mean / analytic;
    assert!(
        (0.5..=1.5).contains(&ratio),
        "k = {} against {analytic}",
        row.degree.mean
    );
}

#[test]
fn one_point_sweep_equals_single_run() {
    let base = small(60, 0.3, 11);
    let result = run_sweep(&SweepSpec::single(base.clone(), 1, MetricSet::Full), 2);
    assert!(result.failures.is_empty());
    let derived = Params {
        seed: derive_seed(base.seed, 0, 0),
        ..base.clone()
    };
    let direct = aggregate(&base, &[run_single(&derived, MetricSet::Full).unwrap()]);
    assert_eq!(result.rows, vec![direct]);
}

fn two_axis_spec() -> SweepSpec {
    let text = "n = 60\nequil = 100\nmeasure = 200\nsample_interval = 50\ntrials = 4\n\
                replicates = 2\nseed = 5\nq = 0, 0.5, 1\npmin = 0.5, 1\ncouple = pmax = 2 * pmin\n";
    Config::parse(text).unwrap().to_sweep_spec().unwrap()
}

#[test]
fn coupled_two_axis_sweep() {
    let spec = two_axis_spec();
    let result = run_sweep(&spec, 1);
    assert_eq!(result.rows.len(), 6);
    for row in &result.rows {
        assert_eq!(row.p_max, 2.0 * row.p_min);
        assert_eq!(row.replicates, 2);
    }
    let again = run_sweep(&spec, 1);
    assert_eq!(
        summary_csv(&[], &result.rows),
        summary_csv(&[], &again.rows)
    );
}

#[test]
fn worker_count_does_not_change_output() {
    let spec = two_axis_spec();
    let one = summary_csv(&[], &run_sweep(&spec, 1).rows);
    let eight = summary_csv(&[], &run_sweep(&spec, 8).rows);
    assert_eq!(one, eight);
}

#[test]
fn csv_header_is_the_fixed_schema() {
    let csv = summary_csv(&["note".to_string()], &[]);
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, SUMMARY_COLUMNS.join(","));
    assert_eq!(SUMMARY_COLUMNS.len(), 29);
}

#[test]
fn snapshot_round_trip_at_small_budget() {
    let params = Params {
        n_agents: 100,
        p_min: 0.1,
        p_max: 1.0,
        q: 0.1,
        seed: 21,
        ..Params::default()
    };
    let mut state = SimState::bootstrap(params.clone()).unwrap();
    for _ in 0..1000 {
        state.churn_step().unwrap();
    }
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.txt");
    let second = dir.path().join("b.txt");
    export_snapshot(&state.net, &params, &first).unwrap();
    let (net, back) = import_snapshot(&first).unwrap();
    assert_eq!(back, params);
    assert_eq!(net.edges(), state.net.edges());
    export_snapshot(&net, &back, &second).unwrap();
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap()
    );

    let text = render_snapshot(&state.net, &params);
    assert_eq!(text.lines().filter(|l| l.starts_with("node ")).count(), 100);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("edge ")).count(),
        state.net.edge_count()
    );
    assert!(parse_snapshot(&text).is_ok());
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_churnnet"))
}

#[test]
fn cli_simulate_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let status = cli()
        .args([
            "simulate",
            "--n",
            "50",
            "--equil",
            "50",
            "--measure",
            "100",
            "--sample-interval",
            "50",
        ])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body.len(), 2);
    assert_eq!(body[0], SUMMARY_COLUMNS.join(","));
}

#[test]
fn cli_rejects_bad_configuration() {
    let status = cli()
        .args(["simulate", "--pmin", "3", "--pmax", "2"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let status = cli().args(["simulate", "--q", "often"]).status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn cli_reports_io_failures() {
    let status = cli()
        .args(["analyze", "/nonexistent/snapshot.txt"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn cli_snapshot_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("snap.txt");
    let status = cli()
        .args([
            "snapshot",
            "--n",
            "60",
            "--equil",
            "100",
            "--measure",
            "100",
            "--seed",
            "4",
        ])
        .arg("--out")
        .arg(&snap)
        .status()
        .unwrap();
    assert!(status.success());
    let output = cli().arg("analyze").arg(&snap).output().unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8(output.stdout)
        .unwrap()
        .lines()
        .any(|l| l.starts_with("0,")));

    let corrupt = dir.path().join("bad.txt");
    let text = std::fs::read_to_string(&snap).unwrap();
    let edge = text
        .lines()
        .find(|l| l.starts_with("edge "))
        .unwrap()
        .to_string();
    std::fs::write(&corrupt, format!("{text}{edge}\n")).unwrap();
    let status = cli().arg("analyze").arg(&corrupt).status().unwrap();
    assert_eq!(status.code(), Some(1));
}
