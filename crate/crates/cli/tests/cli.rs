use std::path::Path;
use std::process::{Command, Output};

use annealsched::model::io::read_model;
use annealsched_cli::commands::SweepRow;
use annealsched_cli::io::{read_csv, read_graph, read_samples, read_stream, read_text, CurveRow};

fn cli(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_annealsched"))
        .args(args)
        .args(["--out-dir", "."])
        .current_dir(dir)
        .env_remove("ANNEALSCHED_OUT_DIR")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) {
    let out = cli(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    cli(dir, args).status.code().unwrap()
}

#[test]
fn exit_codes_follow_error_category() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(d, &["schedule", "--stream", "missing.csv"]), 3);
    assert_eq!(code(d, &["compare", "--methods", "greedy,oracle", "--seeds", "0..2"]), 2);
    assert_eq!(code(d, &["compare", "--methods", "greedy", "--seeds", "3..3"]), 2);
    assert_eq!(code(d, &["frobnicate"]), 2);

    std::fs::write(d.join("bad.toml"), "no_such_field = 1\n").unwrap();
    assert_eq!(code(d, &["--config", "bad.toml", "gen-stream"]), 3);

    let n = 61;
    let values = vec!["1.0"; n].join(",");
    let ids: Vec<String> = (0..n).map(|k| k.to_string()).collect();
    let big = format!(r#"{{"request_ids":[{}],"num_vertices":{n},"edges":[],"values":[{values}]}}"#, ids.join(","));
    std::fs::write(d.join("big.json"), big).unwrap();
    ok(d, &["qubo", "--graph", "big.json"]);
    assert_eq!(code(d, &["solve", "--model", "model.txt", "--solver", "exact"]), 4);
}

#[test]
fn pipeline_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["--seed", "4", "gen-stream", "--days", "45", "--graph-out", "graph.json"]);
    let stream = read_stream(&d.join("stream.csv")).unwrap();
    assert!(!stream.is_empty());
    let graph = read_graph(&d.join("graph.json")).unwrap();
    let problem = graph.problem().unwrap();
    assert!(problem.graph.num_vertices() > 0);

    for transform in ["mvvc", "redistribute", "ising", "xor", "split:3"] {
        ok(d, &["qubo", "--graph", "graph.json", "--transform", transform, "--out", "model.txt"]);
        let model = read_model::<f64>(&read_text(&d.join("model.txt")).unwrap()).unwrap();
        ok(d, &["solve", "--model", "model.txt", "--samples", "50", "--sweeps", "20", "--out", "samples.csv"]);
        // The reader re-evaluates every stored energy against the model.
        let samples = read_samples(&d.join("samples.csv"), &model).unwrap();
        assert_eq!(samples.total_count(), 50, "{transform}");
        ok(d, &["solve", "--model", "model.txt", "--samples", "50", "--sweeps", "20", "--postprocess"]);
        let post = read_samples(&d.join("samples.csv"), &model).unwrap();
        assert!(post.mean_energy() <= samples.mean_energy() + 1e-12, "{transform}");
    }
}

#[test]
fn exact_solve_on_small_graph() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let graph = r#"{"request_ids":[0,1,2],"num_vertices":3,"edges":[[0,1],[1,2]],"values":[0.5,0.8,0.5]}"#;
    std::fs::write(d.join("g.json"), graph).unwrap();
    ok(d, &["qubo", "--graph", "g.json", "--transform", "redistribute"]);
    ok(d, &["solve", "--model", "model.txt", "--solver", "exact", "--out", "exact.csv"]);
    let model = read_model::<f64>(&read_text(&d.join("model.txt")).unwrap()).unwrap();
    let minima = read_samples(&d.join("exact.csv"), &model).unwrap();
    assert_eq!(minima.lowest().unwrap().state, vec![1, 0, 1]);
    assert!((minima.lowest().unwrap().energy + 1.0).abs() < 1e-12);
    assert_eq!(code(d, &["solve", "--model", "model.txt", "--solver", "exact", "--device", "noisy:1"]), 2);
}

#[test]
fn out_dir_environment_override() {
    let dir = tempfile::tempdir().unwrap();
    let env_dir = dir.path().join("from-env");
    let flag_dir = dir.path().join("from-flag");
    let out = Command::new(env!("CARGO_BIN_EXE_annealsched"))
        .args(["--out-dir", flag_dir.to_str().unwrap(), "gen-stream", "--days", "5"])
        .current_dir(dir.path())
        .env("ANNEALSCHED_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(env_dir.join("stream.csv").exists());
    assert!(!flag_dir.exists());

    ok(dir.path(), &["gen-stream", "--days", "5", "--out", "from-flag/stream.csv"]);
    assert!(flag_dir.join("stream.csv").exists());
}

#[test]
fn compare_writes_one_curve_per_method() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["compare", "--methods", "greedy,hybrid1", "--seeds", "0,1,2", "--out", "cmp"]);
    for method in ["greedy", "hybrid1"] {
        let curve: Vec<CurveRow> = read_csv(&d.join(format!("cmp/curve_{method}.csv"))).unwrap();
        assert!(!curve.is_empty());
        assert_eq!(curve[0].rejection_index, 1);
        assert_eq!(curve[0].n, 3);
        assert!(curve.windows(2).all(|w| w[1].n <= w[0].n));
    }
    assert!(d.join("cmp/summary.csv").exists());
}

#[test]
fn sweep_reports_raw_and_descent_quantiles() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["sweep-anneal", "--scales", "1", "--sweeps", "1,20", "--sample-sizes", "100", "--realizations", "3"]);
    let rows: Vec<SweepRow> = read_csv(&d.join("sweep.csv")).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2);
    for raw in rows.iter().filter(|r| r.variant == "raw") {
        let post = rows
            .iter()
            .find(|r| r.variant == "descent" && r.sweeps == raw.sweeps && r.quantile == raw.quantile)
            .unwrap();
        assert!(post.mean_energy_per_scale <= raw.mean_energy_per_scale + 1e-12);
        assert_eq!(raw.realizations, 3);
    }
    let mut quantiles: Vec<f64> = rows.iter().map(|r| r.quantile).collect();
    quantiles.sort_by(f64::total_cmp);
    quantiles.dedup();
    assert_eq!(quantiles, vec![0.05, 0.25]);
}

#[test]
fn calibrate_writes_loadable_state() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let graph = r#"{"request_ids":[0,1,2],"num_vertices":3,"edges":[[0,1],[1,2]],"values":[0.5,0.8,0.5]}"#;
    std::fs::write(d.join("g.json"), graph).unwrap();
    ok(d, &["calibrate", "--graph", "g.json", "--device", "ideal", "--trajectories", "20000", "--widths"]);
    let state = annealsched_cli::io::read_calibration(&d.join("calib.json")).unwrap();
    assert_eq!(state.num_spins, 3);
    assert!(state.widths().iter().all(|w| w.is_some_and(|w| w > 0.0)));
    ok(d, &["qubo", "--graph", "g.json", "--calibration", "calib.json"]);
    ok(d, &["solve", "--model", "model.txt", "--calibration", "calib.json", "--samples", "20"]);
}
