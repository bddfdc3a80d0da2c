use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cyclewalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclewalk"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn explicit_graph(dir: &Path, name: &str, nodes: usize, edges: &[(usize, usize)]) -> String {
    let doc = serde_json::json!({
        "schema": "cyclewalk-graph-v1",
        "num_nodes": nodes,
        "edges": edges.iter().map(|&(u, v)| [u, v]).collect::<Vec<_>>(),
        "family": "explicit",
        "params": {},
        "seed": 0,
        "rng": "none",
    });
    let path = dir.join(name);
    fs::write(&path, doc.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn mcb(path: &str) -> Value {
    let out = cyclewalk(&["mcb", "--graph", path]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn generated_ws15_has_thirty_edges() {
    let out = cyclewalk(&["graph", "--family", "ws", "--nodes", "15", "--k", "4", "--p", "0.35", "--seed", "0"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["num_nodes"], 15);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 30);
    assert_eq!(doc["family"], "ws");
}

#[test]
fn k4_and_pentagon_bases() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = explicit_graph(dir.path(), "k4.json", 4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    let doc = mcb(&k4);
    assert_eq!(doc["dimension"], 3);
    assert_eq!(doc["total_length"], 9);
    assert!((doc["S_C"].as_f64().unwrap() - 9f64.log2()).abs() < 1e-12);

    let c5 = explicit_graph(dir.path(), "c5.json", 5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
    let doc = mcb(&c5);
    assert_eq!(doc["dimension"], 1);
    assert_eq!(doc["total_length"], 5);
}

#[test]
fn tree_has_no_cycle_entropy() {
    let dir = tempfile::tempdir().unwrap();
    let star = explicit_graph(dir.path(), "star.json", 4, &[(0, 1), (0, 2), (0, 3)]);
    let doc = mcb(&star);
    assert_eq!(doc["dimension"], 0);
    assert!(doc["S_C"].is_null());
}

#[test]
fn disconnected_graph_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let two = explicit_graph(dir.path(), "two.json", 6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
    let out = cyclewalk(&["mcb", "--graph", &two]);
    assert_eq!(out.status.code(), Some(1));
    let out = cyclewalk(&["simulate", "--graph", &two, "--t-max", "2", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("disconnected"));
}

#[test]
fn triangle_simulation_files() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = explicit_graph(dir.path(), "k3.json", 3, &[(0, 1), (0, 2), (1, 2)]);
    let out_dir = dir.path().join("run");
    let out = cyclewalk(&[
        "simulate",
        "--graph",
        &k3,
        "--t-max",
        "4",
        "--measure-every",
        "1",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("timeseries.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,S_x,S_c,S_s,sz_mean,p_0,p_1,p_2");
    assert_eq!(lines.len(), 6);
    let times: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(times, ["0", "1", "2", "3", "4"]);
    let s_s0: f64 = lines[1].split(',').nth(3).unwrap().parse().unwrap();
    assert_eq!(s_s0, 0.0);
    let summary: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["B_total_length"], 3);
    assert_eq!(summary["t_max"], 4);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        r#"{"generate": {"family": "er", "nodes": 6, "p": 0.6, "seed": 3}, "t_max": 6, "measure_every": 3}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("run");
    let out = cyclewalk(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--t-max",
        "2",
        "--measure-every",
        "1",
        "--no-positions",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("timeseries.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,S_x,S_c,S_s,sz_mean");
    assert_eq!(csv.lines().count(), 4);
    let summary: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["graph"]["family"], "er");
    assert_eq!(summary["graph"]["seed"], 3);
    assert_eq!(summary["graph"]["p_edge"], 0.6);
}

#[test]
fn missing_file_fails() {
    let out = cyclewalk(&["mcb", "--graph", "/nonexistent/graph.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    let out = cyclewalk(&["graph", "--family", "ws", "--nodes", "15", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cyclewalk(&["graph", "--family", "tree", "--nodes", "15"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cyclewalk(&["simulate", "--family", "er", "--nodes", "6", "--t-max", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cyclewalk(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sweep");
    let out = cyclewalk(&[
        "sweep",
        "--sizes",
        "6-7",
        "--t-max",
        "8",
        "--measure-every",
        "2",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("family,nodes,seed,edges,mean_degree,B_size,B_total_length,S_C,"));
    let out = cyclewalk(&["compare", "--input", out_dir.join("sweep.csv").to_str().unwrap(), "--json"]);
    assert!(out.status.success());
    let stats: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stats["rows"], 4);
    assert_eq!(stats["compared"], 4);
}
