use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_comprestree"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn node_count(path: &Path) -> usize {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v["nodes"].as_array().unwrap().len()
}

#[test]
fn gen_grid_writes_sensors_plus_bs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.json");
    let o = run(&["gen", "grid", "--rows", "10", "--cols", "10", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(node_count(&out), 101);

    let one = dir.path().join("one.json");
    assert!(run(&["gen", "grid", "--rows", "1", "--cols", "1", "-o", one.to_str().unwrap()]).status.success());
    assert_eq!(node_count(&one), 2);
}

#[test]
fn gen_random_rectangle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let args = ["gen", "random", "--n", "100", "--w", "300", "--h", "30", "--radius", "30", "--seed", "7", "-o"];
    let o = run(&[&args[..], &[out.to_str().unwrap()]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(node_count(&out), 100);
}

#[test]
fn gen_errors_exit_nonzero() {
    let o = run(&["gen", "grid", "--rows", "0", "--cols", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("cfg.json");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn run_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"network": {"kind": "random", "n": 25, "width": 100, "height": 100, "radius": 30},
            "entropy": {"model": "rainfall", "h": 1.0, "c": 1.0},
            "methods": ["ind", "cluster", "treestar", "wcds", "dsc"],
            "sweep": {"param": "c", "values": [1, 10]},
            "seeds": [1, 2, 3]}"#,
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (out, threads) in [(&a, "1"), (&b, "3")] {
        let o = bin()
            .env("COMPRESTREE_THREADS", threads)
            .args(["run", "--config", cfg.to_str().unwrap(), "--csv", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("method,seed,sweep,total,nc,ic,normalized,elapsed_ms"));
    // 2 sweep values x (3 seeds + mean) x 5 methods.
    assert_eq!(lines.clone().count(), 40);
    for l in lines.filter(|l| l.starts_with("ind,")) {
        assert_eq!(l.split(',').nth(6), Some("1.0"));
    }
}

#[test]
fn run_fig1_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"network": {"kind": "fixture", "name": "fig1"},
            "entropy": {"model": "uniform", "h": 1.0, "eps": 0.1},
            "methods": ["ind", "cluster", "dsc"]}"#,
    );
    let json = dir.path().join("out.json");
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--json", json.to_str().unwrap()]);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("ind,0,,9.0,9.0,0.0,1.0,0.0"), "{stdout}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn bad_config_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"network": {"kind": "fixture", "name": "fig1"}, "methods": []}"#);
    assert_eq!(run(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_small_budget_passes() {
    let o = run(&["verify", "--budget", "2", "--instances", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8(o.stdout).unwrap().contains("0 failed"));
}

#[test]
fn verify_rejects_tampered_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let good = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures/fig1_example1.json")).unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, good.replace("\"total\": 2.7", "\"total\": 2.5")).unwrap();
    let o = run(&["verify", "--budget", "1", "--instances", "1", "--fixture", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
