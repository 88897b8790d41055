use comprestree::experiment::{run, ExperimentConfig, Method};
use comprestree::par;

fn config(methods: &str, seeds: &str, sweep: &str) -> ExperimentConfig {
    ExperimentConfig::from_json_str(&format!(
        r#"{{"network": {{"kind": "random", "n": 40, "width": 120, "height": 120, "radius": 30}},
            "entropy": {{"model": "rainfall", "h": 1.0, "c": 1.0}},
            "methods": {methods}, "seeds": {seeds},
            "sweep": {{"param": "c", "values": {sweep}}}}}"#
    ))
    .unwrap()
}

#[test]
fn parallel_and_sequential_agree() {
    let cfg = config(r#"["ind", "cluster", "treestar", "wcds", "unicast", "dsc"]"#, "[1, 2, 3]", "[1, 20]");
    par::set_parallel(true);
    let a = run(&cfg).unwrap().csv_string();
    par::set_parallel(false);
    let b = run(&cfg).unwrap().csv_string();
    par::set_parallel(true);
    assert_eq!(a, b);
}

#[test]
fn mean_rows_average_the_seeds() {
    let cfg = config(r#"["ind", "treestar"]"#, "[4, 5, 6, 7]", "[10]");
    let rep = run(&cfg).unwrap();
    let per_seed: Vec<f64> =
        rep.rows.iter().filter(|r| r.method == Method::Treestar && r.seed.is_some()).map(|r| r.total).collect();
    assert_eq!(per_seed.len(), 4);
    let mean = rep.mean_of(Method::Treestar, Some(10.0)).unwrap().total;
    assert!((mean - per_seed.iter().sum::<f64>() / 4.0).abs() < 1e-9);
    assert!(rep.rows.iter().filter(|r| r.method == Method::Ind).all(|r| r.normalized == 1.0));
}

#[test]
fn treestar_cost_falls_with_correlation() {
    let values = [1.0, 5.0, 20.0, 100.0, 500.0];
    let cfg = config(r#"["ind", "treestar"]"#, "[11, 12, 13]", "[1, 5, 20, 100, 500]");
    let rep = run(&cfg).unwrap();
    for seed in [11, 12, 13] {
        let curve: Vec<f64> = values
            .iter()
            .map(|&c| {
                rep.rows
                    .iter()
                    .find(|r| r.method == Method::Treestar && r.seed == Some(seed) && r.sweep == Some(c))
                    .unwrap()
                    .normalized
            })
            .collect();
        for w in curve.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "seed {seed}: {curve:?}");
        }
    }
}
