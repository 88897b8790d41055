//! Experiment harness: build networks, attach entropy models, run the
//! selected methods over seeds and a sweep, and tabulate costs normalized
//! by the independent-coding baseline.
//!
//! Output rows are ordered by (sweep value, seed, method) in declaration
//! order, whatever order the worker threads finish in. With `timing` off
//! the CSV is byte-identical across runs.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithms::{self, GreedyOptions, Mce};
use crate::ctree::{eval_cost_with, CompressionTree, CostBreakdown, CostModel, EvalOptions, MovementScheme, TreeFile};
use crate::entropy::EntropySpec;
use crate::instance::Instance;
use crate::netgraph::{self, Corner, Network};
use crate::{fixtures, par};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config lists no methods")]
    NoMethods,
    #[error("config lists no seeds")]
    NoSeeds,
    #[error("sweep value {0} is not a finite positive number")]
    BadSweepValue(f64),
    #[error("sweep over {param} does not apply to the {model} entropy model")]
    SweepMismatch { param: &'static str, model: &'static str },
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("rx_cost must be finite and non-negative")]
    BadRxCost,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NetworkSource {
    Grid {
        rows: usize,
        cols: usize,
        #[serde(default = "one")]
        spacing: f64,
        /// Defaults to `spacing`: four-neighbor connectivity.
        #[serde(default)]
        link_radius: Option<f64>,
        #[serde(default)]
        corner: Corner,
    },
    /// Random geometric network; each seed draws its own layout.
    Random { n: usize, width: f64, height: f64, radius: f64 },
    File { path: PathBuf },
    /// `fig1`, `fig2` or `fig3`.
    Fixture { name: String },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ind,
    Cluster,
    Dsc,
    Treestar,
    Wcds,
    Unicast,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Ind => "ind",
            Method::Cluster => "cluster",
            Method::Dsc => "dsc",
            Method::Treestar => "treestar",
            Method::Wcds => "wcds",
            Method::Unicast => "unicast",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    C,
    Eps,
    LengthScale,
}

impl SweepParam {
    fn name(self) -> &'static str {
        match self {
            SweepParam::C => "c",
            SweepParam::Eps => "eps",
            SweepParam::LengthScale => "length_scale",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub json: Option<PathBuf>,
    /// One [`AlgoRecord`] per (sweep value, seed, method), with its tree.
    #[serde(default)]
    pub records: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub network: NetworkSource,
    pub entropy: EntropySpec,
    #[serde(default)]
    pub cost_model: CostModel,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default)]
    pub rx_cost: f64,
    /// Record wall-clock time per method. Off by default so output is
    /// reproducible byte for byte.
    #[serde(default)]
    pub timing: bool,
    /// Skip local improvement after the greedy treestar merge.
    #[serde(default)]
    pub no_improve: bool,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Loads a config; relative network file paths resolve against the
    /// config's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let mut cfg = Self::from_json_str(&std::fs::read_to_string(path)?)?;
        if let NetworkSource::File { path: p } = &mut cfg.network {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        if self.methods.is_empty() {
            return Err(ConfigError::NoMethods);
        }
        if self.seeds.is_empty() {
            return Err(ConfigError::NoSeeds);
        }
        if !(self.rx_cost >= 0.0 && self.rx_cost.is_finite()) {
            return Err(ConfigError::BadRxCost);
        }
        if let Some(sw) = &self.sweep {
            for &v in &sw.values {
                let ok = v.is_finite() && if sw.param == SweepParam::Eps { v >= 0.0 } else { v > 0.0 };
                if !ok {
                    return Err(ConfigError::BadSweepValue(v));
                }
            }
            apply_sweep(&self.entropy, sw.param, 1.0)?;
        }
        if let NetworkSource::Fixture { name } = &self.network {
            fixture(name)?;
        }
        Ok(())
    }
}

fn fixture(name: &str) -> Result<Network, ConfigError> {
    match name {
        "fig1" => Ok(fixtures::fig1_network()),
        "fig2" => Ok(fixtures::fig2_network()),
        "fig3" => Ok(fixtures::fig3_network()),
        _ => Err(ConfigError::UnknownFixture(name.to_string())),
    }
}

fn model_name(spec: &EntropySpec) -> &'static str {
    match spec {
        EntropySpec::Uniform { .. } => "uniform",
        EntropySpec::Rainfall { .. } => "rainfall",
        EntropySpec::Gaussian { .. } => "gaussian",
        EntropySpec::Rbf { .. } => "rbf",
        EntropySpec::Matrix { .. } => "matrix",
    }
}

fn apply_sweep(spec: &EntropySpec, param: SweepParam, value: f64) -> Result<EntropySpec, ConfigError> {
    let mut out = spec.clone();
    match (&mut out, param) {
        (EntropySpec::Rainfall { c, .. }, SweepParam::C) => *c = value,
        (EntropySpec::Uniform { eps, .. }, SweepParam::Eps) => *eps = value,
        (EntropySpec::Rbf { length_scale, .. }, SweepParam::LengthScale) => *length_scale = value,
        _ => return Err(ConfigError::SweepMismatch { param: param.name(), model: model_name(spec) }),
    }
    Ok(out)
}

/// Builds the network a seed runs on.
pub fn build_network(src: &NetworkSource, seed: u64) -> Result<Network, String> {
    match src {
        NetworkSource::Grid { rows, cols, spacing, link_radius, corner } => {
            netgraph::gen_grid(*rows, *cols, *spacing, link_radius.unwrap_or(*spacing), *corner)
                .map_err(|e| e.to_string())
        }
        NetworkSource::Random { n, width, height, radius } => {
            netgraph::gen_random(*n, *width, *height, *radius, seed).map_err(|e| e.to_string())
        }
        NetworkSource::File { path } => Network::load(path).map_err(|e| format!("{}: {e}", path.display())),
        NetworkSource::Fixture { name } => fixture(name).map_err(|e| e.to_string()),
    }
}

/// One table row. `seed == None` marks the mean over seeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub method: Method,
    pub seed: Option<u64>,
    pub sweep: Option<f64>,
    pub total: f64,
    pub nc: f64,
    pub ic: f64,
    pub normalized: f64,
    pub elapsed_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    method: &'a str,
    seed: String,
    sweep: String,
    total: f64,
    nc: f64,
    ic: f64,
    normalized: f64,
    elapsed_ms: f64,
}

/// Per-method result on one instance.
#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub cost: CostBreakdown,
    /// Present for methods that build a compression tree.
    pub solution: Option<(CompressionTree, MovementScheme)>,
    /// Greedy merges, cluster merges or local-improvement moves.
    pub iters: usize,
}

/// JSON result of one algorithm run.
#[derive(Debug, Clone, Serialize)]
pub struct AlgoRecord {
    pub algo: Method,
    pub seed: u64,
    pub sweep: Option<f64>,
    pub cost: CostBreakdown,
    pub tree: Option<TreeFile>,
    pub iters: usize,
    pub elapsed_ms: f64,
}

fn flat(total: f64, cost_model: CostModel) -> CostBreakdown {
    CostBreakdown { total, nc: total, ic: 0.0, cost_model }
}

/// Runs one method on one instance.
pub fn run_method(
    inst: &Instance,
    method: Method,
    cost_model: CostModel,
    opts: &EvalOptions,
    improve: bool,
) -> Result<MethodOutcome, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let mut iters = 0;
    let (tree, scheme) = match method {
        Method::Ind => {
            return Ok(MethodOutcome { cost: flat(algorithms::ind_cost(inst), cost_model), solution: None, iters: 0 });
        }
        Method::Dsc => {
            let lb = algorithms::dsc_lower_bound(inst);
            return Ok(MethodOutcome { cost: flat(lb, cost_model), solution: None, iters: 0 });
        }
        Method::Cluster => {
            let c = algorithms::cluster_greedy(inst, cost_model).map_err(|e| err(&e))?;
            iters = c.merges;
            (c.tree, c.scheme)
        }
        Method::Treestar => {
            let mce = match cost_model {
                CostModel::Wl => Mce::WlSg,
                CostModel::Multicast => Mce::Multicast,
                CostModel::Unicast => {
                    // The arborescence is already the exact restricted optimum.
                    let (t, s) = algorithms::unicast_arborescence(inst).map_err(|e| err(&e))?;
                    let cost = eval_cost_with(&s, &t, inst, opts).map_err(|e| err(&e))?;
                    return Ok(MethodOutcome { cost, solution: Some((t, s)), iters: 0 });
                }
            };
            let r = algorithms::greedy_treestar(inst, mce, GreedyOptions { improve }).map_err(|e| err(&e))?;
            iters = r.history.len() + r.improvements;
            (r.tree, r.scheme)
        }
        Method::Wcds => {
            if cost_model != CostModel::Wl {
                return Err(format!("wcds builds broadcast schemes; cost model is {cost_model}"));
            }
            let s = algorithms::wcds_greedy(&inst.net);
            algorithms::tree_from_wcds(inst, &s).map_err(|e| err(&e))?
        }
        Method::Unicast => algorithms::unicast_arborescence(inst).map_err(|e| err(&e))?,
    };
    let cost = eval_cost_with(&scheme, &tree, inst, opts).map_err(|e| err(&e))?;
    Ok(MethodOutcome { cost, solution: Some((tree, scheme)), iters })
}

fn failed(method: Method, seed: u64, sweep: Option<f64>, msg: String) -> Row {
    Row {
        method,
        seed: Some(seed),
        sweep,
        total: f64::NAN,
        nc: f64::NAN,
        ic: f64::NAN,
        normalized: f64::NAN,
        elapsed_ms: 0.0,
        error: Some(msg),
    }
}

fn run_point(cfg: &ExperimentConfig, seed: u64, sweep: Option<f64>) -> (Vec<Row>, Vec<AlgoRecord>) {
    let setup = build_network(&cfg.network, seed).and_then(|net| {
        let spec = match (&cfg.sweep, sweep) {
            (Some(sw), Some(v)) => apply_sweep(&cfg.entropy, sw.param, v).map_err(|e| e.to_string())?,
            _ => cfg.entropy.clone(),
        };
        Instance::from_spec(net, &spec).map_err(|e| e.to_string())
    });
    let inst = match setup {
        Ok(i) => i,
        Err(e) => return (cfg.methods.iter().map(|&m| failed(m, seed, sweep, e.clone())).collect(), Vec::new()),
    };
    let mut records = Vec::new();
    let ind = algorithms::ind_cost(&inst);
    let opts = EvalOptions { rx_cost: cfg.rx_cost };
    let rows = cfg
        .methods
        .iter()
        .map(|&m| {
            let start = Instant::now();
            let out = run_method(&inst, m, cfg.cost_model, &opts, !cfg.no_improve);
            let elapsed_ms = if cfg.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
            match out {
                Ok(o) => {
                    let c = o.cost;
                    if cfg.output.records.is_some() {
                        records.push(AlgoRecord {
                            algo: m,
                            seed,
                            sweep,
                            cost: c,
                            tree: o.solution.as_ref().map(|(t, s)| TreeFile::from_scheme(t, s, &inst.net)),
                            iters: o.iters,
                            elapsed_ms,
                        });
                    }
                    // IND is its own reference, so its column is exactly 1.
                    let normalized = if m == Method::Ind { 1.0 } else { c.total / ind };
                    Row { method: m, seed: Some(seed), sweep, total: c.total, nc: c.nc, ic: c.ic, normalized, elapsed_ms, error: None }
                }
                Err(e) => failed(m, seed, sweep, e),
            }
        })
        .collect();
    (rows, records)
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub rows: Vec<Row>,
    #[serde(skip)]
    pub records: Vec<AlgoRecord>,
}

impl RunReport {
    /// Mean rows only.
    pub fn means(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.seed.is_none())
    }

    pub fn mean_of(&self, method: Method, sweep: Option<f64>) -> Option<&Row> {
        self.means().find(|r| r.method == method && r.sweep == sweep)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.error.is_some())
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<(), ConfigError> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(CsvRow {
                method: r.method.name(),
                seed: r.seed.map_or_else(|| "mean".to_string(), |s| s.to_string()),
                sweep: r.sweep.map_or_else(String::new, |v| v.to_string()),
                total: r.total,
                nc: r.nc,
                ic: r.ic,
                normalized: r.normalized,
                elapsed_ms: r.elapsed_ms,
            })?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// NaN costs of failed rows become `null`.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes whichever outputs the config names.
    pub fn write_outputs(&self) -> Result<(), ConfigError> {
        if let Some(p) = &self.config.output.csv {
            self.write_csv(std::fs::File::create(p)?)?;
        }
        if let Some(p) = &self.config.output.json {
            std::fs::write(p, self.to_json_string())?;
        }
        if let Some(p) = &self.config.output.records {
            std::fs::write(p, serde_json::to_string_pretty(&self.records)?)?;
        }
        Ok(())
    }
}

/// Runs every (sweep value, seed) point, in parallel when enabled, and
/// appends one mean row per (sweep value, method).
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, ConfigError> {
    cfg.check()?;
    let sweeps: Vec<Option<f64>> = match &cfg.sweep {
        Some(sw) => sw.values.iter().map(|&v| Some(v)).collect(),
        None => vec![None],
    };
    let points: Vec<(Option<f64>, u64)> =
        sweeps.iter().flat_map(|&s| cfg.seeds.iter().map(move |&seed| (s, seed))).collect();
    let results = par::map(&points, |&(s, seed)| run_point(cfg, seed, s));
    let (results, per_point): (Vec<Vec<Row>>, Vec<Vec<AlgoRecord>>) = results.into_iter().unzip();
    let mut rows = Vec::new();
    for (si, &s) in sweeps.iter().enumerate() {
        let chunk = &results[si * cfg.seeds.len()..(si + 1) * cfg.seeds.len()];
        for r in chunk {
            rows.extend(r.iter().cloned());
        }
        for (mi, &m) in cfg.methods.iter().enumerate() {
            let col = |f: fn(&Row) -> f64| mean(chunk.iter().map(|r| f(&r[mi])));
            rows.push(Row {
                method: m,
                seed: None,
                sweep: s,
                total: col(|r| r.total),
                nc: col(|r| r.nc),
                ic: col(|r| r.ic),
                normalized: col(|r| r.normalized),
                elapsed_ms: col(|r| r.elapsed_ms),
                error: None,
            });
        }
    }
    Ok(RunReport { config: cfg.clone(), rows, records: per_point.into_iter().flatten().collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_config(eps: f64) -> ExperimentConfig {
        ExperimentConfig::from_json_str(&format!(
            r#"{{"network": {{"kind": "fixture", "name": "fig1"}},
                "entropy": {{"model": "uniform", "h": 1.0, "eps": {eps}}},
                "methods": ["ind", "cluster", "treestar", "dsc"]}}"#
        ))
        .unwrap()
    }

    #[test]
    fn fig1_normalized() {
        let rep = run(&fig1_config(0.1)).unwrap();
        let norm = |m| rep.mean_of(m, None).unwrap().normalized;
        assert_eq!(norm(Method::Ind), 1.0);
        assert!((norm(Method::Cluster) - 6.3 / 9.0).abs() < 1e-9);
        assert!(norm(Method::Treestar) <= 2.7 / 9.0 + 1e-9);
        assert!((norm(Method::Dsc) - 1.8 / 9.0).abs() < 1e-9);
    }

    #[test]
    fn independence_is_all_ones() {
        let rep = run(&fig1_config(1.0)).unwrap();
        for r in rep.means() {
            assert!((r.normalized - 1.0).abs() < 1e-9, "{:?}", r);
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let base = r#""network": {"kind": "fixture", "name": "fig1"}, "entropy": {"model": "uniform", "h": 1.0, "eps": 0.1}"#;
        assert!(matches!(
            ExperimentConfig::from_json_str(&format!("{{{base}, \"methods\": []}}")),
            Err(ConfigError::NoMethods)
        ));
        assert!(matches!(
            ExperimentConfig::from_json_str(&format!(
                "{{{base}, \"methods\": [\"ind\"], \"sweep\": {{\"param\": \"c\", \"values\": [1]}}}}"
            )),
            Err(ConfigError::SweepMismatch { .. })
        ));
        assert!(ExperimentConfig::from_json_str(&format!("{{{base}, \"methods\": [\"bogus\"]}}")).is_err());
    }

    #[test]
    fn records_carry_trees() {
        let mut cfg = fig1_config(0.1);
        cfg.output.records = Some(PathBuf::from("unused.json"));
        let rep = run(&cfg).unwrap();
        assert_eq!(rep.records.len(), 4);
        let ts = rep.records.iter().find(|r| r.algo == Method::Treestar).unwrap();
        assert!(ts.iters >= 1);
        assert!(ts.tree.as_ref().unwrap().parent.len() >= 4);
        assert!(rep.records.iter().find(|r| r.algo == Method::Dsc).unwrap().tree.is_none());
    }

    #[test]
    fn failures_are_rows() {
        let mut cfg = fig1_config(0.1);
        cfg.cost_model = CostModel::Unicast;
        cfg.methods = vec![Method::Ind, Method::Wcds];
        let rep = run(&cfg).unwrap();
        let bad: Vec<_> = rep.failures().collect();
        assert_eq!(bad.len(), 1);
        assert!(bad[0].total.is_nan());
        assert!(rep.csv_string().contains("wcds,0,,NaN"));
    }
}
