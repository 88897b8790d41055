//! Self-check suite: shipped fixtures must evaluate to their recorded costs,
//! and small random instances must respect the optimality and
//! approximation guarantees when compared against the exact oracles.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithms::{self, GreedyOptions, Mce};
use crate::ctree::{eval_cost, CostModel, TreeFile};
use crate::entropy::{self, EntropySpec, Space};
use crate::instance::Instance;
use crate::netgraph::Network;
use crate::oracle::{self, OracleBudget};
use crate::{fixtures, par};

const TOL: f64 = 1e-9;

/// A stored tree with the costs it must evaluate to.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostFixture {
    pub name: String,
    pub network: serde_json::Value,
    pub entropy: EntropySpec,
    pub cost_model: CostModel,
    pub tree: TreeFile,
    pub expected: Expected,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub total: f64,
    pub nc: f64,
    pub ic: f64,
}

pub const SHIPPED: [(&str, &str); 2] = [
    ("fig1_example1.json", include_str!("../fixtures/fig1_example1.json")),
    ("fig1_example1_unicast.json", include_str!("../fixtures/fig1_example1_unicast.json")),
];

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    /// Largest greedy/optimum ratio seen, with the smallest bound slack.
    pub max_ratio: Option<f64>,
    pub min_slack: Option<f64>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(s, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        if let (Some(r), Some(sl)) = (self.max_ratio, self.min_slack) {
            let _ = writeln!(s, "greedy ratio: max {r:.4}, min slack {sl:.4}");
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(s, "{} checks, {} failed", self.checks.len(), failed);
        s
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Largest sensor count drawn for random instances.
    pub max_sensors: usize,
    /// Random instances per sensor count.
    pub instances: usize,
    /// Extra fixture files checked after the shipped ones.
    pub fixtures: Vec<PathBuf>,
    pub budget: OracleBudget,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_sensors: 6, instances: 8, fixtures: Vec::new(), budget: OracleBudget::default() }
    }
}

/// Evaluates a fixture. `Ok(detail)` when every cost matches.
pub fn check_fixture(text: &str) -> Result<String, String> {
    let fx: CostFixture = serde_json::from_str(text).map_err(|e| format!("parse: {e}"))?;
    let net = Network::from_json_str(&fx.network.to_string()).map_err(|e| e.to_string())?;
    let inst = Instance::from_spec(net, &fx.entropy).map_err(|e| e.to_string())?;
    let (tree, scheme) = fx.tree.to_scheme(&inst, fx.cost_model).map_err(|e| e.to_string())?;
    let got = eval_cost(&scheme, &tree, &inst).map_err(|e| e.to_string())?;
    let sim = oracle::simulate_transmissions(&scheme, &tree, &inst, 0.0);
    let e = fx.expected;
    let close = |a: f64, b: f64| (a - b).abs() <= TOL * b.abs().max(1.0);
    if !close(got.total, e.total) || !close(got.nc, e.nc) || !close(got.ic, e.ic) {
        return Err(format!(
            "{}: got total {} nc {} ic {}, expected {} {} {}",
            fx.name, got.total, got.nc, got.ic, e.total, e.nc, e.ic
        ));
    }
    if !close(sim, got.total) {
        return Err(format!("{}: simulated {sim} but evaluated {}", fx.name, got.total));
    }
    Ok(format!("{} total {}", fx.name, got.total))
}

#[derive(Debug, Default, Clone)]
struct Tally {
    unicast: (usize, Vec<String>),
    bound: (usize, Vec<String>),
    lemma: (usize, Vec<String>),
    replay: (usize, Vec<String>),
    dsc: (usize, Vec<String>),
    wcds: (usize, Vec<String>),
    max_ratio: Option<f64>,
    min_slack: Option<f64>,
}

fn note(slot: &mut (usize, Vec<String>), ok: bool, msg: impl FnOnce() -> String) {
    slot.0 += 1;
    if !ok {
        slot.1.push(msg());
    }
}

fn merge(a: &mut (usize, Vec<String>), b: (usize, Vec<String>)) {
    a.0 += b.0;
    a.1.extend(b.1);
}

fn leq(a: f64, b: f64) -> bool {
    a <= b + TOL * b.abs().max(1.0)
}

fn check_instance(k: usize, seed: u64, budget: &OracleBudget) -> Result<Tally, String> {
    let wired = fixtures::random_network(k, 0.3, true, seed);
    let model = fixtures::random_matrix_model(&wired, seed);
    let uinst = Instance::new(wired, model).map_err(|e| e.to_string())?;
    let net = fixtures::random_network(k, 0.3, false, seed);
    let model = fixtures::random_matrix_model(&net, seed);
    let inst = Instance::new(net, model).map_err(|e| e.to_string())?;
    let tag = format!("n={k} seed={seed}");
    let mut t = Tally::default();
    let dsc = algorithms::dsc_lower_bound(&inst);

    let (ut, us) = algorithms::unicast_arborescence(&uinst).map_err(|e| e.to_string())?;
    let uc = eval_cost(&us, &ut, &uinst).map_err(|e| e.to_string())?.total;
    let uopt = oracle::brute_restricted_opt(&uinst, CostModel::Unicast, Space::Ns, budget).map_err(|e| e.to_string())?;
    note(&mut t.unicast, (uc - uopt.cost).abs() <= TOL * uopt.cost.max(1.0), || {
        format!("{tag}: arborescence {uc} vs optimum {}", uopt.cost)
    });

    let g = algorithms::greedy_treestar(&inst, Mce::WlSg, GreedyOptions::default()).map_err(|e| e.to_string())?;
    let opt = oracle::brute_restricted_opt(&inst, CostModel::Wl, Space::Sg, budget).map_err(|e| e.to_string())?;
    let beta = entropy::beta(&inst.model, &inst.net, Space::Sg).map_err(|e| e.to_string())?.value;
    let rep = oracle::check_bound(g.cost.total, opt.cost, beta, k);
    t.max_ratio = Some(rep.ratio);
    t.min_slack = Some(rep.slack);
    note(&mut t.bound, rep.holds, || format!("{tag}: ratio {} above {}", rep.ratio, rep.bound));
    if k <= budget.unrestricted {
        let un = oracle::brute_unrestricted(&inst, CostModel::Wl, Space::Sg, budget).map_err(|e| e.to_string())?;
        note(&mut t.lemma, leq(opt.cost, 2.0 * un), || format!("{tag}: restricted {} vs unrestricted {un}", opt.cost));
    }

    let sim = oracle::simulate_transmissions(&g.scheme, &g.tree, &inst, 0.0);
    note(&mut t.replay, (sim - g.cost.total).abs() <= TOL * sim.max(1.0), || {
        format!("{tag}: simulated {sim} vs evaluated {}", g.cost.total)
    });

    let cl = algorithms::cluster_greedy(&inst, CostModel::Wl).map_err(|e| e.to_string())?;
    let udsc = algorithms::dsc_lower_bound(&uinst);
    note(&mut t.dsc, leq(udsc, uc), || format!("{tag}: unicast {uc} below DSC {udsc}"));
    for (what, c) in [("greedy", g.cost.total), ("optimum", opt.cost), ("cluster", cl.cost.total)] {
        note(&mut t.dsc, leq(dsc, c), || format!("{tag}: {what} {c} below DSC {dsc}"));
    }

    let s = algorithms::wcds_greedy(&inst.net);
    let valid = algorithms::is_wcds(&inst.net, &s) && algorithms::tree_from_wcds(&inst, &s).is_ok();
    note(&mut t.wcds, valid, || format!("{tag}: {s:?} is not a usable WCDS"));
    Ok(t)
}

/// Runs the fixture checks and the randomized oracle comparisons.
pub fn run_suite(opts: &VerifyOptions) -> VerifyReport {
    let mut rep = VerifyReport::default();
    for (name, text) in SHIPPED {
        match check_fixture(text) {
            Ok(d) => rep.push(format!("fixture {name}"), true, d),
            Err(e) => rep.push(format!("fixture {name}"), false, e),
        }
    }
    for p in &opts.fixtures {
        rep.push(format!("fixture {}", p.display()), false, String::new());
        let last = rep.checks.last_mut().expect("just pushed");
        match read_fixture(p) {
            Ok(d) => {
                last.passed = true;
                last.detail = d;
            }
            Err(e) => last.detail = e,
        }
    }

    let max_k = opts.max_sensors.min(opts.budget.restricted);
    let jobs: Vec<(usize, u64)> =
        (1..=max_k).flat_map(|k| (0..opts.instances as u64).map(move |s| (k, 1000 * k as u64 + s))).collect();
    let results = par::map(&jobs, |&(k, seed)| check_instance(k, seed, &opts.budget));
    let mut all = Tally::default();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(t) => {
                merge(&mut all.unicast, t.unicast);
                merge(&mut all.bound, t.bound);
                merge(&mut all.lemma, t.lemma);
                merge(&mut all.replay, t.replay);
                merge(&mut all.dsc, t.dsc);
                merge(&mut all.wcds, t.wcds);
                all.max_ratio = pick(all.max_ratio, t.max_ratio, f64::max);
                all.min_slack = pick(all.min_slack, t.min_slack, f64::min);
            }
            Err(e) => errors.push(e),
        }
    }
    let named = [
        ("unicast arborescence is the restricted optimum", all.unicast),
        ("greedy within 4 beta^2 H_n of the optimum", all.bound),
        ("restricted optimum within 2x unrestricted", all.lemma),
        ("evaluated cost matches transmission replay", all.replay),
        ("every total dominates the DSC bound", all.dsc),
        ("greedy WCDS is valid", all.wcds),
    ];
    for (name, (n, bad)) in named {
        let detail = if bad.is_empty() { format!("{n} cases") } else { format!("{} of {n} failed; {}", bad.len(), bad[0]) };
        rep.push(name, bad.is_empty(), detail);
    }
    if !errors.is_empty() {
        rep.push("oracle runs", false, format!("{} errors; {}", errors.len(), errors[0]));
    }
    rep.max_ratio = all.max_ratio;
    rep.min_slack = all.min_slack;
    rep
}

fn pick(a: Option<f64>, b: Option<f64>, f: fn(f64, f64) -> f64) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(f(x, y)),
        (x, y) => x.or(y),
    }
}

fn read_fixture(p: &Path) -> Result<String, String> {
    let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
    check_fixture(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_fixtures_hold() {
        for (name, text) in SHIPPED {
            check_fixture(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn tampered_cost_fails() {
        let text = SHIPPED[0].1.replace("\"total\": 2.7", "\"total\": 2.6");
        assert!(check_fixture(&text).is_err());
    }

    #[test]
    fn tiny_budget_passes() {
        let rep = run_suite(&VerifyOptions { max_sensors: 2, instances: 3, ..Default::default() });
        assert!(rep.ok(), "{}", rep.render());
    }
}
