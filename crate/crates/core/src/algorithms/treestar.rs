//! Greedy treestar framework: repeatedly merge forest components through the
//! most cost-effective star until one spanning tree remains.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::algorithms::{improve, AlgoError};
use crate::ctree::{
    eval_cost, scheme_from_extended, CompressionTree, CostBreakdown, CostModel, ExtendedCompressionTree,
    MovementScheme, RawDelivery,
};
use crate::instance::Instance;
use crate::netgraph::NodeId;
use crate::{cmp_cost, par};

/// Largest network on which the exact WL-NS and multicast subroutines run.
pub const EXACT_LIMIT: usize = 20;

/// Sensor components plus everything merged into them so far.
#[derive(Debug, Clone)]
pub struct Forest {
    uf: Vec<usize>,
    components: usize,
    pub arcs: Vec<(NodeId, NodeId)>,
    pub raw: BTreeMap<NodeId, RawDelivery>,
    pub history: Vec<MergeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeRecord {
    pub center: NodeId,
    pub leaves: Vec<NodeId>,
    /// Components before the merge (`n_i`).
    pub before: usize,
    /// Components merged, the center's included (`m_i`).
    pub merged: usize,
    pub cost: f64,
}

impl Forest {
    pub fn singletons(inst: &Instance) -> Self {
        Forest {
            uf: (0..inst.net.len()).collect(),
            components: inst.net.sensor_count(),
            arcs: Vec::new(),
            raw: BTreeMap::new(),
            history: Vec::new(),
        }
    }

    /// Representative of `v`'s component.
    pub fn component(&self, mut v: NodeId) -> usize {
        while self.uf[v] != v {
            v = self.uf[v];
        }
        v
    }

    pub fn n_components(&self) -> usize {
        self.components
    }

    /// Groups sensors by component, keyed by representative.
    pub fn groups(&self, inst: &Instance) -> BTreeMap<usize, Vec<NodeId>> {
        let mut g: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
        for s in inst.net.sensors() {
            g.entry(self.component(s)).or_default().push(s);
        }
        g
    }

    /// Joins an extra edge without any raw movement; used to build
    /// arbitrary forest states in tests.
    pub fn link(&mut self, a: NodeId, b: NodeId) -> bool {
        let (ra, rb) = (self.component(a), self.component(b));
        if ra == rb {
            return false;
        }
        self.uf[ra.max(rb)] = ra.min(rb);
        self.components -= 1;
        self.arcs.push((a, b));
        true
    }

    pub fn merge(&mut self, star: &TreeStar) {
        let before = self.components;
        let center = star.center;
        let model = star.delivery.cost_model();
        self.raw
            .entry(center)
            .or_insert_with(|| RawDelivery::empty(model, center))
            .absorb(&star.delivery);
        for &v in &star.leaves {
            let (rc, rv) = (self.component(center), self.component(v));
            debug_assert_ne!(rc, rv, "leaf shares the center's component");
            self.uf[rc.max(rv)] = rc.min(rv);
            self.components -= 1;
            self.arcs.push((center, v));
        }
        self.history.push(MergeRecord {
            center,
            leaves: star.leaves.clone(),
            before,
            merged: star.k() + 1,
            cost: star.cost(),
        });
    }
}

/// A center, one leaf node in each of `k` foreign components, and the raw
/// delivery of the center's value that reaches all leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeStar {
    pub center: NodeId,
    pub leaves: Vec<NodeId>,
    pub delivery: RawDelivery,
    /// Raw delivery of the center's value.
    pub ic_part: f64,
    /// Conditionals shipped from the leaves.
    pub nc_part: f64,
}

impl TreeStar {
    pub fn k(&self) -> usize {
        self.leaves.len()
    }

    pub fn cost(&self) -> f64 {
        self.ic_part + self.nc_part
    }

    pub fn ceff(&self) -> f64 {
        self.cost() / (self.k() + 1) as f64
    }
}

/// Selection order between candidate stars: cost-effectiveness, then cost,
/// then center id.
pub fn star_order(a: &TreeStar, b: &TreeStar) -> std::cmp::Ordering {
    cmp_cost(a.ceff(), b.ceff())
        .then(cmp_cost(a.cost(), b.cost()))
        .then(a.center.cmp(&b.center))
}

/// Best prefix of ascending `(h, leaf)` values under a fixed base cost.
/// Returns `(k, sum)`; `k` is 0 when `hs` is empty.
pub(crate) fn best_prefix(base: f64, hs: &[(f64, NodeId)]) -> (usize, f64) {
    let mut best = (0, 0.0);
    let mut best_ceff = f64::INFINITY;
    let mut sum = 0.0;
    for (i, &(h, _)) in hs.iter().enumerate() {
        sum += h;
        let ceff = (base + sum) / (i + 2) as f64;
        if cmp_cost(ceff, best_ceff).is_lt() {
            best_ceff = ceff;
            best = (i + 1, sum);
        }
    }
    best
}

/// Per foreign component, the cheapest `(h, leaf)` among `holders`,
/// sorted ascending.
fn leaf_costs(forest: &Forest, inst: &Instance, r: NodeId, holders: impl Iterator<Item = NodeId>) -> Vec<(f64, NodeId)> {
    let own = forest.component(r);
    let mut per: BTreeMap<usize, (f64, NodeId)> = BTreeMap::new();
    for v in holders {
        if !inst.net.is_sensor(v) || forest.component(v) == own {
            continue;
        }
        let h = inst.hc(v, r) * inst.dbs(v);
        let c = forest.component(v);
        let better = per.get(&c).is_none_or(|&(bh, bv)| cmp_cost(h, bh).then(v.cmp(&bv)).is_lt());
        if better {
            per.insert(c, (h, v));
        }
    }
    let mut hs: Vec<(f64, NodeId)> = per.into_values().collect();
    hs.sort_by(|a, b| cmp_cost(a.0, b.0).then(a.1.cmp(&b.1)));
    hs
}

/// Best WL-SG star centered at `r`: one local broadcast reaches every
/// neighbor, so only neighbor components qualify.
pub fn wlsg_star_at(forest: &Forest, inst: &Instance, r: NodeId) -> Option<TreeStar> {
    let hs = leaf_costs(forest, inst, r, inst.net.sensor_neighbors(r));
    let base = inst.h(r) * inst.net.transmit_weight(r);
    let (k, sum) = best_prefix(base, &hs);
    (k > 0).then(|| TreeStar {
        center: r,
        leaves: hs[..k].iter().map(|&(_, v)| v).collect(),
        delivery: RawDelivery::Broadcast(BTreeSet::from([r])),
        ic_part: base,
        nc_part: sum,
    })
}

/// Most cost-effective WL-SG treestar over all centers.
pub fn mce_treestar_wlsg(forest: &Forest, inst: &Instance) -> Option<TreeStar> {
    let sensors = inst.sensors();
    par::map(&sensors, |&r| wlsg_star_at(forest, inst, r))
        .into_iter()
        .flatten()
        .min_by(star_order)
}

/// Connected node sets containing `r`, each visited once. `allow` limits
/// which nodes may join.
pub(crate) fn connected_sets(
    net: &crate::netgraph::Network,
    r: NodeId,
    allow: &dyn Fn(NodeId) -> bool,
    visit: &mut dyn FnMut(&[NodeId]),
) {
    // Classic extension enumeration: grow by frontier nodes with a
    // forbidden set so each subset appears exactly once.
    fn rec(
        net: &crate::netgraph::Network,
        allow: &dyn Fn(NodeId) -> bool,
        set: &mut Vec<NodeId>,
        frontier: Vec<NodeId>,
        banned: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[NodeId]),
    ) {
        visit(set);
        for (i, &v) in frontier.iter().enumerate() {
            set.push(v);
            let mut next: Vec<NodeId> = frontier[i + 1..].to_vec();
            let mut added = Vec::new();
            for u in net.neighbor_ids(v) {
                if allow(u) && !banned[u] && !next.contains(&u) {
                    next.push(u);
                    banned[u] = true;
                    added.push(u);
                }
            }
            rec(net, allow, set, next, banned, visit);
            for u in added {
                banned[u] = false;
            }
            // v stays banned, so later branches never add it again.
            set.pop();
        }
    }
    let mut banned = vec![false; net.len()];
    banned[r] = true;
    let mut frontier = Vec::new();
    for u in net.neighbor_ids(r) {
        if allow(u) {
            banned[u] = true;
            frontier.push(u);
        }
    }
    let mut set = vec![r];
    rec(net, allow, &mut set, frontier, &mut banned, visit);
}

/// Weight of a minimum spanning tree of the subgraph induced by `set`
/// (infinite if disconnected).
pub(crate) fn induced_mst(net: &crate::netgraph::Network, set: &[NodeId]) -> f64 {
    let mut in_tree = vec![false; set.len()];
    let mut best = vec![f64::INFINITY; set.len()];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..set.len() {
        let i = (0..set.len()).filter(|&i| !in_tree[i]).min_by(|&a, &b| best[a].total_cmp(&best[b]).then(a.cmp(&b)));
        let Some(i) = i else { break };
        if best[i].is_infinite() {
            return f64::INFINITY;
        }
        in_tree[i] = true;
        total += best[i];
        for j in 0..set.len() {
            if !in_tree[j] {
                if let Some(w) = net.edge_weight(set[i], set[j]) {
                    best[j] = best[j].min(w);
                }
            }
        }
    }
    total
}

fn mst_edges(net: &crate::netgraph::Network, set: &[NodeId]) -> BTreeSet<(NodeId, NodeId)> {
    let mut in_tree = vec![false; set.len()];
    let mut best = vec![(f64::INFINITY, usize::MAX); set.len()];
    best[0].0 = 0.0;
    let mut out = BTreeSet::new();
    for _ in 0..set.len() {
        let i = (0..set.len())
            .filter(|&i| !in_tree[i])
            .min_by(|&a, &b| best[a].0.total_cmp(&best[b].0).then(a.cmp(&b)))
            .expect("set is connected");
        in_tree[i] = true;
        if best[i].1 != usize::MAX {
            let (a, b) = (set[i], set[best[i].1]);
            out.insert((a.min(b), a.max(b)));
        }
        for j in 0..set.len() {
            if !in_tree[j] {
                if let Some(w) = net.edge_weight(set[i], set[j]) {
                    if w < best[j].0 {
                        best[j] = (w, i);
                    }
                }
            }
        }
    }
    out
}

/// Raw-delivery shape searched by the exact Mce procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    /// Connected sensor relays; holders are their closed neighborhoods.
    Relays,
    /// Connected node set spanned by its induced MST; holders are the set.
    Steiner,
}

/// Per-k minimum star cost at `r` and the overall best star, by
/// enumerating every delivery set.
fn exact_star_at(forest: &Forest, inst: &Instance, r: NodeId, shape: Shape) -> (Vec<Option<f64>>, Option<TreeStar>) {
    let net = &inst.net;
    let hr = inst.h(r);
    let n_foreign = forest.n_components() - 1;
    let mut per_k: Vec<Option<f64>> = vec![None; n_foreign + 1];
    let mut best: Option<TreeStar> = None;
    let allow_sensor = |u: NodeId| net.is_sensor(u);
    let allow_any = |_: NodeId| true;
    let allow: &dyn Fn(NodeId) -> bool = match shape {
        Shape::Relays => &allow_sensor,
        Shape::Steiner => &allow_any,
    };
    connected_sets(net, r, allow, &mut |set| {
        let (base, hs) = match shape {
            Shape::Relays => {
                let w: f64 = set.iter().map(|&v| net.transmit_weight(v)).sum();
                let mut holders: BTreeSet<NodeId> = set.iter().copied().collect();
                for &v in set {
                    holders.extend(net.neighbor_ids(v));
                }
                (hr * w, leaf_costs(forest, inst, r, holders.into_iter()))
            }
            Shape::Steiner => {
                let w = induced_mst(net, set);
                (hr * w, leaf_costs(forest, inst, r, set.iter().copied()))
            }
        };
        let mut sum = 0.0;
        for (i, &(h, _)) in hs.iter().enumerate() {
            sum += h;
            let c = base + sum;
            let slot = &mut per_k[i + 1];
            if slot.is_none_or(|x| c < x) {
                *slot = Some(c);
            }
        }
        let (k, sum) = best_prefix(base, &hs);
        if k == 0 {
            return;
        }
        let delivery = match shape {
            Shape::Relays => RawDelivery::Broadcast(set.iter().copied().collect()),
            Shape::Steiner => RawDelivery::Multicast(mst_edges(net, set)),
        };
        let star = TreeStar {
            center: r,
            leaves: hs[..k].iter().map(|&(_, v)| v).collect(),
            delivery,
            ic_part: base,
            nc_part: sum,
        };
        // Among equally effective stars keep the first enumerated with the
        // smallest cost.
        if best.as_ref().is_none_or(|b| star_order(&star, b).is_lt()) {
            best = Some(star);
        }
    });
    (per_k, best)
}

/// Minimum WL-NS star cost at `r` for each number of leaf-trees `k`
/// (index 0 unused).
pub fn wlns_costs_per_k(forest: &Forest, inst: &Instance, r: NodeId) -> Result<Vec<Option<f64>>, AlgoError> {
    gate(inst)?;
    Ok(exact_star_at(forest, inst, r, Shape::Relays).0)
}

/// Best multicast star cost-effectiveness at `r`.
pub fn multicast_best_at(forest: &Forest, inst: &Instance, r: NodeId) -> Result<Option<TreeStar>, AlgoError> {
    gate(inst)?;
    Ok(exact_star_at(forest, inst, r, Shape::Steiner).1)
}

fn gate(inst: &Instance) -> Result<(), AlgoError> {
    if inst.net.len() > EXACT_LIMIT {
        return Err(AlgoError::TooLarge { n: inst.net.len(), limit: EXACT_LIMIT });
    }
    Ok(())
}

/// Cost of a WL-NS star with fixed leaves: cheapest connected relay set
/// at `center` whose broadcasts reach every leaf, times `H(center)`, plus
/// the leaves' conditionals.
pub fn treestar_cost_wlns(inst: &Instance, center: NodeId, leaves: &[NodeId]) -> Result<f64, AlgoError> {
    gate(inst)?;
    let relays = crate::oracle::cds_exact(&inst.net, center, leaves)
        .map_err(|_| AlgoError::TooLarge { n: inst.net.len(), limit: EXACT_LIMIT })?
        .ok_or(AlgoError::Unreachable(center))?;
    Ok(inst.h(center) * relays.0 + leaves.iter().map(|&v| inst.hc(v, center) * inst.dbs(v)).sum::<f64>())
}

/// Cost of a multicast star with fixed leaves, through a minimum Steiner tree.
pub fn treestar_cost_multicast(inst: &Instance, center: NodeId, leaves: &[NodeId]) -> Result<f64, AlgoError> {
    gate(inst)?;
    let mut terms = vec![center];
    terms.extend_from_slice(leaves);
    let w = crate::oracle::steiner_exact(&inst.net, &terms)
        .map_err(|_| AlgoError::TooLarge { n: inst.net.len(), limit: EXACT_LIMIT })?;
    Ok(inst.h(center) * w + leaves.iter().map(|&v| inst.hc(v, center) * inst.dbs(v)).sum::<f64>())
}

/// Which most-cost-effective-treestar procedure drives the greedy loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mce {
    /// Local broadcast, conditionals only between network neighbors.
    WlSg,
    /// Local broadcast relayed over several hops; exact, small networks only.
    WlNs,
    /// Shared Steiner delivery; exact, small networks only.
    Multicast,
}

impl Mce {
    pub fn cost_model(self) -> CostModel {
        match self {
            Mce::WlSg | Mce::WlNs => CostModel::Wl,
            Mce::Multicast => CostModel::Multicast,
        }
    }

    pub fn best(self, forest: &Forest, inst: &Instance) -> Result<Option<TreeStar>, AlgoError> {
        match self {
            Mce::WlSg => Ok(mce_treestar_wlsg(forest, inst)),
            Mce::WlNs | Mce::Multicast => {
                gate(inst)?;
                let shape = if self == Mce::WlNs { Shape::Relays } else { Shape::Steiner };
                let sensors = inst.sensors();
                Ok(par::map(&sensors, |&r| exact_star_at(forest, inst, r, shape).1)
                    .into_iter()
                    .flatten()
                    .min_by(star_order))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyOptions {
    /// Run [`improve::local_improve`] on the result (WL only).
    pub improve: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions { improve: true }
    }
}

#[derive(Debug, Clone)]
pub struct GreedyResult {
    pub extended: ExtendedCompressionTree,
    pub tree: CompressionTree,
    pub scheme: MovementScheme,
    pub cost: CostBreakdown,
    pub history: Vec<MergeRecord>,
    /// Moves applied by local improvement.
    pub improvements: usize,
}

/// Merges forest components through most cost-effective treestars until a
/// single tree remains (or no star can merge anything), then orients it.
pub fn greedy_treestar(inst: &Instance, mce: Mce, opts: GreedyOptions) -> Result<GreedyResult, AlgoError> {
    let mut forest = Forest::singletons(inst);
    while forest.n_components() > 1 {
        match mce.best(&forest, inst)? {
            Some(star) => forest.merge(&star),
            None => break,
        }
    }
    let extended = ExtendedCompressionTree { cost_model: mce.cost_model(), arcs: forest.arcs, raw: forest.raw };
    let (mut tree, mut scheme) = scheme_from_extended(&extended, inst)?;
    let mut improvements = 0;
    if opts.improve && mce.cost_model() == CostModel::Wl {
        let out = improve::local_improve(inst, tree, scheme);
        tree = out.0;
        scheme = out.1;
        improvements = out.2;
    }
    let cost = eval_cost(&scheme, &tree, inst)?;
    Ok(GreedyResult { extended, tree, scheme, cost, history: forest.history, improvements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::EntropyModel;
    use crate::fixtures;
    use crate::netgraph::{build_network, Edge, Node};

    fn fig1(eps: f64) -> Instance {
        let net = fixtures::fig1_network();
        Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, eps)).unwrap()
    }

    #[test]
    fn fig1_first_star() {
        let inst = fig1(0.1);
        let f = Forest::singletons(&inst);
        let s = mce_treestar_wlsg(&f, &inst).unwrap();
        assert_eq!(s.center, 1);
        assert_eq!(s.leaves.iter().copied().collect::<BTreeSet<_>>(), BTreeSet::from([2, 3, 5]));
        assert!((s.ceff() - 0.375).abs() < 1e-12);
    }

    #[test]
    fn star_graph_takes_all_leaves() {
        let mut nodes = vec![Node::new(0, 0.0, 0.0), Node::new(1, 1.0, 0.0)];
        let mut edges = vec![Edge::new(0, 1)];
        for i in 2..7 {
            nodes.push(Node::new(i, 1.0, i as f64));
            edges.push(Edge::new(1, i));
        }
        let net = build_network(nodes, edges, 0).unwrap();
        let inst = Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, 0.2)).unwrap();
        let s = mce_treestar_wlsg(&Forest::singletons(&inst), &inst).unwrap();
        assert_eq!(s.center, 1);
        assert_eq!(s.k(), 5);
        // (1 + 5 * 0.2 * 2) / 6 is below every shorter prefix.
        assert!((s.ceff() - 3.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn two_node_path() {
        let net = build_network(
            vec![Node::new(0, 0.0, 0.0), Node::new(1, 1.0, 0.0), Node::new(2, 2.0, 0.0)],
            vec![Edge::new(0, 1), Edge::new(1, 2)],
            0,
        )
        .unwrap();
        let inst = Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, 0.3)).unwrap();
        let r = greedy_treestar(&inst, Mce::WlSg, GreedyOptions::default()).unwrap();
        assert_eq!(r.history.len(), 1);
        assert_eq!(r.tree.roots(), vec![1]);
        assert!((r.cost.total - (1.0 + 0.3 * 2.0)).abs() < 1e-12);
    }

    #[test]
    fn fig1_greedy_beats_example() {
        for eps in [0.0, 0.05, 0.1] {
            let inst = fig1(eps);
            let r = greedy_treestar(&inst, Mce::WlSg, GreedyOptions::default()).unwrap();
            assert!(r.cost.total <= 2.0 + 7.0 * eps + 1e-9, "eps {eps}: {}", r.cost.total);
            for rec in &r.history {
                assert!(rec.merged >= 2);
            }
        }
    }

    #[test]
    fn fig3_merge_sequence() {
        let net = fixtures::fig3_network();
        let inst = Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, fixtures::FIG3_EPS)).unwrap();
        let r = greedy_treestar(&inst, Mce::WlSg, GreedyOptions { improve: false }).unwrap();
        let centers: Vec<_> = r.history.iter().map(|h| h.center).collect();
        assert_eq!(centers, vec![10, 9, 3, 4]);
        assert_eq!(r.tree.roots(), vec![4]);
        for (v, p) in [(1, 4), (5, 4), (9, 5), (3, 1), (10, 9)] {
            assert_eq!(r.tree.parent(v), Some(p), "parent of {v}");
        }
    }

    #[test]
    fn component_bookkeeping() {
        let net = crate::netgraph::gen_random(14, 100.0, 100.0, 40.0, 3).unwrap();
        let inst = Instance::new(net.clone(), EntropyModel::rainfall(&net, 1.0, 20.0)).unwrap();
        let r = greedy_treestar(&inst, Mce::WlSg, GreedyOptions::default()).unwrap();
        let mut n = inst.net.sensor_count();
        for rec in &r.history {
            assert_eq!(rec.before, n);
            n = n - rec.merged + 1;
        }
        assert_eq!(n, 1);
    }

    #[test]
    fn connected_set_enumeration_counts() {
        // Path 0-1-2-3: connected sets containing 1 are {1}, {0,1}, {1,2},
        // {0,1,2}, {1,2,3}, {0,1,2,3}.
        let net = build_network(
            (0..4).map(|i| Node::new(i, i as f64, 0.0)).collect(),
            vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 3)],
            0,
        )
        .unwrap();
        let mut seen = BTreeSet::new();
        connected_sets(&net, 1, &|_| true, &mut |s| {
            let mut v = s.to_vec();
            v.sort();
            assert!(seen.insert(v));
        });
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn wlns_path_relay() {
        // r - a - b: reaching b needs r and a to broadcast.
        let net = build_network(
            vec![
                Node::new(0, 0.0, 0.0),
                Node { id: 1, x: 1.0, y: 0.0, w: 1.5 },
                Node { id: 2, x: 2.0, y: 0.0, w: 2.0 },
                Node::new(3, 3.0, 0.0),
            ],
            vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 3)],
            0,
        )
        .unwrap();
        let inst = Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, 0.0)).unwrap();
        assert!((treestar_cost_wlns(&inst, 1, &[3]).unwrap() - 3.5).abs() < 1e-12);
        assert!((treestar_cost_wlns(&inst, 1, &[2]).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn multicast_triangle() {
        let net = build_network(
            (0..3).map(|i| Node::new(i, i as f64, 0.0)).collect(),
            vec![Edge::weighted(0, 1, 2.0), Edge::weighted(1, 2, 1.0), Edge::weighted(0, 2, 5.0)],
            0,
        )
        .unwrap();
        let inst = Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, 0.0)).unwrap();
        assert_eq!(treestar_cost_multicast(&inst, 1, &[2]).unwrap(), 1.0);
    }

    #[test]
    fn exact_procedures_agree_when_one_hop_suffices() {
        let inst = fig1(0.1);
        let f = Forest::singletons(&inst);
        let a = Mce::WlSg.best(&f, &inst).unwrap().unwrap();
        let b = Mce::WlNs.best(&f, &inst).unwrap().unwrap();
        assert!(cmp_cost(b.ceff(), a.ceff()).is_le());
    }
}
