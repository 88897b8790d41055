//! Compression trees, movement schemes and their cost.
//!
//! A [`CompressionTree`] maps every sensor to its parent. A sensor whose
//! parent is the base station is a *root*: it ships its raw value to the
//! base station. Ordinary trees have exactly one root; forests arise from
//! the unicast arborescence and the cluster baseline.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entropy::EntropyError;
use crate::instance::Instance;
use crate::netgraph::{Network, NodeId};
use crate::{cmp_cost, Cost};

/// How raw values travel between nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CostModel {
    /// Local broadcast: one transmission reaches every neighbor.
    #[default]
    Wl,
    /// Wired, shared transmissions along a Steiner tree.
    Multicast,
    /// Wired, every recipient paid separately along a shortest path.
    Unicast,
}

impl std::fmt::Display for CostModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CostModel::Wl => "WL",
            CostModel::Multicast => "MULTICAST",
            CostModel::Unicast => "UNICAST",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressionTree {
    bs: NodeId,
    parent: BTreeMap<NodeId, NodeId>,
}

impl CompressionTree {
    /// `parent` maps each sensor to its parent; the base station id marks a root.
    pub fn new(bs: NodeId, parent: BTreeMap<NodeId, NodeId>) -> Self {
        CompressionTree { bs, parent }
    }

    pub fn bs(&self) -> NodeId {
        self.bs
    }

    /// Parent in the tree, `None` for roots and unknown nodes.
    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent.get(&v).copied().filter(|&p| p != self.bs)
    }

    pub fn parent_map(&self) -> &BTreeMap<NodeId, NodeId> {
        &self.parent
    }

    pub fn set_parent(&mut self, v: NodeId, p: NodeId) {
        self.parent.insert(v, p);
    }

    pub fn is_root(&self, v: NodeId) -> bool {
        self.parent.get(&v) == Some(&self.bs)
    }

    pub fn roots(&self) -> Vec<NodeId> {
        self.parent.iter().filter(|&(_, &p)| p == self.bs).map(|(&v, _)| v).collect()
    }

    /// The first root, if any.
    pub fn root(&self) -> Option<NodeId> {
        self.roots().first().copied()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.parent.keys().copied()
    }

    /// Non-root `(child, parent)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.parent.iter().filter(|&(_, &p)| p != self.bs).map(|(&c, &p)| (c, p))
    }

    pub fn children(&self) -> BTreeMap<NodeId, Vec<NodeId>> {
        let mut ch: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for (c, p) in self.edges() {
            ch.entry(p).or_default().push(c);
        }
        ch
    }

    /// True if `a` lies on the parent chain of `b` (or equals it).
    /// Returns false when the chain cycles before reaching `a`.
    pub fn is_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        let mut v = b;
        for _ in 0..=self.parent.len() {
            if v == a {
                return true;
            }
            match self.parent(v) {
                Some(p) => v = p,
                None => return false,
            }
        }
        false
    }

    /// Every parent pair is adjacent in the network.
    pub fn is_subgraph_of(&self, net: &Network) -> bool {
        self.edges().all(|(c, p)| net.adjacent(c, p))
    }

    /// Covers every sensor, and every parent chain reaches the base station.
    pub fn is_spanning(&self, net: &Network) -> bool {
        net.sensors().all(|s| self.parent.contains_key(&s))
            && self.parent.len() == net.sensor_count()
            && self.parent.keys().all(|&v| {
                let mut cur = v;
                for _ in 0..=self.parent.len() {
                    match self.parent.get(&cur) {
                        Some(&p) if p == self.bs => return true,
                        Some(&p) => cur = p,
                        None => return false,
                    }
                }
                false
            })
    }
}

/// Raw-value delivery plan of one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawDelivery {
    /// Broadcasting nodes (the source first among them); each relay must
    /// have heard the value, so the set is connected and contains the source.
    Broadcast(BTreeSet<NodeId>),
    /// Undirected network edges forming a connected subgraph at the source.
    Multicast(BTreeSet<(NodeId, NodeId)>),
    /// Recipients, each reached along its own shortest path.
    Unicast(BTreeSet<NodeId>),
}

impl RawDelivery {
    pub fn empty(model: CostModel, src: NodeId) -> Self {
        match model {
            CostModel::Wl => RawDelivery::Broadcast(BTreeSet::from([src])),
            CostModel::Multicast => RawDelivery::Multicast(BTreeSet::new()),
            CostModel::Unicast => RawDelivery::Unicast(BTreeSet::new()),
        }
    }

    pub fn cost_model(&self) -> CostModel {
        match self {
            RawDelivery::Broadcast(_) => CostModel::Wl,
            RawDelivery::Multicast(_) => CostModel::Multicast,
            RawDelivery::Unicast(_) => CostModel::Unicast,
        }
    }

    /// Merges another plan of the same kind into this one.
    pub fn absorb(&mut self, other: &RawDelivery) {
        match (self, other) {
            (RawDelivery::Broadcast(a), RawDelivery::Broadcast(b)) => a.extend(b.iter().copied()),
            (RawDelivery::Multicast(a), RawDelivery::Multicast(b)) => a.extend(b.iter().copied()),
            (RawDelivery::Unicast(a), RawDelivery::Unicast(b)) => a.extend(b.iter().copied()),
            _ => panic!("cannot merge deliveries of different cost models"),
        }
    }
}

pub(crate) fn norm_edge(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    (u.min(v), u.max(v))
}

/// Nodes holding `X_src` once `d` has been carried out.
pub fn holders(net: &Network, src: NodeId, d: &RawDelivery) -> BTreeSet<NodeId> {
    let mut out = BTreeSet::from([src]);
    match d {
        RawDelivery::Broadcast(relays) => {
            for &r in relays {
                out.insert(r);
                out.extend(net.neighbor_ids(r));
            }
        }
        RawDelivery::Multicast(edges) => {
            for &(u, v) in edges {
                out.insert(u);
                out.insert(v);
            }
        }
        RawDelivery::Unicast(rec) => out.extend(rec.iter().copied()),
    }
    out
}

fn delivery_problem(net: &Network, src: NodeId, d: &RawDelivery) -> Option<String> {
    let n = net.len();
    match d {
        RawDelivery::Broadcast(relays) => {
            if !relays.contains(&src) {
                return Some("broadcast relays must include the source".into());
            }
            if let Some(&r) = relays.iter().find(|&&r| r >= n || r == net.bs()) {
                return Some(format!("node {r} cannot relay"));
            }
            let mut seen = BTreeSet::from([src]);
            let mut stack = vec![src];
            while let Some(v) = stack.pop() {
                for u in net.neighbor_ids(v) {
                    if relays.contains(&u) && seen.insert(u) {
                        stack.push(u);
                    }
                }
            }
            if seen.len() != relays.len() {
                return Some("relay set is not connected to the source".into());
            }
        }
        RawDelivery::Multicast(edges) => {
            if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n || !net.adjacent(u, v)) {
                return Some(format!("({u}, {v}) is not a network edge"));
            }
            let mut seen = BTreeSet::from([src]);
            let mut changed = true;
            while changed {
                changed = false;
                for &(u, v) in edges {
                    if seen.contains(&u) != seen.contains(&v) {
                        seen.insert(u);
                        seen.insert(v);
                        changed = true;
                    }
                }
            }
            if edges.iter().any(|(u, _)| !seen.contains(u)) {
                return Some("multicast edges are not connected to the source".into());
            }
        }
        RawDelivery::Unicast(rec) => {
            if let Some(&r) = rec.iter().find(|&&r| r >= n || r == src) {
                return Some(format!("invalid recipient {r}"));
            }
        }
    }
    None
}

/// Energy per bit of carrying out `d` (multiply by the value's entropy).
pub fn delivery_cost(inst: &Instance, src: NodeId, d: &RawDelivery) -> f64 {
    match d {
        RawDelivery::Broadcast(relays) => relays.iter().map(|&r| inst.net.transmit_weight(r)).sum(),
        RawDelivery::Multicast(edges) => {
            edges.iter().map(|&(u, v)| inst.net.edge_weight(u, v).unwrap_or(f64::INFINITY)).sum()
        }
        RawDelivery::Unicast(rec) => rec.iter().map(|&t| inst.dist.d(src, t)).sum(),
    }
}

/// Cheapest relay chain (by transmit weight) that lets `target` hear a
/// value already broadcast by `relays`. Sensors only; empty when `target`
/// already hears it.
pub fn wl_relay_path(net: &Network, relays: &BTreeSet<NodeId>, target: NodeId) -> Vec<NodeId> {
    let hears = |v: NodeId| v == target || net.adjacent(v, target);
    if relays.iter().any(|&r| hears(r)) {
        return Vec::new();
    }
    let n = net.len();
    let mut best = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    for &r in relays {
        best[r] = 0.0;
        heap.push(Reverse((Cost(0.0), r)));
    }
    while let Some(Reverse((Cost(c), v))) = heap.pop() {
        if c > best[v] {
            continue;
        }
        if hears(v) {
            let mut path = Vec::new();
            let mut cur = v;
            while !relays.contains(&cur) {
                path.push(cur);
                cur = prev[cur];
            }
            path.reverse();
            return path;
        }
        for u in net.sensor_neighbors(v) {
            let nc = c + net.transmit_weight(u);
            if nc < best[u] {
                best[u] = nc;
                prev[u] = v;
                heap.push(Reverse((Cost(nc), u)));
            }
        }
    }
    Vec::new()
}

/// Extends `d` so that `target` receives `X_src`.
pub fn extend_delivery(inst: &Instance, src: NodeId, d: &mut RawDelivery, target: NodeId) {
    let net = &inst.net;
    if holders(net, src, d).contains(&target) {
        return;
    }
    match d {
        RawDelivery::Broadcast(relays) => {
            let path = wl_relay_path(net, relays, target);
            relays.extend(path);
        }
        RawDelivery::Multicast(edges) => {
            let held = holders(net, src, &RawDelivery::Multicast(edges.clone()));
            let from = held
                .iter()
                .copied()
                .min_by(|&a, &b| cmp_cost(inst.dist.d(a, target), inst.dist.d(b, target)).then(a.cmp(&b)))
                .expect("source holds its value");
            let p = inst.dist.path(from, target);
            for w in p.windows(2) {
                edges.insert(norm_edge(w[0], w[1]));
            }
        }
        RawDelivery::Unicast(rec) => {
            rec.insert(target);
        }
    }
}

/// Raw deliveries plus the compression site of every tree edge.
#[derive(Debug, Clone, PartialEq)]
pub struct MovementScheme {
    pub cost_model: CostModel,
    pub raw: BTreeMap<NodeId, RawDelivery>,
    /// Child -> node where `X_child | X_parent` is computed.
    pub sites: BTreeMap<NodeId, NodeId>,
}

impl MovementScheme {
    pub fn new(cost_model: CostModel) -> Self {
        MovementScheme { cost_model, raw: BTreeMap::new(), sites: BTreeMap::new() }
    }

    pub fn holders(&self, net: &Network, v: NodeId) -> BTreeSet<NodeId> {
        match self.raw.get(&v) {
            Some(d) => holders(net, v, d),
            None => BTreeSet::from([v]),
        }
    }

    /// Makes sure `target` receives `X_src`.
    pub fn deliver(&mut self, inst: &Instance, src: NodeId, target: NodeId) {
        let model = self.cost_model;
        let d = self.raw.entry(src).or_insert_with(|| RawDelivery::empty(model, src));
        extend_delivery(inst, src, d, target);
    }

    /// Nodes that broadcast their own value (WL schemes).
    pub fn broadcasters(&self) -> BTreeSet<NodeId> {
        self.raw
            .iter()
            .filter(|(v, d)| matches!(d, RawDelivery::Broadcast(r) if r.contains(v)))
            .map(|(&v, _)| v)
            .collect()
    }

    /// True when every compression site sits on one of its edge's endpoints.
    pub fn is_restricted(&self, tree: &CompressionTree) -> bool {
        self.sites.iter().all(|(&c, &s)| s == c || Some(s) == tree.parent(c))
    }
}

/// Tree structure whose edges also record who ships raw data to whom.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedCompressionTree {
    pub cost_model: CostModel,
    /// `(from, to)`: `from` ships its raw value to `to`.
    pub arcs: Vec<(NodeId, NodeId)>,
    pub raw: BTreeMap<NodeId, RawDelivery>,
}

impl ExtendedCompressionTree {
    /// Derives deliveries from the arcs: every sender reaches each of its
    /// arc targets.
    pub fn from_arcs(inst: &Instance, cost_model: CostModel, arcs: Vec<(NodeId, NodeId)>) -> Self {
        let mut scheme = MovementScheme::new(cost_model);
        for &(a, b) in &arcs {
            scheme.deliver(inst, a, b);
        }
        ExtendedCompressionTree { cost_model, arcs, raw: scheme.raw }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub total: f64,
    pub nc: f64,
    pub ic: f64,
    pub cost_model: CostModel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A sensor is missing from the tree or the tree names a non-sensor.
    MissingNode(NodeId),
    /// A non-root node has no compression site, or a site is listed for a
    /// node without a tree edge.
    OrphanEdge(NodeId),
    /// The site of `child`'s edge never receives `X_missing`.
    UndeliveredOperand { child: NodeId, site: NodeId, missing: NodeId },
    /// The base station cannot reconstruct this node.
    UndecodableNode(NodeId),
    InvalidDelivery { node: NodeId, reason: String },
}

#[derive(Debug, Error)]
pub enum CtreeError {
    #[error("invalid scheme: {0:?}")]
    Invalid(Vec<Violation>),
    #[error("neither endpoint of ({from}, {to}) holds both operands")]
    InconsistentOrientation { from: NodeId, to: NodeId },
    #[error("extended tree is not a spanning forest of the sensors")]
    NotAForest,
    #[error(transparent)]
    Entropy(#[from] EntropyError),
}

/// Checks operand delivery and decodability by fixpoint simulation.
pub fn validate(scheme: &MovementScheme, tree: &CompressionTree, net: &Network) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let bs = net.bs();
    for s in net.sensors() {
        if !tree.parent_map().contains_key(&s) {
            out.push(Violation::MissingNode(s));
        }
    }
    for (&v, &p) in tree.parent_map() {
        if !net.is_sensor(v) || p >= net.len() || p == v {
            out.push(Violation::MissingNode(v));
        }
    }
    for (&v, d) in &scheme.raw {
        if d.cost_model() != scheme.cost_model {
            out.push(Violation::InvalidDelivery { node: v, reason: "delivery kind differs from cost model".into() });
        } else if let Some(reason) = delivery_problem(net, v, d) {
            out.push(Violation::InvalidDelivery { node: v, reason });
        }
    }
    for &v in scheme.sites.keys() {
        if tree.parent(v).is_none() {
            out.push(Violation::OrphanEdge(v));
        }
    }
    let holders: BTreeMap<NodeId, BTreeSet<NodeId>> =
        tree.nodes().map(|v| (v, scheme.holders(net, v))).collect();
    let mut ok_edge = BTreeMap::new();
    for (&v, &p) in tree.parent_map() {
        if p == bs {
            let fine = holders[&v].contains(&bs);
            if !fine {
                out.push(Violation::UndeliveredOperand { child: v, site: bs, missing: v });
            }
            ok_edge.insert(v, fine);
            continue;
        }
        let Some(&site) = scheme.sites.get(&v) else {
            out.push(Violation::OrphanEdge(v));
            ok_edge.insert(v, false);
            continue;
        };
        let mut fine = true;
        for x in [v, p] {
            let held = holders.get(&x).map(|h| h.contains(&site)).unwrap_or(site == x);
            if !held {
                out.push(Violation::UndeliveredOperand { child: v, site, missing: x });
                fine = false;
            }
        }
        ok_edge.insert(v, fine);
    }
    // Decodable set grows from the roots until stable.
    let mut known: BTreeSet<NodeId> = BTreeSet::new();
    loop {
        let before = known.len();
        for (&v, &p) in tree.parent_map() {
            if known.contains(&v) || !ok_edge.get(&v).copied().unwrap_or(false) {
                continue;
            }
            if p == bs || known.contains(&p) {
                known.insert(v);
            }
        }
        if known.len() == before {
            break;
        }
    }
    for s in net.sensors() {
        if tree.parent_map().contains_key(&s) && !known.contains(&s) {
            out.push(Violation::UndecodableNode(s));
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Necessary communication of a tree: roots ship `H(X_r) d(r, BS)`, every
/// other node `H(X_i | X_p(i)) d(i, BS)`.
pub fn necessary_cost(tree: &CompressionTree, inst: &Instance) -> f64 {
    tree.parent_map()
        .iter()
        .map(|(&v, &p)| if p == tree.bs() { inst.h(v) * inst.dbs(v) } else { inst.hc(v, p) * inst.dbs(v) })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalOptions {
    /// Energy per received bit, relative to the sender's per-bit cost unit.
    pub rx_cost: f64,
}

pub fn eval_cost(scheme: &MovementScheme, tree: &CompressionTree, inst: &Instance) -> Result<CostBreakdown, CtreeError> {
    eval_cost_with(scheme, tree, inst, &EvalOptions::default())
}

/// Total cost `sum_i H(X_i) c(T_i) + sum_edges H(X_i | X_p) d(site, BS)`
/// split into tree-intrinsic NC and the remainder IC.
pub fn eval_cost_with(
    scheme: &MovementScheme,
    tree: &CompressionTree,
    inst: &Instance,
    opts: &EvalOptions,
) -> Result<CostBreakdown, CtreeError> {
    validate(scheme, tree, &inst.net).map_err(CtreeError::Invalid)?;
    let net = &inst.net;
    let bs = net.bs();
    let hops = |a: NodeId, b: NodeId| (inst.dist.path(a, b).len() - 1) as f64;
    let mut total = 0.0;
    for (&v, d) in &scheme.raw {
        let bits = inst.model.entropy(v)?;
        total += bits * delivery_cost(inst, v, d);
        if opts.rx_cost > 0.0 {
            let receptions = match d {
                RawDelivery::Broadcast(r) => r.iter().map(|&x| net.degree(x) as f64).sum(),
                RawDelivery::Multicast(e) => e.len() as f64,
                RawDelivery::Unicast(rec) => rec.iter().map(|&t| hops(v, t)).sum(),
            };
            total += opts.rx_cost * bits * receptions;
        }
    }
    for (c, p) in tree.edges() {
        let site = scheme.sites[&c];
        let bits = inst.model.cond_entropy(c, p)?;
        total += bits * inst.dist.d(site, bs);
        if opts.rx_cost > 0.0 {
            total += opts.rx_cost * bits * hops(site, bs);
        }
    }
    let nc = necessary_cost(tree, inst);
    Ok(CostBreakdown { total, nc, ic: total - nc, cost_model: scheme.cost_model })
}

/// Orients a tree component away from `root`: returns parent pointers.
fn orient(adj: &BTreeMap<NodeId, Vec<NodeId>>, root: NodeId) -> BTreeMap<NodeId, Option<NodeId>> {
    let mut par = BTreeMap::from([(root, None)]);
    let mut q = VecDeque::from([root]);
    while let Some(v) = q.pop_front() {
        for &u in adj.get(&v).map(|x| x.as_slice()).unwrap_or(&[]) {
            if let std::collections::btree_map::Entry::Vacant(e) = par.entry(u) {
                e.insert(Some(v));
                q.push_back(u);
            }
        }
    }
    par
}

/// Root choice for one component of an extended tree: minimizes the
/// resulting total cost, then NC, then node id.
pub fn choose_root(ext: &ExtendedCompressionTree, inst: &Instance, component: &[NodeId]) -> NodeId {
    let adj = arc_adjacency(&ext.arcs);
    let mut best: Option<(f64, f64, NodeId)> = None;
    for &r in component {
        let par = orient(&adj, r);
        let mut total = root_delivery_extra(ext, inst, r) * inst.h(r);
        let mut nc = inst.h(r) * inst.dbs(r);
        for &(a, b) in &ext.arcs {
            if !par.contains_key(&a) {
                continue;
            }
            let (child, parent) = if par[&b] == Some(a) { (b, a) } else { (a, b) };
            total += inst.hc(child, parent) * inst.dbs(b);
            nc += inst.hc(child, parent) * inst.dbs(child);
        }
        let better = match best {
            None => true,
            Some((bt, bn, _)) => cmp_cost(total, bt).then(cmp_cost(nc, bn)).is_lt(),
        };
        if better {
            best = Some((total, nc, r));
        }
    }
    best.expect("component is non-empty").2
}

fn root_delivery_extra(ext: &ExtendedCompressionTree, inst: &Instance, r: NodeId) -> f64 {
    let base = ext.raw.get(&r).cloned().unwrap_or_else(|| RawDelivery::empty(ext.cost_model, r));
    let before = delivery_cost(inst, r, &base);
    let mut d = base;
    extend_delivery(inst, r, &mut d, inst.bs());
    delivery_cost(inst, r, &d) - before
}

fn arc_adjacency(arcs: &[(NodeId, NodeId)]) -> BTreeMap<NodeId, Vec<NodeId>> {
    let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for &(a, b) in arcs {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    for v in adj.values_mut() {
        v.sort_unstable();
    }
    adj
}

/// Converts an extended tree into a restricted scheme. Each arc's receiver
/// compresses: the child given the parent if the parent sent, otherwise the
/// former sender given the receiver, which is now its parent.
pub fn scheme_from_extended(
    ext: &ExtendedCompressionTree,
    inst: &Instance,
) -> Result<(CompressionTree, MovementScheme), CtreeError> {
    let net = &inst.net;
    let sensors = inst.sensors();
    // Union-find cycle check.
    let mut uf: Vec<usize> = (0..net.len()).collect();
    fn find(uf: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while uf[r] != r {
            r = uf[r];
        }
        let mut c = x;
        while uf[c] != r {
            let n = uf[c];
            uf[c] = r;
            c = n;
        }
        r
    }
    for &(a, b) in &ext.arcs {
        if !net.is_sensor(a) || !net.is_sensor(b) || a == b {
            return Err(CtreeError::NotAForest);
        }
        let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
        if ra == rb {
            return Err(CtreeError::NotAForest);
        }
        uf[ra] = rb;
    }
    for &(a, b) in &ext.arcs {
        let h = ext.raw.get(&a).map(|d| holders(net, a, d)).unwrap_or_else(|| BTreeSet::from([a]));
        if !h.contains(&b) {
            return Err(CtreeError::InconsistentOrientation { from: a, to: b });
        }
    }
    let mut comps: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for &s in &sensors {
        let r = find(&mut uf, s);
        comps.entry(r).or_default().push(s);
    }
    let adj = arc_adjacency(&ext.arcs);
    let mut parent = BTreeMap::new();
    let mut scheme = MovementScheme { cost_model: ext.cost_model, raw: ext.raw.clone(), sites: BTreeMap::new() };
    for comp in comps.values() {
        let root = choose_root(ext, inst, comp);
        for (v, p) in orient(&adj, root) {
            parent.insert(v, p.unwrap_or(net.bs()));
        }
        scheme.deliver(inst, root, net.bs());
    }
    for &(a, b) in &ext.arcs {
        let child = if parent[&b] == a { b } else { a };
        scheme.sites.insert(child, b);
    }
    Ok((CompressionTree::new(net.bs(), parent), scheme))
}

/// JSON fixture form of a tree and its scheme. Parent values equal to the
/// base station mark extra roots; `orient` lists raw-data movements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeFile {
    pub root: NodeId,
    pub parent: BTreeMap<String, NodeId>,
    #[serde(default)]
    pub orient: Vec<OrientArc>,
    #[serde(default)]
    pub sites: BTreeMap<String, NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientArc {
    pub u: NodeId,
    pub v: NodeId,
}

#[derive(Debug, Error)]
pub enum TreeFileError {
    #[error("bad node key {0:?}")]
    BadKey(String),
}

fn parse_key(k: &str) -> Result<NodeId, TreeFileError> {
    k.parse().map_err(|_| TreeFileError::BadKey(k.to_string()))
}

impl TreeFile {
    pub fn from_scheme(tree: &CompressionTree, scheme: &MovementScheme, net: &Network) -> Self {
        let mut orient = Vec::new();
        for (&v, d) in &scheme.raw {
            for h in holders(net, v, d) {
                if h != v && (tree.parent(v) == Some(h) || tree.parent(h) == Some(v) || h == net.bs()) {
                    orient.push(OrientArc { u: v, v: h });
                }
            }
        }
        TreeFile {
            root: tree.root().unwrap_or(net.bs()),
            parent: tree.parent_map().iter().filter(|&(_, &p)| p != net.bs()).map(|(k, &p)| (k.to_string(), p)).collect(),
            orient,
            sites: scheme.sites.iter().map(|(k, &s)| (k.to_string(), s)).collect(),
        }
        .with_extra_roots(tree)
    }

    fn with_extra_roots(mut self, tree: &CompressionTree) -> Self {
        for r in tree.roots() {
            if r != self.root {
                self.parent.insert(r.to_string(), tree.bs());
            }
        }
        self
    }

    /// Rebuilds the tree and a scheme whose deliveries cover every `orient`
    /// arc plus the roots' links to the base station.
    pub fn to_scheme(&self, inst: &Instance, cost_model: CostModel) -> Result<(CompressionTree, MovementScheme), TreeFileError> {
        let bs = inst.bs();
        let mut parent = BTreeMap::from([(self.root, bs)]);
        for (k, &p) in &self.parent {
            parent.insert(parse_key(k)?, p);
        }
        let tree = CompressionTree::new(bs, parent);
        let mut scheme = MovementScheme::new(cost_model);
        for a in &self.orient {
            scheme.deliver(inst, a.u, a.v);
        }
        for r in tree.roots() {
            scheme.deliver(inst, r, bs);
        }
        for (k, &s) in &self.sites {
            scheme.sites.insert(parse_key(k)?, s);
        }
        Ok((tree, scheme))
    }
}
