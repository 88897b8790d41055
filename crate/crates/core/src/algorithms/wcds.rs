//! Weakly connected dominating sets and the broadcast trees they induce.

use std::collections::{BTreeMap, BTreeSet};

use crate::algorithms::AlgoError;
use crate::ctree::{CompressionTree, CostModel, MovementScheme, RawDelivery};
use crate::instance::Instance;
use crate::netgraph::{Network, NodeId};
use crate::cmp_cost;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Color {
    White,
    Gray,
    Black,
}

/// Greedy WCDS of the sensor subgraph, one seed per sensor component.
///
/// Each step blackens the gray node, or white node next to a gray one, that
/// turns the most nodes non-white (itself included). Ties go to the smaller id.
pub fn wcds_greedy(net: &Network) -> BTreeSet<NodeId> {
    let mut color = vec![Color::White; net.len()];
    let mut out = BTreeSet::new();
    for comp in net.sensor_components() {
        let seed = *comp
            .iter()
            .max_by(|&&a, &&b| net.sensor_degree(a).cmp(&net.sensor_degree(b)).then(b.cmp(&a)))
            .expect("components are non-empty");
        blacken(net, &mut color, seed);
        out.insert(seed);
        loop {
            let mut best: Option<(usize, NodeId)> = None;
            for &v in &comp {
                let eligible = match color[v] {
                    Color::Gray => true,
                    Color::White => net.sensor_neighbors(v).any(|u| color[u] == Color::Gray),
                    Color::Black => false,
                };
                if !eligible {
                    continue;
                }
                let gain = usize::from(color[v] == Color::White)
                    + net.sensor_neighbors(v).filter(|&u| color[u] == Color::White).count();
                if gain > 0 && best.is_none_or(|(g, _)| gain > g) {
                    best = Some((gain, v));
                }
            }
            match best {
                Some((_, v)) => {
                    blacken(net, &mut color, v);
                    out.insert(v);
                }
                None => break,
            }
        }
    }
    out
}

fn blacken(net: &Network, color: &mut [Color], v: NodeId) {
    color[v] = Color::Black;
    for u in net.sensor_neighbors(v) {
        if color[u] == Color::White {
            color[u] = Color::Gray;
        }
    }
}

/// Domination plus weak connectivity, both over the sensor subgraph.
pub fn is_wcds(net: &Network, s: &BTreeSet<NodeId>) -> bool {
    if s.iter().any(|&v| !net.is_sensor(v)) {
        return false;
    }
    let dominated = net.sensors().all(|v| s.contains(&v) || net.sensor_neighbors(v).any(|u| s.contains(&u)));
    if !dominated {
        return false;
    }
    for comp in net.sensor_components() {
        let mut seen = BTreeSet::from([comp[0]]);
        let mut stack = vec![comp[0]];
        while let Some(v) = stack.pop() {
            for u in net.sensor_neighbors(v) {
                if (s.contains(&u) || s.contains(&v)) && seen.insert(u) {
                    stack.push(u);
                }
            }
        }
        if seen.len() != comp.len() {
            return false;
        }
    }
    true
}

/// Compression tree in which every member of `s` broadcasts its raw value.
///
/// The tree grows from the member nearest the base station. A non-member
/// joins under the attached member neighbor minimizing `H(u|p) d(u, BS)`
/// and compresses locally. A member joins under any attached neighbor and
/// is compressed locally when that parent is a member, otherwise by the
/// parent, which heard its broadcast.
pub fn tree_from_wcds(inst: &Instance, s: &BTreeSet<NodeId>) -> Result<(CompressionTree, MovementScheme), AlgoError> {
    let net = &inst.net;
    if !is_wcds(net, s) {
        return Err(AlgoError::InvalidWcds);
    }
    let bs = net.bs();
    let mut parent: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut sites: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for comp in net.sensor_components() {
        let root = comp
            .iter()
            .copied()
            .filter(|v| s.contains(v))
            .min_by(|&a, &b| cmp_cost(inst.dbs(a), inst.dbs(b)).then(a.cmp(&b)))
            .ok_or(AlgoError::InvalidWcds)?;
        parent.insert(root, bs);
        loop {
            let mut joined: Vec<(NodeId, NodeId, NodeId)> = Vec::new();
            for &u in comp.iter().filter(|u| !parent.contains_key(u) && !s.contains(u)) {
                let best = net
                    .sensor_neighbors(u)
                    .filter(|p| s.contains(p) && parent.contains_key(p))
                    .min_by(|&a, &b| cmp_cost(inst.hc(u, a), inst.hc(u, b)).then(a.cmp(&b)));
                if let Some(p) = best {
                    joined.push((u, p, u));
                }
            }
            for &(u, p, site) in &joined {
                parent.insert(u, p);
                sites.insert(u, site);
            }
            let mut grew = !joined.is_empty();
            joined.clear();
            for &j in comp.iter().filter(|j| !parent.contains_key(j) && s.contains(j)) {
                let site_of = |p: NodeId| if s.contains(&p) { j } else { p };
                let best = net
                    .sensor_neighbors(j)
                    .filter(|p| parent.contains_key(p))
                    .min_by(|&a, &b| {
                        cmp_cost(inst.hc(j, a) * inst.dbs(site_of(a)), inst.hc(j, b) * inst.dbs(site_of(b)))
                            .then(a.cmp(&b))
                    });
                if let Some(p) = best {
                    joined.push((j, p, site_of(p)));
                }
            }
            for &(j, p, site) in &joined {
                parent.insert(j, p);
                sites.insert(j, site);
            }
            grew |= !joined.is_empty();
            if !grew {
                break;
            }
        }
    }
    if let Some(v) = net.sensors().find(|v| !parent.contains_key(v)) {
        return Err(AlgoError::Unreachable(v));
    }
    let tree = CompressionTree::new(bs, parent);
    let mut scheme = MovementScheme::new(CostModel::Wl);
    for &b in s {
        scheme.raw.insert(b, RawDelivery::Broadcast(BTreeSet::from([b])));
    }
    scheme.sites = sites;
    for r in tree.roots() {
        scheme.deliver(inst, r, bs);
    }
    Ok((tree, scheme))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctree::eval_cost;
    use crate::entropy::EntropyModel;
    use crate::fixtures;
    use crate::netgraph::{build_network, Edge, Node};

    #[test]
    fn fig1_greedy() {
        let net = fixtures::fig1_network();
        assert_eq!(wcds_greedy(&net), BTreeSet::from([1, 3]));
    }

    #[test]
    fn fig2_greedy_and_counterexample() {
        let net = fixtures::fig2_network();
        let s = wcds_greedy(&net);
        assert_eq!(s, BTreeSet::from([3, 4, 9, 10]));
        assert!(is_wcds(&net, &s));
        assert!(!is_wcds(&net, &BTreeSet::from([2, 4, 9, 10])));
    }

    #[test]
    fn complete_graph_needs_one_node() {
        let nodes = (0..6).map(|i| Node::new(i, i as f64, 0.0)).collect();
        let mut edges = Vec::new();
        for a in 0..6 {
            for b in a + 1..6 {
                edges.push(Edge::new(a, b));
            }
        }
        let net = build_network(nodes, edges, 0).unwrap();
        assert_eq!(wcds_greedy(&net).len(), 1);
    }

    #[test]
    fn fig1_trees() {
        let eps = 0.1;
        let net = fixtures::fig1_network();
        let inst = Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, eps)).unwrap();
        let (t, s) = tree_from_wcds(&inst, &BTreeSet::from([1, 3])).unwrap();
        assert!((eval_cost(&s, &t, &inst).unwrap().total - (2.0 + 8.0 * eps)).abs() < 1e-9);
        let (t, s) = tree_from_wcds(&inst, &BTreeSet::from([1, 4])).unwrap();
        assert_eq!(t.parent(4), Some(3));
        assert!((eval_cost(&s, &t, &inst).unwrap().total - (2.0 + 7.0 * eps)).abs() < 1e-9);
        assert!(matches!(tree_from_wcds(&inst, &BTreeSet::from([1])), Err(AlgoError::InvalidWcds)));
    }

    #[test]
    fn fig2_tree_shape() {
        let net = fixtures::fig2_network();
        let inst = Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, 0.1)).unwrap();
        let (t, s) = tree_from_wcds(&inst, &BTreeSet::from([3, 4, 9, 10])).unwrap();
        assert_eq!(t.roots(), vec![4]);
        assert_eq!(t.parent(5), Some(4));
        assert_eq!(s.sites[&5], 5);
        assert_eq!(t.parent(3), Some(1));
        assert_eq!(s.sites[&3], 1);
        assert!(eval_cost(&s, &t, &inst).is_ok());
    }

    #[test]
    fn everyone_broadcasts() {
        let net = fixtures::fig1_network();
        let eps = 0.2;
        let inst = Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, eps)).unwrap();
        let all: BTreeSet<NodeId> = net.sensors().collect();
        let (t, s) = tree_from_wcds(&inst, &all).unwrap();
        let c = eval_cost(&s, &t, &inst).unwrap();
        // Five broadcasts plus an eps-conditional from every non-root at its own distance.
        let expect = 5.0 + eps * t.edges().map(|(c, _)| inst.dbs(c)).sum::<f64>();
        assert!((c.total - expect).abs() < 1e-9);
    }
}
