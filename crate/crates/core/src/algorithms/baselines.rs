//! Reference strategies: independent coding, clustering and the
//! distributed-source-coding floor.

use std::collections::BTreeMap;

use crate::algorithms::arborescence::min_arborescence;
use crate::algorithms::AlgoError;
use crate::ctree::{eval_cost, CompressionTree, CostBreakdown, CostModel, MovementScheme};
use crate::instance::Instance;
use crate::netgraph::NodeId;
use crate::{cmp_cost, par, REL_TOL};

/// Every sensor ships its own compressed value: `sum_i d(i, BS) H(X_i)`.
pub fn ind_cost(inst: &Instance) -> f64 {
    inst.sensors().iter().map(|&v| inst.dbs(v) * inst.h(v)).sum()
}

/// `sum_i d(i, BS) H(X_i | X_1 .. X_{i-1})` with sensors sorted by distance
/// to the base station (ties by id). Pairwise models condition on the best
/// single predecessor.
pub fn dsc_lower_bound(inst: &Instance) -> f64 {
    let mut order = inst.sensors();
    order.sort_by(|&a, &b| cmp_cost(inst.dbs(a), inst.dbs(b)).then(a.cmp(&b)));
    let mut total = 0.0;
    for (i, &v) in order.iter().enumerate() {
        let h = inst.model.cond_entropy_set(v, &order[..i]).expect("sensor ids are valid");
        total += inst.dbs(v) * h;
    }
    total
}

/// A cluster's best head and the cost of gathering and shipping it.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterEval {
    pub head: NodeId,
    pub cost: f64,
    /// Within-cluster conditioning tree, member -> parent.
    pub parent: BTreeMap<NodeId, NodeId>,
}

fn is_symmetric(inst: &Instance, members: &[NodeId]) -> bool {
    members.iter().enumerate().all(|(a, &i)| {
        members[a + 1..].iter().all(|&j| (inst.hc(i, j) - inst.hc(j, i)).abs() <= REL_TOL * inst.hc(i, j).abs().max(1.0))
    })
}

/// Prim over the complete graph on `members` with weights `H(i|j)`; returns
/// the weight and undirected edges.
fn conditional_mst(inst: &Instance, members: &[NodeId]) -> (f64, Vec<(NodeId, NodeId)>) {
    let m = members.len();
    let mut in_tree = vec![false; m];
    let mut best = vec![(f64::INFINITY, 0usize); m];
    best[0].0 = 0.0;
    let mut total = 0.0;
    let mut edges = Vec::new();
    for step in 0..m {
        let i = (0..m)
            .filter(|&i| !in_tree[i])
            .min_by(|&a, &b| best[a].0.total_cmp(&best[b].0).then(a.cmp(&b)))
            .expect("nodes remain");
        in_tree[i] = true;
        if step > 0 {
            total += best[i].0;
            edges.push((members[i], members[best[i].1]));
        }
        for j in 0..m {
            if !in_tree[j] {
                let w = inst.hc(members[j], members[i]);
                if w < best[j].0 {
                    best[j] = (w, i);
                }
            }
        }
    }
    (total, edges)
}

fn orient_from(head: NodeId, edges: &[(NodeId, NodeId)]) -> BTreeMap<NodeId, NodeId> {
    let mut parent = BTreeMap::new();
    let mut stack = vec![head];
    let mut seen = vec![head];
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let other = if a == v { b } else if b == v { a } else { continue };
            if !seen.contains(&other) {
                seen.push(other);
                parent.insert(other, v);
                stack.push(other);
            }
        }
    }
    parent
}

/// Minimum conditioning arborescence of the cluster rooted at `head`.
fn conditional_arborescence(inst: &Instance, members: &[NodeId], head: NodeId) -> (f64, BTreeMap<NodeId, NodeId>) {
    let idx = |v: NodeId| members.iter().position(|&x| x == v).expect("member");
    let mut arcs = Vec::new();
    for &u in members {
        for &v in members {
            if u != v {
                arcs.push((idx(u), idx(v), inst.hc(v, u)));
            }
        }
    }
    let picked = min_arborescence(members.len(), idx(head), &arcs).expect("complete digraph");
    let mut total = 0.0;
    let mut parent = BTreeMap::new();
    for i in picked {
        let (u, v, w) = arcs[i];
        total += w;
        parent.insert(members[v], members[u]);
    }
    (total, parent)
}

/// `min_q sum_{v != q} H(X_v) d(v, q) + d(q, BS) * Hhat_q`, where `Hhat_q`
/// is `H(X_q)` plus a minimum conditioning tree of the cluster rooted at `q`.
pub fn cluster_cost(inst: &Instance, members: &[NodeId]) -> ClusterEval {
    let mut members = members.to_vec();
    members.sort_unstable();
    let symmetric = is_symmetric(inst, &members);
    let mst = symmetric.then(|| conditional_mst(inst, &members));
    let mut best: Option<(f64, NodeId)> = None;
    for &q in &members {
        let gather: f64 = members.iter().filter(|&&v| v != q).map(|&v| inst.h(v) * inst.dist.d(v, q)).sum();
        let tree = match &mst {
            Some((w, _)) => *w,
            None => conditional_arborescence(inst, &members, q).0,
        };
        let c = gather + inst.dbs(q) * (inst.h(q) + tree);
        if best.is_none_or(|(b, _)| cmp_cost(c, b).is_lt()) {
            best = Some((c, q));
        }
    }
    let (cost, head) = best.expect("cluster is non-empty");
    let parent = match &mst {
        Some((_, edges)) => orient_from(head, edges),
        None => conditional_arborescence(inst, &members, head).1,
    };
    ClusterEval { head, cost, parent }
}

/// Materializes a clustering: members ship raw values to their head, the
/// head computes every conditional and forwards everything.
pub fn cluster_scheme(
    inst: &Instance,
    clusters: &[Vec<NodeId>],
    cost_model: CostModel,
) -> (CompressionTree, MovementScheme) {
    let bs = inst.bs();
    let mut parent = BTreeMap::new();
    let mut scheme = MovementScheme::new(cost_model);
    for c in clusters {
        let ev = cluster_cost(inst, c);
        parent.insert(ev.head, bs);
        scheme.deliver(inst, ev.head, bs);
        for (&v, &p) in &ev.parent {
            parent.insert(v, p);
            scheme.deliver(inst, v, ev.head);
            scheme.sites.insert(v, ev.head);
        }
    }
    (CompressionTree::new(bs, parent), scheme)
}

#[derive(Debug, Clone)]
pub struct Clustering {
    pub clusters: Vec<Vec<NodeId>>,
    pub tree: CompressionTree,
    pub scheme: MovementScheme,
    pub cost: CostBreakdown,
    pub merges: usize,
}

fn adjacent(inst: &Instance, a: &[NodeId], b: &[NodeId]) -> bool {
    a.iter().any(|&u| b.iter().any(|&v| inst.net.adjacent(u, v)))
}

/// Starts from singletons and repeatedly merges the pair of network-adjacent
/// clusters with the largest cost decrease (ties by smallest member ids)
/// until no merge helps.
pub fn cluster_greedy(inst: &Instance, cost_model: CostModel) -> Result<Clustering, AlgoError> {
    let mut clusters: BTreeMap<NodeId, Vec<NodeId>> = inst.sensors().into_iter().map(|v| (v, vec![v])).collect();
    let mut cost: BTreeMap<NodeId, f64> = clusters.iter().map(|(&k, m)| (k, cluster_cost(inst, m).cost)).collect();
    let mut gains: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
    let pair_gain = |clusters: &BTreeMap<NodeId, Vec<NodeId>>, cost: &BTreeMap<NodeId, f64>, a: NodeId, b: NodeId| {
        let mut joined = clusters[&a].clone();
        joined.extend_from_slice(&clusters[&b]);
        cost[&a] + cost[&b] - cluster_cost(inst, &joined).cost
    };
    let keys: Vec<NodeId> = clusters.keys().copied().collect();
    let pairs: Vec<(NodeId, NodeId)> = keys
        .iter()
        .flat_map(|&a| keys.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
        .filter(|&(a, b)| inst.net.adjacent(a, b))
        .collect();
    for (p, g) in pairs.iter().zip(par::map(&pairs, |&(a, b)| pair_gain(&clusters, &cost, a, b))) {
        gains.insert(*p, g);
    }
    let mut merges = 0;
    loop {
        let best = gains
            .iter()
            .filter(|(_, &g)| g > REL_TOL * 1f64.max(g.abs()))
            .max_by(|x, y| cmp_cost(*x.1, *y.1).then(y.0.cmp(x.0)));
        let Some((&(a, b), _)) = best else { break };
        let moved = clusters.remove(&b).expect("live cluster");
        clusters.get_mut(&a).expect("live cluster").extend(moved);
        cost.remove(&b);
        cost.insert(a, cluster_cost(inst, &clusters[&a]).cost);
        gains.retain(|&(x, y), _| x != a && y != a && x != b && y != b);
        let others: Vec<NodeId> =
            clusters.keys().copied().filter(|&k| k != a && adjacent(inst, &clusters[&a], &clusters[&k])).collect();
        let fresh = par::map(&others, |&k| pair_gain(&clusters, &cost, a.min(k), a.max(k)));
        for (&k, g) in others.iter().zip(fresh) {
            gains.insert((a.min(k), a.max(k)), g);
        }
        merges += 1;
    }
    let clusters: Vec<Vec<NodeId>> = clusters.into_values().collect();
    let (tree, scheme) = cluster_scheme(inst, &clusters, cost_model);
    let cost = eval_cost(&scheme, &tree, inst)?;
    Ok(Clustering { clusters, tree, scheme, cost, merges })
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
    fn fig1_values() {
        for eps in [0.0, 0.1] {
            let inst = fig1(eps);
            assert!((ind_cost(&inst) - 9.0).abs() < 1e-12);
            assert!((dsc_lower_bound(&inst) - (1.0 + 8.0 * eps)).abs() < 1e-12);
            let (t, s) = cluster_scheme(&inst, &[vec![1], vec![2, 5], vec![3, 4]], CostModel::Wl);
            let c = eval_cost(&s, &t, &inst).unwrap();
            assert!((c.total - (6.0 + 3.0 * eps)).abs() < 1e-12);
            assert!((c.nc - (4.0 + 5.0 * eps)).abs() < 1e-12);
            assert!((c.ic - (2.0 - 2.0 * eps)).abs() < 1e-12);
        }
    }

    #[test]
    fn dsc_at_zero_eps() {
        let inst = fig1(0.0);
        assert_eq!(dsc_lower_bound(&inst), 1.0);
    }

    #[test]
    fn ind_scales_with_edge_weights() {
        let mk = |w: f64| {
            let net = build_network(
                (0..3).map(|i| Node::new(i, i as f64, 0.0)).collect(),
                vec![Edge::weighted(0, 1, w), Edge::weighted(1, 2, w)],
                0,
            )
            .unwrap();
            Instance::new(net.clone(), EntropyModel::uniform(&net, 1.5, 0.5)).unwrap()
        };
        assert!((ind_cost(&mk(2.0)) - 2.0 * ind_cost(&mk(1.0))).abs() < 1e-12);
    }

    #[test]
    fn independence_keeps_singletons() {
        let inst = {
            let net = fixtures::fig1_network();
            Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, 1.0)).unwrap()
        };
        let c = cluster_greedy(&inst, CostModel::Wl).unwrap();
        assert_eq!(c.merges, 0);
        assert!((c.cost.total - ind_cost(&inst)).abs() < 1e-12);
    }

    #[test]
    fn perfectly_correlated_pair_merges() {
        // Sensor 2 sits where 1 is but only reaches the base station through it.
        let net = build_network(
            vec![Node::new(0, 0.0, 0.0), Node::new(1, 1.0, 0.0), Node::new(2, 1.0, 0.0)],
            vec![Edge::new(0, 1), Edge::new(1, 2)],
            0,
        )
        .unwrap();
        let inst = Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, 0.0)).unwrap();
        assert_eq!(ind_cost(&inst), 3.0);
        let c = cluster_greedy(&inst, CostModel::Unicast).unwrap();
        assert_eq!(c.merges, 1);
        assert_eq!(c.clusters, vec![vec![1, 2]]);
        assert!((c.cost.total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_cluster_uses_arborescence() {
        let net = fixtures::fig1_network();
        let n = net.len();
        let h = vec![1.0; n];
        let mut hc = vec![vec![0.5; n]; n];
        for (i, row) in hc.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        hc[4][3] = 0.1;
        hc[3][4] = 0.2;
        let inst = Instance::new(net, EntropyModel::matrix(h, hc).unwrap()).unwrap();
        let ev = cluster_cost(&inst, &[3, 4]);
        assert_eq!(ev.head, 3);
        assert!((ev.cost - (1.0 + 2.0 * 1.1)).abs() < 1e-12);
    }
}
