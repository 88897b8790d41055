//! Hill climbing by adding local broadcasts (WL schemes only).

use std::collections::{BTreeMap, BTreeSet};

use crate::ctree::{delivery_cost, extend_delivery, CompressionTree, CostModel, MovementScheme, RawDelivery};
use crate::instance::Instance;
use crate::netgraph::NodeId;
use crate::{cmp_cost, par, REL_TOL};

/// Total cost without validation; callers keep the scheme valid.
fn quick_total(inst: &Instance, tree: &CompressionTree, scheme: &MovementScheme) -> f64 {
    let raw: f64 = scheme.raw.iter().map(|(&v, d)| inst.h(v) * delivery_cost(inst, v, d)).sum();
    let cond: f64 = tree.edges().map(|(c, p)| inst.hc(c, p) * inst.dbs(scheme.sites[&c])).sum();
    raw + cond
}

/// Replaces each raw delivery by a rebuilt one when that is cheaper, and
/// drops deliveries nobody needs.
fn prune(inst: &Instance, tree: &CompressionTree, scheme: &mut MovementScheme) {
    let bs = inst.bs();
    let mut need: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    for r in tree.roots() {
        need.entry(r).or_default().insert(bs);
    }
    for (c, p) in tree.edges() {
        let site = scheme.sites[&c];
        for x in [c, p] {
            if site != x {
                need.entry(x).or_default().insert(site);
            }
        }
    }
    let model = scheme.cost_model;
    let keys: Vec<NodeId> = scheme.raw.keys().copied().collect();
    for v in keys {
        match need.get(&v) {
            None => {
                scheme.raw.remove(&v);
            }
            Some(targets) => {
                let mut fresh = RawDelivery::empty(model, v);
                for &t in targets {
                    extend_delivery(inst, v, &mut fresh, t);
                }
                let cur = &scheme.raw[&v];
                if cmp_cost(delivery_cost(inst, v, &fresh), delivery_cost(inst, v, cur)).is_lt() {
                    scheme.raw.insert(v, fresh);
                }
            }
        }
    }
}

/// `v` broadcasts (if it did not already) and each listed neighbor is
/// re-parented under `v`, compressing locally.
fn apply_move(
    inst: &Instance,
    tree: &CompressionTree,
    scheme: &MovementScheme,
    v: NodeId,
    us: &[NodeId],
) -> (CompressionTree, MovementScheme) {
    let mut t = tree.clone();
    let mut s = scheme.clone();
    s.raw.entry(v).or_insert_with(|| RawDelivery::Broadcast(BTreeSet::from([v])));
    for &u in us {
        t.set_parent(u, v);
        s.sites.insert(u, u);
    }
    prune(inst, &t, &mut s);
    (t, s)
}

fn candidates(inst: &Instance, tree: &CompressionTree, scheme: &MovementScheme, v: NodeId) -> Vec<NodeId> {
    inst.net
        .sensor_neighbors(v)
        .filter(|&u| !tree.is_root(u) && !tree.is_ancestor(u, v))
        .filter(|&u| !(tree.parent(u) == Some(v) && scheme.sites.get(&u) == Some(&u)))
        .collect()
}

/// Best single move: for one node `v`, broadcast and adopt every neighbor
/// whose re-parenting pays off on its own. Returns the resulting total.
fn best_move_at(
    inst: &Instance,
    tree: &CompressionTree,
    scheme: &MovementScheme,
    v: NodeId,
) -> Option<(f64, Vec<NodeId>)> {
    let cands = candidates(inst, tree, scheme, v);
    if cands.is_empty() {
        return None;
    }
    let (t0, s0) = apply_move(inst, tree, scheme, v, &[]);
    let base = quick_total(inst, &t0, &s0);
    let mut chosen = Vec::new();
    for &u in &cands {
        let (t1, s1) = apply_move(inst, tree, scheme, v, &[u]);
        if cmp_cost(quick_total(inst, &t1, &s1), base).is_lt() {
            chosen.push(u);
        }
    }
    if chosen.is_empty() {
        return None;
    }
    let (t, s) = apply_move(inst, tree, scheme, v, &chosen);
    Some((quick_total(inst, &t, &s), chosen))
}

/// Applies the best cost-reducing broadcast-and-adopt move until none
/// helps. Returns the tree, the scheme and the number of moves. Schemes
/// outside the WL model come back unchanged.
pub fn local_improve(
    inst: &Instance,
    mut tree: CompressionTree,
    mut scheme: MovementScheme,
) -> (CompressionTree, MovementScheme, usize) {
    if scheme.cost_model != CostModel::Wl {
        return (tree, scheme, 0);
    }
    let sensors = inst.sensors();
    let limit = sensors.len() * sensors.len() + 1;
    let mut moves = 0;
    let mut current = quick_total(inst, &tree, &scheme);
    while moves < limit {
        let options = par::map(&sensors, |&v| best_move_at(inst, &tree, &scheme, v).map(|(c, us)| (c, v, us)));
        let best = options
            .into_iter()
            .flatten()
            .min_by(|a, b| cmp_cost(a.0, b.0).then(a.1.cmp(&b.1)));
        let Some((cost, v, us)) = best else { break };
        if current - cost <= REL_TOL * current.abs().max(1.0) {
            break;
        }
        let (t, s) = apply_move(inst, &tree, &scheme, v, &us);
        tree = t;
        scheme = s;
        current = cost;
        moves += 1;
    }
    (tree, scheme, moves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctree::eval_cost;
    use crate::entropy::EntropyModel;
    use crate::netgraph::{build_network, Edge, Node};

    /// BS - hub, hub with leaves 2, 3, 4; leaves chained to each other so the
    /// initial tree hangs them off one another.
    fn hub_instance(eps: f64) -> Instance {
        let net = build_network(
            (0..5).map(|i| Node::new(i, i as f64, 0.0)).collect(),
            vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(1, 3), Edge::new(1, 4), Edge::new(2, 3), Edge::new(3, 4)],
            0,
        )
        .unwrap();
        Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, eps)).unwrap()
    }

    fn chain(inst: &Instance) -> (CompressionTree, MovementScheme) {
        let tree = CompressionTree::new(0, BTreeMap::from([(1, 0), (2, 1), (3, 2), (4, 3)]));
        let mut s = MovementScheme::new(CostModel::Wl);
        for (a, b) in [(1, 0), (1, 2), (2, 3), (3, 4)] {
            s.deliver(inst, a, b);
        }
        s.sites = BTreeMap::from([(2, 2), (3, 3), (4, 4)]);
        (tree, s)
    }

    #[test]
    fn hub_broadcast_replaces_chain() {
        let inst = hub_instance(0.1);
        let (t, s) = chain(&inst);
        let before = eval_cost(&s, &t, &inst).unwrap().total;
        let (t2, s2, moves) = local_improve(&inst, t, s);
        let after = eval_cost(&s2, &t2, &inst).unwrap().total;
        assert!(moves >= 1);
        assert!(after < before);
        // The hub already broadcasts; adopting 3 and 4 removes two relays.
        assert_eq!(t2.parent(3), Some(1));
        assert_eq!(t2.parent(4), Some(1));
        assert!((after - (1.0 + 3.0 * 0.2)).abs() < 1e-12);
    }

    #[test]
    fn fixpoint_and_zero_entropy() {
        let inst = hub_instance(0.1);
        let (t, s) = chain(&inst);
        let (t, s, _) = local_improve(&inst, t, s);
        let (t2, s2, moves) = local_improve(&inst, t.clone(), s.clone());
        assert_eq!(moves, 0);
        assert_eq!(t2, t);
        assert_eq!(s2, s);

        let net = inst.net.clone();
        let zero = Instance::new(net.clone(), EntropyModel::uniform(&net, 0.0, 0.0)).unwrap();
        let (t, s) = chain(&zero);
        let (t2, _, moves) = local_improve(&zero, t.clone(), s);
        assert_eq!(moves, 0);
        assert_eq!(t2, t);
    }
}
