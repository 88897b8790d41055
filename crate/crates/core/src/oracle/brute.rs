use std::collections::{BTreeMap, BTreeSet};

use super::{cds_exact, Clock, OracleBudget, OracleError};
use crate::ctree::{CompressionTree, CostModel, MovementScheme, RawDelivery};
use crate::entropy::Space;
use crate::instance::Instance;
use crate::netgraph::{Network, NodeId};
use crate::cmp_cost;

#[derive(Debug, Clone)]
pub struct BruteResult {
    pub tree: CompressionTree,
    pub scheme: MovementScheme,
    pub cost: f64,
    /// Complete (tree, sites) combinations evaluated.
    pub evaluated: u64,
}

/// Cheapest delivery of `X_src` to a target set, memoized by bitmask.
struct Deliveries<'a> {
    inst: &'a Instance,
    model: CostModel,
    memo: Vec<BTreeMap<u32, (f64, Option<RawDelivery>)>>,
}

impl<'a> Deliveries<'a> {
    fn new(inst: &'a Instance, model: CostModel) -> Self {
        Deliveries { inst, model, memo: vec![BTreeMap::new(); inst.net.len()] }
    }

    fn cost(&mut self, src: NodeId, mask: u32) -> Result<f64, OracleError> {
        if mask == 0 {
            return Ok(0.0);
        }
        if let Some((c, _)) = self.memo[src].get(&mask) {
            return Ok(*c);
        }
        let targets: Vec<NodeId> = (0..32).filter(|&i| mask & (1 << i) != 0).collect();
        let net = &self.inst.net;
        let entry = match self.model {
            CostModel::Wl => match cds_exact(net, src, &targets)? {
                Some((w, set)) => (w, Some(RawDelivery::Broadcast(set))),
                None => (f64::INFINITY, None),
            },
            CostModel::Multicast => match min_steiner_by_subsets(net, src, &targets) {
                Some((w, edges)) => (w, Some(RawDelivery::Multicast(edges))),
                None => (f64::INFINITY, None),
            },
            CostModel::Unicast => {
                let w = targets.iter().map(|&t| self.inst.dist.d(src, t)).sum();
                (w, Some(RawDelivery::Unicast(targets.iter().copied().collect())))
            }
        };
        let c = entry.0;
        self.memo[src].insert(mask, entry);
        Ok(c)
    }

    fn plan(&self, src: NodeId, mask: u32) -> Option<RawDelivery> {
        self.memo[src].get(&mask).and_then(|(_, d)| d.clone())
    }
}

/// Minimum-weight tree over node subsets containing the terminals, via the
/// MST of every induced connected subgraph.
fn min_steiner_by_subsets(net: &Network, src: NodeId, targets: &[NodeId]) -> Option<(f64, BTreeSet<(NodeId, NodeId)>)> {
    let n = net.len();
    let mut need = 1u32 << src;
    for &t in targets {
        need |= 1 << t;
    }
    let mut best: Option<(f64, BTreeSet<(NodeId, NodeId)>)> = None;
    for mask in 0u32..(1 << n) {
        if mask & need != need {
            continue;
        }
        let nodes: Vec<NodeId> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if let Some((w, edges)) = prim(net, &nodes) {
            if best.as_ref().is_none_or(|(b, _)| w < *b) {
                best = Some((w, edges));
            }
        }
    }
    best
}

fn prim(net: &Network, nodes: &[NodeId]) -> Option<(f64, BTreeSet<(NodeId, NodeId)>)> {
    let k = nodes.len();
    let mut used = vec![false; k];
    let mut key = vec![(f64::INFINITY, usize::MAX); k];
    key[0].0 = 0.0;
    let mut total = 0.0;
    let mut edges = BTreeSet::new();
    for _ in 0..k {
        let i = (0..k).filter(|&i| !used[i]).min_by(|&a, &b| key[a].0.total_cmp(&key[b].0))?;
        if key[i].0.is_infinite() {
            return None;
        }
        used[i] = true;
        total += key[i].0;
        if key[i].1 != usize::MAX {
            let (a, b) = (nodes[i], nodes[key[i].1]);
            edges.insert((a.min(b), a.max(b)));
        }
        for j in 0..k {
            if let (false, Some(w)) = (used[j], net.edge_weight(nodes[i], nodes[j])) {
                if w < key[j].0 {
                    key[j] = (w, i);
                }
            }
        }
    }
    Some((total, edges))
}

/// Calls `f` with every parent assignment over the sensors in which each
/// sensor hangs off the base station or an admissible sensor and every
/// chain ends at the base station.
fn for_each_forest(
    inst: &Instance,
    space: Space,
    clock: &mut Clock,
    mut f: impl FnMut(&[NodeId]) -> Result<(), OracleError>,
) -> Result<(), OracleError> {
    let net = &inst.net;
    let bs = net.bs();
    let sensors = inst.sensors();
    let m = sensors.len();
    let options: Vec<Vec<NodeId>> = sensors
        .iter()
        .map(|&s| {
            let mut o = vec![bs];
            o.extend(sensors.iter().copied().filter(|&t| t != s && space.admits(net, s, t)));
            o
        })
        .collect();
    let mut idx = vec![0usize; m];
    let mut parent = vec![bs; net.len()];
    loop {
        clock.tick()?;
        for (k, &s) in sensors.iter().enumerate() {
            parent[s] = options[k][idx[k]];
        }
        let acyclic = sensors.iter().all(|&s| {
            let mut v = s;
            for _ in 0..=m {
                if v == bs {
                    return true;
                }
                v = parent[v];
            }
            false
        });
        if acyclic {
            f(&parent)?;
        }
        let mut k = 0;
        loop {
            if k == m {
                return Ok(());
            }
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

struct Best {
    cost: f64,
    parent: Vec<NodeId>,
    sites: Vec<(NodeId, NodeId)>,
    masks: Vec<u32>,
}

fn search<'a>(
    inst: &'a Instance,
    cost_model: CostModel,
    space: Space,
    budget: &OracleBudget,
    restricted: bool,
) -> Result<(Option<Best>, u64, Deliveries<'a>), OracleError> {
    let net = &inst.net;
    let n = net.len();
    let bs = net.bs();
    let sensors = inst.sensors();
    let (what, limit) = if restricted { ("restricted optimum", budget.restricted) } else { ("unrestricted optimum", budget.unrestricted) };
    budget.check(what, sensors.len(), limit)?;
    let mut clock = Clock::new(budget, what);
    let mut deliveries = Deliveries::new(inst, cost_model);
    let mut best: Option<Best> = None;
    let mut evaluated = 0u64;
    for_each_forest(inst, space, &mut Clock::new(budget, what), |parent| {
        let edges: Vec<(NodeId, NodeId)> =
            sensors.iter().filter(|&&s| parent[s] != bs).map(|&s| (s, parent[s])).collect();
        let base = if restricted { 2 } else { n };
        let combos = (base as u64).pow(edges.len() as u32);
        for code in 0..combos {
            clock.tick()?;
            let mut masks = vec![0u32; n];
            for &s in &sensors {
                if parent[s] == bs {
                    masks[s] |= 1 << bs;
                }
            }
            let mut rest = code;
            let mut sites = Vec::with_capacity(edges.len());
            let mut cond = 0.0;
            for &(c, p) in &edges {
                let digit = (rest % base as u64) as usize;
                rest /= base as u64;
                let site = if restricted { [c, p][digit] } else { digit };
                for x in [c, p] {
                    if site != x {
                        masks[x] |= 1 << site;
                    }
                }
                cond += inst.hc(c, p) * inst.dbs(site);
                sites.push((c, site));
            }
            let mut total = cond;
            for &s in &sensors {
                total += inst.h(s) * deliveries.cost(s, masks[s])?;
            }
            evaluated += 1;
            if best.as_ref().is_none_or(|b| cmp_cost(total, b.cost).is_lt()) {
                best = Some(Best { cost: total, parent: parent.to_vec(), sites, masks });
            }
        }
        Ok(())
    })?;
    Ok((best, evaluated, deliveries))
}

/// Exact optimum over restricted schemes (every conditional computed at one
/// of its two endpoints), all spanning forests of admissible pairs rooted
/// at the base station, and optimal raw deliveries.
pub fn brute_restricted_opt(
    inst: &Instance,
    cost_model: CostModel,
    space: Space,
    budget: &OracleBudget,
) -> Result<BruteResult, OracleError> {
    let (best, evaluated, deliveries) = search(inst, cost_model, space, budget, true)?;
    let best = best.filter(|b| b.cost.is_finite()).ok_or(OracleError::Infeasible)?;
    let bs = inst.bs();
    let parent: BTreeMap<NodeId, NodeId> = inst.sensors().into_iter().map(|s| (s, best.parent[s])).collect();
    let mut scheme = MovementScheme::new(cost_model);
    for s in inst.sensors() {
        if let Some(d) = deliveries.plan(s, best.masks[s]) {
            scheme.raw.insert(s, d);
        }
    }
    scheme.sites = best.sites.into_iter().collect();
    Ok(BruteResult { tree: CompressionTree::new(bs, parent), scheme, cost: best.cost, evaluated })
}

/// Exact optimum when compression sites may be any node, the base station
/// included.
pub fn brute_unrestricted(inst: &Instance, cost_model: CostModel, space: Space, budget: &OracleBudget) -> Result<f64, OracleError> {
    let (best, _, _) = search(inst, cost_model, space, budget, false)?;
    best.map(|b| b.cost).filter(|c| c.is_finite()).ok_or(OracleError::Infeasible)
}

/// One WL-SG treestar found by enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct StarChoice {
    pub center: NodeId,
    pub leaves: BTreeSet<NodeId>,
    pub cost: f64,
    pub ceff: f64,
}

/// Every WL-SG treestar that is optimal under the (cost-effectiveness,
/// cost, center) order. `comp[v]` labels the forest component of sensor `v`.
pub fn brute_treestars(inst: &Instance, comp: &[usize]) -> Vec<StarChoice> {
    let net = &inst.net;
    let mut best: Vec<StarChoice> = Vec::new();
    for r in net.sensors() {
        let mut groups: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
        for v in net.sensor_neighbors(r) {
            if comp[v] != comp[r] {
                groups.entry(comp[v]).or_default().push(v);
            }
        }
        let groups: Vec<Vec<NodeId>> = groups.into_values().collect();
        let base = inst.h(r) * net.transmit_weight(r);
        for subset in 1u32..(1 << groups.len()) {
            let chosen: Vec<&Vec<NodeId>> = (0..groups.len()).filter(|&j| subset & (1 << j) != 0).map(|j| &groups[j]).collect();
            let mut idx = vec![0usize; chosen.len()];
            loop {
                let leaves: BTreeSet<NodeId> = chosen.iter().zip(&idx).map(|(g, &i)| g[i]).collect();
                let cost = base + leaves.iter().map(|&v| inst.hc(v, r) * inst.dbs(v)).sum::<f64>();
                let cand = StarChoice { center: r, ceff: cost / (leaves.len() + 1) as f64, leaves, cost };
                let ord = best.first().map(|b| {
                    cmp_cost(cand.ceff, b.ceff).then(cmp_cost(cand.cost, b.cost)).then(cand.center.cmp(&b.center))
                });
                match ord {
                    None | Some(std::cmp::Ordering::Less) => best = vec![cand],
                    Some(std::cmp::Ordering::Equal) => best.push(cand),
                    Some(std::cmp::Ordering::Greater) => {}
                }
                let mut k = 0;
                loop {
                    if k == idx.len() {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] < chosen[k].len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
        }
    }
    best
}

/// Size of a minimum weakly connected dominating set of the sensor
/// subgraph, by subset enumeration.
pub fn brute_min_wcds(net: &Network, budget: &OracleBudget) -> Result<usize, OracleError> {
    let sensors: Vec<NodeId> = net.sensors().collect();
    budget.check("wcds universe", sensors.len(), budget.cds_universe)?;
    let m = sensors.len();
    let pos = |v: NodeId| sensors.iter().position(|&s| s == v).expect("sensor");
    let adj: Vec<u32> = sensors.iter().map(|&s| net.sensor_neighbors(s).fold(0u32, |a, u| a | 1 << pos(u))).collect();
    // Sensor components, as masks.
    let mut comps: Vec<u32> = Vec::new();
    let mut seen = 0u32;
    for i in 0..m {
        if seen & (1 << i) != 0 {
            continue;
        }
        let mut c = 1u32 << i;
        let mut frontier = c;
        while frontier != 0 {
            let j = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = adj[j] & !c;
            c |= fresh;
            frontier |= fresh;
        }
        seen |= c;
        comps.push(c);
    }
    let mut best = m;
    for mask in 0u32..(1 << m) {
        let size = mask.count_ones() as usize;
        if size >= best {
            continue;
        }
        let dominated = (0..m).all(|i| mask & (1 << i) != 0 || adj[i] & mask != 0);
        if !dominated {
            continue;
        }
        let weakly = comps.iter().all(|&c| {
            let start = c.trailing_zeros() as usize;
            let mut reach = 1u32 << start;
            let mut frontier = reach;
            while frontier != 0 {
                let j = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                // Edges usable when either endpoint is in the set.
                let usable = if mask & (1 << j) != 0 { adj[j] } else { adj[j] & mask };
                let fresh = usable & !reach;
                reach |= fresh;
                frontier |= fresh;
            }
            reach == c
        });
        if weakly {
            best = size;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctree::eval_cost;
    use crate::entropy::EntropyModel;
    use crate::fixtures;
    use crate::netgraph::{build_network, Edge, Node};

    #[test]
    fn fig1_restricted_optimum() {
        let net = fixtures::fig1_network();
        let inst = Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, 0.1)).unwrap();
        let r = brute_restricted_opt(&inst, CostModel::Wl, Space::Sg, &OracleBudget::default()).unwrap();
        assert!(r.cost <= 2.7 + 1e-9);
        let c = eval_cost(&r.scheme, &r.tree, &inst).unwrap();
        assert!((c.total - r.cost).abs() < 1e-9);
    }

    #[test]
    fn two_node_closed_form() {
        let net = build_network(
            vec![Node::new(0, 0.0, 0.0), Node::new(1, 1.0, 0.0), Node::new(2, 2.0, 0.0)],
            vec![Edge::new(0, 1), Edge::new(1, 2)],
            0,
        )
        .unwrap();
        let eps = 0.3;
        let inst = Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, eps)).unwrap();
        let r = brute_restricted_opt(&inst, CostModel::Unicast, Space::Sg, &OracleBudget::default()).unwrap();
        // IND = 3; 1 -> 2 at 2: 1 + 1 + 2 eps; 2 -> 1 at 1: 1 + 1 + eps.
        let expect = [3.0, 2.0 + 2.0 * eps, 2.0 + eps].into_iter().fold(f64::INFINITY, f64::min);
        assert!((r.cost - expect).abs() < 1e-12);
        let u = brute_unrestricted(&inst, CostModel::Unicast, Space::Sg, &OracleBudget::default()).unwrap();
        assert!(u <= r.cost + 1e-12);
    }

    #[test]
    fn independence_equals_ind() {
        let net = fixtures::fig1_network();
        let inst = Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, 1.0)).unwrap();
        let r = brute_restricted_opt(&inst, CostModel::Unicast, Space::Ns, &OracleBudget::default()).unwrap();
        assert!((r.cost - 9.0).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let net = fixtures::fig2_network();
        let inst = Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, 0.1)).unwrap();
        let e = brute_restricted_opt(&inst, CostModel::Wl, Space::Sg, &OracleBudget::default()).unwrap_err();
        assert!(matches!(e, OracleError::BudgetExceeded { .. }));
    }

    #[test]
    fn min_wcds_of_fixtures() {
        let b = OracleBudget::default();
        assert_eq!(brute_min_wcds(&fixtures::fig1_network(), &b).unwrap(), 2);
        assert_eq!(brute_min_wcds(&fixtures::fig2_network(), &b).unwrap(), 4);
    }

    #[test]
    fn fig1_star_enumeration() {
        let net = fixtures::fig1_network();
        let inst = Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, 0.1)).unwrap();
        let comp: Vec<usize> = (0..net.len()).collect();
        let best = brute_treestars(&inst, &comp);
        assert_eq!(best.len(), 1);
        assert_eq!(best[0].center, 1);
        assert_eq!(best[0].leaves, BTreeSet::from([2, 3, 5]));
        assert!((best[0].ceff - 0.375).abs() < 1e-12);
    }
}
