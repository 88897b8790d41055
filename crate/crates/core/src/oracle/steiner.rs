use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use super::{OracleBudget, OracleError};
use crate::algorithms::reductions::DirectedInstance;
use crate::netgraph::{Network, NodeId};
use crate::Cost;

/// Dreyfus-Wagner over a directed graph: entry `mask` is the weight of the
/// cheapest arborescence from `root` reaching the terminals in `mask`.
pub fn directed_steiner_by_subset(inst: &DirectedInstance) -> Result<Vec<f64>, OracleError> {
    let budget = OracleBudget::default();
    budget.check("steiner terminals", inst.terminals.len(), budget.steiner_terminals)?;
    Ok(dw(inst.n, &inst.arcs, &inst.terminals, |dp| {
        (0..dp.len()).map(|m| dp[m][inst.root]).collect()
    }))
}

/// Runs the DP and hands the full table to `read`.
fn dw<R>(n: usize, arcs: &[(usize, usize, f64)], terminals: &[usize], read: impl FnOnce(&[Vec<f64>]) -> R) -> R {
    let t = terminals.len();
    let full = 1usize << t;
    let mut rev: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(u, v, w) in arcs {
        rev[v].push((u, w));
    }
    let mut dp = vec![vec![f64::INFINITY; n]; full];
    dp[0] = vec![0.0; n];
    for (i, &term) in terminals.iter().enumerate() {
        dp[1 << i][term] = 0.0;
    }
    for mask in 1..full {
        if mask.count_ones() > 1 {
            let mut sub = (mask - 1) & mask;
            while sub > 0 {
                let other = mask ^ sub;
                for v in 0..n {
                    let c = dp[sub][v] + dp[other][v];
                    if c < dp[mask][v] {
                        dp[mask][v] = c;
                    }
                }
                sub = (sub - 1) & mask;
            }
        }
        // Shortest-path closure towards the root side: dp[u] <= w(u,v) + dp[v].
        let mut heap: BinaryHeap<Reverse<(Cost, usize)>> =
            (0..n).filter(|&v| dp[mask][v].is_finite()).map(|v| Reverse((Cost(dp[mask][v]), v))).collect();
        while let Some(Reverse((Cost(d), v))) = heap.pop() {
            if d > dp[mask][v] {
                continue;
            }
            for &(u, w) in &rev[v] {
                let c = d + w;
                if c < dp[mask][u] {
                    dp[mask][u] = c;
                    heap.push(Reverse((Cost(c), u)));
                }
            }
        }
    }
    read(&dp)
}

/// Minimum tree weight over terminal subsets of each size `k` (index = k).
pub fn min_per_k(by_subset: &[f64]) -> Vec<f64> {
    let t = by_subset.len().trailing_zeros() as usize;
    let mut out = vec![f64::INFINITY; t + 1];
    for (mask, &w) in by_subset.iter().enumerate() {
        let k = mask.count_ones() as usize;
        out[k] = out[k].min(w);
    }
    out
}

/// `min_{S != {}} tree(S) / (|S| + 1)`.
pub fn min_density(by_subset: &[f64]) -> Option<f64> {
    by_subset
        .iter()
        .enumerate()
        .skip(1)
        .map(|(mask, &w)| w / (mask.count_ones() as f64 + 1.0))
        .filter(|d| d.is_finite())
        .min_by(|a, b| a.total_cmp(b))
}

/// Minimum Steiner tree weight connecting `terminals` in the network.
pub fn steiner_exact(net: &Network, terminals: &[NodeId]) -> Result<f64, OracleError> {
    let budget = OracleBudget::default();
    let terms: Vec<NodeId> = terminals.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if terms.len() <= 1 {
        return Ok(0.0);
    }
    budget.check("steiner terminals", terms.len(), budget.steiner_terminals)?;
    let mut arcs = Vec::new();
    for e in net.edges() {
        arcs.push((e.u, e.v, e.w));
        arcs.push((e.v, e.u, e.w));
    }
    let rest = &terms[1..];
    let root = terms[0];
    let w = dw(net.len(), &arcs, rest, |dp| dp[dp.len() - 1][root]);
    if w.is_finite() {
        Ok(w)
    } else {
        Err(OracleError::Infeasible)
    }
}

/// Cheapest connected set of sensors containing `source` whose closed
/// neighborhoods cover `targets`, by transmit weight. Ties go to the
/// lexicographically smallest bitmask. `None` if no such set exists.
pub fn cds_exact(net: &Network, source: NodeId, targets: &[NodeId]) -> Result<Option<(f64, BTreeSet<NodeId>)>, OracleError> {
    let budget = OracleBudget::default();
    let sensors: Vec<NodeId> = net.sensors().collect();
    budget.check("cds universe", sensors.len(), budget.cds_universe)?;
    let m = sensors.len();
    let si = sensors.iter().position(|&s| s == source).ok_or(OracleError::Infeasible)?;
    let nbr: Vec<u64> = sensors
        .iter()
        .map(|&s| net.neighbor_ids(s).filter_map(|u| sensors.iter().position(|&x| x == u)).fold(0u64, |a, i| a | 1 << i))
        .collect();
    // Which sensors hear each target (target itself counts if a sensor).
    let hearers: Vec<u64> = targets
        .iter()
        .map(|&t| {
            sensors
                .iter()
                .enumerate()
                .filter(|&(_, &s)| s == t || net.adjacent(s, t))
                .fold(0u64, |a, (i, _)| a | 1 << i)
        })
        .collect();
    let mut best: Option<(f64, u64)> = None;
    for mask in 0u64..(1u64 << m) {
        if mask & (1 << si) == 0 || hearers.iter().any(|&h| h & mask == 0) {
            continue;
        }
        let mut seen = 1u64 << si;
        let mut frontier = seen;
        while frontier != 0 {
            let i = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = nbr[i] & mask & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        if seen != mask {
            continue;
        }
        let w: f64 = (0..m).filter(|&i| mask & (1 << i) != 0).map(|i| net.transmit_weight(sensors[i])).sum();
        if best.is_none_or(|(b, _)| w < b) {
            best = Some((w, mask));
        }
    }
    Ok(best.map(|(w, mask)| (w, (0..m).filter(|&i| mask & (1 << i) != 0).map(|i| sensors[i]).collect())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgraph::{build_network, Edge, Node};

    fn cycle4() -> Network {
        build_network(
            (0..4).map(|i| Node::new(i, i as f64, 0.0)).collect(),
            vec![Edge::weighted(0, 1, 1.0), Edge::weighted(1, 2, 2.0), Edge::weighted(2, 3, 3.0), Edge::weighted(3, 0, 4.0)],
            0,
        )
        .unwrap()
    }

    #[test]
    fn pair_is_shortest_path() {
        let net = cycle4();
        assert_eq!(steiner_exact(&net, &[0, 2]).unwrap(), 3.0);
        assert_eq!(steiner_exact(&net, &[1, 3]).unwrap(), 5.0);
    }

    #[test]
    fn cycle_drops_heaviest_arc() {
        let net = cycle4();
        assert_eq!(steiner_exact(&net, &[0, 1, 2]).unwrap(), 3.0);
        assert_eq!(steiner_exact(&net, &[0, 1, 3]).unwrap(), 5.0);
        assert_eq!(steiner_exact(&net, &[1, 2, 3]).unwrap(), 5.0);
        assert_eq!(steiner_exact(&net, &[0, 1, 2, 3]).unwrap(), 6.0);
    }

    #[test]
    fn cds_within_neighborhood() {
        let net = cycle4();
        let (w, set) = cds_exact(&net, 1, &[2]).unwrap().unwrap();
        assert_eq!(w, 1.0);
        assert_eq!(set, BTreeSet::from([1]));
        let (w, set) = cds_exact(&net, 1, &[3]).unwrap().unwrap();
        assert_eq!(w, 2.0);
        assert_eq!(set, BTreeSet::from([1, 2]));
    }

    #[test]
    fn refuses_large_inputs() {
        let n = 30;
        let net = build_network(
            (0..n).map(|i| Node::new(i, i as f64, 0.0)).collect(),
            (1..n).map(|i| Edge::new(i - 1, i)).collect(),
            0,
        )
        .unwrap();
        assert!(matches!(cds_exact(&net, 1, &[5]), Err(OracleError::BudgetExceeded { .. })));
        let terms: Vec<NodeId> = (0..14).collect();
        assert!(matches!(steiner_exact(&net, &terms), Err(OracleError::BudgetExceeded { .. })));
    }
}
