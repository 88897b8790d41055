//! Optimal restricted solution for the unicast model via a minimum
//! arborescence rooted at the base station.

use std::collections::BTreeMap;

use crate::algorithms::arborescence::min_arborescence;
use crate::algorithms::AlgoError;
use crate::ctree::{CompressionTree, CostModel, MovementScheme};
use crate::instance::Instance;
use crate::netgraph::NodeId;

/// Which endpoint of a tree edge `u -> v` does the compression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `X_u` travels to `v`, which computes `X_v | X_u`.
    AtChild,
    /// `X_v` travels to `u`, which computes `X_v | X_u`.
    AtParent,
}

/// Cost of tree edge `u -> v` and the branch attaining it; ties pick
/// [`Branch::AtChild`].
pub fn edge_cost(inst: &Instance, u: NodeId, v: NodeId) -> (f64, Branch) {
    let d = inst.dist.d(u, v);
    let hc = inst.hc(v, u);
    let at_child = inst.h(u) * d + hc * inst.dbs(v);
    let at_parent = inst.h(v) * d + hc * inst.dbs(u);
    if at_parent < at_child {
        (at_parent, Branch::AtParent)
    } else {
        (at_child, Branch::AtChild)
    }
}

/// Every sensor pair is admissible. Children of the base station become
/// roots that send their raw values directly.
pub fn unicast_arborescence(inst: &Instance) -> Result<(CompressionTree, MovementScheme), AlgoError> {
    let bs = inst.bs();
    let sensors = inst.sensors();
    let mut arcs = Vec::new();
    let mut branch = Vec::new();
    for &v in &sensors {
        arcs.push((bs, v, inst.h(v) * inst.dbs(v)));
        branch.push(Branch::AtChild);
    }
    for &u in &sensors {
        for &v in &sensors {
            if u != v {
                let (c, b) = edge_cost(inst, u, v);
                arcs.push((u, v, c));
                branch.push(b);
            }
        }
    }
    let picked = min_arborescence(inst.net.len(), bs, &arcs).ok_or(AlgoError::Unreachable(bs))?;
    let mut parent = BTreeMap::new();
    let mut scheme = MovementScheme::new(CostModel::Unicast);
    for i in picked {
        let (u, v, _) = arcs[i];
        parent.insert(v, u);
        if u == bs {
            scheme.deliver(inst, v, bs);
            continue;
        }
        match branch[i] {
            Branch::AtChild => {
                scheme.deliver(inst, u, v);
                scheme.sites.insert(v, v);
            }
            Branch::AtParent => {
                scheme.deliver(inst, v, u);
                scheme.sites.insert(v, u);
            }
        }
    }
    Ok((CompressionTree::new(bs, parent), scheme))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::ind_cost;
    use crate::ctree::eval_cost;
    use crate::entropy::EntropyModel;
    use crate::netgraph::{build_network, Edge, Node};

    fn path(eps: f64, h: f64) -> Instance {
        let net = build_network(
            (0..3).map(|i| Node::new(i, i as f64, 0.0)).collect(),
            vec![Edge::new(0, 1), Edge::new(1, 2)],
            0,
        )
        .unwrap();
        Instance::new(net.clone(), EntropyModel::uniform(&net, h, eps)).unwrap()
    }

    #[test]
    fn two_sensor_example() {
        let eps = 0.25;
        let inst = path(eps, 1.0);
        let (t, s) = unicast_arborescence(&inst).unwrap();
        assert_eq!(t.roots(), vec![1]);
        assert_eq!(t.parent(2), Some(1));
        // X_2 travels to 1: 1 + eps beats 1 + 2 eps.
        assert_eq!(s.sites[&2], 1);
        let c = eval_cost(&s, &t, &inst).unwrap();
        assert!((c.total - (2.0 + eps)).abs() < 1e-12);
    }

    #[test]
    fn independence_gives_ind() {
        let inst = path(1.0, 1.0);
        let (t, s) = unicast_arborescence(&inst).unwrap();
        let c = eval_cost(&s, &t, &inst).unwrap();
        assert!((c.total - ind_cost(&inst)).abs() < 1e-12);
        assert_eq!(t.roots().len(), 2);
    }
}
