//! Treestar search as Steiner problems.
//!
//! Both constructions produce a directed instance: a root, arcs and a list
//! of terminal nodes, one per foreign forest component. A minimum directed
//! tree from the root that reaches a set of terminals costs exactly as much
//! as the cheapest treestar whose leaf-trees are those components.

use crate::algorithms::treestar::Forest;
use crate::instance::Instance;
use crate::netgraph::NodeId;

#[derive(Debug, Clone, PartialEq)]
pub struct DirectedInstance {
    pub n: usize,
    pub arcs: Vec<(usize, usize, f64)>,
    pub root: usize,
    /// One terminal per foreign component, ordered by component representative.
    pub terminals: Vec<usize>,
}

impl DirectedInstance {
    pub fn is_empty(&self) -> bool {
        self.terminals.is_empty()
    }
}

/// Foreign components of `r`, each as its sorted sensor list.
fn foreign_groups(forest: &Forest, inst: &Instance, r: NodeId) -> Vec<Vec<NodeId>> {
    let own = forest.component(r);
    forest
        .groups(inst)
        .into_iter()
        .filter(|&(rep, _)| rep != own)
        .map(|(_, members)| members)
        .collect()
}

/// WL-NS construction. Every sensor `u` becomes `u_in -> u_out` carrying
/// its broadcast cost `H(X_r) w(u)`; broadcasts reach neighbors through
/// free arcs `u_out -> x_in`. Companion `v'` (split the same way) carries
/// `H(X_v | X_r) d(v, BS)` and is entered from every sensor that can hear
/// `v`'s neighborhood, i.e. from `N[v]`. Group node `t_j` collects the
/// companions of component `j`; its out-half is the terminal.
pub fn reduce_to_directed_steiner(forest: &Forest, inst: &Instance, r: NodeId) -> DirectedInstance {
    let net = &inst.net;
    let n = net.len();
    let groups = foreign_groups(forest, inst, r);
    let node_in = |u: NodeId| 2 * u;
    let node_out = |u: NodeId| 2 * u + 1;
    let comp_in = |v: NodeId| 2 * n + 2 * v;
    let comp_out = |v: NodeId| 2 * n + 2 * v + 1;
    let group_in = |j: usize| 4 * n + 2 * j;
    let group_out = |j: usize| 4 * n + 2 * j + 1;
    let hr = inst.h(r);
    let mut arcs = Vec::new();
    for u in net.sensors() {
        arcs.push((node_in(u), node_out(u), hr * net.transmit_weight(u)));
        for x in net.sensor_neighbors(u) {
            arcs.push((node_out(u), node_in(x), 0.0));
        }
    }
    for (j, members) in groups.iter().enumerate() {
        for &v in members {
            arcs.push((comp_in(v), comp_out(v), inst.hc(v, r) * inst.dbs(v)));
            arcs.push((node_out(v), comp_in(v), 0.0));
            for u in net.sensor_neighbors(v) {
                arcs.push((node_out(u), comp_in(v), 0.0));
            }
            arcs.push((comp_out(v), group_in(j), 0.0));
        }
        arcs.push((group_in(j), group_out(j), 0.0));
    }
    DirectedInstance {
        n: 4 * n + 2 * groups.len(),
        arcs,
        root: node_in(r),
        terminals: (0..groups.len()).map(group_out).collect(),
    }
}

/// Multicast construction: network edges in both directions weighted
/// `H(X_r) w(e)`, a pendant `v -> v'` weighted `H(X_v | X_r) d(v, BS)` and
/// a free arc from each companion to its component's group node. The
/// min-density value is the minimum over terminal subsets `S` of
/// `tree(S) / (|S| + 1)`, the `+1` counting the center's own component.
pub fn reduce_to_group_steiner(forest: &Forest, inst: &Instance, r: NodeId) -> DirectedInstance {
    let net = &inst.net;
    let n = net.len();
    let groups = foreign_groups(forest, inst, r);
    let hr = inst.h(r);
    let mut arcs = Vec::new();
    for e in net.edges() {
        arcs.push((e.u, e.v, hr * e.w));
        arcs.push((e.v, e.u, hr * e.w));
    }
    for (j, members) in groups.iter().enumerate() {
        for &v in members {
            arcs.push((v, n + v, inst.hc(v, r) * inst.dbs(v)));
            arcs.push((n + v, 2 * n + j, 0.0));
        }
    }
    DirectedInstance { n: 2 * n + groups.len(), arcs, root: r, terminals: (0..groups.len()).map(|j| 2 * n + j).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::EntropyModel;
    use crate::fixtures;

    #[test]
    fn terminal_counts() {
        let net = fixtures::fig1_network();
        let inst = Instance::new(net.clone(), EntropyModel::uniform(&net, 1.0, 0.1)).unwrap();
        let mut f = Forest::singletons(&inst);
        assert_eq!(reduce_to_directed_steiner(&f, &inst, 1).terminals.len(), 4);
        for (a, b) in [(1, 2), (2, 5), (1, 3)] {
            f.link(a, b);
        }
        // Components {1,2,3,5} and {4}.
        let d = reduce_to_directed_steiner(&f, &inst, 1);
        assert_eq!(d.terminals.len(), 1);
        f.link(3, 4);
        assert!(reduce_to_group_steiner(&f, &inst, 1).is_empty());
    }
}
