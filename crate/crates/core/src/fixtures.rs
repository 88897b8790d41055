//! Small hand-checkable networks used by tests, the verifier and the docs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entropy::EntropyModel;
use crate::netgraph::{build_network, Edge, Network, Node, NodeId};

/// Base station id in both fixtures.
pub const BS: NodeId = 0;

/// Five sensors plus the base station (id 0).
///
/// Edges: BS-1, BS-2, 1-2, 1-3, 1-5, 2-5, 3-4, all unit weight. Hop
/// distances to BS are 1, 1, 2, 3, 2 for sensors 1..5.
pub fn fig1_network() -> Network {
    let pos = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (0.0, 2.0), (0.0, 3.0), (1.0, 1.0)];
    let nodes = pos.iter().enumerate().map(|(i, &(x, y))| Node::new(i, x, y)).collect();
    let edges = [(0, 1), (0, 2), (1, 2), (1, 3), (1, 5), (2, 5), (3, 4)]
        .iter()
        .map(|&(u, v)| Edge::new(u, v))
        .collect();
    build_network(nodes, edges, BS).expect("fixture is valid")
}

/// Ten sensors plus the base station (id 0), unit transmit weights.
///
/// BS-4, 4-1, 4-5, 1-3, 3-2, 3-6, 2-6, 5-9, 9-10, 10-7, 10-8. Nodes
/// {3, 4, 9, 10} form a weakly connected dominating set; {2, 4, 9, 10}
/// dominates but leaves {2, 3, 6} cut off.
pub fn fig2_network() -> Network {
    fig2_with_weights(&[1.0; 11])
}

/// The same topology with per-node transmit weights (index = node id).
pub fn fig2_with_weights(w: &[f64; 11]) -> Network {
    let pos = [
        (0.0, 0.0),
        (1.0, 2.0),
        (3.0, 3.0),
        (2.0, 3.0),
        (1.0, 1.0),
        (2.0, 1.0),
        (3.0, 2.0),
        (4.0, 0.0),
        (5.0, 1.0),
        (3.0, 1.0),
        (4.0, 1.0),
    ];
    let nodes = pos
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| Node { id: i, x, y, w: w[i] })
        .collect();
    let edges = [(0, 4), (4, 1), (4, 5), (1, 3), (3, 2), (3, 6), (2, 6), (5, 9), (9, 10), (10, 7), (10, 8)]
        .iter()
        .map(|&(u, v)| Edge::new(u, v))
        .collect();
    build_network(nodes, edges, BS).expect("fixture is valid")
}

/// Transmit weights on the second topology under which greedy WL-SG
/// merging (uniform entropy, `eps = 0.05`) picks centers 10, 9, 3 and
/// then 4. Unlisted sensors weigh 1.
pub const FIG3_WEIGHTS: [f64; 11] = [1.0, 1.0, 1.0, 0.8, 0.8, 1.0, 1.0, 1.0, 1.0, 0.5, 0.4];

pub const FIG3_EPS: f64 = 0.05;

pub fn fig3_network() -> Network {
    fig2_with_weights(&FIG3_WEIGHTS)
}

/// Random connected network with `sensors` sensors (ids 1..) and the base
/// station at id 0: a random recursive tree plus each remaining pair with
/// probability `extra`. With `weighted`, edge weights are drawn from
/// [0.5, 2], otherwise they are 1. Transmit weights are always 1, so
/// broadcast relay costs agree with hop distances.
pub fn random_network(sensors: usize, extra: f64, weighted: bool, seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sensors + 1;
    let draw = |rng: &mut ChaCha8Rng| if weighted { rng.gen_range(0.5..2.0) } else { 1.0 };
    let nodes: Vec<Node> = (0..n)
        .map(|i| {
            let (x, y) = (rng.gen::<f64>() * 10.0, rng.gen::<f64>() * 10.0);
            Node::new(i, x, y)
        })
        .collect();
    let mut edges = Vec::new();
    let mut linked = vec![vec![false; n]; n];
    for v in 1..n {
        let u = rng.gen_range(0..v);
        linked[u][v] = true;
        edges.push(Edge::weighted(u, v, draw(&mut rng)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !linked[u][v] && rng.gen::<f64>() < extra {
                edges.push(Edge::weighted(u, v, draw(&mut rng)));
            }
        }
    }
    build_network(nodes, edges, 0).expect("random tree is connected")
}

/// Random pairwise model over every node with a symmetric mutual
/// information, so `H_i + H(j | i) = H_j + H(i | j)` for every pair.
/// `H_i` is uniform in [1, 1.2] and `I_ij = 0.8 min(H_i, H_j) c / (c + d)`
/// with `d` the Euclidean distance and `c` drawn per instance from
/// [0.5, 20]. Mirrored conditional ratios stay within 2.
pub fn random_matrix_model(net: &Network, seed: u64) -> EntropyModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = net.len();
    let c: f64 = rng.gen_range(0.5..20.0);
    let h: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..1.2)).collect();
    let hcond = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return 0.0;
                    }
                    let d = net.euclid(i, j);
                    h[i] - 0.8 * h[i].min(h[j]) * c / (c + d)
                })
                .collect()
        })
        .collect();
    EntropyModel::matrix(h, hcond).expect("entries are bounded by H")
}
