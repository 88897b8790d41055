//! Communication graph, generators and all-pairs shortest paths.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("network has no nodes")]
    Empty,
    #[error("node ids must be 0..n-1, found {0}")]
    BadNodeId(i64),
    #[error("base station {0} is not a node")]
    UnknownBaseStation(NodeId),
    #[error("edge references unknown node {0}")]
    UnknownNode(NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("non-positive weight {weight} on {what}")]
    NonpositiveWeight { what: String, weight: f64 },
    #[error("network is disconnected: node {0} cannot reach the base station")]
    Disconnected(NodeId),
    #[error("no connected layout after {0} attempts")]
    CannotConnect(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
    /// Energy per bit of one local broadcast.
    #[serde(default = "unit")]
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    /// Energy per bit for one hop.
    #[serde(default = "unit")]
    pub w: f64,
}

fn unit() -> f64 {
    1.0
}

impl Node {
    pub fn new(id: NodeId, x: f64, y: f64) -> Self {
        Node { id, x, y, w: 1.0 }
    }
}

impl Edge {
    pub fn new(u: NodeId, v: NodeId) -> Self {
        Edge { u, v, w: 1.0 }
    }

    pub fn weighted(u: NodeId, v: NodeId, w: f64) -> Self {
        Edge { u, v, w }
    }
}

/// Undirected, edge-weighted communication graph with a base station.
///
/// Node ids are dense (`0..n`). The base station is an ordinary node that
/// carries no attribute; every other node is a sensor.
#[derive(Debug, Clone)]
pub struct Network {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    adj: Vec<Vec<(NodeId, f64)>>,
    bs: NodeId,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    bs: NodeId,
    nodes: Vec<NodeFile>,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeFile {
    id: i64,
    x: f64,
    y: f64,
    #[serde(default = "unit")]
    w: f64,
}

/// Validates and assembles a network.
pub fn build_network(mut nodes: Vec<Node>, edges: Vec<Edge>, bs: NodeId) -> Result<Network, NetError> {
    if nodes.is_empty() {
        return Err(NetError::Empty);
    }
    nodes.sort_by_key(|n| n.id);
    for (i, n) in nodes.iter().enumerate() {
        if n.id != i {
            return Err(NetError::BadNodeId(n.id as i64));
        }
        if !(n.w > 0.0) || !n.w.is_finite() {
            return Err(NetError::NonpositiveWeight { what: format!("node {}", n.id), weight: n.w });
        }
    }
    let n = nodes.len();
    if bs >= n {
        return Err(NetError::UnknownBaseStation(bs));
    }
    let mut seen = BTreeSet::new();
    let mut adj = vec![Vec::new(); n];
    for e in &edges {
        for end in [e.u, e.v] {
            if end >= n {
                return Err(NetError::UnknownNode(end));
            }
        }
        if e.u == e.v {
            return Err(NetError::SelfLoop(e.u));
        }
        if !(e.w > 0.0) || !e.w.is_finite() {
            return Err(NetError::NonpositiveWeight { what: format!("edge ({}, {})", e.u, e.v), weight: e.w });
        }
        let key = (e.u.min(e.v), e.u.max(e.v));
        if !seen.insert(key) {
            return Err(NetError::DuplicateEdge(key.0, key.1));
        }
        adj[e.u].push((e.v, e.w));
        adj[e.v].push((e.u, e.w));
    }
    for a in &mut adj {
        a.sort_by_key(|&(v, _)| v);
    }
    let net = Network { nodes, edges, adj, bs };
    let reach = net.reachable_from(bs, |_| true);
    if let Some(v) = (0..n).find(|&v| !reach[v]) {
        return Err(NetError::Disconnected(v));
    }
    Ok(net)
}

impl Network {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn bs(&self) -> NodeId {
        self.bs
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_sensor(&self, v: NodeId) -> bool {
        v < self.nodes.len() && v != self.bs
    }

    /// Sensor ids in increasing order.
    pub fn sensors(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(move |&v| v != self.bs)
    }

    pub fn sensor_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Neighbors with hop weights, sorted by id.
    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, f64)] {
        &self.adj[v]
    }

    pub fn neighbor_ids(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj[v].iter().map(|&(u, _)| u)
    }

    /// Sensor neighbors of `v`, sorted by id.
    pub fn sensor_neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.neighbor_ids(v).filter(move |&u| u != self.bs)
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn sensor_degree(&self, v: NodeId) -> usize {
        self.sensor_neighbors(v).count()
    }

    pub fn adjacent(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_weight(u, v).is_some()
    }

    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        self.adj[u].binary_search_by_key(&v, |&(x, _)| x).ok().map(|i| self.adj[u][i].1)
    }

    pub fn transmit_weight(&self, v: NodeId) -> f64 {
        self.nodes[v].w
    }

    pub fn position(&self, v: NodeId) -> (f64, f64) {
        (self.nodes[v].x, self.nodes[v].y)
    }

    pub fn euclid(&self, u: NodeId, v: NodeId) -> f64 {
        let (a, b) = (self.position(u), self.position(v));
        ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
    }

    /// Breadth-first reachability restricted to nodes accepted by `allow`.
    pub fn reachable_from(&self, s: NodeId, allow: impl Fn(NodeId) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &(u, _) in &self.adj[v] {
                if !seen[u] && allow(u) {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }

    /// Connected components of the graph with the base station removed,
    /// each sorted, ordered by smallest member.
    pub fn sensor_components(&self) -> Vec<Vec<NodeId>> {
        let mut done = vec![false; self.len()];
        let mut out = Vec::new();
        for s in self.sensors() {
            if done[s] {
                continue;
            }
            let reach = self.reachable_from(s, |u| u != self.bs);
            let comp: Vec<NodeId> = (0..self.len()).filter(|&v| reach[v] && v != self.bs).collect();
            for &v in &comp {
                done[v] = true;
            }
            out.push(comp);
        }
        out
    }

    pub fn from_json_str(s: &str) -> Result<Network, NetError> {
        let f: NetworkFile = serde_json::from_str(s)?;
        let nodes = f
            .nodes
            .into_iter()
            .map(|n| {
                if n.id < 0 {
                    Err(NetError::BadNodeId(n.id))
                } else {
                    Ok(Node { id: n.id as NodeId, x: n.x, y: n.y, w: n.w })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        build_network(nodes, f.edges, f.bs)
    }

    pub fn to_json_string(&self) -> String {
        let f = NetworkFile {
            bs: self.bs,
            nodes: self.nodes.iter().map(|n| NodeFile { id: n.id as i64, x: n.x, y: n.y, w: n.w }).collect(),
            edges: self.edges.clone(),
        };
        serde_json::to_string_pretty(&f).expect("network serializes")
    }

    pub fn load(path: &Path) -> Result<Network, NetError> {
        Network::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), NetError> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}

/// All-pairs shortest-path costs with deterministic first-hop successors.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    n: usize,
    dist: Vec<f64>,
    next: Vec<NodeId>,
}

#[derive(PartialEq)]
struct HeapItem(f64, NodeId);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(net: &Network, src: NodeId) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; net.len()];
    dist[src] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(HeapItem(0.0, src));
    while let Some(HeapItem(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(u, w) in net.neighbors(v) {
            let nd = d + w;
            if nd < dist[u] {
                dist[u] = nd;
                heap.push(HeapItem(nd, u));
            }
        }
    }
    dist
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Computes all-pairs distances. The successor of `i` towards `j` is the
/// smallest-id neighbor lying on some shortest path.
pub fn shortest_paths(net: &Network) -> DistanceTable {
    let n = net.len();
    let rows = crate::par::map_range(n, |s| dijkstra(net, s));
    let mut dist = vec![0.0; n * n];
    for (s, row) in rows.iter().enumerate() {
        dist[s * n..(s + 1) * n].copy_from_slice(row);
    }
    let mut next = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                next[i * n + j] = i;
                continue;
            }
            let target = dist[i * n + j];
            next[i * n + j] = net
                .neighbors(i)
                .iter()
                .find(|&&(u, w)| close(w + dist[u * n + j], target))
                .map(|&(u, _)| u)
                .expect("connected network has a successor");
        }
    }
    DistanceTable { n, dist, next }
}

impl DistanceTable {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn d(&self, i: NodeId, j: NodeId) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn next_hop(&self, i: NodeId, j: NodeId) -> NodeId {
        self.next[i * self.n + j]
    }

    /// Node sequence of the canonical shortest path, endpoints included.
    pub fn path(&self, i: NodeId, j: NodeId) -> Vec<NodeId> {
        let mut p = vec![i];
        let mut v = i;
        while v != j {
            v = self.next_hop(v, j);
            p.push(v);
        }
        p
    }
}

/// Corner of the lattice where the base station attaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Corner {
    #[default]
    LowerLeft,
    LowerRight,
    UpperLeft,
    UpperRight,
}

/// Uniform lattice of `rows * cols` sensors (ids row-major) with the base
/// station as an extra node (id `rows * cols`) linked to the chosen corner.
pub fn gen_grid(rows: usize, cols: usize, spacing: f64, link_radius: f64, corner: Corner) -> Result<Network, NetError> {
    if rows == 0 || cols == 0 {
        return Err(NetError::InvalidParameter("rows and cols must be at least 1".into()));
    }
    if !(spacing > 0.0) || !(link_radius > 0.0) {
        return Err(NetError::InvalidParameter("spacing and link radius must be positive".into()));
    }
    let mut nodes = Vec::with_capacity(rows * cols + 1);
    for r in 0..rows {
        for c in 0..cols {
            nodes.push(Node::new(r * cols + c, c as f64 * spacing, r as f64 * spacing));
        }
    }
    let tol = 1e-9 * spacing;
    let mut edges = Vec::new();
    for a in 0..nodes.len() {
        for b in a + 1..nodes.len() {
            let d = ((nodes[a].x - nodes[b].x).powi(2) + (nodes[a].y - nodes[b].y).powi(2)).sqrt();
            if d <= link_radius + tol {
                edges.push(Edge::new(a, b));
            }
        }
    }
    let (cr, cc) = match corner {
        Corner::LowerLeft => (0, 0),
        Corner::LowerRight => (0, cols - 1),
        Corner::UpperLeft => (rows - 1, 0),
        Corner::UpperRight => (rows - 1, cols - 1),
    };
    let anchor = cr * cols + cc;
    let dx = if cc == 0 { -spacing } else { spacing };
    let dy = if cr == 0 { -spacing } else { spacing };
    let bs = rows * cols;
    nodes.push(Node::new(bs, nodes[anchor].x + dx, nodes[anchor].y + dy));
    edges.push(Edge::new(anchor, bs));
    build_network(nodes, edges, bs)
}

/// Random geometric network: `count` nodes uniform in a `width x height`
/// rectangle, an edge wherever the Euclidean distance is strictly below
/// `link_radius`. Whole layouts are resampled until connected. The base
/// station is the node nearest the lower-left corner.
pub fn gen_random(count: usize, width: f64, height: f64, link_radius: f64, seed: u64) -> Result<Network, NetError> {
    gen_random_with_retries(count, width, height, link_radius, seed, 1000)
}

pub fn gen_random_with_retries(
    count: usize,
    width: f64,
    height: f64,
    link_radius: f64,
    seed: u64,
    retries: usize,
) -> Result<Network, NetError> {
    if count == 0 {
        return Err(NetError::InvalidParameter("count must be at least 1".into()));
    }
    if !(width > 0.0) || !(height > 0.0) || !(link_radius > 0.0) {
        return Err(NetError::InvalidParameter("dimensions and radius must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..retries.max(1) {
        let pts: Vec<(f64, f64)> = (0..count).map(|_| (rng.gen::<f64>() * width, rng.gen::<f64>() * height)).collect();
        let nodes: Vec<Node> = pts.iter().enumerate().map(|(i, &(x, y))| Node::new(i, x, y)).collect();
        let mut edges = Vec::new();
        for a in 0..count {
            for b in a + 1..count {
                let d = ((pts[a].0 - pts[b].0).powi(2) + (pts[a].1 - pts[b].1).powi(2)).sqrt();
                if d < link_radius {
                    edges.push(Edge::new(a, b));
                }
            }
        }
        let bs = (0..count)
            .min_by(|&a, &b| {
                let da = pts[a].0.hypot(pts[a].1);
                let db = pts[b].0.hypot(pts[b].1);
                da.total_cmp(&db).then(a.cmp(&b))
            })
            .expect("count >= 1");
        match build_network(nodes, edges, bs) {
            Ok(net) => return Ok(net),
            Err(NetError::Disconnected(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(NetError::CannotConnect(retries.max(1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fig1_distances() {
        let net = fixtures::fig1_network();
        let dt = shortest_paths(&net);
        let bs = net.bs();
        assert_eq!(dt.d(4, bs), 3.0);
        assert_eq!(dt.d(3, bs), 2.0);
        assert_eq!(dt.d(5, bs), 2.0);
        assert_eq!(dt.d(1, bs), 1.0);
        assert_eq!(dt.d(2, bs), 1.0);
        for v in 0..net.len() {
            assert_eq!(dt.d(v, v), 0.0);
        }
        // 5 reaches BS through 1 and 2 equally; the smaller id wins.
        assert_eq!(dt.path(5, bs), vec![5, 1, bs]);
    }

    #[test]
    fn single_node_is_valid() {
        let net = build_network(vec![Node::new(0, 0.0, 0.0)], vec![], 0).unwrap();
        assert_eq!(net.sensor_count(), 0);
        let dt = shortest_paths(&net);
        assert_eq!(dt.d(0, 0), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let nodes: Vec<Node> = (0..4).map(|i| Node::new(i, 0.0, 0.0)).collect();
        let err = build_network(nodes.clone(), vec![Edge::new(0, 1), Edge::new(2, 3)], 0).unwrap_err();
        assert!(matches!(err, NetError::Disconnected(_)));
        let err = build_network(nodes.clone(), vec![Edge::new(0, 1), Edge::new(1, 0)], 0).unwrap_err();
        assert!(matches!(err, NetError::DuplicateEdge(0, 1)));
        let err = build_network(nodes.clone(), vec![Edge::weighted(0, 1, 0.0)], 0).unwrap_err();
        assert!(matches!(err, NetError::NonpositiveWeight { .. }));
        let err = build_network(nodes.clone(), vec![Edge::new(1, 1)], 0).unwrap_err();
        assert!(matches!(err, NetError::SelfLoop(1)));
        let err = build_network(nodes, vec![], 9).unwrap_err();
        assert!(matches!(err, NetError::UnknownBaseStation(9)));
        assert!(matches!(build_network(vec![], vec![], 0), Err(NetError::Empty)));
    }

    #[test]
    fn path_of_unit_edges() {
        let k = 6;
        let nodes = (0..=k).map(|i| Node::new(i, i as f64, 0.0)).collect();
        let edges = (0..k).map(|i| Edge::new(i, i + 1)).collect();
        let net = build_network(nodes, edges, 0).unwrap();
        let dt = shortest_paths(&net);
        assert_eq!(dt.d(k, 0), k as f64);
        assert_eq!(dt.path(k, 0).len(), k + 1);
    }

    #[test]
    fn grid_shapes() {
        let g = gen_grid(10, 10, 1.0, 1.0, Corner::LowerLeft).unwrap();
        assert_eq!(g.sensor_count(), 100);
        let g = gen_grid(2, 2, 2.0, 2.0, Corner::LowerLeft).unwrap();
        assert_eq!(g.sensor_count(), 4);
        let sensor_edges = g.edges().iter().filter(|e| e.u != g.bs() && e.v != g.bs()).count();
        assert_eq!(sensor_edges, 4);
        let g = gen_grid(1, 1, 1.0, 1.0, Corner::UpperRight).unwrap();
        assert_eq!(g.sensor_count(), 1);
        assert!(matches!(gen_grid(3, 3, 1.0, 0.5, Corner::LowerLeft), Err(NetError::Disconnected(_))));
    }

    #[test]
    fn random_is_deterministic() {
        let a = gen_random(60, 200.0, 200.0, 45.0, 7).unwrap();
        let b = gen_random(60, 200.0, 200.0, 45.0, 7).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.bs(), b.bs());
        for e in a.edges() {
            assert!(a.euclid(e.u, e.v) < 45.0);
        }
        let one = gen_random(1, 10.0, 10.0, 1.0, 3).unwrap();
        assert_eq!(one.len(), 1);
        assert!(matches!(
            gen_random_with_retries(50, 1000.0, 1000.0, 1.0, 1, 3),
            Err(NetError::CannotConnect(3))
        ));
    }

    #[test]
    fn json_roundtrip_and_unknown_fields() {
        let net = fixtures::fig1_network();
        let back = Network::from_json_str(&net.to_json_string()).unwrap();
        assert_eq!(back.edges(), net.edges());
        let bad = r#"{"bs":0,"nodes":[{"id":0,"x":0,"y":0,"w":1,"color":"red"}],"edges":[]}"#;
        assert!(Network::from_json_str(bad).is_err());
    }
}
