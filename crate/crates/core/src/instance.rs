use crate::entropy::{EntropyError, EntropyModel, EntropySpec};
use crate::netgraph::{shortest_paths, DistanceTable, Network, NodeId};

/// A network, its distance table and an entropy model over its nodes.
#[derive(Debug, Clone)]
pub struct Instance {
    pub net: Network,
    pub dist: DistanceTable,
    pub model: EntropyModel,
}

impl Instance {
    pub fn new(net: Network, model: EntropyModel) -> Result<Self, EntropyError> {
        if !net.is_empty() {
            // Touch the last node so size mismatches surface here.
            model.entropy(net.len() - 1)?;
        }
        let dist = shortest_paths(&net);
        Ok(Instance { net, dist, model })
    }

    pub fn from_spec(net: Network, spec: &EntropySpec) -> Result<Self, EntropyError> {
        let model = EntropyModel::from_spec(spec, &net)?;
        Instance::new(net, model)
    }

    pub fn bs(&self) -> NodeId {
        self.net.bs()
    }

    /// `d(v, BS)`.
    pub fn dbs(&self, v: NodeId) -> f64 {
        self.dist.d(v, self.net.bs())
    }

    pub fn h(&self, v: NodeId) -> f64 {
        self.model.h(v)
    }

    pub fn hc(&self, v: NodeId, given: NodeId) -> f64 {
        self.model.hc(v, given)
    }

    pub fn sensors(&self) -> Vec<NodeId> {
        self.net.sensors().collect()
    }
}
