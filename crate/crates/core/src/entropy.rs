//! Entropy sources: marginal, pairwise-conditional and set-conditional rates.
//!
//! All per-node vectors and matrices are indexed by node id over the whole
//! network; entries for the base station are ignored. Uniform, rainfall and
//! matrix models are in bits, Gaussian models in nats.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netgraph::{Network, NodeId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("node {0} is out of range")]
    IndexOutOfRange(NodeId),
    #[error("H({i}|{j}) is zero while H({j}|{i}) is positive")]
    DegenerateEntropy { i: NodeId, j: NodeId },
    #[error("invalid model: {0}")]
    Invalid(String),
}

/// Which node pairs may compress each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    /// Only pairs adjacent in the communication graph.
    #[default]
    Sg,
    /// Any pair.
    Ns,
}

impl Space {
    pub fn admits(self, net: &Network, u: NodeId, v: NodeId) -> bool {
        match self {
            Space::Sg => net.adjacent(u, v),
            Space::Ns => true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GaussianModel {
    cov: DMatrix<f64>,
    floor: f64,
}

#[derive(Debug, Clone)]
pub enum EntropyModel {
    Uniform { h: f64, eps: f64, n: usize },
    Rainfall { h: f64, c: f64, positions: Vec<(f64, f64)> },
    Gaussian(GaussianModel),
    Matrix { h: Vec<f64>, hcond: Vec<Vec<f64>> },
}

/// JSON form of a model. Positions for the rainfall model come from the
/// network it is attached to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum EntropySpec {
    Uniform {
        h: f64,
        eps: f64,
    },
    Rainfall {
        h: f64,
        c: f64,
    },
    Gaussian {
        cov: Vec<Vec<f64>>,
        #[serde(default = "default_floor")]
        floor: f64,
    },
    /// Synthetic RBF covariance over node positions.
    Rbf {
        #[serde(default = "unit")]
        variance: f64,
        length_scale: f64,
        #[serde(default = "default_floor")]
        floor: f64,
    },
    Matrix {
        #[serde(rename = "H")]
        h: Vec<f64>,
        #[serde(rename = "Hcond")]
        hcond: Vec<Vec<f64>>,
    },
}

fn default_floor() -> f64 {
    1e-9
}

fn unit() -> f64 {
    1.0
}

const TWO_PI_E: f64 = 2.0 * std::f64::consts::PI * std::f64::consts::E;

fn gauss_entropy(var: f64, floor: f64) -> f64 {
    if var <= 0.0 {
        return floor;
    }
    (0.5 * (TWO_PI_E * var).ln()).max(floor)
}

impl GaussianModel {
    pub fn new(cov: DMatrix<f64>, floor: f64) -> Result<Self, EntropyError> {
        if cov.nrows() != cov.ncols() {
            return Err(EntropyError::Invalid("covariance must be square".into()));
        }
        for i in 0..cov.nrows() {
            for j in 0..i {
                let (a, b) = (cov[(i, j)], cov[(j, i)]);
                if (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0) {
                    return Err(EntropyError::Invalid(format!("covariance not symmetric at ({i}, {j})")));
                }
            }
        }
        if cov.clone().cholesky().is_none() {
            return Err(EntropyError::Invalid("covariance is not positive definite".into()));
        }
        if !(floor >= 0.0) {
            return Err(EntropyError::Invalid("floor must be non-negative".into()));
        }
        Ok(GaussianModel { cov, floor })
    }

    /// RBF kernel `variance * exp(-d^2 / (2 l^2))` over node positions with
    /// `1e-6` added on the diagonal.
    pub fn rbf(net: &Network, variance: f64, length_scale: f64, floor: f64) -> Result<Self, EntropyError> {
        if !(variance > 0.0) || !(length_scale > 0.0) {
            return Err(EntropyError::Invalid("variance and length scale must be positive".into()));
        }
        let n = net.len();
        let cov = DMatrix::from_fn(n, n, |i, j| {
            let d = net.euclid(i, j);
            variance * (-d * d / (2.0 * length_scale * length_scale)).exp() + if i == j { 1e-6 } else { 0.0 }
        });
        GaussianModel::new(cov, floor)
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Conditional variance of `i` given the variables in `given`.
    pub fn cond_variance(&self, i: NodeId, given: &[NodeId]) -> f64 {
        if given.is_empty() {
            return self.cov[(i, i)];
        }
        let k = given.len();
        let saa = DMatrix::from_fn(k, k, |a, b| self.cov[(given[a], given[b])]);
        let sai = DVector::from_fn(k, |a, _| self.cov[(given[a], i)]);
        match saa.cholesky() {
            Some(ch) => {
                let x = ch.solve(&sai);
                self.cov[(i, i)] - sai.dot(&x)
            }
            None => 0.0,
        }
    }
}

impl EntropyModel {
    pub fn uniform(net: &Network, h: f64, eps: f64) -> Self {
        EntropyModel::Uniform { h, eps, n: net.len() }
    }

    pub fn rainfall(net: &Network, h: f64, c: f64) -> Self {
        EntropyModel::Rainfall { h, c, positions: (0..net.len()).map(|v| net.position(v)).collect() }
    }

    pub fn matrix(h: Vec<f64>, hcond: Vec<Vec<f64>>) -> Result<Self, EntropyError> {
        let n = h.len();
        if hcond.len() != n || hcond.iter().any(|r| r.len() != n) {
            return Err(EntropyError::Invalid("Hcond must be n x n with n = len(H)".into()));
        }
        for i in 0..n {
            if !(h[i] >= 0.0) {
                return Err(EntropyError::Invalid(format!("H[{i}] is negative")));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let v = hcond[i][j];
                if !(v >= 0.0) {
                    return Err(EntropyError::Invalid(format!("Hcond[{i}][{j}] is negative")));
                }
                if v > h[i] + 1e-9 {
                    return Err(EntropyError::Invalid(format!("Hcond[{i}][{j}] exceeds H[{i}]")));
                }
            }
        }
        Ok(EntropyModel::Matrix { h, hcond })
    }

    /// Builds a model from its JSON form for the given network. Matrices may
    /// cover every node or only the sensors (in id order, base station
    /// skipped).
    pub fn from_spec(spec: &EntropySpec, net: &Network) -> Result<Self, EntropyError> {
        let positive = |x: f64, what: &str| {
            if x >= 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(EntropyError::Invalid(format!("{what} must be finite and non-negative")))
            }
        };
        match spec {
            EntropySpec::Uniform { h, eps } => {
                positive(*h, "h")?;
                positive(*eps, "eps")?;
                if eps > h {
                    return Err(EntropyError::Invalid("eps must not exceed h".into()));
                }
                Ok(EntropyModel::uniform(net, *h, *eps))
            }
            EntropySpec::Rainfall { h, c } => {
                positive(*h, "h")?;
                if !(*c > 0.0) {
                    return Err(EntropyError::Invalid("c must be positive".into()));
                }
                Ok(EntropyModel::rainfall(net, *h, *c))
            }
            EntropySpec::Gaussian { cov, floor } => {
                let full = expand_square(cov, net, 1.0)?;
                let n = full.len();
                let m = DMatrix::from_fn(n, n, |i, j| full[i][j]);
                Ok(EntropyModel::Gaussian(GaussianModel::new(m, *floor)?))
            }
            EntropySpec::Rbf { variance, length_scale, floor } => {
                Ok(EntropyModel::Gaussian(GaussianModel::rbf(net, *variance, *length_scale, *floor)?))
            }
            EntropySpec::Matrix { h, hcond } => {
                let hv = expand_vec(h, net)?;
                let hc = expand_square(hcond, net, 0.0)?;
                EntropyModel::matrix(hv, hc)
            }
        }
    }

    fn len(&self) -> usize {
        match self {
            EntropyModel::Uniform { n, .. } => *n,
            EntropyModel::Rainfall { positions, .. } => positions.len(),
            EntropyModel::Gaussian(g) => g.cov.nrows(),
            EntropyModel::Matrix { h, .. } => h.len(),
        }
    }

    fn check(&self, i: NodeId) -> Result<(), EntropyError> {
        if i < self.len() {
            Ok(())
        } else {
            Err(EntropyError::IndexOutOfRange(i))
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, EntropyModel::Gaussian(_))
    }

    /// `H(X_i)`.
    pub fn entropy(&self, i: NodeId) -> Result<f64, EntropyError> {
        self.check(i)?;
        Ok(match self {
            EntropyModel::Uniform { h, .. } | EntropyModel::Rainfall { h, .. } => *h,
            EntropyModel::Gaussian(g) => gauss_entropy(g.cov[(i, i)], g.floor),
            EntropyModel::Matrix { h, .. } => h[i],
        })
    }

    /// `H(X_i | X_j)`.
    pub fn cond_entropy(&self, i: NodeId, j: NodeId) -> Result<f64, EntropyError> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Ok(0.0);
        }
        Ok(match self {
            EntropyModel::Uniform { eps, .. } => *eps,
            EntropyModel::Rainfall { h, c, positions } => {
                let (a, b) = (positions[i], positions[j]);
                let dist = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
                (1.0 - c / (c + dist)) * h
            }
            EntropyModel::Gaussian(g) => gauss_entropy(g.cond_variance(i, &[j]), g.floor),
            EntropyModel::Matrix { hcond, .. } => hcond[i][j],
        })
    }

    /// `H(X_i | X_A)`. Exact for Gaussian models; pairwise models use the
    /// best single member of `given`.
    pub fn cond_entropy_set(&self, i: NodeId, given: &[NodeId]) -> Result<f64, EntropyError> {
        self.check(i)?;
        for &j in given {
            self.check(j)?;
        }
        let given: Vec<NodeId> = given.iter().copied().filter(|&j| j != i).collect();
        if given.is_empty() {
            return self.entropy(i);
        }
        match self {
            EntropyModel::Gaussian(g) => Ok(gauss_entropy(g.cond_variance(i, &given), g.floor)),
            _ => {
                let mut best = f64::INFINITY;
                for &j in &given {
                    best = best.min(self.cond_entropy(i, j)?);
                }
                Ok(best)
            }
        }
    }

    /// Unchecked accessors for hot loops; callers guarantee valid ids.
    pub fn h(&self, i: NodeId) -> f64 {
        self.entropy(i).expect("node in range")
    }

    pub fn hc(&self, i: NodeId, j: NodeId) -> f64 {
        self.cond_entropy(i, j).expect("node in range")
    }
}

fn expand_vec(v: &[f64], net: &Network) -> Result<Vec<f64>, EntropyError> {
    if v.len() == net.len() {
        return Ok(v.to_vec());
    }
    if v.len() == net.sensor_count() {
        let mut out = vec![0.0; net.len()];
        for (k, s) in net.sensors().enumerate() {
            out[s] = v[k];
        }
        return Ok(out);
    }
    Err(EntropyError::Invalid(format!("vector length {} fits neither nodes nor sensors", v.len())))
}

fn expand_square(m: &[Vec<f64>], net: &Network, bs_diag: f64) -> Result<Vec<Vec<f64>>, EntropyError> {
    if m.iter().any(|r| r.len() != m.len()) {
        return Err(EntropyError::Invalid("matrix must be square".into()));
    }
    if m.len() == net.len() {
        return Ok(m.to_vec());
    }
    if m.len() == net.sensor_count() {
        let n = net.len();
        let idx: Vec<NodeId> = net.sensors().collect();
        let mut out = vec![vec![0.0; n]; n];
        out[net.bs()][net.bs()] = bs_diag;
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[i][j] = m[a][b];
            }
        }
        return Ok(out);
    }
    Err(EntropyError::Invalid(format!("matrix size {} fits neither nodes nor sensors", m.len())))
}

/// Bounded conditional entropy parameter with its witnessing pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beta {
    pub value: f64,
    pub pair: Option<(NodeId, NodeId)>,
}

/// Largest mirrored conditional-entropy ratio over admissible sensor pairs.
pub fn beta(model: &EntropyModel, net: &Network, space: Space) -> Result<Beta, EntropyError> {
    let mut best = Beta { value: 1.0, pair: None };
    let sensors: Vec<NodeId> = net.sensors().collect();
    for (a, &i) in sensors.iter().enumerate() {
        for &j in &sensors[a + 1..] {
            if !space.admits(net, i, j) {
                continue;
            }
            let x = model.cond_entropy(i, j)?;
            let y = model.cond_entropy(j, i)?;
            let ratio = match (x > 0.0, y > 0.0) {
                (false, false) => 1.0,
                (true, false) => return Err(EntropyError::DegenerateEntropy { i: j, j: i }),
                (false, true) => return Err(EntropyError::DegenerateEntropy { i, j }),
                (true, true) => (x / y).max(y / x),
            };
            if ratio > best.value {
                best = Beta { value: ratio, pair: Some((i, j)) };
            }
        }
    }
    Ok(best)
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::netgraph::gen_random;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn gaussian_conditioning_never_hurts(seed in 0u64..500, ls in 5.0f64..60.0) {
            let net = gen_random(7, 60.0, 60.0, 40.0, seed).unwrap();
            let m = EntropyModel::Gaussian(GaussianModel::rbf(&net, 1.0, ls, 1e-9).unwrap());
            let sensors: Vec<NodeId> = net.sensors().collect();
            let i = sensors[0];
            let mut given = Vec::new();
            let mut prev = m.cond_entropy_set(i, &given).unwrap();
            for &j in &sensors[1..] {
                given.push(j);
                let cur = m.cond_entropy_set(i, &given).unwrap();
                prop_assert!(cur <= prev + 1e-9);
                prev = cur;
            }
        }

        #[test]
        fn rainfall_monotone(d1 in 0.1f64..100.0, gap in 0.1f64..50.0, c in 0.5f64..500.0) {
            use crate::netgraph::{build_network, Edge, Node};
            let nodes = vec![Node::new(0, -1.0, 0.0), Node::new(1, 0.0, 0.0), Node::new(2, d1, 0.0), Node::new(3, d1 + gap, 0.0)];
            let net = build_network(nodes, vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 3)], 0).unwrap();
            let m = EntropyModel::rainfall(&net, 1.0, c);
            let stronger = EntropyModel::rainfall(&net, 1.0, c * 1.5);
            // Farther pairs are less correlated; larger c correlates more.
            prop_assert!(m.cond_entropy(3, 1).unwrap() > m.cond_entropy(2, 1).unwrap());
            prop_assert!(stronger.cond_entropy(2, 1).unwrap() < m.cond_entropy(2, 1).unwrap());
        }

        #[test]
        fn conditional_below_marginal(seed in 0u64..200, c in 1.0f64..200.0) {
            let net = gen_random(8, 80.0, 80.0, 40.0, seed).unwrap();
            for m in [EntropyModel::rainfall(&net, 1.0, c), EntropyModel::Gaussian(GaussianModel::rbf(&net, 2.0, 20.0, 1e-9).unwrap())] {
                for i in net.sensors() {
                    for j in net.sensors() {
                        prop_assert!(m.cond_entropy(i, j).unwrap() <= m.entropy(i).unwrap() + 1e-9);
                    }
                }
            }
        }
    }
}
