//! Compression trees for gathering spatially correlated sensor readings.
//!
//! The crate models a sensor network ([`netgraph`]), the entropy of its
//! readings ([`entropy`]), compression trees with their data-movement
//! schemes and costs ([`ctree`]), the constructive algorithms
//! ([`algorithms`]) and brute-force reference solvers ([`oracle`]).

pub mod algorithms;
pub mod ctree;
pub mod entropy;
pub mod experiment;
pub mod fixtures;
pub mod instance;
pub mod netgraph;
pub mod oracle;
pub mod par;
pub mod verify;

pub use ctree::{CompressionTree, CostBreakdown, CostModel, MovementScheme};
pub use entropy::{EntropyModel, EntropySpec, Space};
pub use instance::Instance;
pub use netgraph::{Network, NodeId};

use std::cmp::Ordering;

/// Relative tolerance for cost comparisons.
pub const REL_TOL: f64 = 1e-12;

/// Totally ordered wrapper for heap keys.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cost(pub f64);

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Compares costs, treating values within [`REL_TOL`] as equal so that
/// id-based tie-breaks are not decided by rounding noise.
pub fn cmp_cost(a: f64, b: f64) -> Ordering {
    if !a.is_finite() || !b.is_finite() {
        return a.total_cmp(&b);
    }
    let scale = a.abs().max(b.abs()).max(1.0);
    if (a - b).abs() <= REL_TOL * scale {
        Ordering::Equal
    } else {
        a.total_cmp(&b)
    }
}

/// `H_n = 1 + 1/2 + ... + 1/n`.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerant_compare() {
        assert_eq!(cmp_cost(1.0, 1.0 + 1e-14), Ordering::Equal);
        assert_eq!(cmp_cost(1.0, 1.1), Ordering::Less);
        assert!((harmonic(5) - 2.283333333333333).abs() < 1e-12);
    }
}
