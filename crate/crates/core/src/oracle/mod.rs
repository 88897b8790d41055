//! Exhaustive and exact reference solvers. Each one refuses inputs above its
//! budget instead of falling back to a heuristic.

mod bounds;
mod brute;
mod steiner;

use std::time::{Duration, Instant};

use thiserror::Error;

pub use bounds::{check_bound, simulate_transmissions, BoundReport};
pub use brute::{
    brute_min_wcds, brute_restricted_opt, brute_treestars, brute_unrestricted, BruteResult, StarChoice,
};
pub use steiner::{cds_exact, directed_steiner_by_subset, min_density, min_per_k, steiner_exact};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{what}: size {size} exceeds the budget of {limit}")]
    BudgetExceeded { what: &'static str, size: usize, limit: usize },
    #[error("{0}: time budget exhausted")]
    TimeExceeded(&'static str),
    #[error("no feasible solution")]
    Infeasible,
}

/// Size and time limits for the exact solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleBudget {
    /// Sensors for the restricted optimum.
    pub restricted: usize,
    /// Sensors for the unrestricted optimum.
    pub unrestricted: usize,
    pub steiner_terminals: usize,
    pub cds_universe: usize,
    pub time: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { restricted: 8, unrestricted: 5, steiner_terminals: 12, cds_universe: 20, time: None }
    }
}

impl OracleBudget {
    pub(crate) fn check(&self, what: &'static str, size: usize, limit: usize) -> Result<(), OracleError> {
        if size > limit {
            Err(OracleError::BudgetExceeded { what, size, limit })
        } else {
            Ok(())
        }
    }
}

/// Polls the wall clock every few thousand steps.
pub(crate) struct Clock {
    start: Instant,
    limit: Option<Duration>,
    what: &'static str,
    ticks: u32,
}

impl Clock {
    pub(crate) fn new(budget: &OracleBudget, what: &'static str) -> Self {
        Clock { start: Instant::now(), limit: budget.time, what, ticks: 0 }
    }

    pub(crate) fn tick(&mut self) -> Result<(), OracleError> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(4096) {
            if let Some(l) = self.limit {
                if self.start.elapsed() > l {
                    return Err(OracleError::TimeExceeded(self.what));
                }
            }
        }
        Ok(())
    }
}
