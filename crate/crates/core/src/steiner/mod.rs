//! Steiner tree solvers over a [`WeightedWireGraph`].

mod approx;
mod exact;
mod oracle;
mod tree;

use log::warn;
use serde::{Deserialize, Serialize};

pub use approx::solve_approx;
pub use exact::{solve_exact, table_bytes};
pub use oracle::{solve_oracle, ORACLE_EDGE_CAP};
pub use tree::{SolverKind, SteinerTree};

use crate::error::{Error, Result};
use crate::graph::WeightedWireGraph;

pub const DEFAULT_EXACT_CAP: usize = 16;
/// Default ceiling on the exact solver's DP table.
pub const DEFAULT_MEMORY_BUDGET: usize = 4 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolvePolicy {
    pub prefer_exact: bool,
    pub cap: usize,
    pub memory_budget: usize,
}

impl Default for SolvePolicy {
    fn default() -> Self {
        SolvePolicy {
            prefer_exact: true,
            cap: DEFAULT_EXACT_CAP,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

/// Exact when the terminal count and table size allow it, otherwise the
/// 2-approximation.
pub fn solve(graph: &WeightedWireGraph, policy: &SolvePolicy) -> Result<SteinerTree> {
    if !policy.prefer_exact {
        return solve_approx(graph);
    }
    match solve_exact(graph, policy.cap, policy.memory_budget) {
        Err(e @ (Error::TerminalCapExceeded { .. } | Error::MemoryBudgetExceeded { .. })) => {
            warn!("{e}; falling back to the 2-approximation");
            solve_approx(graph)
        }
        other => other,
    }
}
