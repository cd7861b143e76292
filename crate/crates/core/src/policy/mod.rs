//! Greedy policies, the combined half-budget policy, and the exact optimum.
//!
//! Both greedy policies share one loop: repeatedly pick the unconsidered item
//! with the best score, select it if the cost of the enlarged set still fits
//! the budget, and drop it from consideration either way. The cost-average
//! policy scores `δ(x|D) / Δc(x|X_D)`, the cost-insensitive one scores `δ(x|D)`.

mod greedy;
mod materialize;
mod optimal;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use greedy::{run_combined_half, run_greedy, run_greedy_cost_average, run_greedy_cost_insensitive};
pub use greedy::{CombinedRunResult, Decision, PolicyRunTrace};
pub use materialize::{best_of_two, materialize_policy_tree};
pub use optimal::brute_force_optimal;

use crate::error::Error;

/// The policies the engine can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    /// Cost-average greedy: maximizes `δ(x|D) / Δc(x|X_D)`.
    #[serde(rename = "pi1")]
    CostAverage,
    /// Cost-insensitive greedy: maximizes `δ(x|D)`.
    #[serde(rename = "pi2")]
    CostInsensitive,
    /// Cost-average greedy on half the budget, then cost-insensitive greedy on the other half.
    Combined,
}

impl PolicyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::CostAverage => "pi1",
            Self::CostInsensitive => "pi2",
            Self::Combined => "combined",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pi1" | "cost-average" => Ok(Self::CostAverage),
            "pi2" | "cost-insensitive" => Ok(Self::CostInsensitive),
            "combined" | "pi_half" => Ok(Self::Combined),
            other => Err(Error::Config(format!("unknown policy kind '{other}'"))),
        }
    }
}

/// Index of the maximal score; near-ties within `tol` go to the lowest index.
pub fn argmax_lowest(scores: impl IntoIterator<Item = (usize, f64)>, tol: f64) -> Option<usize> {
    let scores: Vec<(usize, f64)> = scores.into_iter().collect();
    let best = scores.iter().map(|&(_, s)| s).fold(f64::NEG_INFINITY, f64::max);
    scores
        .iter()
        .filter(|&&(_, s)| s >= best - tol)
        .map(|&(i, _)| i)
        .min()
}
