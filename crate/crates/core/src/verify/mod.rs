//! Exhaustive property checkers, counterexample generators and the
//! near-optimality ratio harness.

mod checks;
mod fuzz;
mod generators;
mod ratio;

use serde::Serialize;

pub use checks::{
    check_cost_axioms, check_cost_sensitive_submodularity, check_instance, check_monotone,
    check_pointwise_properties, check_submodularity, minimal_dependency_witness, Pointwise,
};
pub use fuzz::{CostFamily, GeneratorStats, InstanceGenerator, RandomInstanceConfig, UtilityFamily};
pub use generators::{gen_counterexample_thm2, gen_counterexample_thm3, unit_items_tree};
pub use ratio::{assess_applicability, ratio_harness, Candidate, RatioReport};

use crate::itemset::ItemSet;
use crate::model::{Realization, Settings};

/// `½(1 − 1/e)`, the near-optimality constant of the greedy guarantees.
pub const BOUND: f64 = 0.5 * (1.0 - 1.0 / std::f64::consts::E);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// No violation among randomly drawn cases; not a proof.
    SampledPass,
}

/// A concrete violation.
///
/// `lhs` and `rhs` are the two sides of the violated relation as evaluated:
/// the property asks for `lhs >= rhs` (`lhs > rhs` for strict monotonicity
/// of costs, `lhs == rhs` for minimal dependency).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub violation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<ItemSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<ItemSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<Realization>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_prime: Option<Realization>,
    pub lhs: f64,
    pub rhs: f64,
}

impl Witness {
    fn new(violation: &str, lhs: f64, rhs: f64) -> Self {
        Self { violation: violation.into(), a: None, b: None, x: None, h: None, h_prime: None, lhs, rhs }
    }

    fn sets(mut self, a: ItemSet, b: Option<ItemSet>, x: Option<usize>) -> Self {
        self.a = Some(a);
        self.b = b;
        self.x = x;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub property: String,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub pairs_checked: u64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// Random sampling used above the exhaustive item cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub seed: u64,
    pub draws: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub tolerance: f64,
    /// Largest ground set checked exhaustively.
    pub max_items: usize,
    /// Largest number of realizations enumerated by the pointwise check.
    pub max_realizations: u128,
    /// Sample instead of failing when the ground set exceeds `max_items`.
    pub sampling: Option<Sampling>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self::from(&Settings::default())
    }
}

impl From<&Settings> for CheckOptions {
    fn from(s: &Settings) -> Self {
        Self {
            tolerance: s.tolerance,
            max_items: s.caps.checker_items,
            max_realizations: s.caps.realizations,
            sampling: None,
        }
    }
}

/// `lhs >= rhs` up to a tolerance scaled by the magnitudes involved.
fn at_least(lhs: f64, rhs: f64, tol: f64) -> bool {
    lhs >= rhs - tol * 1f64.max(lhs.abs()).max(rhs.abs())
}
