use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{check_instance, Verdict, BOUND};
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::utility::UtilityModel;
use crate::policy::{best_of_two, brute_force_optimal, materialize_policy_tree, PolicyKind};

/// A policy whose exact worst-case value the harness compares to the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    Policy(PolicyKind),
    /// The better of the two greedy policies at the instance budget.
    BestOfTwo,
    /// The better of the cost-average policy and the first item the
    /// cost-insensitive policy selects.
    BestOfFirstPick,
}

impl Candidate {
    /// `f_worst` of the candidate at the instance budget.
    pub fn worst_case_value(self, inst: &Instance) -> Result<f64> {
        let tree_value = |kind| -> Result<f64> {
            let tree = materialize_policy_tree(inst, kind, inst.budget())?;
            Ok(inst.worst_case_value(&tree)?.worst_value)
        };
        match self {
            Self::Policy(kind) => tree_value(kind),
            Self::BestOfTwo => Ok(best_of_two(inst)?.1),
            Self::BestOfFirstPick => {
                let first = materialize_policy_tree(inst, PolicyKind::CostInsensitive, inst.budget())?.truncated(1);
                let v2 = inst.worst_case_value(&first)?.worst_value;
                Ok(tree_value(PolicyKind::CostAverage)?.max(v2))
            }
        }
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Policy(kind) => write!(f, "{kind}"),
            Self::BestOfTwo => f.write_str("best_of_two"),
            Self::BestOfFirstPick => f.write_str("best_of_first_pick"),
        }
    }
}

impl FromStr for Candidate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "best_of_two" => Ok(Self::BestOfTwo),
            "best_of_first_pick" => Ok(Self::BestOfFirstPick),
            other => other.parse().map(Self::Policy),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub instance_id: String,
    pub policy: String,
    pub reference_budget: f64,
    pub value_policy: f64,
    pub value_optimal: f64,
    /// `value_policy / value_optimal`; 1 when both are 0.
    pub ratio: f64,
    pub bound: f64,
    /// `ratio > bound`.
    pub satisfied: bool,
    /// Whether a guarantee covers this candidate at this reference budget and
    /// the instance passed every checker.
    pub applicable: bool,
}

impl RatioReport {
    /// An applicable report whose bound does not hold.
    pub fn violated(&self) -> bool {
        self.applicable && !self.satisfied
    }
}

/// `true` if the cost axioms and all pointwise properties hold exhaustively;
/// `false` when they fail or are too large to check.
pub fn assess_applicability(inst: &Instance) -> Result<bool> {
    match check_instance(inst) {
        Ok(reports) => Ok(reports.iter().all(|r| r.verdict == Verdict::Pass)),
        Err(Error::TooLarge { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Whether some guarantee relates `candidate` at the instance budget to the
/// optimum at `reference_budget`, assuming the instance passes the checkers.
fn bound_claimed(inst: &Instance, candidate: Candidate, reference_budget: f64) -> bool {
    let tol = inst.settings().tolerance;
    let full = reference_budget <= inst.budget() + tol;
    let half = reference_budget <= inst.budget() / 2.0 + tol;
    match candidate {
        Candidate::BestOfTwo | Candidate::BestOfFirstPick => full,
        Candidate::Policy(PolicyKind::Combined) => half,
        Candidate::Policy(PolicyKind::CostAverage) => {
            half && inst.cost().is_modular() && matches!(inst.utility(), UtilityModel::Modular(_))
        }
        Candidate::Policy(PolicyKind::CostInsensitive) => false,
    }
}

/// Compares the candidate's exact worst-case value at the instance budget with
/// the optimal worst-case value at `reference_budget`.
pub fn ratio_harness(inst: &Instance, instance_id: &str, candidate: Candidate, reference_budget: f64) -> Result<RatioReport> {
    let applicable = bound_claimed(inst, candidate, reference_budget) && assess_applicability(inst)?;
    let value_policy = candidate.worst_case_value(inst)?;
    let (_, value_optimal) = brute_force_optimal(inst, reference_budget)?;
    let tol = inst.settings().tolerance;
    let ratio = if value_optimal.abs() <= tol && value_policy.abs() <= tol {
        1.0
    } else {
        value_policy / value_optimal
    };
    Ok(RatioReport {
        instance_id: instance_id.into(),
        policy: candidate.to_string(),
        reference_budget,
        value_policy,
        value_optimal,
        ratio,
        bound: BOUND,
        satisfied: ratio > BOUND,
        applicable,
    })
}
