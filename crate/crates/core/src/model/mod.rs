//! Problem instances, realizations, policy trees and the worst-case objective.

mod realization;
mod tree;

use std::collections::HashSet;

pub use realization::{PartialRealization, Realization};
pub use tree::{PolicyNode, PolicyTree, PolicyValueReport};

use crate::cost::{CostModel, SetFunction};
use crate::error::{Error, Result};
use crate::itemset::ItemSet;
use crate::utility::{Utility, UtilityModel};

/// Default absolute tolerance for value comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Enumeration limits for the exact (exponential) procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Realizations enumerated by full-enumeration evaluation and tree unrolling.
    pub realizations: u128,
    /// Bound on `(|Y|+1)^|X|`, the number of partial realizations the optimal-policy search may visit.
    pub brute_force_states: u128,
    /// Largest ground set checked exhaustively by the property checkers.
    pub checker_items: usize,
}

impl Default for Caps {
    fn default() -> Self {
        // 4^6: six items with three states.
        Self { realizations: 1 << 20, brute_force_states: 4096, checker_items: 8 }
    }
}

/// Numerical settings shared by the engine and the checkers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub tolerance: f64,
    pub caps: Caps,
}

impl Default for Settings {
    fn default() -> Self {
        Self { tolerance: DEFAULT_TOLERANCE, caps: Caps::default() }
    }
}

/// How minimal dependency of the instance's utility is established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dependency {
    /// A shipped utility family that only reads the states of selected items.
    ByConstruction,
    /// Verified by exhaustive check.
    Verified,
    /// The exhaustive check found a violation; partial evaluation is refused.
    Violated,
    /// Too large to check; trusted.
    Unverified,
}

/// Items, states, utility, cost and budget: a complete problem statement.
#[derive(Debug, Clone)]
pub struct Instance {
    items: Vec<String>,
    states: Vec<String>,
    utility: UtilityModel,
    cost: CostModel,
    budget: f64,
    dependency: Dependency,
    settings: Settings,
}

impl Instance {
    pub fn new(
        items: Vec<String>,
        states: Vec<String>,
        utility: UtilityModel,
        cost: CostModel,
        budget: f64,
    ) -> Result<Self> {
        Self::with_settings(items, states, utility, cost, budget, Settings::default())
    }

    pub fn with_settings(
        items: Vec<String>,
        states: Vec<String>,
        utility: UtilityModel,
        cost: CostModel,
        budget: f64,
        settings: Settings,
    ) -> Result<Self> {
        ensure_unique("item", &items)?;
        ensure_unique("state", &states)?;
        if !(budget.is_finite() && budget > 0.0) {
            return Err(Error::Config(format!("budget must be positive, got {budget}")));
        }
        if cost.ground_size() != items.len() {
            return Err(Error::Config(format!(
                "cost is defined on {} items, instance has {}",
                cost.ground_size(),
                items.len()
            )));
        }
        let shape = match &utility {
            UtilityModel::Modular(u) => Some((u.weights().len(), u.weights()[0].len())),
            UtilityModel::Coverage(u) => Some((u.n_items(), u.n_states())),
            UtilityModel::VersionSpace(u) => Some((u.n_items(), u.n_states())),
            UtilityModel::Custom(_) => None,
        };
        if let Some((n, m)) = shape {
            if n != items.len() || m != states.len() {
                return Err(Error::Config(format!(
                    "utility is defined on {n} items x {m} states, instance has {} x {}",
                    items.len(),
                    states.len()
                )));
            }
        }
        let dependency = if utility.minimal_dependency_by_construction() {
            Dependency::ByConstruction
        } else if Realization::count(items.len(), states.len()).saturating_mul(1 << items.len().min(64))
            <= settings.caps.realizations
        {
            match crate::verify::minimal_dependency_witness(&utility, items.len(), states.len(), settings.tolerance) {
                None => Dependency::Verified,
                Some(_) => Dependency::Violated,
            }
        } else {
            Dependency::Unverified
        };
        Ok(Self { items, states, utility, cost, budget, dependency, settings })
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn utility(&self) -> &UtilityModel {
        &self.utility
    }

    pub fn cost(&self) -> &CostModel {
        &self.cost
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    pub fn dependency(&self) -> Dependency {
        self.dependency
    }

    /// A copy with a different budget.
    pub fn with_budget(&self, budget: f64) -> Result<Self> {
        if !(budget.is_finite() && budget > 0.0) {
            return Err(Error::Config(format!("budget must be positive, got {budget}")));
        }
        Ok(Self { budget, ..self.clone() })
    }

    pub fn set_settings(&mut self, settings: Settings) {
        self.settings = settings;
    }

    pub fn item_index(&self, id: &str) -> Option<usize> {
        self.items.iter().position(|s| s == id)
    }

    pub fn state_index(&self, id: &str) -> Option<usize> {
        self.states.iter().position(|s| s == id)
    }

    /// Item identifiers of a set, in index order.
    pub fn item_names(&self, set: &ItemSet) -> Vec<String> {
        set.iter().map(|x| self.items[x].clone()).collect()
    }

    /// `f(S, h)`.
    pub fn value(&self, set: &ItemSet, h: &Realization) -> f64 {
        self.utility.value(set, h)
    }

    /// `f(X_D, D)`, refused if minimal dependency is known to fail.
    pub fn value_observed(&self, d: &PartialRealization) -> Result<f64> {
        if self.dependency == Dependency::Violated {
            return Err(Error::MinimalDependencyViolated);
        }
        self.utility.value_observed(d.selected(), d)
    }

    /// Worst-case utility gain `δ(x|D) = min_y f(X_D ∪ {x}, D ∪ {(x,y)}) − f(X_D, D)`.
    pub fn marginal_gain_delta(&self, x: usize, d: &PartialRealization) -> Result<f64> {
        if x >= self.n_items() {
            return Err(Error::Precondition(format!("item {x} out of range")));
        }
        if d.selected().contains(x) {
            return Err(Error::Precondition(format!("item {} is already selected", self.items[x])));
        }
        let base = self.value_observed(d)?;
        let mut worst = f64::INFINITY;
        for y in 0..self.n_states() {
            let gain = self.value_observed(&d.with(x, y)?)? - base;
            worst = worst.min(gain);
        }
        Ok(worst)
    }

    /// `c(S)`.
    pub fn cost_of(&self, set: &ItemSet) -> f64 {
        self.cost.eval(set)
    }

    /// `true` if `c(S) <= budget` up to tolerance.
    pub fn affordable(&self, set: &ItemSet, budget: f64) -> bool {
        self.cost.eval(set) <= budget + self.settings.tolerance
    }

    /// Parses `item=state` pairs into a realization; every item must be assigned.
    pub fn realization_from_pairs<'a>(&self, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Realization> {
        let mut states = vec![None; self.n_items()];
        for (item, state) in pairs {
            let x = self.item_index(item).ok_or_else(|| Error::Config(format!("unknown item '{item}'")))?;
            let y = self.state_index(state).ok_or_else(|| Error::Config(format!("unknown state '{state}'")))?;
            states[x] = Some(y);
        }
        let states = states
            .into_iter()
            .enumerate()
            .map(|(x, s)| s.ok_or_else(|| Error::Config(format!("item '{}' has no state", self.items[x]))))
            .collect::<Result<Vec<_>>>()?;
        Realization::new(states, self.n_states())
    }
}

fn ensure_unique(what: &str, ids: &[String]) -> Result<()> {
    if ids.is_empty() {
        return Err(Error::Config(format!("at least one {what} is required")));
    }
    let mut seen = HashSet::new();
    if let Some(dup) = ids.iter().find(|id| !seen.insert(id.as_str())) {
        return Err(Error::Config(format!("duplicate {what} identifier '{dup}'")));
    }
    Ok(())
}

/// `x0, x1, ...` style identifiers.
pub fn numbered(prefix: &str, range: impl IntoIterator<Item = usize>) -> Vec<String> {
    range.into_iter().map(|i| format!("{prefix}{i}")).collect()
}
