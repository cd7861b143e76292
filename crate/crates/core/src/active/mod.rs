//! Budgeted pool-based active learning over a finite hypothesis class.
//!
//! Pool examples are the items, labels are the states, and the hypothesis
//! class with its prior is a version space reduction utility. Least
//! confidence (`LC`) is the cost-insensitive greedy policy for that utility,
//! its cost-averaged variant (`AvgLC`) the cost-average greedy policy, and
//! `BudgetLC` the combined half-budget policy.

mod experiment;
mod scenario;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use experiment::{results_to_csv, run_al_experiment, ALResult};
pub use scenario::{gen_cost_scenario, ALScenario, CostScenario, PriorSpec, ScenarioConfig};

use crate::cost::{CostModel, SetFunction};
use crate::error::{Error, Result};
use crate::itemset::ItemSet;
use crate::model::{Realization, DEFAULT_TOLERANCE};
use crate::policy::argmax_lowest;
use crate::utility::VersionSpaceUtility;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Strategy {
    Passive,
    #[serde(rename = "LC")]
    Lc,
    #[serde(rename = "AvgLC")]
    AvgLc,
    #[serde(rename = "BudgetLC")]
    BudgetLc,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Passive, Strategy::Lc, Strategy::AvgLc, Strategy::BudgetLc];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Passive => "Passive",
            Self::Lc => "LC",
            Self::AvgLc => "AvgLC",
            Self::BudgetLc => "BudgetLC",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown strategy '{s}'")))
    }
}

/// The prior restricted to hypotheses consistent with the labels seen so far.
#[derive(Debug, Clone)]
pub struct Posterior<'a> {
    class: &'a VersionSpaceUtility,
    alive: Vec<bool>,
    mass: f64,
}

impl<'a> Posterior<'a> {
    pub fn new(class: &'a VersionSpaceUtility) -> Self {
        let alive: Vec<bool> = class.prior().iter().map(|&p| p > 0.0).collect();
        Self { class, alive, mass: class.prior().iter().sum() }
    }

    /// Conditions on `x` having label `y`; leaves the posterior unchanged on error.
    pub fn observe(&mut self, x: usize, y: usize) -> Result<()> {
        let hyps = self.class.hypotheses();
        let mass: f64 = (0..hyps.len())
            .filter(|&k| self.alive[k] && hyps[k][x] == y)
            .map(|k| self.class.prior()[k])
            .sum();
        if mass <= 0.0 {
            return Err(Error::InconsistentEvidence);
        }
        for (k, h) in hyps.iter().enumerate() {
            self.alive[k] &= h[x] == y;
        }
        self.mass = mass;
        Ok(())
    }

    pub fn class(&self) -> &'a VersionSpaceUtility {
        self.class
    }

    /// Prior mass of the consistent hypotheses.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn is_consistent(&self, k: usize) -> bool {
        self.alive[k]
    }

    /// Normalized posterior weights over the class.
    pub fn weights(&self) -> Vec<f64> {
        let prior = self.class.prior();
        (0..prior.len()).map(|k| if self.alive[k] { prior[k] / self.mass } else { 0.0 }).collect()
    }

    /// `p_D[y; x]` for every label `y`.
    pub fn label_probs(&self, x: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.class.n_states()];
        for (k, h) in self.class.hypotheses().iter().enumerate() {
            if self.alive[k] {
                p[h[x]] += self.class.prior()[k];
            }
        }
        p.iter_mut().for_each(|v| *v /= self.mass);
        p
    }

    /// `min_y (1 − p_D[y; x])`.
    pub fn least_confidence(&self, x: usize) -> f64 {
        1.0 - self.label_probs(x).into_iter().fold(0.0, f64::max)
    }
}

fn affordable<'c>(cost: &'c CostModel, queried: &ItemSet, budget: f64) -> impl Fn(usize) -> bool + 'c {
    let queried = queried.clone();
    move |x| !queried.contains(x) && cost.eval(&queried.with(x)) <= budget + DEFAULT_TOLERANCE
}

/// The unqueried affordable example maximizing `min_y (1 − p_D[y; x])`;
/// `None` when nothing is affordable.
pub fn select_lc(post: &Posterior, queried: &ItemSet, cost: &CostModel, budget: f64) -> Option<usize> {
    let ok = affordable(cost, queried, budget);
    let scores = (0..cost.ground_size()).filter(|&x| ok(x)).map(|x| (x, post.least_confidence(x)));
    argmax_lowest(scores, DEFAULT_TOLERANCE)
}

/// The unqueried affordable example maximizing `min_y (1 − p_D[y; x]) / Δc(x | queried)`.
pub fn select_avg_lc(post: &Posterior, queried: &ItemSet, cost: &CostModel, budget: f64) -> Result<Option<usize>> {
    let ok = affordable(cost, queried, budget);
    let mut scores = Vec::new();
    for x in (0..cost.ground_size()).filter(|&x| ok(x)) {
        let dc = cost.increment(x, queried)?;
        if dc <= DEFAULT_TOLERANCE {
            return Err(Error::CostModelViolation { item: x, increment: dc });
        }
        scores.push((x, post.least_confidence(x) / dc));
    }
    Ok(argmax_lowest(scores, DEFAULT_TOLERANCE))
}

/// Queries made by one strategy and the resulting posterior.
#[derive(Debug, Clone)]
pub struct StrategyRun<'a> {
    /// Queries in order; `BudgetLC` lists its second phase after the first.
    pub observations: Vec<(usize, usize)>,
    /// Distinct queried examples.
    pub queried: ItemSet,
    /// Total cost charged; a `BudgetLC` re-query is charged in both phases.
    pub spent: f64,
    pub posterior: Posterior<'a>,
}

fn run_phase(
    class: &VersionSpaceUtility,
    cost: &CostModel,
    truth: &Realization,
    budget: f64,
    ratio: bool,
) -> Result<(Vec<(usize, usize)>, ItemSet)> {
    let mut post = Posterior::new(class);
    let mut queried = ItemSet::new();
    let mut obs = Vec::new();
    loop {
        let next = if ratio {
            select_avg_lc(&post, &queried, cost, budget)?
        } else {
            select_lc(&post, &queried, cost, budget)
        };
        let Some(x) = next else { break };
        let y = truth.state(x);
        post.observe(x, y)?;
        queried.insert(x);
        obs.push((x, y));
    }
    Ok((obs, queried))
}

/// Runs `strategy` against the labels in `truth` under `budget`.
///
/// `seed` only affects `Passive`, which scans a seeded random order and
/// queries every example that still fits the budget.
pub fn run_strategy<'a>(
    class: &'a VersionSpaceUtility,
    cost: &CostModel,
    truth: &Realization,
    budget: f64,
    strategy: Strategy,
    seed: u64,
) -> Result<StrategyRun<'a>> {
    let n = class.n_items();
    if cost.ground_size() != n || truth.n_items() != n {
        return Err(Error::Config("cost, labels and hypothesis class disagree on the pool size".into()));
    }
    let (observations, spent) = match strategy {
        Strategy::Passive => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let mut queried = ItemSet::new();
            let mut obs = Vec::new();
            for x in order {
                if cost.eval(&queried.with(x)) <= budget + DEFAULT_TOLERANCE {
                    queried.insert(x);
                    obs.push((x, truth.state(x)));
                }
            }
            (obs, cost.eval(&queried))
        }
        Strategy::Lc | Strategy::AvgLc => {
            let (obs, queried) = run_phase(class, cost, truth, budget, strategy == Strategy::AvgLc)?;
            (obs, cost.eval(&queried))
        }
        Strategy::BudgetLc => {
            let (mut first, s1) = run_phase(class, cost, truth, budget / 2.0, true)?;
            let (second, s2) = run_phase(class, cost, truth, budget / 2.0, false)?;
            first.extend(second);
            (first, cost.eval(&s1) + cost.eval(&s2))
        }
    };
    let mut posterior = Posterior::new(class);
    let mut queried = ItemSet::new();
    for &(x, y) in &observations {
        if queried.insert(x) {
            posterior.observe(x, y)?;
        }
    }
    Ok(StrategyRun { observations, queried, spent, posterior })
}
