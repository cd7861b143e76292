//! Utility functions `f(S, h)`.
//!
//! All three shipped families are pointwise monotone and satisfy minimal
//! dependency: their value on `S` only reads the states of items in `S`, so
//! they evaluate directly on partial realizations.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::itemset::ItemSet;
use crate::model::{PartialRealization, Realization};

/// A utility `f(S, h)` over selected sets and realizations.
pub trait Utility: Send + Sync + fmt::Debug {
    /// `f(S, h)` under a full realization.
    fn value(&self, set: &ItemSet, h: &Realization) -> f64;

    /// `f(S, D)` for `S ⊆ X_D`.
    ///
    /// The default extends `D` with state 0 on unobserved items, which is only
    /// meaningful under minimal dependency.
    fn value_observed(&self, set: &ItemSet, d: &PartialRealization) -> Result<f64> {
        require_observed(set, d)?;
        Ok(self.value(set, &d.extend(0)))
    }

    /// Whether the implementation guarantees minimal dependency by construction.
    fn minimal_dependency_by_construction(&self) -> bool {
        false
    }
}

fn require_observed(set: &ItemSet, d: &PartialRealization) -> Result<()> {
    match set.iter().find(|&x| d.state_of(x).is_none()) {
        Some(x) => Err(Error::InsufficientObservation(x)),
        None => Ok(()),
    }
}

/// `f(S, h) = Σ_{x∈S} w(x, h(x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularUtility {
    weights: Vec<Vec<f64>>,
}

impl ModularUtility {
    /// `weights[item][state]`, all non-negative.
    pub fn new(weights: Vec<Vec<f64>>) -> Result<Self> {
        let m = weights.first().map_or(0, Vec::len);
        if weights.is_empty() || m == 0 || weights.iter().any(|r| r.len() != m) {
            return Err(Error::Config("modular utility needs one weight per (item, state)".into()));
        }
        if weights.iter().flatten().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config("modular utility weights must be finite and non-negative".into()));
        }
        Ok(Self { weights })
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.weights[x][y]
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    fn eval(&self, set: &ItemSet, state: impl Fn(usize) -> usize) -> f64 {
        set.iter().map(|x| self.weights[x][state(x)]).fold(0.0, |a, b| a + b)
    }
}

impl Utility for ModularUtility {
    fn value(&self, set: &ItemSet, h: &Realization) -> f64 {
        self.eval(set, |x| h.state(x))
    }

    fn value_observed(&self, set: &ItemSet, d: &PartialRealization) -> Result<f64> {
        require_observed(set, d)?;
        Ok(self.eval(set, |x| d.state_of(x).unwrap()))
    }

    fn minimal_dependency_by_construction(&self) -> bool {
        true
    }
}

/// `f(S, h) = |∪_{x∈S} R_{x,h(x)}|` over an abstract cell universe.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageUtility {
    universe: usize,
    regions: Vec<Vec<Vec<usize>>>,
}

impl CoverageUtility {
    /// `regions[item][state]` lists the covered cells, each `< universe`.
    pub fn new(universe: usize, regions: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let m = regions.first().map_or(0, Vec::len);
        if regions.is_empty() || m == 0 || regions.iter().any(|r| r.len() != m) {
            return Err(Error::Config("coverage utility needs one region per (item, state)".into()));
        }
        if let Some(c) = regions.iter().flatten().flatten().find(|&&c| c >= universe) {
            return Err(Error::Config(format!("coverage cell {c} outside universe of size {universe}")));
        }
        Ok(Self { universe, regions })
    }

    pub fn n_items(&self) -> usize {
        self.regions.len()
    }

    pub fn n_states(&self) -> usize {
        self.regions[0].len()
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn region(&self, x: usize, y: usize) -> &[usize] {
        &self.regions[x][y]
    }

    fn eval(&self, set: &ItemSet, state: impl Fn(usize) -> usize) -> f64 {
        let mut hit = vec![false; self.universe];
        let mut count = 0usize;
        for x in set.iter() {
            for &c in &self.regions[x][state(x)] {
                if !hit[c] {
                    hit[c] = true;
                    count += 1;
                }
            }
        }
        count as f64
    }
}

impl Utility for CoverageUtility {
    fn value(&self, set: &ItemSet, h: &Realization) -> f64 {
        self.eval(set, |x| h.state(x))
    }

    fn value_observed(&self, set: &ItemSet, d: &PartialRealization) -> Result<f64> {
        require_observed(set, d)?;
        Ok(self.eval(set, |x| d.state_of(x).unwrap()))
    }

    fn minimal_dependency_by_construction(&self) -> bool {
        true
    }
}

/// Version space reduction: the prior mass of hypotheses that disagree with
/// `h` on at least one item of `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct VersionSpaceUtility {
    n_states: usize,
    hypotheses: Vec<Vec<usize>>,
    prior: Vec<f64>,
}

impl VersionSpaceUtility {
    /// A finite hypothesis class of labelings (`hypotheses[k][item]`) with its prior.
    pub fn new(hypotheses: Vec<Vec<usize>>, prior: Vec<f64>, n_states: usize) -> Result<Self> {
        let n = hypotheses.first().map_or(0, Vec::len);
        if hypotheses.is_empty() || n == 0 || hypotheses.iter().any(|h| h.len() != n) {
            return Err(Error::Config("hypotheses must be non-empty labelings of equal length".into()));
        }
        if hypotheses.iter().flatten().any(|&y| y >= n_states) {
            return Err(Error::Config("hypothesis label out of range".into()));
        }
        if prior.len() != hypotheses.len() || prior.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Config("prior must give a non-negative mass per hypothesis".into()));
        }
        if (prior.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Config("prior must sum to 1".into()));
        }
        Ok(Self { n_states, hypotheses, prior })
    }

    /// Uniform prior over the given class.
    pub fn uniform(hypotheses: Vec<Vec<usize>>, n_states: usize) -> Result<Self> {
        let p = 1.0 / hypotheses.len().max(1) as f64;
        let prior = vec![p; hypotheses.len()];
        Self::new(hypotheses, prior, n_states)
    }

    /// Uniform prior over all `n_states^n_items` labelings.
    pub fn uniform_full(n_items: usize, n_states: usize) -> Result<Self> {
        if Realization::count(n_items, n_states) > 1 << 16 {
            return Err(Error::TooLarge {
                what: "full hypothesis class",
                size: Realization::count(n_items, n_states),
                cap: 1 << 16,
            });
        }
        let hyps = Realization::enumerate(n_items, n_states).map(|h| h.states().to_vec()).collect();
        Self::uniform(hyps, n_states)
    }

    pub fn hypotheses(&self) -> &[Vec<usize>] {
        &self.hypotheses
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn n_items(&self) -> usize {
        self.hypotheses[0].len()
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    fn eval(&self, set: &ItemSet, state: impl Fn(usize) -> usize) -> f64 {
        let items: Vec<(usize, usize)> = set.iter().map(|x| (x, state(x))).collect();
        self.hypotheses
            .iter()
            .zip(&self.prior)
            .filter(|(h, _)| items.iter().any(|&(x, y)| h[x] != y))
            .fold(0.0, |acc, (_, p)| acc + p)
    }

    /// Prior mass of hypotheses consistent with every observation in `d`.
    pub fn consistent_mass(&self, d: &PartialRealization) -> f64 {
        self.hypotheses
            .iter()
            .zip(&self.prior)
            .filter(|(h, _)| d.observations().iter().all(|&(x, y)| h[x] == y))
            .map(|(_, p)| p)
            .sum()
    }

    /// Posterior probability `p_D[y; x]` that item `x` has label `y`.
    pub fn posterior_label_prob(&self, d: &PartialRealization, x: usize, y: usize) -> Result<f64> {
        let mut total = 0.0;
        let mut with_label = 0.0;
        for (h, p) in self.hypotheses.iter().zip(&self.prior) {
            if d.observations().iter().all(|&(i, s)| h[i] == s) {
                total += p;
                if h[x] == y {
                    with_label += p;
                }
            }
        }
        if total <= 0.0 {
            return Err(Error::InconsistentEvidence);
        }
        Ok(with_label / total)
    }
}

impl Utility for VersionSpaceUtility {
    fn value(&self, set: &ItemSet, h: &Realization) -> f64 {
        self.eval(set, |x| h.state(x))
    }

    fn value_observed(&self, set: &ItemSet, d: &PartialRealization) -> Result<f64> {
        require_observed(set, d)?;
        Ok(self.eval(set, |x| d.state_of(x).unwrap()))
    }

    fn minimal_dependency_by_construction(&self) -> bool {
        true
    }
}

/// The utility attached to an instance.
#[derive(Debug, Clone)]
pub enum UtilityModel {
    Modular(ModularUtility),
    Coverage(CoverageUtility),
    VersionSpace(VersionSpaceUtility),
    /// A caller-supplied utility; minimal dependency is verified when the instance is built.
    Custom(Arc<dyn Utility>),
}

impl UtilityModel {
    fn inner(&self) -> &dyn Utility {
        match self {
            Self::Modular(u) => u,
            Self::Coverage(u) => u,
            Self::VersionSpace(u) => u,
            Self::Custom(u) => u.as_ref(),
        }
    }
}

impl Utility for UtilityModel {
    fn value(&self, set: &ItemSet, h: &Realization) -> f64 {
        self.inner().value(set, h)
    }

    fn value_observed(&self, set: &ItemSet, d: &PartialRealization) -> Result<f64> {
        self.inner().value_observed(set, d)
    }

    fn minimal_dependency_by_construction(&self) -> bool {
        self.inner().minimal_dependency_by_construction()
    }
}
