use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::check_instance;
use crate::cost::{CostModel, InnerSetFunction, SetFunction};
use crate::error::{Error, Result};
use crate::itemset::ItemSet;
use crate::model::{numbered, Instance, Realization};
use crate::utility::{CoverageUtility, ModularUtility, UtilityModel, VersionSpaceUtility};
use crate::verify::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityFamily {
    Modular,
    VersionSpace,
    Coverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostFamily {
    Modular,
    /// Polynomial of a modular inner function.
    PolyOfModular,
    /// Polynomial of a coverage-count inner function.
    PolyOfCoverage,
}

impl fmt::Display for UtilityFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Modular => "modular",
            Self::VersionSpace => "vsr",
            Self::Coverage => "coverage",
        })
    }
}

impl fmt::Display for CostFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Modular => "modular",
            Self::PolyOfModular => "poly_of_modular",
            Self::PolyOfCoverage => "poly_of_coverage",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomInstanceConfig {
    pub min_items: usize,
    pub max_items: usize,
    pub max_states: usize,
    pub utilities: Vec<UtilityFamily>,
    pub costs: Vec<CostFamily>,
    /// Draws allowed per accepted instance before giving up.
    pub max_attempts: usize,
}

impl Default for RandomInstanceConfig {
    fn default() -> Self {
        Self {
            min_items: 2,
            max_items: 5,
            max_states: 2,
            utilities: vec![UtilityFamily::Modular, UtilityFamily::VersionSpace, UtilityFamily::Coverage],
            costs: vec![CostFamily::Modular, CostFamily::PolyOfModular, CostFamily::PolyOfCoverage],
            max_attempts: 10_000,
        }
    }
}

/// Draw and rejection counts per `utility/cost` family pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GeneratorStats {
    pub drawn: BTreeMap<String, u64>,
    pub rejected: BTreeMap<String, u64>,
}

impl GeneratorStats {
    pub fn total_drawn(&self) -> u64 {
        self.drawn.values().sum()
    }

    pub fn total_rejected(&self) -> u64 {
        self.rejected.values().sum()
    }

    /// Fraction of draws of `key` that failed a checker.
    pub fn rejection_rate(&self, key: &str) -> Option<f64> {
        let drawn = *self.drawn.get(key)?;
        Some(self.rejected.get(key).copied().unwrap_or(0) as f64 / drawn as f64)
    }
}

/// Seeded source of small random instances that pass every checker.
#[derive(Debug, Clone)]
pub struct InstanceGenerator {
    config: RandomInstanceConfig,
    rng: ChaCha8Rng,
    stats: GeneratorStats,
}

fn grid(rng: &mut ChaCha8Rng, lo: u32, hi: u32, step: f64) -> f64 {
    rng.random_range(lo..=hi) as f64 * step
}

fn random_cells(rng: &mut ChaCha8Rng, universe: usize, p: f64, nonempty: bool) -> Vec<usize> {
    loop {
        let cells: Vec<usize> = (0..universe).filter(|_| rng.random_bool(p)).collect();
        if !nonempty || !cells.is_empty() {
            return cells;
        }
    }
}

impl InstanceGenerator {
    pub fn new(config: RandomInstanceConfig, seed: u64) -> Result<Self> {
        if config.utilities.is_empty() || config.costs.is_empty() {
            return Err(Error::Config("at least one utility and one cost family are required".into()));
        }
        if config.min_items == 0 || config.min_items > config.max_items || config.max_states == 0 {
            return Err(Error::Config("invalid item or state range".into()));
        }
        Ok(Self { config, rng: ChaCha8Rng::seed_from_u64(seed), stats: GeneratorStats::default() })
    }

    pub fn stats(&self) -> &GeneratorStats {
        &self.stats
    }

    fn utility(&mut self, family: UtilityFamily, n: usize, m: usize) -> Result<UtilityModel> {
        let rng = &mut self.rng;
        Ok(match family {
            UtilityFamily::Modular => {
                let w = (0..n).map(|_| (0..m).map(|_| grid(rng, 0, 8, 0.5)).collect()).collect();
                UtilityModel::Modular(ModularUtility::new(w)?)
            }
            UtilityFamily::VersionSpace => {
                let mut all: Vec<Vec<usize>> = Realization::enumerate(n, m).map(|h| h.states().to_vec()).collect();
                all.shuffle(rng);
                let k = rng.random_range(1..=all.len().min(8));
                all.truncate(k);
                let raw: Vec<f64> = (0..k).map(|_| rng.random_range(1..=4) as f64).collect();
                let total: f64 = raw.iter().sum();
                let prior = raw.iter().map(|w| w / total).collect();
                UtilityModel::VersionSpace(VersionSpaceUtility::new(all, prior, m)?)
            }
            UtilityFamily::Coverage => {
                let regions = (0..n).map(|_| (0..m).map(|_| random_cells(rng, 6, 0.35, false)).collect()).collect();
                UtilityModel::Coverage(CoverageUtility::new(6, regions)?)
            }
        })
    }

    fn cost(&mut self, family: CostFamily, n: usize) -> Result<CostModel> {
        let rng = &mut self.rng;
        let mut coefficients = || loop {
            let a = vec![grid(rng, 0, 4, 0.5), grid(rng, 0, 2, 0.25)];
            if a.iter().sum::<f64>() > 0.0 {
                return a;
            }
        };
        let a = coefficients();
        match family {
            CostFamily::Modular => CostModel::modular((0..n).map(|_| grid(rng, 1, 6, 0.5)).collect()),
            CostFamily::PolyOfModular => {
                let inner = InnerSetFunction::modular((0..n).map(|_| grid(rng, 1, 4, 0.5)).collect())?;
                CostModel::poly_of_g(a, inner)
            }
            CostFamily::PolyOfCoverage => {
                let cells = (0..n).map(|_| random_cells(rng, 6, 0.4, true)).collect();
                CostModel::poly_of_g(a, InnerSetFunction::coverage(6, cells)?)
            }
        }
    }

    /// One random instance and its family key, before any checks.
    pub fn draw(&mut self) -> Result<(Instance, String)> {
        let n = self.rng.random_range(self.config.min_items..=self.config.max_items);
        let m = self.rng.random_range(1..=self.config.max_states);
        let uf = self.config.utilities[self.rng.random_range(0..self.config.utilities.len())];
        let cf = self.config.costs[self.rng.random_range(0..self.config.costs.len())];
        let utility = self.utility(uf, n, m)?;
        let cost = self.cost(cf, n)?;
        let cheapest = cost.singleton_costs().into_iter().fold(f64::INFINITY, f64::min);
        let total = cost.eval(&ItemSet::full(n));
        let budget = cheapest + self.rng.random::<f64>() * (total - cheapest);
        let budget = ((budget * 4.0).round() / 4.0).max(cheapest);
        let inst = Instance::new(numbered("x", 0..n), numbered("", 0..m), utility, cost, budget)?;
        Ok((inst, format!("{uf}/{cf}")))
    }

    /// The next random instance passing the cost axioms and every pointwise check.
    pub fn next_checked(&mut self) -> Result<Instance> {
        for _ in 0..self.config.max_attempts {
            let (inst, key) = self.draw()?;
            *self.stats.drawn.entry(key.clone()).or_default() += 1;
            if check_instance(&inst)?.iter().all(|r| r.verdict == Verdict::Pass) {
                return Ok(inst);
            }
            *self.stats.rejected.entry(key).or_default() += 1;
        }
        Err(Error::Config(format!("no checked instance after {} draws", self.config.max_attempts)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let mut a = InstanceGenerator::new(RandomInstanceConfig::default(), 11).unwrap();
        let mut b = InstanceGenerator::new(RandomInstanceConfig::default(), 11).unwrap();
        for _ in 0..10 {
            let (x, y) = (a.next_checked().unwrap(), b.next_checked().unwrap());
            assert_eq!(x.budget(), y.budget());
            assert_eq!(x.cost(), y.cost());
        }
        assert_eq!(a.stats(), b.stats());
    }

    #[test]
    fn accepted_instances_are_within_shape() {
        let cfg = RandomInstanceConfig { utilities: vec![UtilityFamily::VersionSpace], ..Default::default() };
        let mut g = InstanceGenerator::new(cfg, 5).unwrap();
        for _ in 0..20 {
            let inst = g.next_checked().unwrap();
            assert!((2..=5).contains(&inst.n_items()) && inst.n_states() <= 2);
            assert!(matches!(inst.utility(), UtilityModel::VersionSpace(_)));
        }
        assert_eq!(g.stats().total_drawn() - g.stats().total_rejected(), 20);
    }
}
