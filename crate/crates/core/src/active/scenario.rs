use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Gamma;
use serde::{Deserialize, Serialize};

use super::Strategy;
use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::model::Realization;
use crate::utility::VersionSpaceUtility;

/// Prior over the threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriorSpec {
    Uniform,
    /// Weights `exp(−(t − center)² / (2 width²))`, normalized.
    Gaussian { center: f64, width: f64 },
}

impl Default for PriorSpec {
    fn default() -> Self {
        Self::Gaussian { center: 0.5, width: 0.15 }
    }
}

fn one() -> f64 {
    1.0
}

fn ten() -> f64 {
    10.0
}

fn half() -> f64 {
    0.5
}

fn shape_80() -> f64 {
    80.0
}

fn shape_45() -> f64 {
    45.0
}

fn scale() -> f64 {
    0.1
}

/// How example costs are assigned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostScenario {
    /// Each example independently, with probability `fraction`, costs a
    /// Gamma(`shape`, `scale`) draw; the rest cost 1.
    RandomSubsetGamma {
        #[serde(default = "half")]
        fraction: f64,
        #[serde(default = "shape_80")]
        shape: f64,
        #[serde(default = "scale")]
        scale: f64,
    },
    /// Examples labelled 1 cost a Gamma(`shape`, `scale`) draw; the rest cost 1.
    #[serde(rename = "gamma_on_label_1")]
    GammaOnLabel1 {
        #[serde(default = "shape_45")]
        shape: f64,
        #[serde(default = "scale")]
        scale: f64,
    },
    /// `cost = high − (high − low) · margin`.
    HighCostLowMargin {
        #[serde(default = "one")]
        low: f64,
        #[serde(default = "ten")]
        high: f64,
    },
    /// `cost = low + (high − low) · margin`.
    HighCostHighMargin {
        #[serde(default = "one")]
        low: f64,
        #[serde(default = "ten")]
        high: f64,
    },
    /// Every example costs `cost`.
    Uniform {
        #[serde(default = "one")]
        cost: f64,
    },
}

impl CostScenario {
    pub fn name(&self) -> &'static str {
        match self {
            Self::RandomSubsetGamma { .. } => "random_subset_gamma",
            Self::GammaOnLabel1 { .. } => "gamma_on_label_1",
            Self::HighCostLowMargin { .. } => "high_cost_low_margin",
            Self::HighCostHighMargin { .. } => "high_cost_high_margin",
            Self::Uniform { .. } => "uniform",
        }
    }
}

fn gamma(shape: f64, scale: f64) -> Result<Gamma<f64>> {
    Gamma::new(shape, scale).map_err(|e| Error::Config(format!("invalid gamma parameters: {e}")))
}

fn check_affine(low: f64, high: f64) -> Result<()> {
    if !(low > 0.0 && high >= low && high.is_finite()) {
        return Err(Error::Config(format!("margin costs need 0 < low <= high, got {low} and {high}")));
    }
    Ok(())
}

/// Modular example costs for a cost scenario.
///
/// `labels` are the true pool labels and `margins` lie in `[0, 1]`.
pub fn gen_cost_scenario(kind: &CostScenario, labels: &[usize], margins: &[f64], seed: u64) -> Result<CostModel> {
    if labels.len() != margins.len() {
        return Err(Error::Config("labels and margins must cover the same pool".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let costs: Vec<f64> = match *kind {
        CostScenario::RandomSubsetGamma { fraction, shape, scale } => {
            if !(0.0..=1.0).contains(&fraction) {
                return Err(Error::Config(format!("fraction must lie in [0, 1], got {fraction}")));
            }
            let g = gamma(shape, scale)?;
            labels.iter().map(|_| if rng.random_bool(fraction) { g.sample(&mut rng) } else { 1.0 }).collect()
        }
        CostScenario::GammaOnLabel1 { shape, scale } => {
            let g = gamma(shape, scale)?;
            labels.iter().map(|&y| if y == 1 { g.sample(&mut rng) } else { 1.0 }).collect()
        }
        CostScenario::HighCostLowMargin { low, high } => {
            check_affine(low, high)?;
            margins.iter().map(|m| high - (high - low) * m).collect()
        }
        CostScenario::HighCostHighMargin { low, high } => {
            check_affine(low, high)?;
            margins.iter().map(|m| low + (high - low) * m).collect()
        }
        CostScenario::Uniform { cost } => {
            if !(cost > 0.0 && cost.is_finite()) {
                return Err(Error::Config(format!("uniform cost must be positive, got {cost}")));
            }
            vec![cost; labels.len()]
        }
    };
    // a Gamma draw is positive in theory but can underflow to 0
    let costs = costs.into_iter().map(|c| c.max(f64::MIN_POSITIVE)).collect();
    CostModel::modular(costs)
}

fn pool_size() -> usize {
    120
}

fn test_size() -> usize {
    400
}

fn n_thresholds() -> usize {
    121
}

fn all_strategies() -> Vec<Strategy> {
    Strategy::ALL.to_vec()
}

/// Experiment configuration, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Defaults to the cost scenario's name.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "pool_size")]
    pub pool_size: usize,
    #[serde(default = "test_size")]
    pub test_size: usize,
    /// Threshold classifiers at `k / (n_thresholds − 1)`.
    #[serde(default = "n_thresholds")]
    pub n_thresholds: usize,
    #[serde(default)]
    pub prior: PriorSpec,
    pub cost: CostScenario,
    pub budgets: Vec<f64>,
    pub seeds: Vec<u64>,
    #[serde(default = "all_strategies")]
    pub strategies: Vec<Strategy>,
}

impl ScenarioConfig {
    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or(self.cost.name())
    }

    pub fn validate(&self) -> Result<()> {
        if self.pool_size == 0 || self.test_size == 0 {
            return Err(Error::Config("pool and test set must be non-empty".into()));
        }
        if self.n_thresholds < 2 {
            return Err(Error::Config("at least two thresholds are required".into()));
        }
        if self.budgets.is_empty() || self.budgets.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::Config("budgets must be a non-empty list of positive numbers".into()));
        }
        if self.seeds.is_empty() || self.strategies.is_empty() {
            return Err(Error::Config("seeds and strategies must be non-empty".into()));
        }
        if let PriorSpec::Gaussian { width, center } = self.prior {
            if !(width > 0.0 && width.is_finite() && center.is_finite()) {
                return Err(Error::Config("gaussian prior needs a finite center and positive width".into()));
            }
        }
        Ok(())
    }
}

/// One seeded draw of a threshold-classifier learning problem.
#[derive(Debug, Clone)]
pub struct ALScenario {
    pub seed: u64,
    /// 1-D pool features in `[0, 1)`.
    pub pool: Vec<f64>,
    /// Held-out features, drawn independently of the pool.
    pub test: Vec<f64>,
    pub thresholds: Vec<f64>,
    /// Threshold classifiers labelling the pool, with their prior.
    pub class: VersionSpaceUtility,
    pub true_hypothesis: usize,
    /// Pool labels under the true hypothesis.
    pub truth: Realization,
    /// `|2 p(1 | x) − 1|` under the prior predictive.
    pub margins: Vec<f64>,
    pub cost: CostModel,
}

fn label(x: f64, t: f64) -> usize {
    usize::from(x >= t)
}

impl ALScenario {
    pub fn generate(config: &ScenarioConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool: Vec<f64> = (0..config.pool_size).map(|_| rng.random()).collect();
        let test: Vec<f64> = (0..config.test_size).map(|_| rng.random()).collect();
        let t_max = (config.n_thresholds - 1) as f64;
        let thresholds: Vec<f64> = (0..config.n_thresholds).map(|k| k as f64 / t_max).collect();
        let weights: Vec<f64> = match config.prior {
            PriorSpec::Uniform => vec![1.0; thresholds.len()],
            PriorSpec::Gaussian { center, width } => {
                thresholds.iter().map(|t| (-(t - center).powi(2) / (2.0 * width * width)).exp()).collect()
            }
        };
        let total: f64 = weights.iter().sum();
        let prior: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let true_hypothesis = WeightedIndex::new(&prior)
            .map_err(|e| Error::Config(format!("degenerate prior: {e}")))?
            .sample(&mut rng);
        let hypotheses = thresholds.iter().map(|&t| pool.iter().map(|&x| label(x, t)).collect()).collect();
        let class = VersionSpaceUtility::new(hypotheses, prior, 2)?;
        let truth = Realization::new(class.hypotheses()[true_hypothesis].clone(), 2)?;
        let margins: Vec<f64> = pool
            .iter()
            .map(|&x| {
                let p1: f64 =
                    thresholds.iter().zip(class.prior()).filter(|(t, _)| x >= **t).map(|(_, p)| p).sum();
                (2.0 * p1 - 1.0).abs().min(1.0)
            })
            .collect();
        let cost_seed = rng.random();
        let cost = gen_cost_scenario(&config.cost, truth.states(), &margins, cost_seed)?;
        Ok(Self { seed, pool, test, thresholds, class, true_hypothesis, truth, margins, cost })
    }

    /// Fraction of the test set on which the posterior-weighted majority vote
    /// matches the true labels; an evenly split vote predicts 0.
    pub fn accuracy(&self, posterior: &super::Posterior) -> f64 {
        let weights = posterior.weights();
        let t_true = self.thresholds[self.true_hypothesis];
        let correct = self
            .test
            .iter()
            .filter(|&&x| {
                let p1: f64 = self.thresholds.iter().zip(&weights).filter(|(t, _)| x >= **t).map(|(_, w)| w).sum();
                usize::from(p1 > 0.5) == label(x, t_true)
            })
            .count();
        correct as f64 / self.test.len() as f64
    }
}
