//! Cost set functions over item subsets.
//!
//! A valid cost satisfies `c(∅) = 0`, is strictly monotone, and obeys the
//! triangle inequality `c(A ∪ B) <= c(A) + c(B)`. Constructors here only
//! check parameter shapes; the structural axioms are verified by
//! [`crate::verify::check_cost_axioms`], because callers need to be able to
//! build (and then diagnose) invalid costs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itemset::ItemSet;

/// Anything that assigns a real value to subsets of a fixed ground set.
pub trait SetFunction {
    /// Number of items in the ground set.
    fn ground_size(&self) -> usize;
    fn eval(&self, set: &ItemSet) -> f64;
}

/// Monotone inner set function `g` used by the polynomial and exponential cost families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum InnerSetFunction {
    /// `g(S) = Σ_{x∈S} w_x` with non-negative weights.
    ModularWeights { weights: Vec<f64> },
    /// `g(S) = |∪_{x∈S} cells_x|`.
    CoverageCount { universe: usize, cells: Vec<Vec<usize>> },
    /// Explicit value per subset, indexed by the subset's bitmask.
    Table { n: usize, values: Vec<f64> },
}

impl InnerSetFunction {
    pub fn modular(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config("inner modular weights must be finite and non-negative".into()));
        }
        Ok(Self::ModularWeights { weights })
    }

    pub fn coverage(universe: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        if let Some(c) = cells.iter().flatten().find(|&&c| c >= universe) {
            return Err(Error::Config(format!("coverage cell {c} outside universe of size {universe}")));
        }
        Ok(Self::CoverageCount { universe, cells })
    }

    /// A tabulated `g`; checks `g(∅) = 0` and monotonicity exhaustively.
    pub fn table(n: usize, values: Vec<f64>) -> Result<Self> {
        if n > 20 || values.len() != 1usize << n {
            return Err(Error::Config(format!("inner table for {n} items needs 2^{n} entries")));
        }
        if values[0] != 0.0 {
            return Err(Error::Config("inner table must have g(∅) = 0".into()));
        }
        for mask in 0..values.len() {
            for x in 0..n {
                if mask & (1 << x) == 0 && values[mask | (1 << x)] < values[mask] {
                    return Err(Error::Config("inner table is not monotone".into()));
                }
            }
        }
        Ok(Self::Table { n, values })
    }
}

impl SetFunction for InnerSetFunction {
    fn ground_size(&self) -> usize {
        match self {
            Self::ModularWeights { weights } => weights.len(),
            Self::CoverageCount { cells, .. } => cells.len(),
            Self::Table { n, .. } => *n,
        }
    }

    fn eval(&self, set: &ItemSet) -> f64 {
        match self {
            Self::ModularWeights { weights } => set.iter().map(|x| weights[x]).fold(0.0, |a, b| a + b),
            Self::CoverageCount { universe, cells } => {
                let mut hit = vec![false; *universe];
                let mut count = 0usize;
                for x in set.iter() {
                    for &c in &cells[x] {
                        if !hit[c] {
                            hit[c] = true;
                            count += 1;
                        }
                    }
                }
                count as f64
            }
            Self::Table { values, .. } => values[set.to_mask().expect("table set fits in mask") as usize],
        }
    }
}

/// A cost set function `c` over subsets of items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum CostModel {
    /// `c(S) = Σ_{x∈S} weights[x]`.
    Modular { weights: Vec<f64> },
    /// Explicit value for every subset, indexed by bitmask.
    Table { n: usize, values: Vec<f64> },
    /// `c(S) = Σ_i coefficients[i-1] · g(S)^i`.
    PolyOfG { coefficients: Vec<f64>, inner: InnerSetFunction },
    /// `c(S) = alpha · (e^{g(S)} − 1)`.
    ///
    /// The `− 1` shift keeps `c(∅) = 0`; it leaves every increment
    /// `Δc(x|S)` equal to that of `alpha · e^{g(S)}`.
    ExpOfG { alpha: f64, inner: InnerSetFunction },
    /// `c(S) = alpha · first(S) + beta · second(S)`.
    Combined { alpha: f64, first: Box<CostModel>, beta: f64, second: Box<CostModel> },
}

impl CostModel {
    pub fn modular(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config("modular cost weights must be non-empty, finite and non-negative".into()));
        }
        Ok(Self::Modular { weights })
    }

    /// Same weight for each of `n` items.
    pub fn uniform(n: usize, weight: f64) -> Result<Self> {
        Self::modular(vec![weight; n])
    }

    /// A complete subset table indexed by bitmask.
    pub fn table(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || n > 20 || values.len() != 1usize << n {
            return Err(Error::Config(format!("cost table for {n} items needs exactly 2^{n} entries")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("cost table values must be finite".into()));
        }
        Ok(Self::Table { n, values })
    }

    pub fn poly_of_g(coefficients: Vec<f64>, inner: InnerSetFunction) -> Result<Self> {
        if coefficients.is_empty()
            || coefficients.iter().any(|a| !a.is_finite() || *a < 0.0)
            || coefficients.iter().sum::<f64>() <= 0.0
        {
            return Err(Error::Config("polynomial coefficients must be non-negative and not all zero".into()));
        }
        Ok(Self::PolyOfG { coefficients, inner })
    }

    pub fn exp_of_g(alpha: f64, inner: InnerSetFunction) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Config("exponential cost scale must be positive".into()));
        }
        Ok(Self::ExpOfG { alpha, inner })
    }

    /// `Δc(x|S) = c(S ∪ {x}) − c(S)`.
    pub fn increment(&self, x: usize, set: &ItemSet) -> Result<f64> {
        if set.contains(x) {
            return Err(Error::Precondition(format!("item {x} is already in the set")));
        }
        if x >= self.ground_size() {
            return Err(Error::Precondition(format!("item {x} outside ground set")));
        }
        Ok(match self {
            Self::Modular { weights } => weights[x],
            _ => self.eval(&set.with(x)) - self.eval(set),
        })
    }

    /// True for the modular kind (including modular combinations folded at construction).
    pub fn is_modular(&self) -> bool {
        matches!(self, Self::Modular { .. })
    }

    /// Singleton costs `c({x})`.
    pub fn singleton_costs(&self) -> Vec<f64> {
        (0..self.ground_size())
            .map(|x| self.eval(&ItemSet::from_iter([x])))
            .collect()
    }
}

impl SetFunction for CostModel {
    fn ground_size(&self) -> usize {
        match self {
            Self::Modular { weights } => weights.len(),
            Self::Table { n, .. } => *n,
            Self::PolyOfG { inner, .. } | Self::ExpOfG { inner, .. } => inner.ground_size(),
            Self::Combined { first, .. } => first.ground_size(),
        }
    }

    fn eval(&self, set: &ItemSet) -> f64 {
        match self {
            Self::Modular { weights } => set.iter().map(|x| weights[x]).fold(0.0, |a, b| a + b),
            Self::Table { values, .. } => values[set.to_mask().expect("table set fits in mask") as usize],
            Self::PolyOfG { coefficients, inner } => {
                let g = inner.eval(set);
                let mut power = 1.0;
                coefficients
                    .iter()
                    .map(|a| {
                        power *= g;
                        a * power
                    })
                    .sum()
            }
            Self::ExpOfG { alpha, inner } => alpha * inner.eval(set).exp_m1(),
            Self::Combined { alpha, first, beta, second } => alpha * first.eval(set) + beta * second.eval(set),
        }
    }
}

/// `alpha · c1 + beta · c2`. Two modular costs fold into a modular cost.
pub fn combine_costs(c1: &CostModel, c2: &CostModel, alpha: f64, beta: f64) -> Result<CostModel> {
    if !(alpha >= 0.0 && beta >= 0.0) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::Config("combination weights must be finite and non-negative".into()));
    }
    if alpha + beta <= 0.0 {
        return Err(Error::DegenerateCombination);
    }
    if c1.ground_size() != c2.ground_size() {
        return Err(Error::Config("combined costs must share the item set".into()));
    }
    if let (CostModel::Modular { weights: w1 }, CostModel::Modular { weights: w2 }) = (c1, c2) {
        let weights = w1.iter().zip(w2).map(|(a, b)| alpha * a + beta * b).collect();
        return Ok(CostModel::Modular { weights });
    }
    Ok(CostModel::Combined { alpha, first: Box::new(c1.clone()), beta, second: Box::new(c2.clone()) })
}

/// The three-item table cost that is not submodular but satisfies the triangle inequality.
///
/// Items are indexed `x1 = 0`, `x2 = 1`, `x3 = 2`.
pub fn non_submodular_triangle_example() -> CostModel {
    // masks: ∅, {x1}, {x2}, {x1,x2}, {x3}, {x1,x3}, {x2,x3}, {x1,x2,x3}
    CostModel::Table { n: 3, values: vec![0.0, 1.0, 1.0, 2.0, 1.0, 1.5, 1.5, 2.5] }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[usize]) -> ItemSet {
        items.iter().copied().collect()
    }

    #[test]
    fn empty_set_costs_nothing() {
        let inner = InnerSetFunction::modular(vec![1.0, 2.0]).unwrap();
        let costs = [
            CostModel::modular(vec![1.0, 2.0]).unwrap(),
            non_submodular_triangle_example(),
            CostModel::poly_of_g(vec![1.0, 3.0], inner.clone()).unwrap(),
            CostModel::exp_of_g(2.0, inner).unwrap(),
        ];
        for c in &costs {
            assert_eq!(c.eval(&ItemSet::new()), 0.0);
        }
    }

    #[test]
    fn triangle_example_values() {
        let c = non_submodular_triangle_example();
        assert_eq!(c.eval(&set(&[0, 2])), 1.5);
        assert_eq!(c.increment(0, &set(&[2, 1])).unwrap(), 1.0);
        assert_eq!(c.increment(0, &set(&[2])).unwrap(), 0.5);
    }

    #[test]
    fn squared_modular_inner() {
        let inner = InnerSetFunction::modular(vec![1.0; 4]).unwrap();
        let c = CostModel::poly_of_g(vec![0.0, 1.0], inner).unwrap();
        assert_eq!(c.eval(&set(&[0, 1, 3])), 9.0);
        for k in 0..4usize {
            let s: ItemSet = (0..k).collect();
            if k < 3 {
                assert_eq!(c.increment(3, &s).unwrap(), (2 * k + 1) as f64);
            }
        }
    }

    #[test]
    fn modular_increment_ignores_context() {
        let c = CostModel::modular(vec![0.5, 3.0, 2.0]).unwrap();
        assert_eq!(c.increment(1, &set(&[])).unwrap(), 3.0);
        assert_eq!(c.increment(1, &set(&[0, 2])).unwrap(), 3.0);
        assert!(matches!(c.increment(1, &set(&[1])), Err(Error::Precondition(_))));
    }

    #[test]
    fn exp_cost_is_shifted() {
        let inner = InnerSetFunction::modular(vec![1.0, 1.0]).unwrap();
        let c = CostModel::exp_of_g(2.0, inner).unwrap();
        let e = std::f64::consts::E;
        assert!((c.eval(&set(&[0])) - 2.0 * (e - 1.0)).abs() < 1e-12);
        assert!((c.increment(1, &set(&[0])).unwrap() - 2.0 * (e * e - e)).abs() < 1e-12);
    }

    #[test]
    fn combinations() {
        let ns3 = non_submodular_triangle_example();
        let unit = CostModel::uniform(3, 1.0).unwrap();
        let same = combine_costs(&ns3, &unit, 1.0, 0.0).unwrap();
        for mask in 0..8 {
            let s = ItemSet::from_mask(mask);
            assert_eq!(same.eval(&s), ns3.eval(&s));
        }
        let both = combine_costs(&ns3, &unit, 1.0, 1.0).unwrap();
        assert_eq!(both.eval(&set(&[0, 2])), 3.5);

        let a = CostModel::modular(vec![1.0, 2.0, 3.0]).unwrap();
        let summed = combine_costs(&a, &unit, 1.0, 1.0).unwrap();
        assert_eq!(summed, CostModel::Modular { weights: vec![2.0, 3.0, 4.0] });

        assert_eq!(combine_costs(&a, &unit, 0.0, 0.0), Err(Error::DegenerateCombination));
        let short = CostModel::uniform(2, 1.0).unwrap();
        assert!(matches!(combine_costs(&a, &short, 1.0, 1.0), Err(Error::Config(_))));
    }

    #[test]
    fn parameter_validation() {
        assert!(CostModel::modular(vec![-1.0]).is_err());
        assert!(CostModel::table(2, vec![0.0, 1.0]).is_err());
        let inner = InnerSetFunction::modular(vec![1.0]).unwrap();
        assert!(CostModel::poly_of_g(vec![0.0, 0.0], inner.clone()).is_err());
        assert!(CostModel::exp_of_g(0.0, inner).is_err());
        assert!(InnerSetFunction::table(2, vec![0.0, 2.0, 1.0, 1.5]).is_err());
        assert!(InnerSetFunction::coverage(3, vec![vec![3]]).is_err());
    }
}
