//! JSON instance format.
//!
//! ```json
//! {
//!   "items": ["x1", "x2"],
//!   "states": ["0"],
//!   "budget": 11,
//!   "utility": {"kind": "modular", "params": {"w": {"x1,0": 1, "x2,0": 10}}},
//!   "cost": {"kind": "modular", "params": {"weights": {"x1": 1, "x2": 11}}}
//! }
//! ```
//!
//! Utility kinds: `modular` (`w`: `"item,state"` → weight, missing pairs are 0),
//! `coverage` (`universe`, `regions`: `"item,state"` → cell list, missing pairs
//! cover nothing) and `vsr` (`prior`: `"uniform"` over every labeling, or a map
//! from labelings written as comma-separated states in item order to
//! unnormalized weights).
//!
//! Cost kinds: `modular` (`weights`: item → weight, every item required),
//! `table` (`values`: subset key → cost, where a subset key joins item ids with
//! `|` and `""` is the empty set; every non-empty subset required),
//! `poly_of_g` (`coefficients`, `inner`), `exp_of_g` (`alpha`, `inner`) and
//! `combined` (`alpha`, `first`, `beta`, `second`). Inner set functions use the
//! same `{kind, params}` shape with kinds `modular` (`weights`), `coverage`
//! (`universe`, `cells`: item → cell list) and `table` (`values`).

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::cost::{CostModel, InnerSetFunction};
use crate::error::{Error, Result};
use crate::itemset::ItemSet;
use crate::model::{Instance, Realization, Settings};
use crate::utility::{CoverageUtility, ModularUtility, UtilityModel, VersionSpaceUtility};

/// Serialized form of an [`Instance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub items: Vec<String>,
    pub states: Vec<String>,
    pub budget: f64,
    pub utility: UtilitySpec,
    pub cost: CostSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum UtilitySpec {
    Modular { w: BTreeMap<String, f64> },
    Coverage { universe: usize, regions: BTreeMap<String, Vec<usize>> },
    Vsr { prior: VsrPrior },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniformPrior {
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VsrPrior {
    Uniform(UniformPrior),
    Weights(BTreeMap<String, f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostSpec {
    Modular { weights: BTreeMap<String, f64> },
    Table { values: BTreeMap<String, f64> },
    PolyOfG { coefficients: Vec<f64>, inner: InnerSpec },
    ExpOfG { alpha: f64, inner: InnerSpec },
    Combined { alpha: f64, first: Box<CostSpec>, beta: f64, second: Box<CostSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum InnerSpec {
    Modular { weights: BTreeMap<String, f64> },
    Coverage { universe: usize, cells: BTreeMap<String, Vec<usize>> },
    Table { values: BTreeMap<String, f64> },
}

struct Names<'a> {
    items: &'a [String],
    states: &'a [String],
}

impl Names<'_> {
    fn item(&self, field: &str, id: &str) -> Result<usize> {
        self.items
            .iter()
            .position(|s| s == id)
            .ok_or_else(|| Error::Config(format!("{field}: unknown item '{id}'")))
    }

    fn state(&self, field: &str, id: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == id)
            .ok_or_else(|| Error::Config(format!("{field}: unknown state '{id}'")))
    }

    fn pair(&self, field: &str, key: &str) -> Result<(usize, usize)> {
        let (x, y) = key
            .split_once(',')
            .ok_or_else(|| Error::Config(format!("{field}: key '{key}' is not of the form \"item,state\"")))?;
        Ok((self.item(field, x)?, self.state(field, y)?))
    }

    fn subset(&self, field: &str, key: &str) -> Result<ItemSet> {
        let mut set = ItemSet::new();
        if key.is_empty() {
            return Ok(set);
        }
        for id in key.split('|') {
            if !set.insert(self.item(field, id)?) {
                return Err(Error::Config(format!("{field}: item '{id}' repeated in key '{key}'")));
            }
        }
        Ok(set)
    }

    fn subset_key(&self, set: &ItemSet) -> String {
        let mut ids: Vec<&str> = set.iter().map(|x| self.items[x].as_str()).collect();
        ids.sort_unstable();
        ids.join("|")
    }

    fn labeling(&self, field: &str, key: &str) -> Result<Vec<usize>> {
        let labels: Vec<&str> = key.split(',').collect();
        if labels.len() != self.items.len() {
            return Err(Error::Config(format!(
                "{field}: labeling '{key}' has {} states, expected {}",
                labels.len(),
                self.items.len()
            )));
        }
        labels.into_iter().map(|y| self.state(field, y)).collect()
    }

    fn per_item(&self, field: &str, map: &BTreeMap<String, f64>) -> Result<Vec<f64>> {
        let mut out = vec![None; self.items.len()];
        for (id, &w) in map {
            out[self.item(field, id)?] = Some(w);
        }
        out.into_iter()
            .enumerate()
            .map(|(x, w)| w.ok_or_else(|| Error::Config(format!("{field}: missing item '{}'", self.items[x]))))
            .collect()
    }

    fn table(&self, field: &str, map: &BTreeMap<String, f64>) -> Result<Vec<f64>> {
        let n = self.items.len();
        if n > 20 {
            return Err(Error::Config(format!("{field}: tables support at most 20 items")));
        }
        let mut values = vec![None; 1 << n];
        values[0] = Some(0.0);
        for (key, &v) in map {
            let mask = self.subset(field, key)?.to_mask().expect("at most 20 items") as usize;
            values[mask] = Some(v);
        }
        values
            .into_iter()
            .enumerate()
            .map(|(mask, v)| {
                v.ok_or_else(|| {
                    Error::Config(format!(
                        "{field}: missing subset '{}'",
                        self.subset_key(&ItemSet::from_mask(mask as u64))
                    ))
                })
            })
            .collect()
    }

    fn table_map(&self, values: &[f64]) -> BTreeMap<String, f64> {
        values
            .iter()
            .enumerate()
            .skip(1)
            .map(|(mask, &v)| (self.subset_key(&ItemSet::from_mask(mask as u64)), v))
            .collect()
    }

    fn item_map(&self, values: &[f64]) -> BTreeMap<String, f64> {
        self.items.iter().cloned().zip(values.iter().copied()).collect()
    }

    fn inner(&self, field: &str, spec: &InnerSpec) -> Result<InnerSetFunction> {
        match spec {
            InnerSpec::Modular { weights } => InnerSetFunction::modular(self.per_item(field, weights)?),
            InnerSpec::Coverage { universe, cells } => {
                let mut out = vec![Vec::new(); self.items.len()];
                for (id, c) in cells {
                    out[self.item(field, id)?] = c.clone();
                }
                InnerSetFunction::coverage(*universe, out)
            }
            InnerSpec::Table { values } => InnerSetFunction::table(self.items.len(), self.table(field, values)?),
        }
    }

    fn inner_spec(&self, g: &InnerSetFunction) -> InnerSpec {
        match g {
            InnerSetFunction::ModularWeights { weights } => InnerSpec::Modular { weights: self.item_map(weights) },
            InnerSetFunction::CoverageCount { universe, cells } => InnerSpec::Coverage {
                universe: *universe,
                cells: self.items.iter().cloned().zip(cells.iter().cloned()).collect(),
            },
            InnerSetFunction::Table { values, .. } => InnerSpec::Table { values: self.table_map(values) },
        }
    }

    fn cost(&self, field: &str, spec: &CostSpec) -> Result<CostModel> {
        let inner_field = format!("{field}.params.inner");
        match spec {
            CostSpec::Modular { weights } => CostModel::modular(self.per_item(field, weights)?),
            CostSpec::Table { values } => CostModel::table(self.items.len(), self.table(field, values)?),
            CostSpec::PolyOfG { coefficients, inner } => {
                CostModel::poly_of_g(coefficients.clone(), self.inner(&inner_field, inner)?)
            }
            CostSpec::ExpOfG { alpha, inner } => CostModel::exp_of_g(*alpha, self.inner(&inner_field, inner)?),
            CostSpec::Combined { alpha, first, beta, second } => crate::cost::combine_costs(
                &self.cost(&format!("{field}.params.first"), first)?,
                &self.cost(&format!("{field}.params.second"), second)?,
                *alpha,
                *beta,
            ),
        }
        .map_err(|e| match e {
            Error::Config(msg) if !msg.starts_with(field) => Error::Config(format!("{field}: {msg}")),
            other => other,
        })
    }

    fn cost_spec(&self, c: &CostModel) -> CostSpec {
        match c {
            CostModel::Modular { weights } => CostSpec::Modular { weights: self.item_map(weights) },
            CostModel::Table { values, .. } => CostSpec::Table { values: self.table_map(values) },
            CostModel::PolyOfG { coefficients, inner } => {
                CostSpec::PolyOfG { coefficients: coefficients.clone(), inner: self.inner_spec(inner) }
            }
            CostModel::ExpOfG { alpha, inner } => CostSpec::ExpOfG { alpha: *alpha, inner: self.inner_spec(inner) },
            CostModel::Combined { alpha, first, beta, second } => CostSpec::Combined {
                alpha: *alpha,
                first: Box::new(self.cost_spec(first)),
                beta: *beta,
                second: Box::new(self.cost_spec(second)),
            },
        }
    }

    fn utility(&self, spec: &UtilitySpec) -> Result<UtilityModel> {
        let (n, m) = (self.items.len(), self.states.len());
        let field = "utility";
        let model = match spec {
            UtilitySpec::Modular { w } => {
                let mut weights = vec![vec![0.0; m]; n];
                for (key, &v) in w {
                    let (x, y) = self.pair(field, key)?;
                    weights[x][y] = v;
                }
                UtilityModel::Modular(ModularUtility::new(weights)?)
            }
            UtilitySpec::Coverage { universe, regions } => {
                let mut cells = vec![vec![Vec::new(); m]; n];
                for (key, c) in regions {
                    let (x, y) = self.pair(field, key)?;
                    cells[x][y] = c.clone();
                }
                UtilityModel::Coverage(CoverageUtility::new(*universe, cells)?)
            }
            UtilitySpec::Vsr { prior: VsrPrior::Uniform(_) } => {
                UtilityModel::VersionSpace(VersionSpaceUtility::uniform_full(n, m)?)
            }
            UtilitySpec::Vsr { prior: VsrPrior::Weights(map) } => {
                let mut hyps = Vec::with_capacity(map.len());
                let mut weights = Vec::with_capacity(map.len());
                let mut seen = HashSet::new();
                for (key, &w) in map {
                    let h = self.labeling(field, key)?;
                    if !seen.insert(h.clone()) {
                        return Err(Error::Config(format!("{field}: labeling '{key}' listed twice")));
                    }
                    hyps.push(h);
                    weights.push(w);
                }
                let total: f64 = weights.iter().sum();
                if !(total.is_finite() && total > 0.0) || weights.iter().any(|w| *w < 0.0) {
                    return Err(Error::Config(format!("{field}: prior weights must be non-negative with positive sum")));
                }
                let prior = weights.iter().map(|w| w / total).collect();
                UtilityModel::VersionSpace(VersionSpaceUtility::new(hyps, prior, m)?)
            }
        };
        Ok(model)
    }

    fn utility_spec(&self, u: &UtilityModel) -> Result<UtilitySpec> {
        let pair_key = |x: usize, y: usize| format!("{},{}", self.items[x], self.states[y]);
        Ok(match u {
            UtilityModel::Modular(u) => UtilitySpec::Modular {
                w: u.weights()
                    .iter()
                    .enumerate()
                    .flat_map(|(x, row)| row.iter().enumerate().map(move |(y, &v)| (x, y, v)))
                    .filter(|&(_, _, v)| v != 0.0)
                    .map(|(x, y, v)| (pair_key(x, y), v))
                    .collect(),
            },
            UtilityModel::Coverage(u) => {
                let mut regions = BTreeMap::new();
                for x in 0..u.n_items() {
                    for y in 0..u.n_states() {
                        if !u.region(x, y).is_empty() {
                            regions.insert(pair_key(x, y), u.region(x, y).to_vec());
                        }
                    }
                }
                UtilitySpec::Coverage { universe: u.universe(), regions }
            }
            UtilityModel::VersionSpace(u) => {
                let labeling = |h: &[usize]| h.iter().map(|&y| self.states[y].as_str()).collect::<Vec<_>>().join(",");
                UtilitySpec::Vsr {
                    prior: VsrPrior::Weights(u.hypotheses().iter().zip(u.prior()).map(|(h, &p)| (labeling(h), p)).collect()),
                }
            }
            UtilityModel::Custom(_) => {
                return Err(Error::Config("custom utilities have no serialized form".into()));
            }
        })
    }
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid instance: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files serialize")
    }

    pub fn build(&self, settings: Settings) -> Result<Instance> {
        if self.items.is_empty() || self.states.is_empty() {
            return Err(Error::Config("items and states must be non-empty".into()));
        }
        let names = Names { items: &self.items, states: &self.states };
        let utility = names.utility(&self.utility)?;
        let cost = names.cost("cost", &self.cost)?;
        Instance::with_settings(self.items.clone(), self.states.clone(), utility, cost, self.budget, settings)
    }
}

impl Instance {
    /// Parses and validates an instance from JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        InstanceFile::from_json(text)?.build(Settings::default())
    }

    pub fn to_file(&self) -> Result<InstanceFile> {
        let names = Names { items: self.items(), states: self.states() };
        Ok(InstanceFile {
            items: self.items().to_vec(),
            states: self.states().to_vec(),
            budget: self.budget(),
            utility: names.utility_spec(self.utility())?,
            cost: names.cost_spec(self.cost()),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(self.to_file()?.to_json())
    }

    /// A realization given as `item → state` ids covering every item.
    pub fn realization_from_map(&self, map: &BTreeMap<String, String>) -> Result<Realization> {
        if map.len() != self.n_items() {
            return Err(Error::Config(format!("realization must assign all {} items", self.n_items())));
        }
        self.realization_from_pairs(map.iter().map(|(x, y)| (x.as_str(), y.as_str())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{non_submodular_triangle_example, SetFunction};
    use crate::verify::{gen_counterexample_thm2, gen_counterexample_thm3};

    const THM2: &str = r#"{
        "items": ["x1", "x2"], "states": ["0"], "budget": 11,
        "utility": {"kind": "modular", "params": {"w": {"x1,0": 1, "x2,0": 10}}},
        "cost": {"kind": "modular", "params": {"weights": {"x1": 1, "x2": 11}}}
    }"#;

    #[test]
    fn parses_handwritten_instance() {
        let inst = Instance::from_json(THM2).unwrap();
        let gen = gen_counterexample_thm2(10.0).unwrap();
        assert_eq!(inst.cost(), gen.cost());
        assert_eq!(inst.budget(), 11.0);
        assert_eq!(inst.value(&ItemSet::from_iter([1]), &Realization::constant(2, 0)), 10.0);
    }

    #[test]
    fn round_trips() {
        for inst in [gen_counterexample_thm2(10.0).unwrap(), gen_counterexample_thm3(4).unwrap()] {
            let back = Instance::from_json(&inst.to_json().unwrap()).unwrap();
            assert_eq!(back.cost(), inst.cost());
            assert_eq!(back.items(), inst.items());
            assert_eq!(back.to_json().unwrap(), inst.to_json().unwrap());
        }
    }

    #[test]
    fn table_keys_are_sorted_ids() {
        let names = ["x1", "x2", "x3"].map(String::from);
        let n = Names { items: &names, states: &["0".to_string()] };
        let CostSpec::Table { values } = n.cost_spec(&non_submodular_triangle_example()) else { panic!() };
        assert_eq!(values["x1|x3"], 1.5);
        assert_eq!(values.len(), 7);
        let back = n.cost("cost", &CostSpec::Table { values }).unwrap();
        assert_eq!(back.eval(&ItemSet::full(3)), 2.5);
    }

    #[test]
    fn vsr_prior_forms() {
        let text = |prior: &str| {
            format!(
                r#"{{"items": ["a", "b"], "states": ["0", "1"], "budget": 2,
                "utility": {{"kind": "vsr", "params": {{"prior": {prior}}}}},
                "cost": {{"kind": "modular", "params": {{"weights": {{"a": 1, "b": 1}}}}}}}}"#
            )
        };
        let u = Instance::from_json(&text("\"uniform\"")).unwrap();
        let UtilityModel::VersionSpace(v) = u.utility() else { panic!() };
        assert_eq!(v.hypotheses().len(), 4);
        let w = Instance::from_json(&text(r#"{"0,0": 1, "0,1": 3}"#)).unwrap();
        let UtilityModel::VersionSpace(v) = w.utility() else { panic!() };
        assert_eq!(v.prior(), &[0.25, 0.75]);
        assert!(Instance::from_json(&text(r#"{"0": 1}"#)).is_err());
    }

    #[test]
    fn diagnostics_name_the_field() {
        let err = Instance::from_json(&THM2.replace("\"x2\": 11", "\"x9\": 11")).unwrap_err().to_string();
        assert!(err.contains("cost") && err.contains("x9"), "{err}");
        let err = Instance::from_json("{\"items\": [").unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
        let err = Instance::from_json(&THM2.replace("\"budget\"", "\"budgett\"")).unwrap_err().to_string();
        assert!(err.contains("budgett"), "{err}");
    }
}
