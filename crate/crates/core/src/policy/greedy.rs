use serde::Serialize;

use super::{argmax_lowest, PolicyKind};
use crate::error::{Error, Result};
use crate::itemset::ItemSet;
use crate::model::{Instance, PartialRealization, Realization};

/// One iteration of the greedy loop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    pub item: usize,
    /// The score the item won with: a gain-per-cost ratio or a gain.
    pub score: f64,
    pub affordable: bool,
    pub selected: bool,
    pub observed_state: Option<usize>,
}

/// Full record of one greedy run against a realization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyRunTrace {
    pub policy: PolicyKind,
    pub budget: f64,
    pub decisions: Vec<Decision>,
    /// Selected items in selection order with their observed states.
    pub observations: Vec<(usize, usize)>,
    pub final_selected: ItemSet,
    pub final_cost: f64,
    /// `f(final_selected, h)`.
    pub value: f64,
}

/// Result of the combined half-budget policy on one realization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinedRunResult {
    pub s1: ItemSet,
    pub s2: ItemSet,
    pub union: ItemSet,
    pub value_on_realization: f64,
    pub first: PolicyRunTrace,
    pub second: PolicyRunTrace,
}

/// Incremental state of one greedy run, driven by an external source of states.
#[derive(Debug, Clone)]
pub(crate) struct GreedyRun<'a> {
    inst: &'a Instance,
    kind: PolicyKind,
    budget: f64,
    d: PartialRealization,
    unconsidered: Vec<bool>,
    decisions: Vec<Decision>,
    // scores for the current D, invalidated by each observation
    scores: Option<Vec<f64>>,
}

impl<'a> GreedyRun<'a> {
    pub(crate) fn new(inst: &'a Instance, kind: PolicyKind, budget: f64) -> Self {
        debug_assert!(kind != PolicyKind::Combined);
        Self {
            inst,
            kind,
            budget,
            d: PartialRealization::empty(inst.n_items()),
            unconsidered: vec![true; inst.n_items()],
            decisions: Vec::with_capacity(inst.n_items()),
            scores: None,
        }
    }

    fn score(&self, x: usize) -> Result<f64> {
        let gain = self.inst.marginal_gain_delta(x, &self.d)?;
        match self.kind {
            PolicyKind::CostAverage => {
                let dc = self.inst.cost().increment(x, self.d.selected())?;
                if dc <= self.inst.settings().tolerance {
                    return Err(Error::CostModelViolation { item: x, increment: dc });
                }
                Ok(gain / dc)
            }
            _ => Ok(gain),
        }
    }

    /// Considers items until one is selected; `None` once every item has been considered.
    pub(crate) fn next_item(&mut self) -> Result<Option<usize>> {
        if self.scores.is_none() {
            let scores = (0..self.inst.n_items())
                .map(|x| if self.unconsidered[x] { self.score(x) } else { Ok(f64::NEG_INFINITY) })
                .collect::<Result<Vec<_>>>()?;
            self.scores = Some(scores);
        }
        let tol = self.inst.settings().tolerance;
        loop {
            let scores = self.scores.as_ref().unwrap();
            let candidates = (0..scores.len()).filter(|&x| self.unconsidered[x]).map(|x| (x, scores[x]));
            let Some(x) = argmax_lowest(candidates, tol) else {
                return Ok(None);
            };
            let score = scores[x];
            self.unconsidered[x] = false;
            let affordable = self.inst.affordable(&self.d.selected().with(x), self.budget);
            self.decisions.push(Decision { item: x, score, affordable, selected: affordable, observed_state: None });
            if affordable {
                return Ok(Some(x));
            }
        }
    }

    /// Records the state of the item just returned by `next_item`.
    pub(crate) fn observe(&mut self, x: usize, y: usize) -> Result<()> {
        let last = self.decisions.last_mut().filter(|d| d.item == x && d.selected);
        let Some(decision) = last else {
            return Err(Error::Precondition(format!("item {x} was not just selected")));
        };
        decision.observed_state = Some(y);
        self.d.observe(x, y)?;
        self.scores = None;
        Ok(())
    }

    fn finish(self, h: &Realization) -> PolicyRunTrace {
        let final_selected = self.d.selected().clone();
        PolicyRunTrace {
            policy: self.kind,
            budget: self.budget,
            decisions: self.decisions,
            observations: self.d.observations().to_vec(),
            final_cost: self.inst.cost_of(&final_selected),
            value: self.inst.value(&final_selected, h),
            final_selected,
        }
    }
}

fn check_realization(inst: &Instance, h: &Realization) -> Result<()> {
    if h.n_items() != inst.n_items() || h.states().iter().any(|&y| y >= inst.n_states()) {
        return Err(Error::Structural("realization does not match the instance".into()));
    }
    Ok(())
}

fn check_budget(budget: f64) -> Result<()> {
    if !(budget.is_finite() && budget > 0.0) {
        return Err(Error::Config(format!("budget must be positive, got {budget}")));
    }
    Ok(())
}

/// Runs one greedy policy online against `h`.
pub fn run_greedy(inst: &Instance, kind: PolicyKind, h: &Realization, budget: f64) -> Result<PolicyRunTrace> {
    if kind == PolicyKind::Combined {
        return Err(Error::Precondition("use run_combined_half for the combined policy".into()));
    }
    check_realization(inst, h)?;
    check_budget(budget)?;
    let mut run = GreedyRun::new(inst, kind, budget);
    while let Some(x) = run.next_item()? {
        run.observe(x, h.state(x))?;
    }
    Ok(run.finish(h))
}

/// Cost-average greedy policy.
pub fn run_greedy_cost_average(inst: &Instance, h: &Realization, budget: f64) -> Result<PolicyRunTrace> {
    run_greedy(inst, PolicyKind::CostAverage, h, budget)
}

/// Cost-insensitive greedy policy.
pub fn run_greedy_cost_insensitive(inst: &Instance, h: &Realization, budget: f64) -> Result<PolicyRunTrace> {
    run_greedy(inst, PolicyKind::CostInsensitive, h, budget)
}

/// Cost-average greedy with half the budget, then cost-insensitive greedy
/// with the other half starting again from no observations.
///
/// The second run may pick items the first already selected; their state is
/// read from the same realization and their cost counts against the second
/// half again.
pub fn run_combined_half(inst: &Instance, h: &Realization) -> Result<CombinedRunResult> {
    let half = inst.budget() / 2.0;
    let first = run_greedy(inst, PolicyKind::CostAverage, h, half)?;
    let second = run_greedy(inst, PolicyKind::CostInsensitive, h, half)?;
    let union = first.final_selected.union(&second.final_selected);
    Ok(CombinedRunResult {
        s1: first.final_selected.clone(),
        s2: second.final_selected.clone(),
        value_on_realization: inst.value(&union, h),
        union,
        first,
        second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostModel;
    use crate::model::numbered;
    use crate::utility::{ModularUtility, UtilityModel};
    use crate::verify::{gen_counterexample_thm2, gen_counterexample_thm3};

    fn single() -> Realization {
        Realization::constant(11, 0)
    }

    #[test]
    fn thm2_instance_runs() {
        let inst = gen_counterexample_thm2(10.0).unwrap();
        let h = Realization::constant(2, 0);
        let t1 = run_greedy_cost_average(&inst, &h, 11.0).unwrap();
        assert_eq!(t1.final_selected, ItemSet::from_iter([0]));
        assert_eq!(t1.value, 1.0);
        assert_eq!(t1.decisions.len(), 2);
        assert!(!t1.decisions[1].affordable);

        let t2 = run_greedy_cost_insensitive(&inst, &h, 11.0).unwrap();
        assert_eq!(t2.final_selected, ItemSet::from_iter([1]));
        assert_eq!(t2.value, 10.0);
    }

    #[test]
    fn thm3_instance_runs() {
        let inst = gen_counterexample_thm3(10).unwrap();
        let t1 = run_greedy_cost_average(&inst, &single(), 10.0).unwrap();
        assert_eq!(t1.final_selected, (1..=10).collect());
        assert_eq!(t1.value, 10.0);
        let t2 = run_greedy_cost_insensitive(&inst, &single(), 10.0).unwrap();
        assert_eq!(t2.final_selected, ItemSet::from_iter([0]));
        assert_eq!(t2.value, 2.0);
        assert_eq!(t2.decisions.len(), 11);
    }

    #[test]
    fn thm3_combined() {
        let inst = gen_counterexample_thm3(10).unwrap();
        let r = run_combined_half(&inst, &single()).unwrap();
        assert_eq!(r.s1, (1..=5).collect());
        assert_eq!(r.s2, (1..=5).collect());
        assert_eq!(r.union, r.s1.union(&r.s2));
        assert_eq!(r.value_on_realization, 5.0);
        assert!(r.first.final_cost <= 5.0 && r.second.final_cost <= 5.0);
    }

    #[test]
    fn nothing_affordable() {
        let inst = gen_counterexample_thm3(4).unwrap();
        let h = Realization::constant(5, 0);
        let t = run_greedy_cost_insensitive(&inst, &h, 0.5).unwrap();
        assert!(t.final_selected.is_empty());
        assert_eq!(t.value, 0.0);
        let inst = inst.with_budget(1.0).unwrap();
        let r = run_combined_half(&inst, &h).unwrap();
        assert!(r.union.is_empty());
        assert_eq!(r.value_on_realization, 0.0);
    }

    #[test]
    fn zero_increment_is_reported() {
        let u = ModularUtility::new(vec![vec![1.0], vec![1.0]]).unwrap();
        let c = CostModel::modular(vec![1.0, 0.0]).unwrap();
        let inst = Instance::new(numbered("x", 0..2), vec!["0".into()], UtilityModel::Modular(u), c, 5.0).unwrap();
        let h = Realization::constant(2, 0);
        assert!(matches!(
            run_greedy_cost_average(&inst, &h, 5.0),
            Err(Error::CostModelViolation { item: 1, .. })
        ));
        // the cost-insensitive policy never divides
        assert_eq!(run_greedy_cost_insensitive(&inst, &h, 5.0).unwrap().final_selected.len(), 2);
    }

    #[test]
    fn zero_gain_items_still_selected() {
        let u = ModularUtility::new(vec![vec![0.0], vec![3.0]]).unwrap();
        let c = CostModel::modular(vec![1.0, 1.0]).unwrap();
        let inst = Instance::new(numbered("x", 0..2), vec!["0".into()], UtilityModel::Modular(u), c, 5.0).unwrap();
        let t = run_greedy_cost_insensitive(&inst, &Realization::constant(2, 0), 5.0).unwrap();
        assert_eq!(t.observations, vec![(1, 0), (0, 0)]);
    }
}
