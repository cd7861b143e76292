use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{Instance, PartialRealization, PolicyNode, PolicyTree};

type Memo = HashMap<Vec<Option<usize>>, (f64, Option<usize>)>;

struct Search<'a> {
    inst: &'a Instance,
    budget: f64,
    memo: Memo,
}

impl Search<'_> {
    /// `V(D) = max(f(X_D, D), max_x min_y V(D ∪ {(x, y)}))` over affordable `x`.
    ///
    /// Keyed on the state assignment only: minimal dependency makes `V`
    /// independent of observation order.
    fn value(&mut self, d: &PartialRealization) -> Result<f64> {
        if let Some(&(v, _)) = self.memo.get(d.assignment()) {
            return Ok(v);
        }
        let tol = self.inst.settings().tolerance;
        let mut best = self.inst.value_observed(d)?;
        let mut choice = None;
        for x in 0..self.inst.n_items() {
            if d.selected().contains(x) || !self.inst.affordable(&d.selected().with(x), self.budget) {
                continue;
            }
            let mut worst = f64::INFINITY;
            for y in 0..self.inst.n_states() {
                worst = worst.min(self.value(&d.with(x, y)?)?);
                if worst <= best + tol {
                    break;
                }
            }
            if worst > best + tol {
                best = worst;
                choice = Some(x);
            }
        }
        self.memo.insert(d.assignment().to_vec(), (best, choice));
        Ok(best)
    }

    fn tree(&self, d: &PartialRealization) -> Result<Option<Box<PolicyNode>>> {
        let Some(&(_, Some(x))) = self.memo.get(d.assignment()) else {
            return Ok(None);
        };
        let children = (0..self.inst.n_states())
            .map(|y| self.tree(&d.with(x, y)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(Box::new(PolicyNode { item: x, children })))
    }
}

/// Exact optimal worst-case policy under `budget`, with its value.
///
/// Exhaustive over partial realizations; refused when `(|Y|+1)^|X|` exceeds
/// the brute-force cap. Stopping is preferred over selecting on ties.
pub fn brute_force_optimal(inst: &Instance, budget: f64) -> Result<(PolicyTree, f64)> {
    let states = (0..inst.n_items()).fold(1u128, |acc, _| acc.saturating_mul(inst.n_states() as u128 + 1));
    let cap = inst.settings().caps.brute_force_states;
    if states > cap {
        return Err(Error::TooLarge { what: "optimal policy search", size: states, cap });
    }
    let mut search = Search { inst, budget, memo: HashMap::new() };
    let root = PartialRealization::empty(inst.n_items());
    let value = search.value(&root)?;
    let tree = PolicyTree { root: search.tree(&root)? };
    Ok((tree, value))
}
