use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itemset::ItemSet;

/// A total assignment of a state index to every item.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Realization(Vec<usize>);

impl Realization {
    pub fn new(states: Vec<usize>, n_states: usize) -> Result<Self> {
        if let Some(&s) = states.iter().find(|&&s| s >= n_states) {
            return Err(Error::Structural(format!("state index {s} out of range")));
        }
        Ok(Self(states))
    }

    /// The realization placing every item in `state`.
    pub fn constant(n_items: usize, state: usize) -> Self {
        Self(vec![state; n_items])
    }

    pub fn state(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn states(&self) -> &[usize] {
        &self.0
    }

    pub fn n_items(&self) -> usize {
        self.0.len()
    }

    /// `true` if both realizations put every item of `set` in the same state.
    pub fn agrees_on(&self, other: &Realization, set: &ItemSet) -> bool {
        set.iter().all(|x| self.0[x] == other.0[x])
    }

    /// Number of realizations `|Y|^|X|`, saturating.
    pub fn count(n_items: usize, n_states: usize) -> u128 {
        (0..n_items).fold(1u128, |acc, _| acc.saturating_mul(n_states as u128))
    }

    /// Every realization, item 0 varying slowest.
    pub fn enumerate(n_items: usize, n_states: usize) -> impl Iterator<Item = Realization> {
        let mut next = (n_states > 0 || n_items == 0).then(|| vec![0usize; n_items]);
        std::iter::from_fn(move || {
            let cur = next.take()?;
            let mut succ = cur.clone();
            let mut i = n_items;
            next = loop {
                if i == 0 {
                    break None;
                }
                i -= 1;
                succ[i] += 1;
                if succ[i] < n_states {
                    break Some(succ);
                }
                succ[i] = 0;
            };
            Some(Realization(cur))
        })
    }
}

/// Ordered observations `(item, state)` made so far, with their item set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialRealization {
    observations: Vec<(usize, usize)>,
    states: Vec<Option<usize>>,
    selected: ItemSet,
}

impl PartialRealization {
    /// No observations over `n_items` items.
    pub fn empty(n_items: usize) -> Self {
        Self { observations: Vec::new(), states: vec![None; n_items], selected: ItemSet::new() }
    }

    pub fn from_observations(n_items: usize, obs: &[(usize, usize)]) -> Result<Self> {
        let mut d = Self::empty(n_items);
        for &(x, y) in obs {
            d.observe(x, y)?;
        }
        Ok(d)
    }

    /// Records the state of a not-yet-observed item.
    pub fn observe(&mut self, x: usize, y: usize) -> Result<()> {
        match self.states.get(x) {
            None => Err(Error::Structural(format!("item {x} out of range"))),
            Some(Some(_)) => Err(Error::Precondition(format!("item {x} observed twice"))),
            Some(None) => {
                self.states[x] = Some(y);
                self.observations.push((x, y));
                self.selected.insert(x);
                Ok(())
            }
        }
    }

    /// A copy with one more observation.
    pub fn with(&self, x: usize, y: usize) -> Result<Self> {
        let mut d = self.clone();
        d.observe(x, y)?;
        Ok(d)
    }

    pub fn observations(&self) -> &[(usize, usize)] {
        &self.observations
    }

    /// The observed item set `X_D`.
    pub fn selected(&self) -> &ItemSet {
        &self.selected
    }

    pub fn state_of(&self, x: usize) -> Option<usize> {
        self.states.get(x).copied().flatten()
    }

    /// Per-item states, `None` for unobserved items; independent of observation order.
    pub fn assignment(&self) -> &[Option<usize>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn n_items(&self) -> usize {
        self.states.len()
    }

    /// A total realization agreeing with the observations, `fill` elsewhere.
    pub fn extend(&self, fill: usize) -> Realization {
        Realization(self.states.iter().map(|s| s.unwrap_or(fill)).collect())
    }

    pub fn consistent_with(&self, h: &Realization) -> bool {
        self.observations.iter().all(|&(x, y)| h.state(x) == y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_counts_and_order() {
        let all: Vec<_> = Realization::enumerate(2, 3).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0].states(), &[0, 0]);
        assert_eq!(all[1].states(), &[0, 1]);
        assert_eq!(all[8].states(), &[2, 2]);
        assert_eq!(Realization::enumerate(0, 2).count(), 1);
        assert_eq!(Realization::count(3, 2), 8);
    }

    #[test]
    fn observe_twice_fails() {
        let mut d = PartialRealization::empty(3);
        d.observe(1, 0).unwrap();
        assert!(matches!(d.observe(1, 1), Err(Error::Precondition(_))));
        assert!(matches!(d.observe(7, 1), Err(Error::Structural(_))));
        assert_eq!(d.selected().iter().collect::<Vec<_>>(), vec![1]);
        assert_eq!(d.extend(2).states(), &[2, 0, 2]);
    }
}
