use serde::{Deserialize, Serialize};

use super::{Dependency, Instance, PartialRealization, Realization};
use crate::cost::{CostModel, SetFunction};
use crate::error::{Error, Result};
use crate::itemset::ItemSet;

/// A deterministic policy: each node selects an item, each edge is one of its states.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PolicyTree {
    pub root: Option<Box<PolicyNode>>,
}

/// An internal node; `children[y]` is the subtree followed when the item is in state `y`
/// (`None` is a leaf).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyNode {
    pub item: usize,
    pub children: Vec<Option<Box<PolicyNode>>>,
}

/// Exact worst-case value of a policy with its witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyValueReport {
    pub worst_value: f64,
    pub worst_realization: Realization,
    pub max_path_cost: f64,
}

impl PolicyNode {
    /// A node whose every edge ends in a leaf.
    pub fn leaf(item: usize, n_states: usize) -> Self {
        Self { item, children: vec![None; n_states] }
    }
}

impl PolicyTree {
    /// The policy that selects nothing.
    pub fn empty() -> Self {
        Self { root: None }
    }

    /// A non-adaptive policy selecting `items` in order whatever the states.
    pub fn chain(items: &[usize], n_states: usize) -> Self {
        let root = items.iter().rev().fold(None, |below: Option<Box<PolicyNode>>, &item| {
            Some(Box::new(PolicyNode { item, children: vec![below; n_states] }))
        });
        Self { root }
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    /// Number of internal nodes.
    pub fn node_count(&self) -> usize {
        fn count(n: &Option<Box<PolicyNode>>) -> usize {
            n.as_ref().map_or(0, |n| 1 + n.children.iter().map(count).sum::<usize>())
        }
        count(&self.root)
    }

    /// Checks item ranges, one edge per state, and no repeated item along any path.
    pub fn validate_structure(&self, n_items: usize, n_states: usize) -> Result<()> {
        fn walk(n: &PolicyNode, on_path: &mut ItemSet, n_items: usize, n_states: usize) -> Result<()> {
            if n.item >= n_items {
                return Err(Error::Structural(format!("node item {} out of range", n.item)));
            }
            if n.children.len() != n_states {
                return Err(Error::Structural(format!(
                    "node for item {} has {} edges, expected {n_states}",
                    n.item,
                    n.children.len()
                )));
            }
            if !on_path.insert(n.item) {
                return Err(Error::Structural(format!("item {} repeats along a path", n.item)));
            }
            for child in n.children.iter().flatten() {
                walk(child, on_path, n_items, n_states)?;
            }
            on_path.remove(n.item);
            Ok(())
        }
        match &self.root {
            None => Ok(()),
            Some(r) => walk(r, &mut ItemSet::new(), n_items, n_states),
        }
    }

    /// Follows the edges labelled by `h`; the result's item set is `x^π_h`.
    pub fn trace(&self, h: &Realization) -> Result<PartialRealization> {
        let mut d = PartialRealization::empty(h.n_items());
        let mut node = self.root.as_deref();
        while let Some(n) = node {
            if n.item >= h.n_items() {
                return Err(Error::Structural(format!("node item {} out of range", n.item)));
            }
            let y = h.state(n.item);
            d.observe(n.item, y)
                .map_err(|_| Error::Structural(format!("item {} repeats along a path", n.item)))?;
            node = n
                .children
                .get(y)
                .ok_or_else(|| Error::Structural(format!("node for item {} has no edge for state {y}", n.item)))?
                .as_deref();
        }
        Ok(d)
    }

    /// The partial realization of every root-to-leaf path, in state order.
    pub fn leaf_paths(&self, n_items: usize) -> Result<Vec<PartialRealization>> {
        fn walk(n: Option<&PolicyNode>, d: &PartialRealization, out: &mut Vec<PartialRealization>) -> Result<()> {
            match n {
                None => {
                    out.push(d.clone());
                    Ok(())
                }
                Some(n) => {
                    for (y, child) in n.children.iter().enumerate() {
                        let next = d
                            .with(n.item, y)
                            .map_err(|_| Error::Structural(format!("item {} repeats along a path", n.item)))?;
                        walk(child.as_deref(), &next, out)?;
                    }
                    Ok(())
                }
            }
        }
        let mut out = Vec::new();
        walk(self.root.as_deref(), &PartialRealization::empty(n_items), &mut out)?;
        Ok(out)
    }

    /// `c(π)`: the largest cost of a root-to-leaf item set.
    pub fn policy_cost(&self, cost: &CostModel) -> Result<f64> {
        let paths = self.leaf_paths(cost.ground_size())?;
        Ok(paths.iter().map(|d| cost.eval(d.selected())).fold(0.0, f64::max))
    }

    /// Copy keeping only the first `depth` levels.
    pub fn truncated(&self, depth: usize) -> Self {
        fn cut(n: &Option<Box<PolicyNode>>, depth: usize) -> Option<Box<PolicyNode>> {
            if depth == 0 {
                return None;
            }
            n.as_ref().map(|n| {
                Box::new(PolicyNode { item: n.item, children: n.children.iter().map(|c| cut(c, depth - 1)).collect() })
            })
        }
        Self { root: cut(&self.root, depth) }
    }
}

impl Instance {
    /// Structural validity plus `c(path) <= budget` on every path.
    pub fn validate_policy(&self, tree: &PolicyTree, budget: f64) -> Result<()> {
        tree.validate_structure(self.n_items(), self.n_states())?;
        let cost = tree.policy_cost(self.cost())?;
        if cost > budget + self.settings().tolerance {
            return Err(Error::Structural(format!("policy cost {cost} exceeds budget {budget}")));
        }
        Ok(())
    }

    /// `f_worst(π)`, minimizing over leaf paths.
    ///
    /// Minimal dependency makes the utility of a path independent of the
    /// states of unselected items, so each leaf stands for every realization
    /// that reaches it. Falls back to full enumeration when the utility is
    /// known to violate minimal dependency.
    pub fn worst_case_value(&self, tree: &PolicyTree) -> Result<PolicyValueReport> {
        tree.validate_structure(self.n_items(), self.n_states())?;
        if self.dependency() == Dependency::Violated {
            return self.worst_case_value_exhaustive(tree);
        }
        let mut worst: Option<(f64, &PartialRealization)> = None;
        let paths = tree.leaf_paths(self.n_items())?;
        let mut max_cost = 0.0f64;
        for d in &paths {
            let v = self.value_observed(d)?;
            max_cost = max_cost.max(self.cost_of(d.selected()));
            if worst.is_none_or(|(w, _)| v < w) {
                worst = Some((v, d));
            }
        }
        let (worst_value, d) = worst.expect("a tree has at least one leaf");
        Ok(PolicyValueReport { worst_value, worst_realization: d.extend(0), max_path_cost: max_cost })
    }

    /// `f_worst(π)` by enumerating all `|Y|^|X|` realizations.
    pub fn worst_case_value_exhaustive(&self, tree: &PolicyTree) -> Result<PolicyValueReport> {
        tree.validate_structure(self.n_items(), self.n_states())?;
        let count = Realization::count(self.n_items(), self.n_states());
        let cap = self.settings().caps.realizations;
        if count > cap {
            return Err(Error::TooLarge { what: "realization enumeration", size: count, cap });
        }
        let mut best: Option<(f64, Realization)> = None;
        let mut max_cost = 0.0f64;
        for h in Realization::enumerate(self.n_items(), self.n_states()) {
            let d = tree.trace(&h)?;
            let v = self.value(d.selected(), &h);
            max_cost = max_cost.max(self.cost_of(d.selected()));
            if best.as_ref().is_none_or(|(w, _)| v < *w) {
                best = Some((v, h));
            }
        }
        let (worst_value, worst_realization) = best.expect("at least one realization");
        Ok(PolicyValueReport { worst_value, worst_realization, max_path_cost: max_cost })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{gen_counterexample_thm2, gen_counterexample_thm3};

    fn two_level(n_states: usize) -> PolicyTree {
        // root item 0; below state 1 select item 1, below state 0 stop.
        let mut root = PolicyNode::leaf(0, n_states);
        root.children[1] = Some(Box::new(PolicyNode::leaf(1, n_states)));
        PolicyTree { root: Some(Box::new(root)) }
    }

    #[test]
    fn empty_tree() {
        let inst = gen_counterexample_thm2(10.0).unwrap();
        let t = PolicyTree::empty();
        let h = Realization::constant(2, 0);
        assert!(t.trace(&h).unwrap().is_empty());
        assert_eq!(t.policy_cost(inst.cost()).unwrap(), 0.0);
        assert_eq!(inst.worst_case_value(&t).unwrap().worst_value, 0.0);
    }

    #[test]
    fn counterexample_trees() {
        let thm2 = gen_counterexample_thm2(10.0).unwrap();
        let h = Realization::constant(2, 0);
        let only_x2 = PolicyTree::chain(&[1], 1);
        assert_eq!(only_x2.trace(&h).unwrap().observations(), &[(1, 0)]);
        assert_eq!(only_x2.policy_cost(thm2.cost()).unwrap(), 11.0);
        let only_x1 = PolicyTree::chain(&[0], 1);
        assert_eq!(thm2.worst_case_value(&only_x1).unwrap().worst_value, 1.0);

        let thm3 = gen_counterexample_thm3(10).unwrap();
        let units: Vec<usize> = (1..=10).collect();
        assert_eq!(PolicyTree::chain(&units, 1).policy_cost(thm3.cost()).unwrap(), 10.0);
        assert_eq!(thm3.worst_case_value(&PolicyTree::chain(&[0], 1)).unwrap().worst_value, 2.0);
    }

    #[test]
    fn two_level_trace() {
        let t = two_level(2);
        let h = Realization::new(vec![1, 1], 2).unwrap();
        assert_eq!(t.trace(&h).unwrap().observations(), &[(0, 1), (1, 1)]);
        let h0 = Realization::new(vec![0, 1], 2).unwrap();
        assert_eq!(t.trace(&h0).unwrap().observations(), &[(0, 0)]);
        assert_eq!(t.leaf_paths(2).unwrap().len(), 3);
    }

    #[test]
    fn malformed_trees() {
        let bad = PolicyTree { root: Some(Box::new(PolicyNode { item: 0, children: vec![None] })) };
        let h = Realization::new(vec![1, 0], 2).unwrap();
        assert!(matches!(bad.trace(&h), Err(Error::Structural(_))));
        assert!(bad.validate_structure(2, 2).is_err());

        let mut root = PolicyNode::leaf(0, 1);
        root.children[0] = Some(Box::new(PolicyNode::leaf(0, 1)));
        let repeated = PolicyTree { root: Some(Box::new(root)) };
        assert!(repeated.validate_structure(2, 1).is_err());
        assert!(matches!(repeated.trace(&Realization::constant(2, 0)), Err(Error::Structural(_))));
    }

    #[test]
    fn over_budget_policy_rejected() {
        let thm2 = gen_counterexample_thm2(10.0).unwrap();
        let both = PolicyTree::chain(&[0, 1], 1);
        assert!(thm2.validate_policy(&both, thm2.budget()).is_err());
        assert!(thm2.validate_policy(&PolicyTree::chain(&[1], 1), thm2.budget()).is_ok());
    }

    #[test]
    fn truncation() {
        let t = PolicyTree::chain(&[2, 0, 1], 2);
        assert_eq!(t.truncated(1), PolicyTree::chain(&[2], 2));
        assert_eq!(t.truncated(0), PolicyTree::empty());
        assert_eq!(t.node_count(), 7);
    }
}
