use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::model::{numbered, Instance, PolicyTree};
use crate::utility::{ModularUtility, UtilityModel};

/// Two items, one state: `w(x1) = 1`, `w(x2) = p`, costs `1` and `p + 1`,
/// budget `p + 1`. The cost-average policy takes `x1` and can no longer
/// afford `x2`, reaching `1/p` of the optimum.
pub fn gen_counterexample_thm2(p: f64) -> Result<Instance> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::Config(format!("p must exceed 1, got {p}")));
    }
    Instance::new(
        numbered("x", 1..3),
        vec!["0".into()],
        UtilityModel::Modular(ModularUtility::new(vec![vec![1.0], vec![p]])?),
        CostModel::modular(vec![1.0, p + 1.0])?,
        p + 1.0,
    )
}

/// Items `x0..xn`, one state: `w(x0) = 2` at cost `n`, unit weight and unit
/// cost elsewhere, budget `n`. The cost-insensitive policy spends the whole
/// budget on `x0`, reaching `2/n` of the optimum.
pub fn gen_counterexample_thm3(n: usize) -> Result<Instance> {
    if n < 2 {
        return Err(Error::Config(format!("n must be at least 2, got {n}")));
    }
    let mut weights = vec![vec![1.0]; n + 1];
    weights[0][0] = 2.0;
    let mut costs = vec![1.0; n + 1];
    costs[0] = n as f64;
    Instance::new(
        numbered("x", 0..=n),
        vec!["0".into()],
        UtilityModel::Modular(ModularUtility::new(weights)?),
        CostModel::modular(costs)?,
        n as f64,
    )
}

/// The chain selecting unit items `x1..x_count` of a single-state counterexample
/// instance; optimal for the unit-cost construction at budget `count`.
pub fn unit_items_tree(count: usize) -> PolicyTree {
    let items: Vec<usize> = (1..=count).collect();
    PolicyTree::chain(&items, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::brute_force_optimal;

    #[test]
    fn parameter_checks() {
        assert!(gen_counterexample_thm2(1.0).is_err());
        assert!(gen_counterexample_thm2(f64::NAN).is_err());
        assert!(gen_counterexample_thm3(1).is_err());
        let inst = gen_counterexample_thm3(2).unwrap();
        assert_eq!(inst.items(), &["x0", "x1", "x2"]);
        assert_eq!(inst.budget(), 2.0);
    }

    #[test]
    fn unit_tree_is_optimal_at_scale() {
        let inst = gen_counterexample_thm3(6).unwrap();
        let tree = unit_items_tree(6);
        inst.validate_policy(&tree, 6.0).unwrap();
        let v = inst.worst_case_value(&tree).unwrap().worst_value;
        assert_eq!(v, brute_force_optimal(&inst, 6.0).unwrap().1);
    }
}
