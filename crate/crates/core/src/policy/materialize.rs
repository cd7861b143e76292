use super::greedy::GreedyRun;
use super::PolicyKind;
use crate::error::{Error, Result};
use crate::model::{Instance, PolicyNode, PolicyTree};

/// An online policy that can be forked at each observation.
trait Stepper: Clone {
    fn next_item(&mut self) -> Result<Option<usize>>;
    fn observe(&mut self, x: usize, y: usize) -> Result<()>;
}

impl Stepper for GreedyRun<'_> {
    fn next_item(&mut self) -> Result<Option<usize>> {
        GreedyRun::next_item(self)
    }

    fn observe(&mut self, x: usize, y: usize) -> Result<()> {
        GreedyRun::observe(self, x, y)
    }
}

/// Two greedy runs back to back; the second starts from no observations.
#[derive(Clone)]
struct CombinedRun<'a> {
    first: GreedyRun<'a>,
    second: GreedyRun<'a>,
    in_second: bool,
}

impl Stepper for CombinedRun<'_> {
    fn next_item(&mut self) -> Result<Option<usize>> {
        if !self.in_second {
            if let Some(x) = self.first.next_item()? {
                return Ok(Some(x));
            }
            self.in_second = true;
        }
        self.second.next_item()
    }

    fn observe(&mut self, x: usize, y: usize) -> Result<()> {
        if self.in_second {
            self.second.observe(x, y)
        } else {
            self.first.observe(x, y)
        }
    }
}

struct Unroller {
    n_states: usize,
    nodes: u128,
    cap: u128,
}

impl Unroller {
    /// Runs `policy` until it asks for an unknown state, then branches on every state.
    ///
    /// `known` holds states already observed on the current path; a policy
    /// asking for one of them (the combined policy re-selecting an item) reads
    /// it without adding a node.
    fn build<S: Stepper>(&mut self, mut policy: S, known: &mut [Option<usize>]) -> Result<Option<Box<PolicyNode>>> {
        loop {
            let Some(x) = policy.next_item()? else {
                return Ok(None);
            };
            if let Some(y) = known[x] {
                policy.observe(x, y)?;
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.cap {
                return Err(Error::TooLarge { what: "policy tree unrolling", size: self.nodes, cap: self.cap });
            }
            let mut children = Vec::with_capacity(self.n_states);
            for y in 0..self.n_states {
                let mut branch = policy.clone();
                branch.observe(x, y)?;
                known[x] = Some(y);
                children.push(self.build(branch, known)?);
                known[x] = None;
            }
            return Ok(Some(Box::new(PolicyNode { item: x, children })));
        }
    }
}

/// Unrolls an online policy into its policy tree by simulating every state branch.
///
/// For the combined policy `budget` is the total budget, split in half.
pub fn materialize_policy_tree(inst: &Instance, kind: PolicyKind, budget: f64) -> Result<PolicyTree> {
    if !(budget.is_finite() && budget > 0.0) {
        return Err(Error::Config(format!("budget must be positive, got {budget}")));
    }
    let mut unroller = Unroller { n_states: inst.n_states(), nodes: 0, cap: inst.settings().caps.realizations };
    let mut known = vec![None; inst.n_items()];
    let root = match kind {
        PolicyKind::Combined => {
            let half = budget / 2.0;
            let run = CombinedRun {
                first: GreedyRun::new(inst, PolicyKind::CostAverage, half),
                second: GreedyRun::new(inst, PolicyKind::CostInsensitive, half),
                in_second: false,
            };
            unroller.build(run, &mut known)?
        }
        greedy => unroller.build(GreedyRun::new(inst, greedy, budget), &mut known)?,
    };
    Ok(PolicyTree { root })
}

/// Picks the greedy policy with the larger exact worst-case value at the
/// instance's budget; the cost-insensitive policy wins ties.
pub fn best_of_two(inst: &Instance) -> Result<(PolicyKind, f64)> {
    let v1 = inst
        .worst_case_value(&materialize_policy_tree(inst, PolicyKind::CostAverage, inst.budget())?)?
        .worst_value;
    let v2 = inst
        .worst_case_value(&materialize_policy_tree(inst, PolicyKind::CostInsensitive, inst.budget())?)?
        .worst_value;
    if v1 > v2 + inst.settings().tolerance {
        Ok((PolicyKind::CostAverage, v1))
    } else {
        Ok((PolicyKind::CostInsensitive, v2))
    }
}
