//! Naive reference oracles and random set functions shared by the integration tests.
//!
//! The oracles work on explicit item lists with plain nested loops over all
//! subset pairs and never touch the bitmask tables the production checkers use.

#![allow(dead_code)]

use csgreedy::cost::{CostModel, InnerSetFunction, SetFunction};
use csgreedy::ItemSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-9;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every subset of `0..n` as a sorted item list.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for x in 0..n {
        let with: Vec<Vec<usize>> = out
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.push(x);
                s
            })
            .collect();
        out.extend(with);
    }
    out
}

pub fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

pub fn plus(a: &[usize], x: usize) -> Vec<usize> {
    let mut s = a.to_vec();
    s.push(x);
    s.sort_unstable();
    s
}

pub fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut s: Vec<usize> = a.iter().chain(b).copied().collect();
    s.sort_unstable();
    s.dedup();
    s
}

pub fn eval(f: &dyn SetFunction, s: &[usize]) -> f64 {
    f.eval(&s.iter().copied().collect::<ItemSet>())
}

pub fn ge(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - TOL * 1f64.max(lhs.abs()).max(rhs.abs())
}

/// `g(A) <= g(B)` for all `A ⊆ B`.
pub fn naive_monotone(g: &dyn SetFunction) -> bool {
    let all = subsets(g.ground_size());
    all.iter().all(|a| all.iter().filter(|b| is_subset(a, b)).all(|b| ge(eval(g, b), eval(g, a))))
}

/// Diminishing returns over all `A ⊆ B`, `x ∉ B`.
pub fn naive_submodular(g: &dyn SetFunction) -> bool {
    let n = g.ground_size();
    let all = subsets(n);
    for a in &all {
        for b in all.iter().filter(|b| is_subset(a, b)) {
            for x in (0..n).filter(|x| !b.contains(x)) {
                let da = eval(g, &plus(a, x)) - eval(g, a);
                let db = eval(g, &plus(b, x)) - eval(g, b);
                if !ge(da, db) {
                    return false;
                }
            }
        }
    }
    true
}

/// Gain per unit of cost increment never grows, over all `A ⊆ B`, `x ∉ B`.
/// Only meaningful for strictly monotone `c`.
pub fn naive_cost_sensitive(g: &dyn SetFunction, c: &dyn SetFunction) -> bool {
    let n = g.ground_size();
    let all = subsets(n);
    for a in &all {
        for b in all.iter().filter(|b| is_subset(a, b)) {
            for x in (0..n).filter(|x| !b.contains(x)) {
                let ra = (eval(g, &plus(a, x)) - eval(g, a)) / (eval(c, &plus(a, x)) - eval(c, a));
                let rb = (eval(g, &plus(b, x)) - eval(g, b)) / (eval(c, &plus(b, x)) - eval(c, b));
                if !ge(ra, rb) {
                    return false;
                }
            }
        }
    }
    true
}

/// `c(∅) = 0`, `c(A) < c(B)` for every proper subset `A ⊊ B`, and `c(A ∪ B) <= c(A) + c(B)`.
pub fn naive_cost_axioms(c: &dyn SetFunction) -> bool {
    let all = subsets(c.ground_size());
    if eval(c, &[]).abs() > TOL {
        return false;
    }
    for a in &all {
        for b in &all {
            if is_subset(a, b) && a.len() < b.len() && eval(c, b) - eval(c, a) <= TOL {
                return false;
            }
            if !ge(eval(c, a) + eval(c, b), eval(c, &union(a, b))) {
                return false;
            }
        }
    }
    true
}

pub fn grid(rng: &mut ChaCha8Rng, lo: u32, hi: u32, step: f64) -> f64 {
    rng.random_range(lo..=hi) as f64 * step
}

/// Inner function families used for the construction properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerFamily {
    Modular,
    Coverage,
    /// Monotone but usually not submodular.
    MonotoneTable,
}

pub const INNER_FAMILIES: [InnerFamily; 3] = [InnerFamily::Modular, InnerFamily::Coverage, InnerFamily::MonotoneTable];

pub fn random_inner(rng: &mut ChaCha8Rng, family: InnerFamily, n: usize) -> InnerSetFunction {
    match family {
        InnerFamily::Modular => InnerSetFunction::modular((0..n).map(|_| grid(rng, 0, 6, 0.5)).collect()).unwrap(),
        InnerFamily::Coverage => {
            let cells = (0..n).map(|_| (0..6).filter(|_| rng.random_bool(0.4)).collect()).collect();
            InnerSetFunction::coverage(6, cells).unwrap()
        }
        InnerFamily::MonotoneTable => InnerSetFunction::table(n, random_monotone_table(rng, n)).unwrap(),
    }
}

/// `g(S) = max_{x∈S} g(S∖{x}) + step`, with random non-negative grid steps.
pub fn random_monotone_table(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; 1 << n];
    for mask in 1..1usize << n {
        let base = (0..n).filter(|x| mask & (1 << x) != 0).map(|x| v[mask & !(1 << x)]).fold(0.0, f64::max);
        v[mask] = base + grid(rng, 0, 4, 0.5);
    }
    v
}

/// Any table with `g(∅) = 0`, monotone or not.
pub fn random_table(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..1 << n).map(|_| grid(rng, 0, 12, 0.5)).collect();
    v[0] = 0.0;
    v
}

/// A random set function for the checker-agreement suite.
pub fn random_g(rng: &mut ChaCha8Rng, n: usize) -> InnerSetFunction {
    match rng.random_range(0..4) {
        0 => random_inner(rng, InnerFamily::Modular, n),
        1 => random_inner(rng, InnerFamily::Coverage, n),
        2 => random_inner(rng, InnerFamily::MonotoneTable, n),
        _ => InnerSetFunction::Table { n, values: random_table(rng, n) },
    }
}

/// A random cost for the checker-agreement suite; some violate the axioms.
pub fn random_c(rng: &mut ChaCha8Rng, n: usize) -> CostModel {
    match rng.random_range(0..5) {
        0 => CostModel::modular((0..n).map(|_| grid(rng, 0, 6, 0.5)).collect()).unwrap(),
        1 => {
            let inner = random_inner(rng, InnerFamily::Modular, n);
            CostModel::poly_of_g(vec![grid(rng, 1, 4, 0.5), grid(rng, 0, 2, 0.25)], inner).unwrap()
        }
        2 => {
            let inner = random_inner(rng, InnerFamily::Coverage, n);
            CostModel::poly_of_g(vec![grid(rng, 1, 4, 0.5)], inner).unwrap()
        }
        3 => {
            // modular plus a perturbation: sometimes subadditive, sometimes not
            let w: Vec<f64> = (0..n).map(|_| grid(rng, 1, 4, 0.5)).collect();
            let values = (0..1usize << n)
                .map(|m| {
                    let base: f64 = (0..n).filter(|x| m & (1 << x) != 0).map(|x| w[x]).sum();
                    if m == 0 { 0.0 } else { base + grid(rng, 0, 4, 0.25) - 0.5 }
                })
                .collect();
            CostModel::table(n, values).unwrap()
        }
        _ => CostModel::table(n, random_table(rng, n)).unwrap(),
    }
}
