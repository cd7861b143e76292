use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{at_least, CheckOptions, CheckReport, Sampling, Verdict, Witness};
use crate::cost::{CostModel, SetFunction};
use crate::error::{Error, Result};
use crate::itemset::{submasks, ItemSet};
use crate::model::{Instance, Realization};
use crate::utility::Utility;

/// Exhaustive checks index subsets by `u64` masks and tabulate `2^n` values.
const MASK_LIMIT: usize = 20;

/// The set function `S ↦ f(S, h)` for one fixed realization.
pub struct Pointwise<'a> {
    pub utility: &'a dyn Utility,
    pub h: &'a Realization,
}

impl SetFunction for Pointwise<'_> {
    fn ground_size(&self) -> usize {
        self.h.n_items()
    }

    fn eval(&self, set: &ItemSet) -> f64 {
        self.utility.value(set, self.h)
    }
}

enum Scope {
    Exhaustive,
    Sampled(Sampling),
}

fn scope(n: usize, opts: &CheckOptions, what: &'static str) -> Result<Scope> {
    if n <= opts.max_items.min(MASK_LIMIT) {
        Ok(Scope::Exhaustive)
    } else if let Some(s) = opts.sampling {
        Ok(Scope::Sampled(s))
    } else {
        Err(Error::TooLarge { what, size: n as u128, cap: opts.max_items.min(MASK_LIMIT) as u128 })
    }
}

fn tabulate(f: &dyn SetFunction) -> Vec<f64> {
    (0..1u64 << f.ground_size()).map(|m| f.eval(&ItemSet::from_mask(m))).collect()
}

fn report(property: &str, witness: Option<Witness>, pairs: u64, sampled: bool) -> CheckReport {
    let verdict = match (&witness, sampled) {
        (Some(_), _) => Verdict::Fail,
        (None, false) => Verdict::Pass,
        (None, true) => Verdict::SampledPass,
    };
    CheckReport { property: property.into(), verdict, witness, pairs_checked: pairs }
}

fn same_ground(g: &dyn SetFunction, c: &CostModel) -> Result<usize> {
    if g.ground_size() != c.ground_size() {
        return Err(Error::Config(format!(
            "set function on {} items checked against a cost on {}",
            g.ground_size(),
            c.ground_size()
        )));
    }
    Ok(g.ground_size())
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> ItemSet {
    (0..n).filter(|_| rng.random_bool(0.5)).collect()
}

fn random_outside(rng: &mut ChaCha8Rng, n: usize, set: &ItemSet) -> Option<usize> {
    let free: Vec<usize> = (0..n).filter(|&x| !set.contains(x)).collect();
    (!free.is_empty()).then(|| free[rng.random_range(0..free.len())])
}

/// Cost-sensitive submodularity over tabulated `g` and `c`; triples are
/// visited with `A` outermost, then `B ⊋ A`, then `x ∉ B`, all ascending.
fn csub_tables(gv: &[f64], cv: &[f64], n: usize, tol: f64) -> (Option<Witness>, u64) {
    let full = (1u64 << n) - 1;
    let mut pairs = 0;
    for a in 0..=full {
        for s in submasks(full & !a).skip(1) {
            let b = a | s;
            for x in (0..n).filter(|&x| b & (1 << x) == 0) {
                let bit = 1u64 << x;
                let (ax, bx) = ((a | bit) as usize, (b | bit) as usize);
                let (a, b) = (a as usize, b as usize);
                let lhs = (gv[ax] - gv[a]) * (cv[bx] - cv[b]);
                let rhs = (gv[bx] - gv[b]) * (cv[ax] - cv[a]);
                pairs += 1;
                if !at_least(lhs, rhs, tol) {
                    let w = Witness::new("cost_sensitive_submodularity", lhs, rhs).sets(
                        ItemSet::from_mask(a as u64),
                        Some(ItemSet::from_mask(b as u64)),
                        Some(x),
                    );
                    return (Some(w), pairs);
                }
            }
        }
    }
    (None, pairs)
}

fn csub_sampled(g: &dyn SetFunction, c: &CostModel, n: usize, tol: f64, rng: &mut ChaCha8Rng) -> Option<Witness> {
    let b = random_subset(rng, n);
    let a: ItemSet = b.iter().filter(|_| rng.random_bool(0.5)).collect();
    let x = random_outside(rng, n, &b)?;
    let lhs = (g.eval(&a.with(x)) - g.eval(&a)) * (c.eval(&b.with(x)) - c.eval(&b));
    let rhs = (g.eval(&b.with(x)) - g.eval(&b)) * (c.eval(&a.with(x)) - c.eval(&a));
    (!at_least(lhs, rhs, tol))
        .then(|| Witness::new("cost_sensitive_submodularity", lhs, rhs).sets(a, Some(b), Some(x)))
}

/// Checks `(g(A∪{x}) − g(A)) / Δc(x|A) >= (g(B∪{x}) − g(B)) / Δc(x|B)` for all
/// `A ⊆ B`, `x ∉ B`, in cross-multiplied form.
pub fn check_cost_sensitive_submodularity(g: &dyn SetFunction, c: &CostModel, opts: &CheckOptions) -> Result<CheckReport> {
    let n = same_ground(g, c)?;
    let property = "cost_sensitive_submodularity";
    match scope(n, opts, "cost-sensitive submodularity check")? {
        Scope::Exhaustive => {
            let (w, pairs) = csub_tables(&tabulate(g), &tabulate(c), n, opts.tolerance);
            Ok(report(property, w, pairs, false))
        }
        Scope::Sampled(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            for i in 0..s.draws {
                if let Some(w) = csub_sampled(g, c, n, opts.tolerance, &mut rng) {
                    return Ok(report(property, Some(w), i as u64 + 1, true));
                }
            }
            Ok(report(property, None, s.draws as u64, true))
        }
    }
}

/// Classical submodularity in its local form
/// `g(A∪{x}) − g(A) >= g(A∪{y,x}) − g(A∪{y})`.
///
/// A witness reports `B = A ∪ {y}`. Visits `A`, then `x`, then `y`, ascending.
pub fn check_submodularity(g: &dyn SetFunction, opts: &CheckOptions) -> Result<CheckReport> {
    let n = g.ground_size();
    let property = "submodularity";
    let violation = |a: ItemSet, x: usize, y: usize, lhs: f64, rhs: f64| {
        let b = a.with(y);
        Witness::new(property, lhs, rhs).sets(a, Some(b), Some(x))
    };
    match scope(n, opts, "submodularity check")? {
        Scope::Exhaustive => {
            let gv = tabulate(g);
            let mut pairs = 0;
            for a in 0..1u64 << n {
                let outside: Vec<usize> = (0..n).filter(|&i| a & (1 << i) == 0).collect();
                for &x in &outside {
                    for &y in outside.iter().filter(|&&y| y != x) {
                        let (ax, ay, axy) = (a | 1 << x, a | 1 << y, a | 1 << x | 1 << y);
                        let lhs = gv[ax as usize] - gv[a as usize];
                        let rhs = gv[axy as usize] - gv[ay as usize];
                        pairs += 1;
                        if !at_least(lhs, rhs, opts.tolerance) {
                            let w = violation(ItemSet::from_mask(a), x, y, lhs, rhs);
                            return Ok(report(property, Some(w), pairs, false));
                        }
                    }
                }
            }
            Ok(report(property, None, pairs, false))
        }
        Scope::Sampled(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            for i in 0..s.draws {
                let a = random_subset(&mut rng, n);
                let Some(x) = random_outside(&mut rng, n, &a) else { continue };
                let Some(y) = random_outside(&mut rng, n, &a.with(x)) else { continue };
                let lhs = g.eval(&a.with(x)) - g.eval(&a);
                let rhs = g.eval(&a.with(x).with(y)) - g.eval(&a.with(y));
                if !at_least(lhs, rhs, opts.tolerance) {
                    return Ok(report(property, Some(violation(a, x, y, lhs, rhs)), i as u64 + 1, true));
                }
            }
            Ok(report(property, None, s.draws as u64, true))
        }
    }
}

fn monotone_tables(gv: &[f64], n: usize, tol: f64) -> (Option<Witness>, u64) {
    let mut pairs = 0;
    for a in 0..1u64 << n {
        for x in (0..n).filter(|&x| a & (1 << x) == 0) {
            let (lhs, rhs) = (gv[(a | 1 << x) as usize], gv[a as usize]);
            pairs += 1;
            if !at_least(lhs, rhs, tol) {
                let set = ItemSet::from_mask(a);
                let w = Witness::new("monotonicity", lhs, rhs).sets(set.clone(), Some(set.with(x)), Some(x));
                return (Some(w), pairs);
            }
        }
    }
    (None, pairs)
}

/// `g(A) <= g(A ∪ {x})` for all `A`, `x`.
pub fn check_monotone(g: &dyn SetFunction, opts: &CheckOptions) -> Result<CheckReport> {
    let n = g.ground_size();
    match scope(n, opts, "monotonicity check")? {
        Scope::Exhaustive => {
            let (w, pairs) = monotone_tables(&tabulate(g), n, opts.tolerance);
            Ok(report("monotonicity", w, pairs, false))
        }
        Scope::Sampled(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            for i in 0..s.draws {
                let a = random_subset(&mut rng, n);
                let Some(x) = random_outside(&mut rng, n, &a) else { continue };
                let (lhs, rhs) = (g.eval(&a.with(x)), g.eval(&a));
                if !at_least(lhs, rhs, opts.tolerance) {
                    let w = Witness::new("monotonicity", lhs, rhs).sets(a.clone(), Some(a.with(x)), Some(x));
                    return Ok(report("monotonicity", Some(w), i as u64 + 1, true));
                }
            }
            Ok(report("monotonicity", None, s.draws as u64, true))
        }
    }
}

/// `c(∅) = 0`, `Δc(x|A) > 0` (so `c(S) > 0` for `S ≠ ∅`), and
/// `c(A ∪ B) <= c(A) + c(B)`, checked in that order.
pub fn check_cost_axioms(c: &CostModel, opts: &CheckOptions) -> Result<CheckReport> {
    let n = c.ground_size();
    let tol = opts.tolerance;
    let property = "cost_axioms";
    let empty = c.eval(&ItemSet::new());
    if empty.abs() > tol {
        let w = Witness::new("zero_empty_cost", empty, 0.0).sets(ItemSet::new(), None, None);
        return Ok(report(property, Some(w), 1, false));
    }
    match scope(n, opts, "cost axiom check")? {
        Scope::Exhaustive => {
            let cv = tabulate(c);
            let full = (1u64 << n) - 1;
            let mut pairs = 1;
            for a in 0..=full {
                for x in (0..n).filter(|&x| a & (1 << x) == 0) {
                    let dc = cv[(a | 1 << x) as usize] - cv[a as usize];
                    pairs += 1;
                    if dc <= tol {
                        let set = ItemSet::from_mask(a);
                        let w = Witness::new("strict_monotonicity", dc, 0.0).sets(set.clone(), Some(set.with(x)), Some(x));
                        return Ok(report(property, Some(w), pairs, false));
                    }
                }
            }
            for a in 1..=full {
                for b in a..=full {
                    let lhs = cv[a as usize] + cv[b as usize];
                    let rhs = cv[(a | b) as usize];
                    pairs += 1;
                    if !at_least(lhs, rhs, tol) {
                        let w = Witness::new("triangle_inequality", lhs, rhs).sets(
                            ItemSet::from_mask(a),
                            Some(ItemSet::from_mask(b)),
                            None,
                        );
                        return Ok(report(property, Some(w), pairs, false));
                    }
                }
            }
            Ok(report(property, None, pairs, false))
        }
        Scope::Sampled(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            for i in 0..s.draws {
                let a = random_subset(&mut rng, n);
                let b = random_subset(&mut rng, n);
                let w = if let Some(x) = random_outside(&mut rng, n, &a) {
                    let dc = c.eval(&a.with(x)) - c.eval(&a);
                    (dc <= tol)
                        .then(|| Witness::new("strict_monotonicity", dc, 0.0).sets(a.clone(), Some(a.with(x)), Some(x)))
                } else {
                    None
                };
                let w = w.or_else(|| {
                    let (lhs, rhs) = (c.eval(&a) + c.eval(&b), c.eval(&a.union(&b)));
                    (!at_least(lhs, rhs, tol))
                        .then(|| Witness::new("triangle_inequality", lhs, rhs).sets(a.clone(), Some(b.clone()), None))
                });
                if w.is_some() {
                    return Ok(report(property, w, i as u64 + 2, true));
                }
            }
            Ok(report(property, None, s.draws as u64 + 1, true))
        }
    }
}

fn nearly_equal(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// First `(S, h, h')` with `h` and `h'` agreeing on `S` but `f(S, h) ≠ f(S, h')`.
///
/// `h'` is `h` with every item outside `S` moved to state 0, which suffices:
/// if any pair agreeing on `S` disagrees in value, one of them disagrees with
/// this canonical representative. Enumerates `|Y|^|X| · 2^|X|` cases.
pub fn minimal_dependency_witness(u: &dyn Utility, n_items: usize, n_states: usize, tol: f64) -> Option<Witness> {
    if n_items > MASK_LIMIT {
        return None;
    }
    for h in Realization::enumerate(n_items, n_states) {
        for mask in 0..1u64 << n_items {
            let set = ItemSet::from_mask(mask);
            let states = (0..n_items).map(|x| if set.contains(x) { h.state(x) } else { 0 }).collect();
            let canonical = Realization::new(states, n_states).expect("states in range");
            if canonical == h {
                continue;
            }
            let (lhs, rhs) = (u.value(&set, &h), u.value(&set, &canonical));
            if !nearly_equal(lhs, rhs, tol) {
                let mut w = Witness::new("minimal_dependency", lhs, rhs).sets(set, None, None);
                w.h = Some(h);
                w.h_prime = Some(canonical);
                return Some(w);
            }
        }
    }
    None
}

/// Pointwise monotonicity and pointwise cost-sensitive submodularity of
/// `f_h` for every realization, then minimal dependency.
pub fn check_pointwise_properties(
    u: &dyn Utility,
    c: &CostModel,
    n_states: usize,
    opts: &CheckOptions,
) -> Result<CheckReport> {
    let n = c.ground_size();
    let property = "pointwise_properties";
    let count = Realization::count(n, n_states);
    let cap = opts.max_realizations;
    let exhaustive = matches!(scope(n, opts, "pointwise property check"), Ok(Scope::Exhaustive)) && count <= cap;
    if exhaustive {
        let cv = tabulate(c);
        let mut pairs = 0;
        for h in Realization::enumerate(n, n_states) {
            let fv = tabulate(&Pointwise { utility: u, h: &h });
            let (w, p) = monotone_tables(&fv, n, opts.tolerance);
            pairs += p;
            let (w, p) = match w {
                Some(w) => (Some(w), 0),
                None => csub_tables(&fv, &cv, n, opts.tolerance),
            };
            pairs += p;
            if let Some(mut w) = w {
                w.violation = format!("pointwise_{}", w.violation);
                w.h = Some(h);
                return Ok(report(property, Some(w), pairs, false));
            }
        }
        let w = minimal_dependency_witness(u, n, n_states, opts.tolerance);
        pairs += (count << n) as u64;
        return Ok(report(property, w, pairs, false));
    }
    let Some(s) = opts.sampling else {
        return Err(if count > cap {
            Error::TooLarge { what: "pointwise property check", size: count, cap }
        } else {
            Error::TooLarge { what: "pointwise property check", size: n as u128, cap: opts.max_items as u128 }
        });
    };
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    for i in 0..s.draws {
        let states = (0..n).map(|_| rng.random_range(0..n_states)).collect();
        let h = Realization::new(states, n_states)?;
        let f = Pointwise { utility: u, h: &h };
        let a = random_subset(&mut rng, n);
        let mut w = random_outside(&mut rng, n, &a).and_then(|x| {
            let (lhs, rhs) = (f.eval(&a.with(x)), f.eval(&a));
            (!at_least(lhs, rhs, opts.tolerance))
                .then(|| Witness::new("pointwise_monotonicity", lhs, rhs).sets(a.clone(), Some(a.with(x)), Some(x)))
        });
        if w.is_none() {
            w = csub_sampled(&f, c, n, opts.tolerance, &mut rng).map(|mut w| {
                w.violation = "pointwise_cost_sensitive_submodularity".into();
                w
            });
        }
        if w.is_none() {
            let states = (0..n).map(|x| if a.contains(x) { h.state(x) } else { rng.random_range(0..n_states) }).collect();
            let other = Realization::new(states, n_states)?;
            let (lhs, rhs) = (u.value(&a, &h), u.value(&a, &other));
            if !nearly_equal(lhs, rhs, opts.tolerance) {
                let mut md = Witness::new("minimal_dependency", lhs, rhs).sets(a.clone(), None, None);
                md.h_prime = Some(other);
                w = Some(md);
            }
        }
        if let Some(mut w) = w {
            w.h = Some(h);
            return Ok(report(property, Some(w), i as u64 + 1, true));
        }
    }
    Ok(report(property, None, s.draws as u64, true))
}

/// Cost axioms and pointwise properties of an instance, with options from its settings.
pub fn check_instance(inst: &Instance) -> Result<Vec<CheckReport>> {
    let opts = CheckOptions::from(inst.settings());
    Ok(vec![
        check_cost_axioms(inst.cost(), &opts)?,
        check_pointwise_properties(inst.utility(), inst.cost(), inst.n_states(), &opts)?,
    ])
}
