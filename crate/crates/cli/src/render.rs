use std::fmt::Write;

use csgreedy::policy::{CombinedRunResult, PolicyRunTrace};
use csgreedy::verify::{CheckReport, RatioReport, Witness};
use csgreedy::{Instance, ItemSet, Realization};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub fn set_names(inst: &Instance, set: &ItemSet) -> Vec<String> {
    inst.item_names(set)
}

pub fn realization(inst: &Instance, h: &Realization) -> Value {
    let map: Map<String, Value> = h
        .states()
        .iter()
        .enumerate()
        .map(|(x, &y)| (inst.items()[x].clone(), Value::String(inst.states()[y].clone())))
        .collect();
    Value::Object(map)
}

fn witness_json(inst: &Instance, w: &Witness) -> Value {
    json!({
        "violation": w.violation,
        "a": w.a.as_ref().map(|s| set_names(inst, s)),
        "b": w.b.as_ref().map(|s| set_names(inst, s)),
        "x": w.x.map(|x| inst.items()[x].clone()),
        "h": w.h.as_ref().map(|h| realization(inst, h)),
        "h_prime": w.h_prime.as_ref().map(|h| realization(inst, h)),
        "lhs": w.lhs,
        "rhs": w.rhs,
    })
}

pub fn checks_json(inst: &Instance, reports: &[CheckReport]) -> Value {
    let reports: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "property": r.property,
                "verdict": r.verdict,
                "pairs_checked": r.pairs_checked,
                "witness": r.witness.as_ref().map(|w| witness_json(inst, w)),
            })
        })
        .collect();
    json!({ "passed": reports.iter().all(|r| r["witness"].is_null()), "reports": reports })
}

fn braces(names: &[String]) -> String {
    format!("{{{}}}", names.join(","))
}

pub fn checks_text(inst: &Instance, reports: &[CheckReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let verdict = serde_json::to_value(r.verdict).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        let _ = writeln!(out, "{:<22} {verdict} ({} comparisons)", r.property, r.pairs_checked);
        if let Some(w) = &r.witness {
            let _ = writeln!(out, "  violation: {}", w.violation);
            let mut parts = Vec::new();
            if let Some(a) = &w.a {
                parts.push(format!("A = {}", braces(&set_names(inst, a))));
            }
            if let Some(b) = &w.b {
                parts.push(format!("B = {}", braces(&set_names(inst, b))));
            }
            if let Some(x) = w.x {
                parts.push(format!("x = {}", inst.items()[x]));
            }
            if !parts.is_empty() {
                let _ = writeln!(out, "  {}", parts.join(", "));
            }
            if let Some(h) = &w.h {
                let _ = writeln!(out, "  h = {}", realization(inst, h));
            }
            if let Some(h) = &w.h_prime {
                let _ = writeln!(out, "  h' = {}", realization(inst, h));
            }
            let _ = writeln!(out, "  lhs = {}, rhs = {}", w.lhs, w.rhs);
        }
    }
    out
}

pub fn trace_json(inst: &Instance, t: &PolicyRunTrace) -> Value {
    let decisions: Vec<Value> = t
        .decisions
        .iter()
        .map(|d| {
            json!({
                "item": inst.items()[d.item],
                "score": d.score,
                "affordable": d.affordable,
                "selected": d.selected,
                "observed_state": d.observed_state.map(|y| inst.states()[y].clone()),
            })
        })
        .collect();
    json!({
        "policy": t.policy,
        "budget": t.budget,
        "observations": t.observations.iter().map(|&(x, y)| json!([inst.items()[x], inst.states()[y]])).collect::<Vec<_>>(),
        "selected": set_names(inst, &t.final_selected),
        "cost": t.final_cost,
        "value": t.value,
        "decisions": decisions,
    })
}

pub fn combined_json(inst: &Instance, r: &CombinedRunResult) -> Value {
    json!({
        "policy": "combined",
        "first": trace_json(inst, &r.first),
        "second": trace_json(inst, &r.second),
        "selected": set_names(inst, &r.union),
        "cost": r.first.final_cost + r.second.final_cost,
        "value": r.value_on_realization,
    })
}

/// One `verify-bounds` record; `status` is `ok`, `violated`, `not_applicable` or `skipped`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRecord {
    pub instance_id: String,
    pub policy: String,
    pub status: &'static str,
    pub reference_budget: Option<f64>,
    pub value_policy: Option<f64>,
    pub value_optimal: Option<f64>,
    pub ratio: Option<f64>,
    pub bound: Option<f64>,
    pub satisfied: Option<bool>,
    pub applicable: Option<bool>,
    pub reason: Option<String>,
}

impl BoundRecord {
    pub fn from_report(r: RatioReport) -> Self {
        let status = if r.violated() {
            "violated"
        } else if r.applicable {
            "ok"
        } else {
            "not_applicable"
        };
        Self {
            instance_id: r.instance_id,
            policy: r.policy,
            status,
            reference_budget: Some(r.reference_budget),
            value_policy: Some(r.value_policy),
            value_optimal: Some(r.value_optimal),
            ratio: Some(r.ratio),
            bound: Some(r.bound),
            satisfied: Some(r.satisfied),
            applicable: Some(r.applicable),
            reason: None,
        }
    }

    pub fn skipped(instance_id: &str, policy: String, reason: String) -> Self {
        Self {
            instance_id: instance_id.into(),
            policy,
            status: "skipped",
            reference_budget: None,
            value_policy: None,
            value_optimal: None,
            ratio: None,
            bound: None,
            satisfied: None,
            applicable: None,
            reason: Some(reason),
        }
    }

    pub fn text(&self) -> String {
        match (self.ratio, &self.reason) {
            (Some(ratio), _) => format!(
                "{:<16} {:<20} ratio {:.6} ({} / {}) at reference budget {}  {}",
                self.instance_id,
                self.policy,
                ratio,
                self.value_policy.unwrap_or(f64::NAN),
                self.value_optimal.unwrap_or(f64::NAN),
                self.reference_budget.unwrap_or(f64::NAN),
                self.status
            ),
            (None, reason) => format!(
                "{:<16} {:<20} skipped: {}",
                self.instance_id,
                self.policy,
                reason.as_deref().unwrap_or("")
            ),
        }
    }
}
