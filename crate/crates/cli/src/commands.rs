use std::path::{Path, PathBuf};

use csgreedy::active::{results_to_csv, run_al_experiment, ScenarioConfig};
use csgreedy::model::Settings;
use csgreedy::policy::{run_combined_half, run_greedy};
use csgreedy::schema::InstanceFile;
use csgreedy::verify::{
    check_instance, gen_counterexample_thm2, gen_counterexample_thm3, ratio_harness, Candidate, InstanceGenerator,
    RandomInstanceConfig,
};
use csgreedy::{Error, Instance, PolicyKind, Realization};
use serde_json::{json, Value};

use crate::render::{self, BoundRecord};
use crate::{CliError, CliResult, Construction, Format, Outcome, Reference};

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load(path: &Path, settings: Settings) -> CliResult<Instance> {
    let text = read(path)?;
    InstanceFile::from_json(&text)
        .and_then(|f| f.build(settings))
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

fn no_csv(command: &str) -> CliError {
    CliError::Usage(format!("{command} has no csv output; use --format text or json"))
}

pub fn check(path: &Path, settings: Settings, fmt: Format) -> CliResult<Outcome> {
    let inst = load(path, settings)?;
    let reports = check_instance(&inst)?;
    let failed = reports.iter().any(|r| !r.passed());
    let text = match fmt {
        Format::Text => render::checks_text(&inst, &reports),
        Format::Json => pretty(&render::checks_json(&inst, &reports)),
        Format::Csv => return Err(no_csv("check")),
    };
    Ok(Outcome { text, failed })
}

fn parse_realization(inst: &Instance, spec: &str) -> CliResult<Realization> {
    let pairs = spec
        .split(',')
        .map(|p| p.trim().split_once('=').ok_or_else(|| CliError::Usage(format!("realization entry '{p}' is not item=state"))))
        .collect::<CliResult<Vec<_>>>()?;
    if pairs.len() != inst.n_items() {
        return Err(CliError::Usage(format!("realization must assign all {} items", inst.n_items())));
    }
    Ok(inst.realization_from_pairs(pairs)?)
}

pub fn run(
    path: &Path,
    settings: Settings,
    fmt: Format,
    policy: PolicyKind,
    realization: Option<&str>,
    all: bool,
    budget: Option<f64>,
) -> CliResult<Outcome> {
    let mut inst = load(path, settings)?;
    if let Some(k) = budget {
        inst = inst.with_budget(k)?;
    }
    let (n, m) = (inst.n_items(), inst.n_states());
    let hs: Vec<Realization> = if all {
        let count = Realization::count(n, m);
        if count > settings.caps.realizations {
            return Err(Error::TooLarge { what: "realizations", size: count, cap: settings.caps.realizations }.into());
        }
        Realization::enumerate(n, m).collect()
    } else if let Some(spec) = realization {
        vec![parse_realization(&inst, spec)?]
    } else if m == 1 {
        vec![Realization::constant(n, 0)]
    } else {
        return Err(CliError::Usage("pass --realization item=state,... or --all".into()));
    };
    let mut traces = Vec::with_capacity(hs.len());
    let mut lines = String::new();
    let mut worst = f64::INFINITY;
    for h in &hs {
        let mut t = if policy == PolicyKind::Combined {
            render::combined_json(&inst, &run_combined_half(&inst, h)?)
        } else {
            render::trace_json(&inst, &run_greedy(&inst, policy, h, inst.budget())?)
        };
        let value = t["value"].as_f64().unwrap_or(f64::NAN);
        worst = worst.min(value);
        lines.push_str(&format!(
            "h = {}: selected {{{}}} cost {} value {value}\n",
            render::realization(&inst, h),
            t["selected"].as_array().map(|a| a.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(",")).unwrap_or_default(),
            t["cost"],
        ));
        t["realization"] = render::realization(&inst, h);
        traces.push(t);
    }
    let text = match fmt {
        Format::Text => format!("{lines}worst value over {} realization(s): {worst}\n", hs.len()),
        Format::Json => pretty(&json!({
            "policy": policy,
            "budget": inst.budget(),
            "worst_value": worst,
            "traces": traces,
        })),
        Format::Csv => return Err(no_csv("run")),
    };
    Ok(Outcome { text, failed: false })
}

pub struct BoundSource<'a> {
    pub files: &'a [PathBuf],
    pub random: Option<usize>,
    pub construction: Option<(Construction, f64, usize)>,
}

fn generate(construction: Construction, p: f64, n: usize) -> CliResult<(String, Instance)> {
    Ok(match construction {
        Construction::Thm2 => (format!("thm2-p{p}"), gen_counterexample_thm2(p)?),
        Construction::Thm3 => (format!("thm3-n{n}"), gen_counterexample_thm3(n)?),
    })
}

fn default_reference(c: Candidate) -> Reference {
    match c {
        Candidate::Policy(PolicyKind::Combined | PolicyKind::CostAverage) => Reference::Half,
        _ => Reference::Full,
    }
}

pub fn verify_bounds(
    source: BoundSource,
    settings: Settings,
    fmt: Format,
    seed: u64,
    policy: Option<Candidate>,
    reference: Option<Reference>,
) -> CliResult<Outcome> {
    let mut instances = Vec::new();
    for path in source.files {
        let id = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        instances.push((id, load(path, settings)?));
    }
    if let Some((c, p, n)) = source.construction {
        let (id, mut inst) = generate(c, p, n)?;
        inst.set_settings(settings);
        instances.push((id, inst));
    }
    if let Some(count) = source.random {
        let mut gen = InstanceGenerator::new(RandomInstanceConfig::default(), seed)?;
        for i in 0..count {
            let mut inst = gen.next_checked()?;
            inst.set_settings(settings);
            instances.push((format!("random-{i}"), inst));
        }
    }
    if instances.is_empty() {
        return Err(CliError::Usage("give instance files, --random N or --counterexample".into()));
    }
    let jobs: Vec<(Candidate, Reference)> = match (policy, reference) {
        (Some(c), r) => vec![(c, r.unwrap_or_else(|| default_reference(c)))],
        (None, None) => vec![
            (Candidate::BestOfTwo, Reference::Full),
            (Candidate::Policy(PolicyKind::Combined), Reference::Half),
            (Candidate::Policy(PolicyKind::CostAverage), Reference::Half),
        ],
        (None, Some(_)) => return Err(CliError::Usage("--reference needs --policy".into())),
    };
    let mut records = Vec::new();
    for (id, inst) in &instances {
        for &(candidate, reference) in &jobs {
            match ratio_harness(inst, id, candidate, reference.budget(inst.budget())) {
                Ok(r) => records.push(BoundRecord::from_report(r)),
                Err(e @ Error::TooLarge { .. }) => {
                    records.push(BoundRecord::skipped(id, candidate.to_string(), e.to_string()))
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    let failed = records.iter().any(|r| r.status == "violated");
    let text = match fmt {
        Format::Json => pretty(&records),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &records {
                w.serialize(r).map_err(|e| CliError::Usage(format!("csv: {e}")))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))?)
                .expect("csv output is utf-8")
        }
        Format::Text => {
            let mut out: String = records.iter().map(|r| r.text() + "\n").collect();
            let count = |s: &str| records.iter().filter(|r| r.status == s).count();
            out.push_str(&format!(
                "{} records: {} ok, {} violated, {} not applicable, {} skipped\n",
                records.len(),
                count("ok"),
                count("violated"),
                count("not_applicable"),
                count("skipped")
            ));
            out
        }
    };
    Ok(Outcome { text, failed })
}

pub fn counterexample(construction: Construction, p: f64, n: usize, settings: Settings) -> CliResult<Outcome> {
    let (_, mut inst) = generate(construction, p, n)?;
    inst.set_settings(settings);
    let mut text = inst.to_json()?;
    text.push('\n');
    Ok(Outcome { text, failed: false })
}

pub fn al(path: &Path, fmt: Format, seed: Option<u64>) -> CliResult<Outcome> {
    let text = read(path)?;
    let mut config: ScenarioConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if let Some(s) = seed {
        config.seeds = vec![s];
    }
    let results = run_al_experiment(&config)?;
    let text = match fmt {
        Format::Json => pretty(&results),
        Format::Csv | Format::Text => results_to_csv(&results)?,
    };
    Ok(Outcome { text, failed: false })
}
