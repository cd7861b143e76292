use serde::Serialize;

use super::{run_strategy, ALScenario, ScenarioConfig, Strategy};
use crate::error::{Error, Result};

/// Outcome of one (strategy, budget, seed) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ALResult {
    pub scenario: String,
    pub strategy: Strategy,
    pub budget: f64,
    pub seed: u64,
    /// Distinct queried pool examples in first-query order.
    pub queried: Vec<usize>,
    pub spent: f64,
    pub accuracy: f64,
}

/// Runs every strategy at every budget for every seed; results are ordered by
/// strategy, then budget, then seed.
pub fn run_al_experiment(config: &ScenarioConfig) -> Result<Vec<ALResult>> {
    config.validate()?;
    let scenarios = config
        .seeds
        .iter()
        .map(|&seed| ALScenario::generate(config, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for &strategy in &config.strategies {
        for &budget in &config.budgets {
            for sc in &scenarios {
                let run = run_strategy(&sc.class, &sc.cost, &sc.truth, budget, strategy, sc.seed)?;
                let mut queried = Vec::new();
                for &(x, _) in &run.observations {
                    if !queried.contains(&x) {
                        queried.push(x);
                    }
                }
                out.push(ALResult {
                    scenario: config.name().to_string(),
                    strategy,
                    budget,
                    seed: sc.seed,
                    queried,
                    spent: run.spent,
                    accuracy: sc.accuracy(&run.posterior),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct Row<'a> {
    scenario: &'a str,
    strategy: Strategy,
    budget: f64,
    seed: u64,
    spent: String,
    n_queried: usize,
    accuracy: String,
}

/// CSV with columns `scenario,strategy,budget,seed,spent,n_queried,accuracy`.
pub fn results_to_csv(results: &[ALResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in results {
        w.serialize(Row {
            scenario: &r.scenario,
            strategy: r.strategy,
            budget: r.budget,
            seed: r.seed,
            spent: format!("{:.6}", r.spent),
            n_queried: r.queried.len(),
            accuracy: format!("{:.6}", r.accuracy),
        })
        .map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(format!("csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::active::{CostScenario, PriorSpec};

    fn small(cost: CostScenario, budgets: Vec<f64>) -> ScenarioConfig {
        ScenarioConfig {
            name: None,
            pool_size: 20,
            test_size: 60,
            n_thresholds: 21,
            prior: PriorSpec::Uniform,
            cost,
            budgets,
            seeds: vec![1, 2],
            strategies: Strategy::ALL.to_vec(),
        }
    }

    #[test]
    fn budget_covering_everything() {
        let results = run_al_experiment(&small(CostScenario::Uniform { cost: 1.0 }, vec![1000.0])).unwrap();
        for seed in [1, 2] {
            let cell: Vec<_> = results.iter().filter(|r| r.seed == seed).collect();
            assert!(cell.iter().all(|r| r.queried.len() == 20));
            assert!(cell.iter().all(|r| r.accuracy == cell[0].accuracy));
        }
    }

    #[test]
    fn budget_below_every_cost() {
        let results = run_al_experiment(&small(CostScenario::Uniform { cost: 2.0 }, vec![1.0])).unwrap();
        assert!(results.iter().all(|r| r.queried.is_empty() && r.spent == 0.0));
        let acc: Vec<f64> = results.iter().filter(|r| r.seed == 1).map(|r| r.accuracy).collect();
        assert!(acc.iter().all(|a| *a == acc[0]));
    }

    #[test]
    fn csv_layout_and_order() {
        let results =
            run_al_experiment(&small(CostScenario::HighCostLowMargin { low: 1.0, high: 10.0 }, vec![5.0, 10.0]))
                .unwrap();
        assert_eq!(results.len(), 4 * 2 * 2);
        assert!(results.iter().all(|r| r.spent <= r.budget + 1e-9));
        let csv = results_to_csv(&results).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("scenario,strategy,budget,seed,spent,n_queried,accuracy"));
        assert!(lines.next().unwrap().starts_with("high_cost_low_margin,Passive,5.0,1,"));
        assert_eq!(results_to_csv(&run_al_experiment(&small(CostScenario::HighCostLowMargin { low: 1.0, high: 10.0 }, vec![5.0, 10.0])).unwrap()).unwrap(), csv);
    }
}
