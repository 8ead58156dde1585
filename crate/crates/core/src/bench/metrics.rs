use std::fmt::Write as _;

use serde::Serialize;

use crate::formula::Cost;

/// Anytime-track score of one solver on one instance:
/// `(cost_best + 1) / (cost + 1)`, or 0 without a feasible solution.
pub fn mse_score(cost_best: Cost, cost_solver: Cost) -> f64 {
    match (cost_best, cost_solver) {
        (Cost::Finite(best), Cost::Finite(c)) => (best as f64 + 1.0) / (c as f64 + 1.0),
        _ => 0.0,
    }
}

/// Result of one solver configuration on one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub config: String,
    pub cost: Cost,
    pub time_to_best: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceRecord {
    pub instance: String,
    pub outcomes: Vec<Outcome>,
}

impl InstanceRecord {
    pub fn new(instance: impl Into<String>) -> Self {
        InstanceRecord {
            instance: instance.into(),
            outcomes: Vec::new(),
        }
    }

    pub fn with(mut self, config: &str, cost: Cost, time_to_best: Option<f64>) -> Self {
        self.outcomes.push(Outcome {
            config: config.to_owned(),
            cost,
            time_to_best,
        });
        self
    }

    /// Lowest cost any configuration reached on this instance.
    pub fn best_cost(&self) -> Cost {
        self.outcomes
            .iter()
            .map(|o| o.cost)
            .min()
            .unwrap_or(Cost::Infinite)
    }

    fn cost_of(&self, config: &str) -> Cost {
        self.outcomes
            .iter()
            .filter(|o| o.config == config)
            .map(|o| o.cost)
            .min()
            .unwrap_or(Cost::Infinite)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSummary {
    pub config: String,
    pub wins: usize,
    /// Mean per-instance score.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceScores {
    pub instance: String,
    pub best: Cost,
    /// Score per configuration, in the order of [`BenchmarkReport::configs`].
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub num_instances: usize,
    pub configs: Vec<ConfigSummary>,
    pub per_instance: Vec<InstanceScores>,
}

/// Aggregates `#win.` and `#score` over instances. Every configuration that
/// reaches the instance's (finite) best cost is credited with a win; a
/// configuration missing from a record counts as infeasible there.
pub fn tally(records: &[InstanceRecord]) -> BenchmarkReport {
    let mut names: Vec<String> = Vec::new();
    for o in records.iter().flat_map(|r| &r.outcomes) {
        if !names.contains(&o.config) {
            names.push(o.config.clone());
        }
    }
    let mut wins = vec![0usize; names.len()];
    let mut sums = vec![0.0f64; names.len()];
    let mut per_instance = Vec::with_capacity(records.len());
    for r in records {
        let best = r.best_cost();
        let mut scores = Vec::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            let cost = r.cost_of(name);
            if best.is_finite() && cost == best {
                wins[i] += 1;
            }
            let s = mse_score(best, cost);
            sums[i] += s;
            scores.push(s);
        }
        per_instance.push(InstanceScores {
            instance: r.instance.clone(),
            best,
            scores,
        });
    }
    let n = records.len();
    let configs = names
        .into_iter()
        .zip(wins.into_iter().zip(sums))
        .map(|(config, (wins, sum))| ConfigSummary {
            config,
            wins,
            score: if n == 0 { 0.0 } else { sum / n as f64 },
        })
        .collect();
    BenchmarkReport {
        num_instances: n,
        configs,
        per_instance,
    }
}

impl BenchmarkReport {
    /// Aligned plain-text table with `#inst.`, `#win.` and `#score` columns.
    pub fn to_table(&self) -> String {
        let width = self
            .configs
            .iter()
            .map(|c| c.config.len())
            .max()
            .unwrap_or(0)
            .max("config".len());
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<width$}  {:>6}  {:>5}  {:>7}",
            "config", "#inst.", "#win.", "#score"
        );
        for c in &self.configs {
            let _ = writeln!(
                s,
                "{:<width$}  {:>6}  {:>5}  {:>7.4}",
                c.config, self.num_instances, c.wins, c.score
            );
        }
        s
    }

    /// One row per instance and configuration.
    pub fn to_csv(&self, records: &[InstanceRecord]) -> String {
        let mut s = String::from("instance,config,cost,time_to_best,score\n");
        for (r, scores) in records.iter().zip(&self.per_instance) {
            for (c, score) in self.configs.iter().zip(&scores.scores) {
                let o = r.outcomes.iter().find(|o| o.config == c.config);
                let cost = o
                    .and_then(|o| o.cost.finite())
                    .map(|c| c.to_string())
                    .unwrap_or_default();
                let time = o
                    .and_then(|o| o.time_to_best)
                    .map(|t| format!("{t:.3}"))
                    .unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{:.6}",
                    csv_field(&r.instance),
                    csv_field(&c.config),
                    cost,
                    time,
                    score
                );
            }
        }
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}
