use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::kflow::min_cost_flow_sequence;
use crate::order_stats::{flow_limit_value, limit_value, OrderStatContext};
use crate::paths::{successive_paths, SuccessiveResult};
use crate::stats;
use crate::weights::{trial_seed, WeightedCompleteGraph};

/// One trial of a successive-paths experiment, with the incident weights
/// at both terminals kept for the lower-bound audit.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub result: SuccessiveResult,
    /// Sorted weights at `s` (all `n - 1` edges).
    pub source_weights: Vec<f64>,
    /// Sorted weights at `t`.
    pub sink_weights: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathRow {
    pub trial: usize,
    pub seed: u64,
    pub k: usize,
    pub exists: bool,
    pub x_k: Option<f64>,
    pub s_k: Option<f64>,
    pub limit: f64,
    pub ratio: Option<f64>,
}

/// Per-`k` summary over the trials in which the quantity exists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub k: usize,
    pub n_exist: usize,
    pub ratio_mean: Option<f64>,
    pub ratio_median: Option<f64>,
    pub ratio_q05: Option<f64>,
    pub ratio_q95: Option<f64>,
    /// Mean cost given existence.
    pub cond_mean_xk: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathsBatch {
    pub rows: Vec<PathRow>,
    pub aggregates: Vec<AggregateRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowRow {
    pub trial: usize,
    pub seed: u64,
    pub k: usize,
    pub feasible: bool,
    pub f_k: Option<f64>,
    /// Greedy `S_k` on the same graph.
    pub s_k: Option<f64>,
    /// `sum_{i<=k} (2 E W_(i) + ln n / n)`.
    pub limit: f64,
    /// `F_k / limit`.
    pub ratio: Option<f64>,
    /// `S_k / limit`.
    pub greedy_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowBatch {
    pub rows: Vec<FlowRow>,
    /// Aggregates of `F_k / limit`; `cond_mean_xk` holds the mean `F_k`.
    pub aggregates: Vec<AggregateRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CondExpRow {
    pub k: usize,
    pub trials: usize,
    pub n_exist: usize,
    /// Estimate of `E[X_k | P_k exists]`; absent when no trial has `P_k`.
    pub cond_mean: Option<f64>,
    pub std_err: Option<f64>,
    pub limit: f64,
    pub ratio: Option<f64>,
    /// Set when no estimate could be formed.
    pub flagged: bool,
}

/// Violation counts from [`audit_trial`]; all zero for a sound run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AuditCounts {
    pub paths: usize,
    /// `X_k < X_{k-1}`.
    pub monotonicity: usize,
    /// Edges shared between recorded paths.
    pub disjointness: usize,
    /// Paths with `length > 19 n cost`.
    pub length: usize,
    /// `S_k < sum_{i<k} (W_(i)^s + W_(i)^t)`.
    pub lower_bound: usize,
}

impl AuditCounts {
    pub fn violations(&self) -> usize {
        self.monotonicity + self.disjointness + self.length + self.lower_bound
    }

    pub fn merge(self, other: AuditCounts) -> AuditCounts {
        AuditCounts {
            paths: self.paths + other.paths,
            monotonicity: self.monotonicity + other.monotonicity,
            disjointness: self.disjointness + other.disjointness,
            length: self.length + other.length,
            lower_bound: self.lower_bound + other.lower_bound,
        }
    }
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))
}

/// Runs `f` for every trial index on `workers` threads and returns the
/// outputs in trial order.
fn fan_out<T, F>(config: &ExperimentConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T> + Sync,
{
    let pool = thread_pool(config.workers)?;
    pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|trial| f(trial, trial_seed(config.seed, trial as u64)))
            .collect()
    })
}

/// Runs every trial and keeps the full extraction results.
pub fn run_paths_trials(config: &ExperimentConfig) -> Result<Vec<TrialOutcome>> {
    let grid = config.validate()?;
    let k_max = *grid.last().expect("grid is nonempty");
    fan_out(config, |trial, seed| {
        let mut g = WeightedCompleteGraph::generate(config.n, config.model, seed, config.storage)?;
        let source_weights = g.sorted_incident_weights(g.source())?;
        let sink_weights = g.sorted_incident_weights(g.sink())?;
        let result = successive_paths(&mut g, k_max)?;
        Ok(TrialOutcome { trial, seed, result, source_weights, sink_weights })
    })
}

/// Builds the row set and aggregates for the config's k-grid.
pub fn paths_batch(config: &ExperimentConfig, outcomes: &[TrialOutcome]) -> Result<PathsBatch> {
    let grid = config.validate()?;
    let ctx = OrderStatContext::new(config.n, config.model)?;
    let limits = grid
        .iter()
        .map(|&k| limit_value(&ctx, k))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(outcomes.len() * grid.len());
    for out in outcomes {
        for (&k, &limit) in grid.iter().zip(&limits) {
            let x_k = out.result.cost(k);
            rows.push(PathRow {
                trial: out.trial,
                seed: out.seed,
                k,
                exists: x_k.is_some(),
                x_k,
                s_k: out.result.prefix_sum(k),
                limit,
                ratio: x_k.map(|x| x / limit),
            });
        }
    }
    let aggregates = aggregate_rows(&rows);
    Ok(PathsBatch { rows, aggregates })
}

pub fn run_paths_experiment(config: &ExperimentConfig) -> Result<PathsBatch> {
    let outcomes = run_paths_trials(config)?;
    paths_batch(config, &outcomes)
}

fn ks_in_order<'a>(ks: impl Iterator<Item = &'a usize>) -> Vec<usize> {
    let mut seen = HashSet::new();
    ks.filter(|k| seen.insert(**k)).copied().collect()
}

fn summarize(k: usize, ratios: &[f64], costs: &[f64]) -> AggregateRow {
    let mut sorted = ratios.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| (!sorted.is_empty()).then(|| stats::quantile_sorted(&sorted, p));
    AggregateRow {
        k,
        n_exist: ratios.len(),
        ratio_mean: stats::mean(ratios),
        ratio_median: q(0.5),
        ratio_q05: q(0.05),
        ratio_q95: q(0.95),
        cond_mean_xk: stats::mean(costs),
    }
}

/// Per-`k` aggregates, folded in row order. Depends only on the rows, so
/// persisted rows reproduce the aggregates exactly.
pub fn aggregate_rows(rows: &[PathRow]) -> Vec<AggregateRow> {
    ks_in_order(rows.iter().map(|r| &r.k))
        .into_iter()
        .map(|k| {
            let present: Vec<&PathRow> = rows.iter().filter(|r| r.k == k && r.exists).collect();
            let ratios: Vec<f64> = present.iter().filter_map(|r| r.ratio).collect();
            let costs: Vec<f64> = present.iter().filter_map(|r| r.x_k).collect();
            summarize(k, &ratios, &costs)
        })
        .collect()
}

fn aggregate_flow_rows(rows: &[FlowRow]) -> Vec<AggregateRow> {
    ks_in_order(rows.iter().map(|r| &r.k))
        .into_iter()
        .map(|k| {
            let present: Vec<&FlowRow> = rows.iter().filter(|r| r.k == k && r.feasible).collect();
            let ratios: Vec<f64> = present.iter().filter_map(|r| r.ratio).collect();
            let costs: Vec<f64> = present.iter().filter_map(|r| r.f_k).collect();
            summarize(k, &ratios, &costs)
        })
        .collect()
}

/// Min-cost `k`-flows next to greedy prefix sums on the same graphs.
pub fn run_flow_experiment(config: &ExperimentConfig) -> Result<FlowBatch> {
    let grid = config.validate()?;
    let ctx = OrderStatContext::new(config.n, config.model)?;
    let limits = grid
        .iter()
        .map(|&k| flow_limit_value(&ctx, k))
        .collect::<Result<Vec<_>>>()?;
    let k_max = *grid.last().expect("grid is nonempty");
    let per_trial = fan_out(config, |trial, seed| {
        let g = WeightedCompleteGraph::generate(config.n, config.model, seed, config.storage)?;
        let flows = min_cost_flow_sequence(&g, &grid)?;
        let mut greedy = g;
        let succ = successive_paths(&mut greedy, k_max)?;
        Ok(grid
            .iter()
            .zip(&limits)
            .zip(flows)
            .map(|((&k, &limit), flow)| {
                let f_k = flow.feasible.then_some(flow.total_cost);
                let s_k = succ.prefix_sum(k);
                FlowRow {
                    trial,
                    seed,
                    k,
                    feasible: flow.feasible,
                    f_k,
                    s_k,
                    limit,
                    ratio: f_k.map(|f| f / limit),
                    greedy_ratio: s_k.map(|s| s / limit),
                }
            })
            .collect::<Vec<_>>())
    })?;
    let rows: Vec<FlowRow> = per_trial.into_iter().flatten().collect();
    let aggregates = aggregate_flow_rows(&rows);
    Ok(FlowBatch { rows, aggregates })
}

/// Conditional means of `X_k` given that `P_k` exists, per `k` in row order.
pub fn conditional_expectation(rows: &[PathRow]) -> Vec<CondExpRow> {
    ks_in_order(rows.iter().map(|r| &r.k))
        .into_iter()
        .map(|k| {
            let at_k: Vec<&PathRow> = rows.iter().filter(|r| r.k == k).collect();
            let costs: Vec<f64> = at_k.iter().filter(|r| r.exists).filter_map(|r| r.x_k).collect();
            let limit = at_k[0].limit;
            let cond_mean = stats::mean(&costs);
            CondExpRow {
                k,
                trials: at_k.len(),
                n_exist: costs.len(),
                cond_mean,
                std_err: stats::std_error(&costs),
                limit,
                ratio: cond_mean.map(|m| m / limit),
                flagged: cond_mean.is_none(),
            }
        })
        .collect()
}

pub fn run_conditional_expectation(config: &ExperimentConfig) -> Result<Vec<CondExpRow>> {
    Ok(conditional_expectation(&run_paths_experiment(config)?.rows))
}

/// Structural checks on one trial: monotone costs, edge-disjointness,
/// `length <= 19 n cost`, and `S_k >= sum_{i<k} (W_(i)^s + W_(i)^t)`.
pub fn audit_trial(outcome: &TrialOutcome, n: usize) -> AuditCounts {
    let res = &outcome.result;
    let mut counts = AuditCounts { paths: res.records.len(), ..Default::default() };
    let mut used = HashSet::new();
    let mut incident_floor = 0.0;
    for (i, rec) in res.records.iter().enumerate() {
        let k = i + 1;
        if i > 0 && rec.cost < res.records[i - 1].cost {
            counts.monotonicity += 1;
        }
        for (u, v) in rec.edges() {
            if !used.insert((u.min(v), u.max(v))) {
                counts.disjointness += 1;
            }
        }
        if rec.length() as f64 > 19.0 * n as f64 * rec.cost {
            counts.length += 1;
        }
        if k >= 2 {
            incident_floor += outcome.source_weights[k - 2] + outcome.sink_weights[k - 2];
        }
        let s_k = res.prefix_sums[i];
        if s_k < incident_floor * (1.0 - 1e-12) {
            counts.lower_bound += 1;
        }
    }
    counts
}
