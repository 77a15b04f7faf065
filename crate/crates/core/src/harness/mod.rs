//! Seeded Monte Carlo experiments over many independent graphs, plus
//! aggregation and persistence of their results.

pub mod emit;
pub mod experiment;

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::weights::{StorageMode, WeightModel};

pub use emit::{emit_condexp, emit_flows, emit_paths, OutputFormat};
pub use experiment::{
    aggregate_rows, audit_trial, conditional_expectation, paths_batch, run_conditional_expectation,
    run_flow_experiment, run_paths_experiment, run_paths_trials, AggregateRow, AuditCounts, CondExpRow,
    FlowBatch, FlowRow, PathRow, PathsBatch, TrialOutcome,
};

/// Which ranks `k` are recorded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum KGrid {
    /// `{1, 2, 4, ...} ∪ {floor(n/2), n - 1}`, clipped to `k_max`.
    #[default]
    Geometric,
    /// Every `k` in `1..=k_max`.
    All,
    List(Vec<usize>),
}

impl KGrid {
    /// Sorted, deduplicated ranks within `[1, k_max]`.
    pub fn resolve(&self, n: usize, k_max: usize) -> Result<Vec<usize>> {
        let mut ks = match self {
            KGrid::All => (1..=k_max).collect(),
            KGrid::Geometric => {
                let mut ks: Vec<usize> = std::iter::successors(Some(1usize), |k| Some(k * 2))
                    .take_while(|&k| k <= k_max)
                    .collect();
                ks.extend([n / 2, n - 1].into_iter().filter(|&k| k >= 1 && k <= k_max));
                ks
            }
            KGrid::List(list) => {
                if let Some(&bad) = list.iter().find(|&&k| k == 0 || k > k_max) {
                    return Err(Error::invalid(format!("k-grid entry {bad} outside [1, {k_max}]")));
                }
                list.clone()
            }
        };
        ks.sort_unstable();
        ks.dedup();
        if ks.is_empty() {
            return Err(Error::invalid("k-grid is empty"));
        }
        Ok(ks)
    }
}

impl FromStr for KGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(KGrid::All),
            "geometric" | "default" => Ok(KGrid::Geometric),
            list => list
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::invalid(format!("bad k-grid entry '{tok}'")))
                })
                .collect::<Result<Vec<_>>>()
                .map(KGrid::List),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k_max: usize,
    pub model: WeightModel,
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; `0` uses every available core.
    pub workers: usize,
    pub k_grid: KGrid,
    pub storage: StorageMode,
}

impl ExperimentConfig {
    pub fn new(n: usize, k_max: usize, model: WeightModel, trials: usize, seed: u64) -> Self {
        ExperimentConfig {
            n,
            k_max,
            model,
            trials,
            seed,
            workers: 0,
            k_grid: KGrid::Geometric,
            storage: StorageMode::Dense,
        }
    }

    pub fn with_grid(mut self, grid: KGrid) -> Self {
        self.k_grid = grid;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    /// Checks the config and returns the resolved k-grid.
    pub fn validate(&self) -> Result<Vec<usize>> {
        if self.n < 2 {
            return Err(Error::invalid(format!("n must be at least 2, got {}", self.n)));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.k_max == 0 || self.k_max > self.n - 1 {
            return Err(Error::invalid(format!(
                "k_max must lie in [1, {}], got {}",
                self.n - 1,
                self.k_max
            )));
        }
        self.k_grid.resolve(self.n, self.k_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_grid() {
        assert_eq!(KGrid::Geometric.resolve(20, 19).unwrap(), vec![1, 2, 4, 8, 10, 16, 19]);
        assert_eq!(KGrid::Geometric.resolve(20, 5).unwrap(), vec![1, 2, 4]);
        assert_eq!(KGrid::All.resolve(10, 3).unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn parse_grid() {
        assert_eq!("1, 5,25".parse::<KGrid>().unwrap(), KGrid::List(vec![1, 5, 25]));
        assert_eq!("all".parse::<KGrid>().unwrap(), KGrid::All);
        assert!("1,x".parse::<KGrid>().is_err());
        assert!(KGrid::List(vec![0]).resolve(10, 5).is_err());
        assert!(KGrid::List(vec![6]).resolve(10, 5).is_err());
    }

    #[test]
    fn config_validation() {
        let c = ExperimentConfig::new(6, 3, WeightModel::Uniform01, 1, 0);
        assert!(c.validate().is_ok());
        assert!(ExperimentConfig::new(6, 6, WeightModel::Uniform01, 1, 0).validate().is_err());
        assert!(ExperimentConfig::new(6, 3, WeightModel::Uniform01, 0, 0).validate().is_err());
    }
}
