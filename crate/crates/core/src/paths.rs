//! Shortest `s`-`t` paths and the greedy sequence of successive
//! edge-disjoint cheapest paths `P_1, P_2, ...` with costs `X_1, X_2, ...`.

use serde::{Deserialize, Serialize};

use crate::dijkstra::{dense_dijkstra, Stop};
use crate::error::{Error, Result};
use crate::order_stats::{OrderStatContext, limit_value};
use crate::weights::{WeightModel, WeightedCompleteGraph};

/// One extracted path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    /// 1-based rank in the successive sequence.
    pub index: usize,
    pub vertices: Vec<usize>,
    pub cost: f64,
}

impl PathRecord {
    /// Number of edges.
    pub fn length(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Consecutive vertex pairs along the path.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Cost of a vertex sequence summed left to right. Errors on a deleted or invalid edge.
pub fn path_cost(g: &WeightedCompleteGraph, vertices: &[usize]) -> Result<f64> {
    let mut cost = 0.0;
    for w in vertices.windows(2) {
        if g.is_deleted(w[0], w[1])? {
            return Err(Error::InvalidEdge(w[0], w[1], g.n()));
        }
        cost += g.weight_unchecked(w[0], w[1]);
    }
    Ok(cost)
}

/// Minimum-cost simple path from `from` to `to` over live edges.
///
/// Among equal-cost optima the lexicographically smallest vertex sequence
/// is returned: the search runs backwards from `to`, so each vertex keeps
/// its smallest-id optimal next hop.
pub fn shortest_path(g: &WeightedCompleteGraph, from: usize, to: usize) -> Result<Option<PathRecord>> {
    let n = g.n();
    if from == to || from >= n || to >= n {
        return Err(Error::invalid(format!(
            "shortest path needs two distinct vertices below {n}, got {from} and {to}"
        )));
    }
    let tree = dense_dijkstra(n, to, Stop::AtVertex(from), |u, v| g.live_weight(u, v));
    let Some(mut vertices) = tree.path_to(from) else {
        return Ok(None);
    };
    vertices.reverse();
    let cost = vertices
        .windows(2)
        .map(|w| g.weight_unchecked(w[0], w[1]))
        .fold(0.0, |acc, w| acc + w);
    Ok(Some(PathRecord { index: 1, vertices, cost }))
}

/// Outcome of greedy successive extraction up to `k_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuccessiveResult {
    pub k_max: usize,
    /// Existing paths `P_1 .. P_m`; every `k > m` does not exist.
    pub records: Vec<PathRecord>,
    /// `prefix_sums[i] = S_{i+1}`.
    pub prefix_sums: Vec<f64>,
}

impl SuccessiveResult {
    pub fn exists(&self, k: usize) -> bool {
        k >= 1 && k <= self.records.len()
    }

    pub fn existing(&self) -> usize {
        self.records.len()
    }

    pub fn record(&self, k: usize) -> Option<&PathRecord> {
        if self.exists(k) {
            Some(&self.records[k - 1])
        } else {
            None
        }
    }

    /// `X_k`, if `P_k` exists.
    pub fn cost(&self, k: usize) -> Option<f64> {
        self.record(k).map(|r| r.cost)
    }

    /// `S_k`, if `P_1 .. P_k` all exist.
    pub fn prefix_sum(&self, k: usize) -> Option<f64> {
        if self.exists(k) {
            Some(self.prefix_sums[k - 1])
        } else {
            None
        }
    }
}

/// Extracts `P_1, ..., P_{k_max}` between the graph's terminals, deleting each
/// path's edges from `g` after it is found. Edges already deleted in `g`
/// act as prior constraints.
pub fn successive_paths(g: &mut WeightedCompleteGraph, k_max: usize) -> Result<SuccessiveResult> {
    let n = g.n();
    if k_max == 0 || k_max > n - 1 {
        return Err(Error::invalid(format!(
            "k_max must lie in [1, {}], got {k_max}",
            n - 1
        )));
    }
    let (s, t) = (g.source(), g.sink());
    let mut records = Vec::with_capacity(k_max);
    let mut prefix_sums = Vec::with_capacity(k_max);
    let mut total = 0.0;
    for k in 1..=k_max {
        let Some(mut path) = shortest_path(g, s, t)? else {
            break;
        };
        path.index = k;
        let edges: Vec<(usize, usize)> = path.edges().collect();
        g.delete_edges(&edges)?;
        total += path.cost;
        prefix_sums.push(total);
        records.push(path);
    }
    Ok(SuccessiveResult { k_max, records, prefix_sums })
}

/// One entry of [`ratio_statistics`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioEntry {
    pub k: usize,
    pub x_k: Option<f64>,
    /// `2 E W_(k) + ln n / n`.
    pub limit: f64,
    pub ratio: Option<f64>,
}

/// Compares each `X_k` with its limit value `2 E W_(k) + ln n / n`.
pub fn ratio_statistics(result: &SuccessiveResult, model: WeightModel, n: usize) -> Result<Vec<RatioEntry>> {
    let ctx = OrderStatContext::new(n, model)?;
    (1..=result.k_max)
        .map(|k| {
            let limit = limit_value(&ctx, k)?;
            let x_k = result.cost(k);
            Ok(RatioEntry { k, x_k, limit, ratio: x_k.map(|x| x / limit) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::StorageMode;
    use proptest::prelude::*;

    fn k3() -> WeightedCompleteGraph {
        WeightedCompleteGraph::from_edges(3, &[(0, 1, 0.5), (0, 2, 0.1), (2, 1, 0.2)]).unwrap()
    }

    #[test]
    fn k3_shortest_goes_through_middle() {
        let p = shortest_path(&k3(), 0, 1).unwrap().unwrap();
        assert_eq!(p.vertices, vec![0, 2, 1]);
        assert!((p.cost - 0.3).abs() < 1e-15);
        assert_eq!(p.length(), 2);
    }

    #[test]
    fn isolated_source_has_no_path() {
        let mut g = k3();
        g.delete_edges(&[(0, 2), (0, 1)]).unwrap();
        assert!(shortest_path(&g, 0, 1).unwrap().is_none());
    }

    #[test]
    fn same_endpoints_rejected() {
        assert!(matches!(shortest_path(&k3(), 1, 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn k3_successive() {
        let mut g = k3();
        let res = successive_paths(&mut g, 2).unwrap();
        assert_eq!(res.records.len(), 2);
        assert_eq!(res.records[1].vertices, vec![0, 1]);
        assert_eq!(res.cost(2), Some(0.5));
        assert_eq!(res.prefix_sum(2), Some(0.1 + 0.2 + 0.5));
        assert_eq!(g.deleted_count(), 3);
        // k_max = 3 is out of range for n = 3 (k_max <= n - 1)
        assert!(successive_paths(&mut k3(), 3).is_err());
    }

    #[test]
    fn k3_third_path_absent_under_prior_deletions() {
        // after P_1 and P_2 every edge is gone; a fresh run over the
        // depleted graph reports nothing
        let mut g = k3();
        successive_paths(&mut g, 2).unwrap();
        let res = successive_paths(&mut g, 2).unwrap();
        assert_eq!(res.existing(), 0);
        assert!(!res.exists(1));
        assert_eq!(res.prefix_sum(1), None);
    }

    #[test]
    fn lexicographic_tie_break() {
        // 0-2-1 and 0-3-1 both cost 2; direct edge costs 5
        let g = WeightedCompleteGraph::from_edges(
            4,
            &[(0, 1, 5.0), (0, 2, 1.0), (2, 1, 1.0), (0, 3, 1.0), (3, 1, 1.0), (2, 3, 9.0)],
        )
        .unwrap();
        assert_eq!(shortest_path(&g, 0, 1).unwrap().unwrap().vertices, vec![0, 2, 1]);
        let g = WeightedCompleteGraph::from_edges(
            4,
            &[(0, 1, 5.0), (0, 2, 2.0), (2, 1, 1.0), (0, 3, 1.0), (3, 1, 2.0), (2, 3, 1.0)],
        )
        .unwrap();
        // candidates of cost 3: 0-2-1, 0-3-1, 0-3-2-1; smallest sequence is 0-2-1
        assert_eq!(shortest_path(&g, 0, 1).unwrap().unwrap().vertices, vec![0, 2, 1]);
    }

    #[test]
    fn ratio_statistics_denominators() {
        let mut g = WeightedCompleteGraph::generate(1000, WeightModel::Uniform01, 5, StorageMode::Dense).unwrap();
        let res = successive_paths(&mut g, 1).unwrap();
        let stats = ratio_statistics(&res, WeightModel::Uniform01, 1000).unwrap();
        let expected = 2.0 / 1000.0 + 1000f64.ln() / 1000.0;
        assert!((stats[0].limit - expected).abs() < 1e-15);
        assert!((expected - 0.0089077552789821).abs() < 1e-12);
        assert_eq!(stats[0].ratio, Some(stats[0].x_k.unwrap() / expected));

        let mut g = WeightedCompleteGraph::generate(5, WeightModel::Exponential1, 5, StorageMode::Dense).unwrap();
        let res = successive_paths(&mut g, 2).unwrap();
        let stats = ratio_statistics(&res, WeightModel::Exponential1, 5).unwrap();
        let expected = 2.0 * (0.25 + 1.0 / 3.0) + 5f64.ln() / 5.0;
        assert!((stats[1].limit - expected).abs() < 1e-15);
        assert!((expected - 1.48855).abs() < 1e-5);
    }

    #[test]
    fn ratio_of_denominator_is_one() {
        let limit = 2.0 / 1000.0 + 1000f64.ln() / 1000.0;
        let res = SuccessiveResult {
            k_max: 1,
            records: vec![PathRecord { index: 1, vertices: vec![0, 1], cost: limit }],
            prefix_sums: vec![limit],
        };
        let stats = ratio_statistics(&res, WeightModel::Uniform01, 1000).unwrap();
        assert_eq!(stats[0].ratio, Some(1.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn successive_paths_invariants(seed in any::<u64>(), half in 2usize..12, exp in any::<bool>()) {
            let n = 2 * half;
            let model = if exp { WeightModel::Exponential1 } else { WeightModel::Uniform01 };
            let mut g = WeightedCompleteGraph::generate(n, model, seed, StorageMode::Dense).unwrap();
            let pristine = g.clone();
            let res = successive_paths(&mut g, n - 1).unwrap();
            // existence floor
            prop_assert!(res.existing() >= n / 2);
            let mut seen = std::collections::HashSet::new();
            let mut prev = 0.0;
            for (i, rec) in res.records.iter().enumerate() {
                prop_assert_eq!(rec.vertices[0], 0);
                prop_assert_eq!(*rec.vertices.last().unwrap(), 1);
                let distinct: std::collections::HashSet<_> = rec.vertices.iter().collect();
                prop_assert_eq!(distinct.len(), rec.vertices.len());
                prop_assert!(rec.cost >= prev);
                prev = rec.cost;
                prop_assert_eq!(rec.cost, path_cost(&pristine, &rec.vertices).unwrap());
                for (u, v) in rec.edges() {
                    prop_assert!(seen.insert((u.min(v), u.max(v))));
                }
                let before = if i == 0 { 0.0 } else { res.prefix_sums[i - 1] };
                prop_assert!((res.prefix_sums[i] - before - rec.cost).abs() <= 1e-12 * res.prefix_sums[i]);
            }
            prop_assert_eq!(g.deleted_count(), seen.len());
        }
    }
}
