//! Minimum-cost `k`-flow between the terminals of a weighted `K_n` with unit
//! edge capacities, i.e. `k` edge-disjoint `s`-`t` paths of least total cost.
//!
//! Successive shortest augmenting paths with node potentials. Each
//! undirected edge `{u, v}` is in one of three states: unused, carrying
//! `u -> v`, or carrying `v -> u`. An unused edge offers arcs both ways at
//! cost `w`; a used edge offers only the cancelling arc, at cost `-w`.

use serde::{Deserialize, Serialize};

use crate::dijkstra::{dense_dijkstra, Stop};
use crate::error::{Error, Result};
use crate::order_stats::{flow_limit_value, OrderStatContext};
use crate::paths::{path_cost, PathRecord};
use crate::weights::{WeightModel, WeightedCompleteGraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowResult {
    /// Requested flow value.
    pub k: usize,
    /// `F_k`, the sum of the decomposed path costs (the max-flow cost when infeasible).
    pub total_cost: f64,
    /// Edge-disjoint `s`-`t` paths, ordered by cost then vertex sequence.
    pub paths: Vec<PathRecord>,
    pub feasible: bool,
}

impl FlowResult {
    pub fn value(&self) -> usize {
        self.paths.len()
    }
}

/// Residual-network state of a successive-shortest-path solve.
pub struct FlowSolver<'g> {
    g: &'g WeightedCompleteGraph,
    n: usize,
    s: usize,
    t: usize,
    /// `flow[u * n + v]` is set when edge `{u, v}` carries one unit `u -> v`.
    flow: Vec<bool>,
    potential: Vec<f64>,
    /// Actual cost of each augmenting path, in augmentation order.
    marginals: Vec<f64>,
    exhausted: bool,
}

impl<'g> FlowSolver<'g> {
    /// Starts from the zero flow between `g`'s terminals. Deleted edges are treated as absent.
    pub fn new(g: &'g WeightedCompleteGraph) -> Self {
        let n = g.n();
        FlowSolver {
            g,
            n,
            s: g.source(),
            t: g.sink(),
            flow: vec![false; n * n],
            potential: vec![0.0; n],
            marginals: Vec::new(),
            exhausted: false,
        }
    }

    pub fn value(&self) -> usize {
        self.marginals.len()
    }

    /// Costs of the augmenting paths so far; nondecreasing.
    pub fn marginals(&self) -> &[f64] {
        &self.marginals
    }

    pub fn potentials(&self) -> &[f64] {
        &self.potential
    }

    #[inline]
    fn carries(&self, u: usize, v: usize) -> bool {
        self.flow[u * self.n + v]
    }

    /// Cost of residual arc `u -> v`, if present.
    #[inline]
    fn residual_cost(&self, u: usize, v: usize) -> Option<f64> {
        if self.carries(v, u) {
            Some(-self.g.weight_unchecked(u, v))
        } else if self.carries(u, v) {
            None
        } else {
            self.g.live_weight(u, v)
        }
    }

    /// Pushes one more unit along a cheapest augmenting path. Returns `false`
    /// once `t` is unreachable in the residual network.
    pub fn augment(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        let tree = {
            let this = &*self;
            dense_dijkstra(this.n, this.s, Stop::AtVertex(this.t), |u, v| {
                this.residual_cost(u, v)
                    .map(|c| (c + this.potential[u] - this.potential[v]).max(0.0))
            })
        };
        let Some(path) = tree.path_to(self.t) else {
            self.exhausted = true;
            return false;
        };
        let reach = tree.dist[self.t];
        let mut cost = 0.0;
        for w in path.windows(2) {
            let (u, v) = (w[0], w[1]);
            let weight = self.g.weight_unchecked(u, v);
            if self.carries(v, u) {
                self.flow[v * self.n + u] = false;
                cost -= weight;
            } else {
                self.flow[u * self.n + v] = true;
                cost += weight;
            }
        }
        for v in 0..self.n {
            self.potential[v] += if tree.settled[v] { tree.dist[v] } else { reach };
        }
        self.marginals.push(cost);
        true
    }

    /// Augments until the flow value reaches `k` or no augmenting path remains.
    pub fn augment_to(&mut self, k: usize) -> usize {
        while self.value() < k && self.augment() {}
        self.value()
    }

    /// Splits the current flow into edge-disjoint simple `s`-`t` paths.
    ///
    /// Each path follows the smallest-id outgoing flow arc at every vertex.
    /// Leftover flow or a revisited vertex means the flow holds a cycle,
    /// which is reported as a consistency error.
    pub fn decompose(&self) -> Result<Vec<PathRecord>> {
        let n = self.n;
        let mut left = self.flow.clone();
        let mut paths = Vec::with_capacity(self.value());
        for _ in 0..self.value() {
            let mut vertices = vec![self.s];
            let mut on_path = vec![false; n];
            on_path[self.s] = true;
            let mut cur = self.s;
            while cur != self.t {
                let next = (0..n)
                    .find(|&v| left[cur * n + v])
                    .ok_or_else(|| Error::Consistency(format!("flow stops at vertex {cur}")))?;
                left[cur * n + next] = false;
                if on_path[next] {
                    return Err(Error::Consistency(format!(
                        "flow decomposition revisits vertex {next}"
                    )));
                }
                on_path[next] = true;
                vertices.push(next);
                cur = next;
            }
            let cost = path_cost(self.g, &vertices)?;
            paths.push(PathRecord { index: 0, vertices, cost });
        }
        if left.iter().any(|&f| f) {
            return Err(Error::Consistency("flow contains a cycle".into()));
        }
        paths.sort_by(|a, b| a.cost.total_cmp(&b.cost).then_with(|| a.vertices.cmp(&b.vertices)));
        for (i, p) in paths.iter_mut().enumerate() {
            p.index = i + 1;
        }
        Ok(paths)
    }

    /// Decomposes the current flow into a result for requested value `k`.
    pub fn result(&self, k: usize) -> Result<FlowResult> {
        let paths = self.decompose()?;
        let total_cost = paths.iter().fold(0.0, |acc, p| acc + p.cost);
        Ok(FlowResult { k, total_cost, feasible: paths.len() >= k, paths })
    }

    /// Checks optimality conditions under the current potentials: every
    /// residual arc has nonnegative reduced cost, and every arc carrying flow
    /// has nonpositive reduced cost.
    pub fn audit_slackness(&self, tol: f64) -> Result<SlacknessAudit> {
        let mut audit = SlacknessAudit {
            min_residual_reduced_cost: f64::INFINITY,
            max_flow_reduced_cost: f64::NEG_INFINITY,
        };
        for u in 0..self.n {
            for v in 0..self.n {
                if u == v {
                    continue;
                }
                let reduced = |c: f64| c + self.potential[u] - self.potential[v];
                if self.carries(u, v) {
                    let r = reduced(self.g.weight_unchecked(u, v));
                    audit.max_flow_reduced_cost = audit.max_flow_reduced_cost.max(r);
                } else if let Some(c) = self.residual_cost(u, v) {
                    let r = reduced(c);
                    audit.min_residual_reduced_cost = audit.min_residual_reduced_cost.min(r);
                }
            }
        }
        if audit.min_residual_reduced_cost < -tol || audit.max_flow_reduced_cost > tol {
            return Err(Error::Consistency(format!(
                "slackness violated: min residual reduced cost {}, max flow reduced cost {}",
                audit.min_residual_reduced_cost, audit.max_flow_reduced_cost
            )));
        }
        Ok(audit)
    }

    /// True if some edge carries flow in both directions.
    pub fn has_two_way_flow(&self) -> bool {
        (0..self.n).any(|u| (u + 1..self.n).any(|v| self.carries(u, v) && self.carries(v, u)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlacknessAudit {
    pub min_residual_reduced_cost: f64,
    pub max_flow_reduced_cost: f64,
}

fn check_k(g: &WeightedCompleteGraph, k: usize) -> Result<()> {
    if k == 0 || k > g.n() - 1 {
        Err(Error::invalid(format!("flow value k must lie in [1, {}], got {k}", g.n() - 1)))
    } else {
        Ok(())
    }
}

/// Exact minimum-cost `k`-flow. Reports `feasible = false` (with the max
/// flow decomposed) when fewer than `k` edge-disjoint paths exist.
pub fn min_cost_k_flow(g: &WeightedCompleteGraph, k: usize) -> Result<FlowResult> {
    check_k(g, k)?;
    let mut solver = FlowSolver::new(g);
    solver.augment_to(k);
    solver.result(k)
}

/// Optimal flows for each requested value, from a single solve. `ks` must be ascending.
pub fn min_cost_flow_sequence(g: &WeightedCompleteGraph, ks: &[usize]) -> Result<Vec<FlowResult>> {
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("flow values must be strictly ascending"));
    }
    for &k in ks {
        check_k(g, k)?;
    }
    let mut solver = FlowSolver::new(g);
    ks.iter()
        .map(|&k| {
            solver.augment_to(k);
            solver.result(k)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowRatio {
    pub f_k: f64,
    /// `sum_{i=1..k} (2 E W_(i) + ln n / n)`.
    pub limit: f64,
    pub ratio: f64,
}

pub fn flow_ratio_statistics(result: &FlowResult, model: WeightModel, n: usize) -> Result<FlowRatio> {
    if !result.feasible {
        return Err(Error::Infeasible { requested: result.k, max_flow: result.value() });
    }
    let limit = flow_limit_value(&OrderStatContext::new(n, model)?, result.k)?;
    Ok(FlowRatio { f_k: result.total_cost, limit, ratio: result.total_cost / limit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{shortest_path, successive_paths};
    use crate::weights::StorageMode;
    use proptest::prelude::*;

    fn crafted_k4() -> WeightedCompleteGraph {
        WeightedCompleteGraph::from_edges(
            4,
            &[(0, 2, 1.0), (2, 1, 10.0), (2, 3, 1.0), (3, 1, 1.0), (0, 3, 10.0), (0, 1, 100.0)],
        )
        .unwrap()
    }

    #[test]
    fn crafted_instance_beats_greedy() {
        let g = crafted_k4();
        let mut greedy = g.clone();
        let succ = successive_paths(&mut greedy, 2).unwrap();
        // P_1 = 0-2-3-1 (3) leaves only the direct edge: S_2 = 3 + 100
        assert_eq!(succ.prefix_sum(2), Some(103.0));
        let flow = min_cost_k_flow(&g, 2).unwrap();
        assert!(flow.feasible);
        assert_eq!(flow.total_cost, 22.0);
        let vs: Vec<_> = flow.paths.iter().map(|p| p.vertices.clone()).collect();
        assert_eq!(vs, vec![vec![0, 2, 1], vec![0, 3, 1]]);
    }

    #[test]
    fn one_flow_is_the_shortest_path() {
        for seed in 0..20 {
            let g = WeightedCompleteGraph::generate(30, WeightModel::Exponential1, seed, StorageMode::Dense).unwrap();
            let flow = min_cost_k_flow(&g, 1).unwrap();
            let sp = shortest_path(&g, 0, 1).unwrap().unwrap();
            assert_eq!(flow.total_cost, sp.cost);
            assert_eq!(flow.paths[0].vertices, sp.vertices);
        }
    }

    #[test]
    fn infeasible_when_source_is_cut_off() {
        let mut g = WeightedCompleteGraph::generate(5, WeightModel::Uniform01, 1, StorageMode::Dense).unwrap();
        g.delete_edges(&[(0, 2), (0, 3)]).unwrap();
        let flow = min_cost_k_flow(&g, 3).unwrap();
        assert!(!flow.feasible);
        assert_eq!(flow.value(), 2);
        assert!(matches!(
            flow_ratio_statistics(&flow, WeightModel::Uniform01, 5),
            Err(Error::Infeasible { requested: 3, max_flow: 2 })
        ));
    }

    #[test]
    fn full_flow_on_complete_graph() {
        let g = WeightedCompleteGraph::generate(9, WeightModel::Uniform01, 4, StorageMode::Dense).unwrap();
        let flow = min_cost_k_flow(&g, 8).unwrap();
        assert!(flow.feasible);
        assert_eq!(flow.value(), 8);
    }

    #[test]
    fn rejects_bad_k() {
        let g = crafted_k4();
        assert!(min_cost_k_flow(&g, 0).is_err());
        assert!(min_cost_k_flow(&g, 4).is_err());
        assert!(min_cost_flow_sequence(&g, &[2, 1]).is_err());
    }

    #[test]
    fn flow_ratio_uses_summed_limits() {
        let g = crafted_k4();
        let flow = min_cost_k_flow(&g, 1).unwrap();
        let r = flow_ratio_statistics(&flow, WeightModel::Uniform01, 4).unwrap();
        let lim = 2.0 / 4.0 + 4f64.ln() / 4.0;
        assert!((r.limit - lim).abs() < 1e-15);
        assert_eq!(r.ratio, flow.total_cost / r.limit);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn solver_invariants(seed in any::<u64>(), n in 4usize..24, exp in any::<bool>()) {
            let model = if exp { WeightModel::Exponential1 } else { WeightModel::Uniform01 };
            let g = WeightedCompleteGraph::generate(n, model, seed, StorageMode::Dense).unwrap();
            let mut greedy = g.clone();
            let succ = successive_paths(&mut greedy, n - 1).unwrap();
            let mut solver = FlowSolver::new(&g);
            let mut prev_total = 0.0;
            for k in 1..n {
                if !solver.augment() {
                    break;
                }
                prop_assert!(!solver.has_two_way_flow());
                let res = solver.result(k).unwrap();
                prop_assert_eq!(res.paths.len(), k);
                let mut used = std::collections::HashSet::new();
                for p in &res.paths {
                    for w in p.vertices.windows(2) {
                        prop_assert!(used.insert((w[0].min(w[1]), w[0].max(w[1]))));
                    }
                }
                if let Some(s_k) = succ.prefix_sum(k) {
                    prop_assert!(res.total_cost <= s_k * (1.0 + 1e-12));
                }
                if k == 1 {
                    prop_assert_eq!(res.total_cost, succ.cost(1).unwrap());
                }
                let tol = 1e-9 * (1.0 + res.total_cost);
                prop_assert!((res.total_cost - prev_total - solver.marginals()[k - 1]).abs() <= tol);
                prev_total = res.total_cost;
                solver.audit_slackness(tol).unwrap();
            }
            for w in solver.marginals().windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-9);
            }
        }
    }
}
