//! Brute-force oracles for small complete graphs.
#![allow(dead_code)]

use std::collections::BTreeSet;

use edpaths::WeightedCompleteGraph;

pub type Edge = (usize, usize);

pub fn edge(u: usize, v: usize) -> Edge {
    (u.min(v), u.max(v))
}

pub fn edge_set(vertices: &[usize]) -> BTreeSet<Edge> {
    vertices.windows(2).map(|w| edge(w[0], w[1])).collect()
}

/// Left-to-right weight sum, matching the library's accumulation order.
pub fn cost(g: &WeightedCompleteGraph, vertices: &[usize]) -> f64 {
    vertices
        .windows(2)
        .fold(0.0, |acc, w| acc + g.weight(w[0], w[1]).unwrap())
}

/// Every simple `s`-`t` path avoiding `blocked` edges.
pub fn simple_paths(n: usize, s: usize, t: usize, blocked: &BTreeSet<Edge>) -> Vec<Vec<usize>> {
    fn dfs(
        n: usize,
        t: usize,
        blocked: &BTreeSet<Edge>,
        path: &mut Vec<usize>,
        seen: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let u = *path.last().unwrap();
        if u == t {
            out.push(path.clone());
            return;
        }
        for v in 0..n {
            if seen[v] || blocked.contains(&edge(u, v)) {
                continue;
            }
            seen[v] = true;
            path.push(v);
            dfs(n, t, blocked, path, seen, out);
            path.pop();
            seen[v] = false;
        }
    }
    let mut out = Vec::new();
    let mut seen = vec![false; n];
    seen[s] = true;
    dfs(n, t, blocked, &mut vec![s], &mut seen, &mut out);
    out
}

/// Greedy extraction by exhaustive search: each round takes the cheapest
/// remaining simple path, lexicographically smallest among ties.
pub fn greedy_oracle(g: &WeightedCompleteGraph, k_max: usize) -> Vec<(Vec<usize>, f64)> {
    let (s, t) = (g.source(), g.sink());
    let mut blocked = BTreeSet::new();
    let mut found = Vec::new();
    for _ in 0..k_max {
        let best = simple_paths(g.n(), s, t, &blocked)
            .into_iter()
            .map(|p| {
                let c = cost(g, &p);
                (p, c)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        let Some((p, c)) = best else { break };
        blocked.extend(edge_set(&p));
        found.push((p, c));
    }
    found
}

/// Cheapest set of `k` (1 or 2) edge-disjoint simple `s`-`t` paths:
/// total cost and the union of their edges.
pub fn flow_oracle(g: &WeightedCompleteGraph, k: usize) -> Option<(f64, BTreeSet<Edge>)> {
    let paths: Vec<(Vec<usize>, f64, BTreeSet<Edge>)> = simple_paths(g.n(), g.source(), g.sink(), &BTreeSet::new())
        .into_iter()
        .map(|p| {
            let c = cost(g, &p);
            let e = edge_set(&p);
            (p, c, e)
        })
        .collect();
    match k {
        1 => paths
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(_, c, e)| (*c, e.clone())),
        2 => {
            let mut best: Option<(f64, BTreeSet<Edge>)> = None;
            for (i, a) in paths.iter().enumerate() {
                for b in &paths[i + 1..] {
                    if !a.2.is_disjoint(&b.2) {
                        continue;
                    }
                    let total = a.1 + b.1;
                    if best.as_ref().is_none_or(|(c, _)| total < *c) {
                        best = Some((total, a.2.union(&b.2).copied().collect()));
                    }
                }
            }
            best
        }
        _ => panic!("flow oracle supports k in {{1, 2}}"),
    }
}

/// `Pr(U_1 + ... + U_l <= a)` by the alternating-sum formula.
pub fn irwin_hall_cdf(l: u64, a: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    if a >= l as f64 {
        return 1.0;
    }
    let ln_fact: f64 = (2..=l).map(|i| (i as f64).ln()).sum();
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..=(a.floor() as u64) {
        let term = binom * (a - j as f64).powi(l as i32);
        sum += if j % 2 == 0 { term } else { -term };
        binom = binom * (l - j) as f64 / (j + 1) as f64;
    }
    (sum.ln() - ln_fact).exp()
}

/// Relative closeness for float sums taken in different orders.
pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}
