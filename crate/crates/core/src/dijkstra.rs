//! Array-based Dijkstra for dense graphs: `O(n^2)` per run, no heap.
//!
//! Ties are broken deterministically. Among tentative vertices with equal
//! distance the smallest id is settled first, and among equal-cost
//! predecessors the smallest id wins.

pub(crate) const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Stop {
    /// Stop right after this vertex is settled.
    AtVertex(usize),
    /// Stop once this many vertices (source included) are settled.
    AfterSettled(usize),
}

#[derive(Clone, Debug)]
pub(crate) struct ShortestPathTree {
    pub dist: Vec<f64>,
    pub pred: Vec<usize>,
    pub settled: Vec<bool>,
    /// Vertices in the order they were settled; distances along it are nondecreasing.
    pub order: Vec<usize>,
}

impl ShortestPathTree {
    /// Vertex sequence from the source to `v` (source first).
    pub fn path_to(&self, v: usize) -> Option<Vec<usize>> {
        if !self.settled[v] {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while self.pred[cur] != NONE {
            cur = self.pred[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }
}

/// Runs Dijkstra from `source` over the arcs reported by `arc(u, v)`
/// (`None` for a missing arc). Arc costs must be nonnegative.
pub(crate) fn dense_dijkstra<F>(n: usize, source: usize, stop: Stop, mut arc: F) -> ShortestPathTree
where
    F: FnMut(usize, usize) -> Option<f64>,
{
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NONE; n];
    let mut settled = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut remaining: Vec<usize> = (0..n).collect();
    dist[source] = 0.0;

    while !remaining.is_empty() {
        let mut best_pos = NONE;
        let mut best = NONE;
        let mut best_dist = f64::INFINITY;
        for (pos, &v) in remaining.iter().enumerate() {
            let d = dist[v];
            if d < best_dist || (d == best_dist && d.is_finite() && v < best) {
                best_pos = pos;
                best = v;
                best_dist = d;
            }
        }
        if best_pos == NONE {
            break;
        }
        remaining.swap_remove(best_pos);
        settled[best] = true;
        order.push(best);
        match stop {
            Stop::AtVertex(target) if target == best => break,
            Stop::AfterSettled(count) if order.len() >= count => break,
            _ => {}
        }
        for &v in &remaining {
            if let Some(cost) = arc(best, v) {
                let cand = best_dist + cost;
                if cand < dist[v] || (cand == dist[v] && best < pred[v]) {
                    dist[v] = cand;
                    pred[v] = best;
                }
            }
        }
    }

    ShortestPathTree { dist, pred, settled, order }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_graph() {
        // 0 -1- 1 -1- 2, plus a direct 0-2 arc of cost 3
        let cost = |u: usize, v: usize| -> Option<f64> {
            match (u.min(v), u.max(v)) {
                (0, 1) | (1, 2) => Some(1.0),
                (0, 2) => Some(3.0),
                _ => None,
            }
        };
        let tree = dense_dijkstra(3, 0, Stop::AfterSettled(usize::MAX), cost);
        assert_eq!(tree.dist, vec![0.0, 1.0, 2.0]);
        assert_eq!(tree.path_to(2).unwrap(), vec![0, 1, 2]);
        assert_eq!(tree.order, vec![0, 1, 2]);
    }

    #[test]
    fn equal_cost_prefers_smaller_predecessor() {
        // 0 -> {1, 2} cost 1 each, {1, 2} -> 3 cost 1 each
        let cost = |u: usize, v: usize| -> Option<f64> {
            match (u.min(v), u.max(v)) {
                (0, 1) | (0, 2) | (1, 3) | (2, 3) => Some(1.0),
                _ => None,
            }
        };
        let tree = dense_dijkstra(4, 0, Stop::AfterSettled(usize::MAX), cost);
        assert_eq!(tree.path_to(3).unwrap(), vec![0, 1, 3]);
    }

    #[test]
    fn unreachable_and_early_stop() {
        let tree = dense_dijkstra(3, 0, Stop::AfterSettled(usize::MAX), |u, v| if u.min(v) == 0 && u.max(v) == 1 { Some(0.5) } else { None });
        assert!(!tree.settled[2]);
        assert!(tree.path_to(2).is_none());
        let tree = dense_dijkstra(5, 0, Stop::AfterSettled(2), |_, _| Some(1.0));
        assert_eq!(tree.order.len(), 2);
    }
}
