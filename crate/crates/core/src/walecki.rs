//! Walecki's decomposition of `K_{2r}` into `r` edge-disjoint Hamilton paths
//! with `2r` distinct endpoints, and the saturating family of `n/2`
//! edge-disjoint `s`-`t` paths built from it.
//!
//! Path `j` is the zig-zag `j, j+1, j-1, j+2, j-2, ..., j+r` taken mod `2r`.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonDecomposition {
    pub r: usize,
    pub paths: Vec<Vec<usize>>,
}

pub fn walecki_decompose(r: usize) -> Result<HamiltonDecomposition> {
    if r == 0 {
        return Err(Error::invalid("Walecki decomposition needs r >= 1"));
    }
    let m = 2 * r;
    let paths = (0..r)
        .map(|j| {
            let mut p = Vec::with_capacity(m);
            p.push(j);
            for i in 1..r {
                p.push((j + i) % m);
                p.push((j + m - i) % m);
            }
            p.push((j + r) % m);
            p
        })
        .collect();
    Ok(HamiltonDecomposition { r, paths })
}

impl HamiltonDecomposition {
    /// Checks that each path is Hamiltonian, the paths partition the edges of
    /// `K_{2r}`, and all `2r` endpoints are distinct.
    pub fn verify(&self) -> Result<()> {
        let m = 2 * self.r;
        if self.paths.len() != self.r {
            return Err(Error::Consistency(format!("{} paths, expected {}", self.paths.len(), self.r)));
        }
        let mut edges = HashSet::new();
        let mut ends = HashSet::new();
        for p in &self.paths {
            let visited: HashSet<_> = p.iter().copied().collect();
            if p.len() != m || visited.len() != m || p.iter().any(|&v| v >= m) {
                return Err(Error::Consistency(format!("path {p:?} is not Hamiltonian on {m} vertices")));
            }
            for w in p.windows(2) {
                if !edges.insert((w[0].min(w[1]), w[0].max(w[1]))) {
                    return Err(Error::Consistency(format!("edge {{{}, {}}} used twice", w[0], w[1])));
                }
            }
            ends.insert(p[0]);
            ends.insert(p[m - 1]);
        }
        if edges.len() != m * (m - 1) / 2 {
            return Err(Error::Consistency(format!("{} edges covered, expected {}", edges.len(), m * (m - 1) / 2)));
        }
        if ends.len() != m {
            return Err(Error::Consistency("endpoints are not all distinct".into()));
        }
        Ok(())
    }
}

/// `n/2` edge-disjoint `s`-`t` paths in `K_n` (even `n`) whose removal separates `s` from `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturatingFamily {
    pub n: usize,
    pub s: usize,
    pub t: usize,
    /// Hamilton-path routes first, the bare edge `{s, t}` last.
    pub st_paths: Vec<Vec<usize>>,
}

pub fn saturating_family(n: usize, s: usize, t: usize) -> Result<SaturatingFamily> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::invalid(format!("saturating family needs an even n >= 4, got {n}")));
    }
    if s == t || s >= n || t >= n {
        return Err(Error::invalid(format!("terminals must be distinct vertices below {n}")));
    }
    let others: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
    let decomposition = walecki_decompose((n - 2) / 2)?;
    let mut st_paths: Vec<Vec<usize>> = decomposition
        .paths
        .iter()
        .map(|p| {
            let mut route = Vec::with_capacity(n);
            route.push(s);
            route.extend(p.iter().map(|&i| others[i]));
            route.push(t);
            route
        })
        .collect();
    st_paths.push(vec![s, t]);
    Ok(SaturatingFamily { n, s, t, st_paths })
}

impl SaturatingFamily {
    /// Every edge used by the family, as `(u, v)` pairs in path order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.st_paths
            .iter()
            .flat_map(|p| p.windows(2).map(|w| (w[0], w[1])))
            .collect()
    }

    /// Edges of `K_n` not used by the family, each as `(min, max)`.
    pub fn residual_edges(&self) -> Vec<(usize, usize)> {
        let used: HashSet<(usize, usize)> = self
            .edges()
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !used.contains(&(u, v)) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Whether `s` and `t` lie in different components after removing the family.
    pub fn residual_separates(&self) -> bool {
        let mut adj = vec![Vec::new(); self.n];
        for (u, v) in self.residual_edges() {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([self.s]);
        seen[self.s] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        !seen[self.t]
    }

    /// Checks pairwise edge-disjointness, the path count, simplicity, the
    /// bare `{s,t}` edge, and residual separation.
    pub fn verify(&self) -> Result<()> {
        if self.st_paths.len() != self.n / 2 {
            return Err(Error::Consistency(format!("{} paths, expected {}", self.st_paths.len(), self.n / 2)));
        }
        let mut used = HashSet::new();
        for p in &self.st_paths {
            if p.first() != Some(&self.s) || p.last() != Some(&self.t) {
                return Err(Error::Consistency(format!("{p:?} is not an s-t path")));
            }
            let distinct: HashSet<_> = p.iter().collect();
            if distinct.len() != p.len() {
                return Err(Error::Consistency(format!("{p:?} repeats a vertex")));
            }
            for w in p.windows(2) {
                if !used.insert((w[0].min(w[1]), w[0].max(w[1]))) {
                    return Err(Error::Consistency(format!("edge {{{}, {}}} used twice", w[0], w[1])));
                }
            }
        }
        if !self.st_paths.iter().any(|p| p.len() == 2) {
            return Err(Error::Consistency("the bare s-t edge is missing".into()));
        }
        if !self.residual_separates() {
            return Err(Error::Consistency("residual graph still connects s and t".into()));
        }
        Ok(())
    }
}
