//! Radius of a shortest-path tree of order `d` in `K_n`.
//!
//! With `Exp(1)` weights, first-passage percolation from the root attaches
//! its `(i+1)`-th vertex after an extra `Exp(i(n-i))` delay, independently
//! of the past. [`radius_by_law`] samples that sum directly;
//! [`radius_by_growth`] grows the tree by Dijkstra on a fresh graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::dijkstra::{dense_dijkstra, Stop};
use crate::error::{Error, Result};
use crate::weights::{StorageMode, WeightModel, WeightedCompleteGraph};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SptRadiusSample {
    pub n: usize,
    pub d: usize,
    pub radius: f64,
}

fn check_order(n: usize, d: usize) -> Result<()> {
    if d < 2 || d > n {
        Err(Error::invalid(format!("tree order d must lie in [2, {n}], got {d}")))
    } else {
        Ok(())
    }
}

/// Rates `i(n-i)` for `i = 1..d-1`.
pub fn radius_rates(n: usize, d: usize) -> Result<Vec<f64>> {
    check_order(n, d)?;
    Ok((1..d).map(|i| (i * (n - i)) as f64).collect())
}

/// `E rad = sum_{i=1..d-1} 1 / (i(n-i))`.
pub fn radius_mean(n: usize, d: usize) -> Result<f64> {
    Ok(radius_rates(n, d)?.iter().map(|r| 1.0 / r).sum())
}

/// `Var rad = sum_{i=1..d-1} 1 / (i(n-i))^2`.
pub fn radius_variance(n: usize, d: usize) -> Result<f64> {
    Ok(radius_rates(n, d)?.iter().map(|r| 1.0 / (r * r)).sum())
}

pub fn radius_by_law_with<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<SptRadiusSample> {
    check_order(n, d)?;
    let radius = (1..d)
        .map(|i| {
            let z: f64 = rng.sample(Exp1);
            z / (i * (n - i)) as f64
        })
        .sum();
    Ok(SptRadiusSample { n, d, radius })
}

/// Radius as a sum of `d - 1` independent exponentials with rates `i(n-i)`.
pub fn radius_by_law(n: usize, d: usize, seed: u64) -> Result<SptRadiusSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    radius_by_law_with(n, d, &mut rng)
}

/// Attachment distances of the first `d` vertices settled from `root`,
/// starting with `0.0` for the root itself. Nondecreasing.
pub fn growth_distances(g: &WeightedCompleteGraph, root: usize, d: usize) -> Result<Vec<f64>> {
    check_order(g.n(), d)?;
    if root >= g.n() {
        return Err(Error::invalid(format!("root {root} out of range")));
    }
    let tree = dense_dijkstra(g.n(), root, Stop::AfterSettled(d), |u, v| g.live_weight(u, v));
    if tree.order.len() < d {
        return Err(Error::invalid(format!(
            "only {} vertices reachable from the root, need {d}",
            tree.order.len()
        )));
    }
    Ok(tree.order.iter().map(|&v| tree.dist[v]).collect())
}

/// Grows a shortest-path tree on a fresh `K_n` drawn from `seed` until it
/// has `d` vertices and returns the distance to the last one.
///
/// The radius law is exact only for [`WeightModel::Exponential1`].
pub fn radius_by_growth(model: WeightModel, n: usize, d: usize, seed: u64) -> Result<SptRadiusSample> {
    check_order(n, d)?;
    let g = WeightedCompleteGraph::generate(n, model, seed, StorageMode::Dense)?;
    let dist = growth_distances(&g, 0, d)?;
    Ok(SptRadiusSample { n, d, radius: dist[d - 1] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_two_is_the_cheapest_root_edge() {
        for seed in 0..10 {
            let g = WeightedCompleteGraph::generate(40, WeightModel::Exponential1, seed, StorageMode::Dense).unwrap();
            let min = g.sorted_incident_weights(0).unwrap()[0];
            assert_eq!(radius_by_growth(WeightModel::Exponential1, 40, 2, seed).unwrap().radius, min);
        }
    }

    #[test]
    fn full_order_is_the_eccentricity() {
        let g = WeightedCompleteGraph::generate(25, WeightModel::Uniform01, 3, StorageMode::Dense).unwrap();
        let dist = growth_distances(&g, 0, 25).unwrap();
        // Floyd-Warshall eccentricity of vertex 0
        let n = 25;
        let mut m = vec![vec![0.0; n]; n];
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    m[u][v] = g.weight(u, v).unwrap();
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if m[i][k] + m[k][j] < m[i][j] {
                        m[i][j] = m[i][k] + m[k][j];
                    }
                }
            }
        }
        let ecc = m[0].iter().cloned().fold(0.0, f64::max);
        assert!((dist[24] - ecc).abs() < 1e-12);
        assert!(dist.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn law_mean_for_order_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = 100_000;
        let mean = (0..m)
            .map(|_| radius_by_law_with(100, 2, &mut rng).unwrap().radius)
            .sum::<f64>()
            / m as f64;
        assert!((mean * 99.0 - 1.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn full_order_mean_formula() {
        let n = 10;
        let exact: f64 = (1..n).map(|i| 1.0 / (i * (n - i)) as f64).sum();
        assert!((radius_mean(n, n).unwrap() - exact).abs() < 1e-15);
    }

    #[test]
    fn sqrt_n_order_mean() {
        let (n, d) = (1000, 32);
        let exact = radius_mean(n, d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let m = 20_000;
        let mean = (0..m)
            .map(|_| radius_by_law_with(n, d, &mut rng).unwrap().radius)
            .sum::<f64>()
            / m as f64;
        assert!((mean / exact - 1.0).abs() < 0.10);
        assert!((mean / (32f64.ln() / 1000.0) - 1.0).abs() < 0.25);
    }

    #[test]
    fn order_out_of_range() {
        assert!(radius_by_law(10, 1, 0).is_err());
        assert!(radius_by_law(10, 11, 0).is_err());
        assert!(radius_by_growth(WeightModel::Exponential1, 10, 11, 0).is_err());
    }
}
