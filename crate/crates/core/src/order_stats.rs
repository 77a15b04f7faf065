//! Order statistics `W_(1) < ... < W_(n-1)` of the `n - 1` edge weights at a vertex.
//!
//! The exponential sampler uses the spacings representation
//! `W_(k) = Z_{n-1} + ... + Z_{n-k}` with independent `Z_i ~ Exp(i)`.
//! The uniform sampler pushes that vector through `w -> 1 - e^{-w}`, which
//! is increasing and therefore yields the exact joint law of uniform order
//! statistics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::WeightModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderStatContext {
    n: usize,
    model: WeightModel,
}

impl OrderStatContext {
    /// Statistics over the `n - 1` weights at one vertex of `K_n`.
    pub fn new(n: usize, model: WeightModel) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("need n >= 2, got {n}")));
        }
        Ok(OrderStatContext { n, model })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> WeightModel {
        self.model
    }

    /// Number of draws, `n - 1`.
    pub fn draws(&self) -> usize {
        self.n - 1
    }

    fn check_rank(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n - 1 {
            Err(Error::invalid(format!(
                "rank k must lie in [1, {}], got {k}",
                self.n - 1
            )))
        } else {
            Ok(())
        }
    }
}

/// `E W_(k)`: `k / n` for uniform, `sum_{i=1..k} 1/(n-i)` for exponential.
pub fn mean_order_stat(ctx: &OrderStatContext, k: usize) -> Result<f64> {
    ctx.check_rank(k)?;
    let n = ctx.n;
    Ok(match ctx.model {
        WeightModel::Uniform01 => k as f64 / n as f64,
        WeightModel::Exponential1 => (1..=k).map(|i| 1.0 / (n - i) as f64).sum(),
    })
}

/// All means `E W_(1..n-1)` at once (`O(n)`).
pub fn mean_order_stats(ctx: &OrderStatContext) -> Vec<f64> {
    let n = ctx.n;
    match ctx.model {
        WeightModel::Uniform01 => (1..n).map(|k| k as f64 / n as f64).collect(),
        WeightModel::Exponential1 => (1..n)
            .scan(0.0, |acc, i| {
                *acc += 1.0 / (n - i) as f64;
                Some(*acc)
            })
            .collect(),
    }
}

/// Limit value of the `k`-th successive path cost: `2 E W_(k) + ln n / n`.
pub fn limit_value(ctx: &OrderStatContext, k: usize) -> Result<f64> {
    let n = ctx.n as f64;
    Ok(2.0 * mean_order_stat(ctx, k)? + n.ln() / n)
}

/// Limit value of the min-cost `k`-flow: `sum_{i=1..k} (2 E W_(i) + ln n / n)`.
pub fn flow_limit_value(ctx: &OrderStatContext, k: usize) -> Result<f64> {
    ctx.check_rank(k)?;
    (1..=k).map(|i| limit_value(ctx, i)).sum()
}

/// Exponential order statistics of `n - 1` i.i.d. `Exp(1)` draws via spacings.
fn exponential_order_stats<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut acc = 0.0;
    (1..n)
        .map(|i| {
            let z: f64 = rng.sample(Exp1);
            acc += z / (n - i) as f64;
            acc
        })
        .collect()
}

/// One vector `W_(1..n-1)` drawn from `rng`.
pub fn sample_order_stats_with<R: Rng + ?Sized>(ctx: &OrderStatContext, rng: &mut R) -> Vec<f64> {
    let w = exponential_order_stats(ctx.n, rng);
    match ctx.model {
        WeightModel::Exponential1 => w,
        WeightModel::Uniform01 => w.into_iter().map(|x| -(-x).exp_m1()).collect(),
    }
}

/// One vector `W_(1..n-1)` from a fresh stream seeded with `seed`.
pub fn sample_order_stats(ctx: &OrderStatContext, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_order_stats_with(ctx, &mut rng)
}

/// Uniform and exponential order statistics sharing one draw, coupled by
/// `W = -ln(1 - U)`. Returns `(uniform, exponential)`.
pub fn sample_coupled<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 2 {
        return Err(Error::invalid(format!("need n >= 2, got {n}")));
    }
    let w = exponential_order_stats(n, rng);
    let u = w.iter().map(|&x| -(-x).exp_m1()).collect();
    Ok((u, w))
}

/// Empirical violation rates of `W_(k) / E W_(k)` in `[1 - eps, 1 + eps]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub epsilon: f64,
    pub rank_cutoff: usize,
    pub samples: usize,
    /// `(k, fraction of vectors outside the band at rank k)` for `k >= a`.
    pub per_rank: Vec<(usize, f64)>,
    /// Fraction of vectors outside the band at any rank `k >= a`.
    pub simultaneous: f64,
}

/// Smallest admissible rank cutoff, `ceil(sqrt(ln n))`.
pub fn default_rank_cutoff(n: usize) -> usize {
    ((n as f64).ln().sqrt().ceil() as usize).max(1)
}

pub fn concentration_report(
    ctx: &OrderStatContext,
    samples: &[Vec<f64>],
    epsilon: f64,
    rank_cutoff: usize,
) -> Result<ConcentrationReport> {
    if samples.is_empty() {
        return Err(Error::invalid("concentration report needs at least one sample vector"));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::invalid(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    let n = ctx.n;
    let floor = default_rank_cutoff(n);
    if rank_cutoff < floor || rank_cutoff > n - 1 {
        return Err(Error::invalid(format!(
            "rank cutoff must lie in [{floor}, {}], got {rank_cutoff}",
            n - 1
        )));
    }
    if let Some(bad) = samples.iter().find(|v| v.len() != n - 1) {
        return Err(Error::invalid(format!(
            "sample vector has {} entries, expected {}",
            bad.len(),
            n - 1
        )));
    }
    let means = mean_order_stats(ctx);
    let ranks = rank_cutoff..n;
    let mut per_rank_hits = vec![0usize; ranks.len()];
    let mut any_hits = 0usize;
    for v in samples {
        let mut any = false;
        for (slot, k) in ranks.clone().enumerate() {
            let r = v[k - 1] / means[k - 1];
            if r < 1.0 - epsilon || r > 1.0 + epsilon || (epsilon == 0.0 && r != 1.0) {
                per_rank_hits[slot] += 1;
                any = true;
            }
        }
        any_hits += usize::from(any);
    }
    let m = samples.len() as f64;
    Ok(ConcentrationReport {
        epsilon,
        rank_cutoff,
        samples: samples.len(),
        per_rank: ranks
            .zip(per_rank_hits)
            .map(|(k, hits)| (k, hits as f64 / m))
            .collect(),
        simultaneous: any_hits as f64 / m,
    })
}
