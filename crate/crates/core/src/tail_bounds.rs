//! Closed-form tail bounds and Monte Carlo checks against them.
//!
//! Bounds are evaluated in log space and exponentiated at the end.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::uniform_from_bits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// The bound caps the probability from above.
    Upper,
    /// The bound is a floor for the probability.
    Lower,
}

/// A bound next to the frequency observed in simulation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    /// May exceed 1, in which case an upper bound is vacuous.
    pub bound_value: f64,
    pub empirical_frequency: f64,
    pub samples: usize,
}

impl BoundReport {
    /// Binomial standard error of a frequency whose true value sits at the bound.
    pub fn standard_error(&self) -> f64 {
        let p = self.bound_value.clamp(0.0, 1.0);
        (p * (1.0 - p) / self.samples as f64).sqrt()
    }

    /// Whether the observed frequency is consistent with the bound, allowing
    /// `sigmas` standard errors of Monte Carlo noise.
    pub fn holds(&self, sigmas: f64) -> bool {
        let margin = sigmas * self.standard_error();
        match self.kind {
            BoundKind::Upper => self.empirical_frequency <= self.bound_value + margin,
            BoundKind::Lower => self.empirical_frequency >= self.bound_value - margin,
        }
    }
}

fn ln_factorial(l: u64) -> f64 {
    (2..=l).map(|i| (i as f64).ln()).sum()
}

/// `Pr(U_1 + ... + U_l <= a) <= a^l / l!` for i.i.d. `U(0,1)`; equality holds for `a <= 1`.
pub fn irwin_hall_tail(l: u64, a: f64) -> Result<f64> {
    Ok(irwin_hall_log_tail(l, a)?.exp())
}

/// Natural log of [`irwin_hall_tail`]; stays finite where the bound itself underflows.
pub fn irwin_hall_log_tail(l: u64, a: f64) -> Result<f64> {
    if l == 0 || !(a >= 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("Irwin-Hall tail needs l >= 1 and finite a >= 0, got l={l} a={a}")));
    }
    if a == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(l as f64 * a.ln() - ln_factorial(l))
}

/// Tail bounds for a sum of independent exponentials at `lambda` times its mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpSumTails {
    /// `mu = sum 1/rate`.
    pub mean: f64,
    /// `a_* = min rate`.
    pub min_rate: f64,
    /// Bound on `Pr(X >= lambda mu)`; `1` unless `lambda > 1`.
    pub upper: f64,
    /// Bound on `Pr(X <= lambda mu)`; `1` unless `lambda < 1`.
    pub lower: f64,
}

pub fn exp_sum_tails(rates: &[f64], lambda: f64) -> Result<ExpSumTails> {
    if rates.is_empty() {
        return Err(Error::Domain("exponential sum needs at least one rate".into()));
    }
    if let Some(r) = rates.iter().find(|&&r| !(r > 0.0) || !r.is_finite()) {
        return Err(Error::Domain(format!("rates must be positive and finite, got {r}")));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    let mean: f64 = rates.iter().map(|r| 1.0 / r).sum();
    let min_rate = rates.iter().cloned().fold(f64::INFINITY, f64::min);
    let exponent = -min_rate * mean * (lambda - 1.0 - lambda.ln());
    let (upper, lower) = if lambda > 1.0 {
        ((exponent - lambda.ln()).exp(), 1.0)
    } else if lambda < 1.0 {
        (1.0, exponent.exp())
    } else {
        (1.0, 1.0)
    };
    Ok(ExpSumTails { mean, min_rate, upper, lower })
}

/// `Pr(|X - mu| >= eps mu)`, bounded by the sum of the two one-sided bounds
/// at `1 + eps` and `1 - eps`. Needs `0 < eps < 1`.
pub fn exp_sum_two_sided(rates: &[f64], epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ok(exp_sum_tails(rates, 1.0 + epsilon)?.upper + exp_sum_tails(rates, 1.0 - epsilon)?.lower)
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("p must lie in (0, 1], got {p}")))
    }
}

/// Chernoff: `Pr(X < (1 - eps) lambda) <= exp(-eps^2 lambda / 2)` for `X ~ Bi(n, p)`, `lambda = np`.
pub fn binomial_lower_tail(n_trials: u64, p: f64, epsilon: f64) -> Result<f64> {
    check_probability(p)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let lambda = n_trials as f64 * p;
    Ok((-epsilon * epsilon * lambda / 2.0).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinBinomialCase {
    /// `lambda >= 2`: `Pr(min >= 0.65 lambda) > 1/4`.
    LargeMean,
    /// `lambda < 2`: `Pr(min >= 1) > 0.18 lambda^2`.
    SmallMean,
}

impl MinBinomialCase {
    /// The threshold `x` in the event `min(Z_1, Z_2) >= x`.
    pub fn threshold(self, lambda: f64) -> f64 {
        match self {
            MinBinomialCase::LargeMean => 0.65 * lambda,
            MinBinomialCase::SmallMean => 1.0,
        }
    }
}

/// Lower bound on `Pr(min(Z_1, Z_2) >= x)` for i.i.d. `Z_i ~ Bi(n, p)`; see [`MinBinomialCase`].
pub fn min_binomial_lower_bounds(n_trials: u64, p: f64) -> Result<(MinBinomialCase, f64)> {
    check_probability(p)?;
    let lambda = n_trials as f64 * p;
    Ok(if lambda >= 2.0 {
        (MinBinomialCase::LargeMean, 0.25)
    } else {
        (MinBinomialCase::SmallMean, 0.18 * lambda * lambda)
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        Err(Error::invalid("validation needs at least one sample"))
    } else {
        Ok(())
    }
}

/// Frequency of `U_1 + ... + U_l <= a` over `samples` simulated sums.
pub fn validate_irwin_hall(l: u64, a: f64, samples: usize, seed: u64) -> Result<BoundReport> {
    let bound = irwin_hall_tail(l, a)?;
    check_samples(samples)?;
    let mut rng = rng(seed);
    let hits = (0..samples)
        .filter(|_| {
            let mut sum = 0.0;
            for _ in 0..l {
                sum += uniform_from_bits(rng.random::<u64>());
                if sum > a {
                    return false;
                }
            }
            true
        })
        .count();
    Ok(BoundReport {
        kind: BoundKind::Upper,
        bound_value: bound,
        empirical_frequency: hits as f64 / samples as f64,
        samples,
    })
}

/// Frequency of the tail event matching `lambda`: `X >= lambda mu` when
/// `lambda >= 1`, `X <= lambda mu` otherwise.
pub fn validate_exp_sum(rates: &[f64], lambda: f64, samples: usize, seed: u64) -> Result<BoundReport> {
    let tails = exp_sum_tails(rates, lambda)?;
    check_samples(samples)?;
    let threshold = lambda * tails.mean;
    let mut rng = rng(seed);
    let hits = (0..samples)
        .filter(|_| {
            let x: f64 = rates.iter().map(|r| rng.sample::<f64, _>(Exp1) / r).sum();
            if lambda >= 1.0 { x >= threshold } else { x <= threshold }
        })
        .count();
    Ok(BoundReport {
        kind: BoundKind::Upper,
        bound_value: if lambda >= 1.0 { tails.upper } else { tails.lower },
        empirical_frequency: hits as f64 / samples as f64,
        samples,
    })
}

/// Frequency of `X < (1 - eps) n p` for `X ~ Bi(n, p)`.
pub fn validate_binomial_lower_tail(n_trials: u64, p: f64, epsilon: f64, samples: usize, seed: u64) -> Result<BoundReport> {
    let bound = binomial_lower_tail(n_trials, p, epsilon)?;
    check_samples(samples)?;
    let dist = Binomial::new(n_trials, p).map_err(|e| Error::Domain(e.to_string()))?;
    let threshold = (1.0 - epsilon) * n_trials as f64 * p;
    let mut rng = rng(seed);
    let hits = (0..samples).filter(|_| (dist.sample(&mut rng) as f64) < threshold).count();
    Ok(BoundReport {
        kind: BoundKind::Upper,
        bound_value: bound,
        empirical_frequency: hits as f64 / samples as f64,
        samples,
    })
}

/// Frequency of `min(Z_1, Z_2) >= x` over paired binomial draws.
pub fn validate_min_binomial(n_trials: u64, p: f64, samples: usize, seed: u64) -> Result<BoundReport> {
    let (case, bound) = min_binomial_lower_bounds(n_trials, p)?;
    check_samples(samples)?;
    let dist = Binomial::new(n_trials, p).map_err(|e| Error::Domain(e.to_string()))?;
    let threshold = case.threshold(n_trials as f64 * p);
    let mut rng = rng(seed);
    let hits = (0..samples)
        .filter(|_| {
            let z = dist.sample(&mut rng).min(dist.sample(&mut rng));
            z as f64 >= threshold
        })
        .count();
    Ok(BoundReport {
        kind: BoundKind::Lower,
        bound_value: bound,
        empirical_frequency: hits as f64 / samples as f64,
        samples,
    })
}
