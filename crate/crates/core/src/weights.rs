//! Random symmetric edge weights on the complete graph `K_n`.
//!
//! Every weight is a pure function of `(seed, min(u,v), max(u,v))`: the
//! canonical pair index selects a position in a ChaCha8 keystream seeded
//! from `seed`. Dense storage materializes that stream in order, the
//! implicit mode seeks into it per query, so both agree bit for bit.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of the i.i.d. edge weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightModel {
    /// `U(0,1)`.
    #[serde(rename = "uniform")]
    Uniform01,
    /// `Exp(1)`.
    #[serde(rename = "exponential")]
    Exponential1,
}

impl WeightModel {
    /// Maps a uniform draw in `[0,1)` to a draw from this model.
    #[inline]
    pub fn from_uniform(self, u: f64) -> f64 {
        match self {
            WeightModel::Uniform01 => u,
            WeightModel::Exponential1 => -(-u).ln_1p(),
        }
    }

    /// Cumulative distribution function of the model.
    pub fn cdf(self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            WeightModel::Uniform01 => x.min(1.0),
            WeightModel::Exponential1 => -(-x).exp_m1(),
        }
    }
}

impl fmt::Display for WeightModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightModel::Uniform01 => f.write_str("uniform"),
            WeightModel::Exponential1 => f.write_str("exponential"),
        }
    }
}

impl FromStr for WeightModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "u" => Ok(WeightModel::Uniform01),
            "exponential" | "exp" | "e" => Ok(WeightModel::Exponential1),
            other => Err(Error::invalid(format!("unknown weight model '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StorageMode {
    /// Flat upper-triangular array of all `n(n-1)/2` weights.
    #[default]
    Dense,
    /// Weights recomputed from the keystream on every query.
    ImplicitPrf,
}

/// The uniform map from 64 random bits to `[0,1)`: the top 53 bits scaled by `2^-53`.
#[inline]
pub fn uniform_from_bits(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Maps a uniform weight to an exponential one via `w -> -ln(1 - w)`.
///
/// The map is increasing and its output dominates its input.
pub fn couple_to_exponential(w: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&w) {
        return Err(Error::Domain(format!(
            "coupling needs a weight in [0, 1), got {w}"
        )));
    }
    Ok(-(-w).ln_1p())
}

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed: `master_seed XOR splitmix64(trial_index)`.
///
/// This rule is fixed so archived result files can be replayed.
#[inline]
pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    master_seed ^ splitmix64(trial_index)
}

/// Number of unordered pairs in `K_n`.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Canonical index of the unordered pair `{u, v}` with `u < v` in the
/// row-major upper triangle.
#[inline]
fn upper_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

#[derive(Clone, Debug)]
enum WeightSource {
    Dense(Vec<f64>),
    Implicit { model: WeightModel, seed: u64 },
}

/// `K_n` with symmetric edge weights, terminals `s`, `t`, and a persistent
/// set of deleted edges.
#[derive(Clone, Debug)]
pub struct WeightedCompleteGraph {
    n: usize,
    s: usize,
    t: usize,
    model: Option<WeightModel>,
    seed: Option<u64>,
    source: WeightSource,
    deleted: FixedBitSet,
    deleted_count: usize,
}

impl WeightedCompleteGraph {
    /// Draws all `n(n-1)/2` weights i.i.d. from `model`. Terminals default to `s = 0`, `t = 1`.
    pub fn generate(n: usize, model: WeightModel, seed: u64, mode: StorageMode) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("need n >= 2 vertices, got {n}")));
        }
        let source = match mode {
            StorageMode::Dense => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let weights = (0..pair_count(n))
                    .map(|_| model.from_uniform(uniform_from_bits(rng.next_u64())))
                    .collect();
                WeightSource::Dense(weights)
            }
            StorageMode::ImplicitPrf => WeightSource::Implicit { model, seed },
        };
        Ok(Self::with_source(n, Some(model), Some(seed), source))
    }

    /// Builds a graph from explicit weights. `weight(u, v)` is called once per pair with `u < v`.
    pub fn from_fn(n: usize, mut weight: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("need n >= 2 vertices, got {n}")));
        }
        let mut weights = Vec::with_capacity(pair_count(n));
        for u in 0..n {
            for v in u + 1..n {
                let w = weight(u, v);
                if !(w >= 0.0 && w.is_finite()) {
                    return Err(Error::Domain(format!(
                        "edge weight w({u},{v}) = {w} is not a finite nonnegative number"
                    )));
                }
                weights.push(w);
            }
        }
        Ok(Self::with_source(n, None, None, WeightSource::Dense(weights)))
    }

    /// Builds a graph from an explicit list of `(u, v, w)`; every pair must appear exactly once.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("need n >= 2 vertices, got {n}")));
        }
        let mut table = vec![f64::NAN; pair_count(n)];
        for &(u, v, w) in edges {
            check_pair(n, u, v)?;
            let idx = upper_index(n, u.min(v), u.max(v));
            if !table[idx].is_nan() {
                return Err(Error::invalid(format!("edge {{{u},{v}}} listed twice")));
            }
            table[idx] = w;
        }
        if let Some(missing) = table.iter().position(|w| w.is_nan()) {
            return Err(Error::invalid(format!(
                "edge list covers only {} of {} pairs (first gap at pair index {missing})",
                table.iter().filter(|w| !w.is_nan()).count(),
                table.len()
            )));
        }
        Self::from_fn(n, |u, v| table[upper_index(n, u, v)])
    }

    fn with_source(n: usize, model: Option<WeightModel>, seed: Option<u64>, source: WeightSource) -> Self {
        WeightedCompleteGraph {
            n,
            s: 0,
            t: 1,
            model,
            seed,
            source,
            deleted: FixedBitSet::with_capacity(pair_count(n)),
            deleted_count: 0,
        }
    }

    /// Replaces the terminal pair.
    pub fn with_terminals(mut self, s: usize, t: usize) -> Result<Self> {
        if s == t || s >= self.n || t >= self.n {
            return Err(Error::invalid(format!(
                "terminals must be distinct vertices below {}, got s={s} t={t}",
                self.n
            )));
        }
        self.s = s;
        self.t = t;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> usize {
        self.s
    }

    pub fn sink(&self) -> usize {
        self.t
    }

    pub fn model(&self) -> Option<WeightModel> {
        self.model
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn storage_mode(&self) -> StorageMode {
        match self.source {
            WeightSource::Dense(_) => StorageMode::Dense,
            WeightSource::Implicit { .. } => StorageMode::ImplicitPrf,
        }
    }

    /// Weight of edge `{u, v}`, deleted or not.
    pub fn weight(&self, u: usize, v: usize) -> Result<f64> {
        check_pair(self.n, u, v)?;
        Ok(self.weight_unchecked(u, v))
    }

    #[inline]
    pub(crate) fn pair_index(&self, u: usize, v: usize) -> usize {
        if u < v {
            upper_index(self.n, u, v)
        } else {
            upper_index(self.n, v, u)
        }
    }

    #[inline]
    pub(crate) fn weight_unchecked(&self, u: usize, v: usize) -> f64 {
        self.weight_at(self.pair_index(u, v))
    }

    #[inline]
    fn weight_at(&self, idx: usize) -> f64 {
        match &self.source {
            WeightSource::Dense(w) => w[idx],
            WeightSource::Implicit { model, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_word_pos(2 * idx as u128);
                model.from_uniform(uniform_from_bits(rng.next_u64()))
            }
        }
    }

    /// Weight of `{u, v}` unless the edge is deleted.
    #[inline]
    pub(crate) fn live_weight(&self, u: usize, v: usize) -> Option<f64> {
        let idx = self.pair_index(u, v);
        if self.deleted.contains(idx) {
            None
        } else {
            Some(self.weight_at(idx))
        }
    }

    pub fn is_deleted(&self, u: usize, v: usize) -> Result<bool> {
        check_pair(self.n, u, v)?;
        Ok(self.deleted.contains(self.pair_index(u, v)))
    }

    /// Adds edges to the deletion mask. Validates every pair before mutating anything.
    pub fn delete_edges(&mut self, edges: &[(usize, usize)]) -> Result<()> {
        for &(u, v) in edges {
            check_pair(self.n, u, v)?;
        }
        for &(u, v) in edges {
            let idx = self.pair_index(u, v);
            if !self.deleted.put(idx) {
                self.deleted_count += 1;
            }
        }
        Ok(())
    }

    /// Clears the deletion mask.
    pub fn restore_all(&mut self) {
        self.deleted.clear();
        self.deleted_count = 0;
    }

    pub fn deleted_count(&self) -> usize {
        self.deleted_count
    }

    /// Deleted edges as `(u, v)` with `u < v`, in canonical order.
    pub fn deleted_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.deleted_count);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.deleted.contains(upper_index(self.n, u, v)) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Live neighbors of `u` with their edge weights, in vertex order.
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.n)
            .filter(move |&v| v != u)
            .filter_map(move |v| self.live_weight(u, v).map(|w| (v, w)))
    }

    /// All `n - 1` weights at `v`, ignoring deletions, sorted ascending.
    pub fn sorted_incident_weights(&self, v: usize) -> Result<Vec<f64>> {
        if v >= self.n {
            return Err(Error::invalid(format!("vertex {v} out of range")));
        }
        let mut w: Vec<f64> = (0..self.n)
            .filter(|&u| u != v)
            .map(|u| self.weight_unchecked(u, v))
            .collect();
        w.sort_by(f64::total_cmp);
        Ok(w)
    }

    /// Every weight in canonical pair order.
    pub fn all_weights(&self) -> Vec<f64> {
        match &self.source {
            WeightSource::Dense(w) => w.clone(),
            WeightSource::Implicit { .. } => (0..pair_count(self.n)).map(|i| self.weight_at(i)).collect(),
        }
    }
}

fn check_pair(n: usize, u: usize, v: usize) -> Result<()> {
    if u == v || u >= n || v >= n {
        Err(Error::InvalidEdge(u, v, n))
    } else {
        Ok(())
    }
}
