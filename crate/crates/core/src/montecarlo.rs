//! Reproducible replicate runs.
//!
//! Replicate `i` of a run seeded with `seed` draws from ChaCha8 keyed by
//! `seed` on stream `i`, so every replicate can be regenerated on its own and
//! results do not depend on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `task(i, rng_i)` for `i in 0..reps` and returns the results in
/// replicate order. On failure the lowest failing index is reported.
pub fn run_replicates<T, E, F>(reps: u64, seed: u64, task: F) -> Result<Vec<T>>
where
    T: Send,
    E: std::fmt::Display + Send,
    F: Fn(u64, &mut ChaCha8Rng) -> std::result::Result<T, E> + Sync,
{
    if reps == 0 {
        return invalid("reps must be >= 1");
    }
    let results: Vec<std::result::Result<T, E>> = (0..reps)
        .into_par_iter()
        .map(|i| task(i, &mut replicate_rng(seed, i)))
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| Error::ReplicateFailed {
                index: i as u64,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Mean, standard error and normal-approximation 95% interval of a set of
/// replicate values.
///
/// The interval assumes the summands are light-tailed, which holds for the
/// bounded statistics tracked here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: u64,
    pub mean: f64,
    pub stderr: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub seed: u64,
}

impl SummaryStats {
    pub fn from_values(values: &[f64], seed: u64) -> Result<Self> {
        if values.is_empty() {
            return invalid("cannot summarise zero values");
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let stderr = if values.len() > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            n: values.len() as u64,
            mean,
            stderr,
            ci95_lo: mean - Z95 * stderr,
            ci95_hi: mean + Z95 * stderr,
            seed,
        })
    }

    /// `|mean - target|` in units of the standard error (0 if both vanish).
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }
}

/// `run_replicates` followed by `SummaryStats::from_values`.
pub fn run_summary<E, F>(reps: u64, seed: u64, task: F) -> Result<SummaryStats>
where
    E: std::fmt::Display + Send,
    F: Fn(u64, &mut ChaCha8Rng) -> std::result::Result<f64, E> + Sync,
{
    let values = run_replicates(reps, seed, task)?;
    SummaryStats::from_values(&values, seed)
}
