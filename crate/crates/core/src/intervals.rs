//! Random interval graphs and the Poisson greedy chain.
//!
//! `k` intervals with i.i.d. endpoints define an interval graph whose
//! independence number `α(G_k)` lower-bounds `S_k` pathwise. Only the
//! relative order of the `2k` endpoints matters, so any atomless endpoint
//! law gives the same graph law.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::montecarlo::{run_replicates, run_summary, SummaryStats};

/// `k` closed intervals with pairwise distinct endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.iter().any(|&(lo, hi)| !(lo < hi)) {
            return invalid("every interval needs lo < hi");
        }
        let mut ends: Vec<f64> = intervals.iter().flat_map(|&(lo, hi)| [lo, hi]).collect();
        ends.sort_unstable_by(f64::total_cmp);
        if ends.windows(2).any(|w| w[0] == w[1]) {
            return invalid("interval endpoints must be pairwise distinct");
        }
        Ok(Self { intervals })
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }
}

/// `k` intervals `[min(A_i, B_i), max(A_i, B_i)]` from endpoints drawn by
/// `draw`; coinciding endpoints are redrawn.
pub fn sample_intervals_with<R, F>(k: usize, rng: &mut R, mut draw: F) -> Result<IntervalSet>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> f64,
{
    if k == 0 {
        return invalid("sample_intervals needs k >= 1");
    }
    let mut ends: Vec<f64> = (0..2 * k).map(|_| draw(rng)).collect();
    loop {
        let mut sorted: Vec<(f64, usize)> = ends.iter().copied().zip(0..).collect();
        sorted.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let dupes: Vec<usize> = sorted
            .windows(2)
            .filter(|w| w[0].0 == w[1].0)
            .map(|w| w[1].1)
            .collect();
        if dupes.is_empty() {
            break;
        }
        for i in dupes {
            ends[i] = draw(rng);
        }
    }
    let intervals = ends
        .chunks_exact(2)
        .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
        .collect();
    IntervalSet::new(intervals)
}

/// `k` intervals from `2k` i.i.d. uniforms on `[0, 1)`.
pub fn sample_intervals<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<IntervalSet> {
    sample_intervals_with(k, rng, |r| r.random::<f64>())
}

/// Maximum number of pairwise disjoint intervals: scan by right endpoint
/// and keep every interval that starts after the last kept one ends.
pub fn max_independent_set(set: &IntervalSet) -> usize {
    let mut by_end = set.intervals.clone();
    by_end.sort_unstable_by(|a, b| a.1.total_cmp(&b.1));
    let mut last_end = f64::NEG_INFINITY;
    let mut count = 0;
    for (lo, hi) in by_end {
        if lo > last_end {
            count += 1;
            last_end = hi;
        }
    }
    count
}

/// Replicate summary of `α(G_k) / √k`.
pub fn alpha_scaling_experiment(k: usize, reps: u64, seed: u64) -> Result<SummaryStats> {
    let scale = (k as f64).sqrt();
    run_summary(reps, seed, |_, rng| {
        sample_intervals(k, rng).map(|s| max_independent_set(&s) as f64 / scale)
    })
}

/// Greedy chain of a unit-intensity Poisson process on `[0, R]²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonGreedyState {
    pub window: f64,
    /// Number of process points in the window.
    pub n_points: usize,
    pub chain: Vec<(f64, f64)>,
}

impl PoissonGreedyState {
    /// `F_R`: length of the chain inside the window.
    pub fn f_r(&self) -> usize {
        self.chain.len()
    }

    /// `max(U_{j+1}, V_{j+1}) - max(U_j, V_j)`, starting from level 0.
    pub fn gaps(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.chain
            .iter()
            .map(|&(u, v)| {
                let m = u.max(v);
                let g = m - prev;
                prev = m;
                g
            })
            .collect()
    }
}

/// Samples the process on `[0, R]²` and extracts the chain: each step takes
/// the point with the smallest max-coordinate among those whose coordinates
/// both exceed the previous point's max-coordinate.
pub fn poisson_greedy_chain<R: Rng + ?Sized>(window: f64, rng: &mut R) -> Result<PoissonGreedyState> {
    if !(window > 0.0 && window.is_finite()) {
        return invalid("window must be a positive real");
    }
    let n_points = Poisson::new(window * window)
        .map_err(|e| crate::Error::InvalidArgument(e.to_string()))?
        .sample(rng) as usize;
    let mut points: Vec<(f64, f64)> = (0..n_points)
        .map(|_| (window * rng.random::<f64>(), window * rng.random::<f64>()))
        .collect();
    points.sort_unstable_by(|a, b| a.0.max(a.1).total_cmp(&b.0.max(b.1)));
    let mut chain = Vec::new();
    let mut level = 0.0;
    for (u, v) in points {
        if u.min(v) > level {
            chain.push((u, v));
            level = u.max(v);
        }
    }
    Ok(PoissonGreedyState {
        window,
        n_points,
        chain,
    })
}

/// Empirical frequency of `α(G_k) < c √k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationEstimate {
    pub k: usize,
    pub c: f64,
    pub reps: u64,
    pub hits: u64,
    pub frequency: f64,
    /// 95% upper bound; the rule of three `3 / reps` when nothing was seen.
    pub upper95: f64,
}

pub fn lower_deviation_estimate(k: usize, c: f64, reps: u64, seed: u64) -> Result<DeviationEstimate> {
    if !(c > 0.0) {
        return invalid("c must be positive");
    }
    let threshold = c * (k as f64).sqrt();
    let hits = run_replicates(reps, seed, |_, rng| {
        sample_intervals(k, rng).map(|s| (max_independent_set(&s) as f64) < threshold)
    })?
    .into_iter()
    .filter(|&h| h)
    .count() as u64;
    let frequency = hits as f64 / reps as f64;
    let upper95 = if hits == 0 {
        3.0 / reps as f64
    } else {
        (frequency + 1.959_963_984_540_054 * (frequency * (1.0 - frequency) / reps as f64).sqrt()).min(1.0)
    };
    Ok(DeviationEstimate {
        k,
        c,
        reps,
        hits,
        frequency,
        upper95,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_force_alpha(set: &IntervalSet) -> usize {
        let iv = set.intervals();
        (0u32..1 << iv.len())
            .filter(|mask| {
                let chosen: Vec<_> = (0..iv.len()).filter(|i| mask >> i & 1 == 1).map(|i| iv[i]).collect();
                chosen.iter().enumerate().all(|(i, a)| {
                    chosen[i + 1..].iter().all(|b| a.1 < b.0 || b.1 < a.0)
                })
            })
            .map(u32::count_ones)
            .max()
            .unwrap() as usize
    }

    #[test]
    fn disjoint_and_nested() {
        let disjoint = IntervalSet::new((0..5).map(|i| (i as f64, i as f64 + 0.5)).collect()).unwrap();
        assert_eq!(max_independent_set(&disjoint), 5);
        let nested = IntervalSet::new((0..5).map(|i| (i as f64, 20.0 - i as f64)).collect()).unwrap();
        assert_eq!(max_independent_set(&nested), 1);
    }

    #[test]
    fn validation() {
        assert!(IntervalSet::new(vec![(1.0, 1.0)]).is_err());
        assert!(IntervalSet::new(vec![(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(IntervalSet::new(vec![(0.0, 1.0), (0.5, 2.0)]).is_ok());
    }

    #[test]
    fn greedy_equals_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..2000 {
            let k = rng.random_range(1..=12);
            let set = sample_intervals(k, &mut rng).unwrap();
            assert_eq!(max_independent_set(&set), brute_force_alpha(&set));
        }
    }

    #[test]
    fn single_interval() {
        let s = alpha_scaling_experiment(1, 20, 3).unwrap();
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.stderr, 0.0);
    }

    #[test]
    fn chain_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for r in [0.5, 3.0, 40.0] {
            let st = poisson_greedy_chain(r, &mut rng).unwrap();
            let maxes: Vec<f64> = st.chain.iter().map(|p| p.0.max(p.1)).collect();
            assert!(maxes.windows(2).all(|w| w[0] < w[1]));
            assert!(st.chain.windows(2).all(|w| w[1].0.min(w[1].1) > w[0].0.max(w[0].1)));
            assert!(st.gaps().iter().all(|&g| g > 0.0));
        }
        assert!(poisson_greedy_chain(0.0, &mut rng).is_err());
    }

    #[test]
    fn tiny_window_is_usually_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let empty = (0..1000)
            .filter(|_| poisson_greedy_chain(0.01, &mut rng).unwrap().chain.is_empty())
            .count();
        assert!(empty > 990);
    }

    #[test]
    fn deviation_extremes() {
        let low = lower_deviation_estimate(400, 0.5, 200, 1).unwrap();
        assert_eq!(low.hits, 0);
        assert_eq!(low.upper95, 3.0 / 200.0);
        let high = lower_deviation_estimate(400, 2.0, 200, 1).unwrap();
        assert_eq!(high.hits, 200);
    }
}
