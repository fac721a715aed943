//! Discrete excursions (Dyck paths) and the excursion/interval-graph
//! coupling: for pairs of time points, LCAs become interval argmins of the
//! path.

use std::collections::HashSet;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::intervals::{max_independent_set, IntervalSet};

/// Nonnegative ±1 lattice path of length `2n` from 0 to 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Excursion {
    heights: Vec<u32>,
}

impl Excursion {
    pub fn new(heights: Vec<u32>) -> Result<Self> {
        let ok = heights.len() % 2 == 1
            && heights.first() == Some(&0)
            && heights.last() == Some(&0)
            && heights.windows(2).all(|w| w[0].abs_diff(w[1]) == 1);
        if !ok {
            return invalid("excursion heights must start and end at 0 with ±1 steps");
        }
        Ok(Self { heights })
    }

    pub fn heights(&self) -> &[u32] {
        &self.heights
    }

    /// Half the number of steps.
    pub fn n(&self) -> usize {
        self.heights.len() / 2
    }

    /// Leftmost position of the minimum over `lo..=hi`.
    pub fn leftmost_argmin(&self, lo: usize, hi: usize) -> usize {
        (lo..=hi).min_by_key(|&t| self.heights[t]).expect("lo <= hi")
    }
}

/// Uniform Dyck path of length `2n` by the cycle lemma: a uniform
/// arrangement of `n` up-steps and `n + 1` down-steps has exactly one
/// rotation that stays nonnegative until its final step, the one starting
/// at the first minimum of the walk. Dropping that final down-step leaves a
/// uniform Dyck path.
pub fn dyck_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Excursion> {
    if n == 0 {
        return invalid("dyck_sample needs n >= 1");
    }
    let len = 2 * n + 1;
    let mut ups_left = n;
    let mut steps = Vec::with_capacity(len);
    for remaining in (1..=len).rev() {
        let up = rng.random_range(0..remaining) < ups_left;
        ups_left -= usize::from(up);
        steps.push(up);
    }
    // First index of the minimum of the walk S_0 = 0, S_1, ..., S_len.
    let (mut level, mut min_level, mut start) = (0i64, 0i64, 0usize);
    for (t, &up) in steps.iter().enumerate() {
        level += if up { 1 } else { -1 };
        if level < min_level {
            min_level = level;
            start = t + 1;
        }
    }
    let mut heights = Vec::with_capacity(2 * n + 1);
    let mut h = 0u32;
    heights.push(0);
    for i in 0..2 * n {
        if steps[(start + i) % len] {
            h += 1;
        } else {
            h -= 1;
        }
        heights.push(h);
    }
    Ok(Excursion { heights })
}

/// `k` pairs of distinct time positions drawn uniformly from `0..n_positions`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSample {
    pub pairs: Vec<(u32, u32)>,
}

impl PairSample {
    pub fn sample<R: Rng + ?Sized>(k: usize, n_positions: usize, rng: &mut R) -> Result<Self> {
        if 2 * k > n_positions {
            return invalid("not enough positions for 2k distinct draws");
        }
        let mut used = HashSet::with_capacity(2 * k);
        let mut draw = |rng: &mut R| loop {
            let x = rng.random_range(0..n_positions as u32);
            if used.insert(x) {
                return x;
            }
        };
        let pairs = (0..k).map(|_| (draw(rng), draw(rng))).collect();
        Ok(Self { pairs })
    }

    /// `[min, max]` of each pair.
    pub fn spans(&self) -> Vec<(usize, usize)> {
        self.pairs
            .iter()
            .map(|&(a, b)| (a.min(b) as usize, a.max(b) as usize))
            .collect()
    }
}

/// Leftmost argmin of `heights` over each closed span, answered offline:
/// spans are swept by right end while a stack keeps the positions that are
/// suffix minima of the prefix read so far.
pub(crate) fn span_argmins(heights: &[u32], spans: &[(usize, usize)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..spans.len()).collect();
    order.sort_unstable_by_key(|&i| spans[i].1);
    let mut out = vec![0; spans.len()];
    let mut stack: Vec<usize> = Vec::new();
    let mut next = 0;
    for i in order {
        let (lo, hi) = spans[i];
        while next <= hi {
            // Ties stay on the stack so the leftmost one wins.
            while stack.last().is_some_and(|&t| heights[t] > heights[next]) {
                stack.pop();
            }
            stack.push(next);
            next += 1;
        }
        let j = stack.partition_point(|&t| t < lo);
        out[i] = stack[j];
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoupledDraw {
    /// Distinct leftmost argmins of the excursion over the `k` spans.
    pub s_disc: usize,
    /// Maximum number of pairwise disjoint spans.
    pub alpha: usize,
}

/// Draws an excursion of length `2n` and `k` pairs of distinct time points,
/// then reports the discrete LCA count and the interval-graph independence
/// number on the same spans. Disjoint spans have distinct argmins, so
/// `alpha <= s_disc` always.
pub fn coupled_sample<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> Result<CoupledDraw> {
    if k == 0 {
        return invalid("coupled_sample needs k >= 1");
    }
    if n < 100 * k {
        return invalid(format!("coupled_sample needs n >= 100 k, got n = {n}, k = {k}"));
    }
    let excursion = dyck_sample(n, rng)?;
    let pairs = PairSample::sample(k, excursion.heights.len(), rng)?;
    let spans = pairs.spans();
    let mut argmins = span_argmins(&excursion.heights, &spans);
    argmins.sort_unstable();
    argmins.dedup();
    let scale = (2 * n) as f64;
    let intervals = IntervalSet::new(
        spans
            .iter()
            .map(|&(lo, hi)| (lo as f64 / scale, hi as f64 / scale))
            .collect(),
    )?;
    Ok(CoupledDraw {
        s_disc: argmins.len(),
        alpha: max_independent_set(&intervals),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dyck_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(dyck_sample(1, &mut rng).unwrap().heights(), &[0, 1, 0]);
        assert!(dyck_sample(0, &mut rng).is_err());
        for n in [2, 3, 10, 1000] {
            let e = dyck_sample(n, &mut rng).unwrap();
            assert_eq!(e.heights().len(), 2 * n + 1);
            // Revalidates endpoints and steps; u32 already forces >= 0.
            Excursion::new(e.heights().to_vec()).unwrap();
        }
    }

    #[test]
    fn excursion_validation() {
        assert!(Excursion::new(vec![0, 1, 0]).is_ok());
        assert!(Excursion::new(vec![0, 1, 1, 0]).is_err());
        assert!(Excursion::new(vec![0, 2, 0]).is_err());
        assert!(Excursion::new(vec![1, 0, 1]).is_err());
    }

    #[test]
    fn offline_argmins_match_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let e = dyck_sample(200, &mut rng).unwrap();
        let spans: Vec<(usize, usize)> = (0..500)
            .map(|_| {
                let a = rng.random_range(0..e.heights().len());
                let b = rng.random_range(0..e.heights().len());
                (a.min(b), a.max(b))
            })
            .collect();
        let got = span_argmins(e.heights(), &spans);
        for (&(lo, hi), &g) in spans.iter().zip(&got) {
            assert_eq!(g, e.leftmost_argmin(lo, hi));
        }
    }

    #[test]
    fn coupling_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        assert_eq!(coupled_sample(1, 100, &mut rng).unwrap(), CoupledDraw { s_disc: 1, alpha: 1 });
        assert!(coupled_sample(5, 100, &mut rng).is_err());
        for k in [2, 10, 50] {
            for _ in 0..50 {
                let d = coupled_sample(k, 100 * k, &mut rng).unwrap();
                assert!(d.alpha <= d.s_disc && d.s_disc <= k, "{d:?}");
                assert!(d.alpha >= 1);
            }
        }
    }

    #[test]
    fn pair_positions_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = PairSample::sample(5, 10, &mut rng).unwrap();
        let mut all: Vec<u32> = s.pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 10);
        assert!(PairSample::sample(6, 10, &mut rng).is_err());
    }
}
