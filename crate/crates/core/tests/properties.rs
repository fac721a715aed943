//! Randomised invariants.

use cographon::divisor::{divisor_summatory, restricted_divisor_count};
use cographon::intervals::{max_independent_set, IntervalSet};
use cographon::matching::{match_prob_exact, match_prob_truncated};
use cographon::moments::moment_polys;
use cographon::montecarlo::{replicate_rng, SummaryStats};
use cographon::rational::{format_rational, parse_rational, to_f64};
use cographon::tree::{coupled_sample, remy_sample, sk_of_tree, LabeledTree};
use cographon::BigRat;
use proptest::prelude::*;

fn brute_alpha(iv: &[(f64, f64)]) -> u32 {
    (0u32..1 << iv.len())
        .filter(|mask| {
            let chosen: Vec<_> = (0..iv.len()).filter(|i| mask >> i & 1 == 1).map(|i| iv[i]).collect();
            chosen
                .iter()
                .enumerate()
                .all(|(i, a)| chosen[i + 1..].iter().all(|b| a.1 < b.0 || b.1 < a.0))
        })
        .map(u32::count_ones)
        .max()
        .unwrap()
}

/// Intervals over distinct integer endpoints: a random permutation of
/// `0..2k`, paired off.
fn interval_sets(max_k: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    (1..=max_k)
        .prop_flat_map(|k| Just((0..2 * k).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|ends| {
            ends.chunks(2)
                .map(|c| (c[0].min(c[1]) as f64, c[0].max(c[1]) as f64))
                .collect()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rational_text_round_trip(n in any::<i64>(), d in 1..i64::MAX) {
        let r = BigRat::new(n.into(), d.into());
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn tree_text_round_trip(leaves in 1usize..60, seed in any::<u64>()) {
        let t = remy_sample(leaves, &mut replicate_rng(seed, 0)).unwrap();
        let back: LabeledTree = t.to_string().parse().unwrap();
        prop_assert_eq!(back.canonical_code(), t.canonical_code());
    }

    #[test]
    fn lca_count_in_range(k in 1usize..200, seed in any::<u64>()) {
        let t = remy_sample(2 * k, &mut replicate_rng(seed, 0)).unwrap();
        let s = sk_of_tree(&t).unwrap();
        prop_assert!((1..=k).contains(&s));
    }

    #[test]
    fn greedy_is_optimal(iv in interval_sets(12)) {
        let set = IntervalSet::new(iv.clone()).unwrap();
        prop_assert_eq!(max_independent_set(&set) as u32, brute_alpha(&iv));
    }

    #[test]
    fn alpha_ignores_monotone_reparametrisation(iv in interval_sets(40)) {
        let warped: Vec<(f64, f64)> = iv.iter().map(|&(a, b)| ((a / 10.0).exp(), (b / 10.0).exp())).collect();
        prop_assert_eq!(
            max_independent_set(&IntervalSet::new(iv).unwrap()),
            max_independent_set(&IntervalSet::new(warped).unwrap())
        );
    }

    #[test]
    fn coupling_inequality(k in 1usize..60, seed in any::<u64>()) {
        let d = coupled_sample(k, 100 * k, &mut replicate_rng(seed, 0)).unwrap();
        prop_assert!(d.alpha <= d.s_disc && d.s_disc <= k);
    }

    #[test]
    fn matching_symmetric_monotone_bounded(half in 1usize..25, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let kt = 2 * half;
        let p = 1 + (a * (kt - 1) as f64) as usize;
        let q = 1 + (b * (kt - p) as f64) as usize;
        let q = q.min(kt - p);
        let c = match_prob_exact(p, q, kt).unwrap();
        prop_assert_eq!(&c, &match_prob_exact(q, p, kt).unwrap());
        prop_assert!(c <= BigRat::new(((p * q) as i64).into(), ((kt - 1) as i64).into()));
        prop_assert!(c <= BigRat::from_integer(1.into()));
        if p + q < kt {
            prop_assert!(match_prob_exact(p, q + 1, kt).unwrap() >= c);
        }
        let t = match_prob_truncated(p, q, kt, 1e-12).unwrap();
        prop_assert!((t.value - to_f64(&c)).abs() <= t.error_bound);
    }

    #[test]
    fn moments_decrease_in_k(num in 1i64..1000, extra in 1i64..1000) {
        let p = BigRat::new(num.into(), (num + extra).into());
        let values: Vec<BigRat> = moment_polys(12).iter().map(|a| a.eval(&p)).collect();
        prop_assert!(values.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn summary_brackets_mean(values in prop::collection::vec(-1e6f64..1e6, 1..200), seed in any::<u64>()) {
        let s = SummaryStats::from_values(&values, seed).unwrap();
        prop_assert!(s.stderr >= 0.0);
        prop_assert!(s.ci95_lo <= s.mean && s.mean <= s.ci95_hi);
        prop_assert_eq!(s, SummaryStats::from_values(&values, seed).unwrap());
    }

    #[test]
    fn restricted_counts_consistent(n in 1u64..400, a in 1u64..20, width in 0u64..50) {
        let total: u64 = (1..=n).map(|j| restricted_divisor_count(j, 1, n).unwrap()).sum();
        prop_assert_eq!(total, divisor_summatory(n).unwrap());
        let b = a + width;
        for j in 1..=n.min(100) {
            prop_assert!(restricted_divisor_count(j, a, b).unwrap() <= restricted_divisor_count(j, 1, j).unwrap());
        }
    }
}
