//! Subtree-size laws and perfect-matching probabilities.
//!
//! Pairing the `K = 2k` leaves of the skeleton is a uniform perfect matching
//! of `[K]`. An internal vertex is a last common ancestor of some pair iff the
//! matching links its right and left subtrees at least once, so
//! `E S_k = (K-1) Σ_{p,q} P(p,q,K) C(p,q,K)`, where `P` is the joint law of
//! the two subtree sizes of a uniform internal vertex and `C` the linking
//! probability of blocks of sizes `p` and `q`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numbers::catalan;
use crate::rational::{to_f64, BigRat};

/// Series evaluations whose estimated rounding error exceeds this switch to
/// the complement recursion.
const ROUNDING_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Rational arithmetic, full inclusion-exclusion sum.
    Exact,
    /// Floating point with a reported error bound.
    Truncated,
    /// The exponential approximation `1 - exp(-pq/K)`.
    Approx,
}

impl FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "truncated" | "float" => Ok(Self::Truncated),
            "approx" => Ok(Self::Approx),
            _ => invalid(format!("unknown mode {s:?} (expected exact, truncated or approx)")),
        }
    }
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::Truncated => "truncated",
            Self::Approx => "approx",
        })
    }
}

/// A float together with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounded {
    pub value: f64,
    pub error_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelValue {
    Exact(BigRat),
    /// `error_bound` is `None` for the exponential approximation, which has
    /// no explicit bound at finite size.
    Float { value: f64, error_bound: Option<f64> },
}

impl KernelValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Exact(r) => to_f64(r),
            Self::Float { value, .. } => *value,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRat> {
        match self {
            Self::Exact(r) => Some(r),
            Self::Float { .. } => None,
        }
    }
}

impl From<Bounded> for KernelValue {
    fn from(b: Bounded) -> Self {
        Self::Float {
            value: b.value,
            error_bound: Some(b.error_bound),
        }
    }
}

/// Block sizes `(p_i, q_i)` inside a matching of `k_total` points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchKernelParams {
    pub blocks: Vec<(usize, usize)>,
    pub k_total: usize,
    pub mode: EvalMode,
}

impl MatchKernelParams {
    pub fn single(p: usize, q: usize, k_total: usize, mode: EvalMode) -> Self {
        Self {
            blocks: vec![(p, q)],
            k_total,
            mode,
        }
    }

    pub fn double(p1: usize, q1: usize, p2: usize, q2: usize, k_total: usize, mode: EvalMode) -> Self {
        Self {
            blocks: vec![(p1, q1), (p2, q2)],
            k_total,
            mode,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_blocks(&self.blocks, self.k_total)
    }

    pub fn evaluate(&self) -> Result<KernelValue> {
        match self.blocks[..] {
            [(p, q)] => match_prob(p, q, self.k_total, self.mode),
            [(p1, q1), (p2, q2)] => match_prob_double(p1, q1, p2, q2, self.k_total, self.mode),
            _ => invalid("expected one or two block pairs"),
        }
    }
}

fn check_blocks(blocks: &[(usize, usize)], k_total: usize) -> Result<()> {
    if k_total < 2 || !k_total.is_multiple_of(2) {
        return invalid(format!("K must be even and >= 2, got {k_total}"));
    }
    if blocks.iter().any(|&(p, q)| p == 0 || q == 0) {
        return invalid("block sizes must be >= 1");
    }
    let total: usize = blocks.iter().map(|&(p, q)| p + q).sum();
    if total > k_total {
        return invalid(format!("blocks of total size {total} do not fit in K = {k_total}"));
    }
    Ok(())
}

fn catalans(n: usize) -> Vec<BigInt> {
    (0..=n).map(|i| catalan(i as i64).expect("index >= 0")).collect()
}

/// `(2n-1)!!` for `n = 0..=n_max`.
fn odd_double_factorials(n_max: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(BigInt::one());
    for n in 1..=n_max {
        let v = &out[n - 1] * (2 * n - 1);
        out.push(v);
    }
    out
}

/// `Cat_n / 4^n` for `n = 0..=n_max`, which stays representable for any size.
fn scaled_catalans(n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    for n in 0..n_max {
        let v = out[n] * (2 * n + 1) as f64 / (2 * (n + 2)) as f64;
        out.push(v);
    }
    out
}

/// Law of `(|T_v^R|, |T_v^L|)` for a uniform internal vertex `v` of a uniform
/// planted binary tree with `K` leaves:
/// `Cat_{p-1} Cat_{q-1} Cat_{K-p-q} (K+1-p-q) / ((K-1) Cat_{K-1})`.
pub fn subtree_law(p: usize, q: usize, k_total: usize) -> Result<BigRat> {
    check_blocks(&[(p, q)], k_total)?;
    let cat = |n: usize| catalan(n as i64).expect("index >= 0");
    let num = cat(p - 1) * cat(q - 1) * cat(k_total - p - q) * (k_total + 1 - p - q);
    let den = cat(k_total - 1) * (k_total - 1);
    Ok(BigRat::new(num, den))
}

pub fn subtree_law_f64(p: usize, q: usize, k_total: usize) -> Result<f64> {
    check_blocks(&[(p, q)], k_total)?;
    let c = scaled_catalans(k_total);
    Ok(scaled_subtree_law(&c, p, q, k_total))
}

fn scaled_subtree_law(c: &[f64], p: usize, q: usize, k: usize) -> f64 {
    c[p - 1] * c[q - 1] * c[k - p - q] * (k + 1 - p - q) as f64 / (4.0 * (k - 1) as f64 * c[k - 1])
}

/// Joint law of the four subtree sizes of two independent uniform internal
/// vertices `v`, `w` on the event that they are in generic position (distinct,
/// neither an ancestor of the other). Summed over all sizes it gives the
/// probability of that event.
pub fn subtree_law_double(p1: usize, q1: usize, p2: usize, q2: usize, k_total: usize) -> Result<BigRat> {
    check_blocks(&[(p1, q1), (p2, q2)], k_total)?;
    let s = p1 + q1 + p2 + q2;
    let cat = |n: usize| catalan(n as i64).expect("index >= -1");
    let num = [p1, q1, p2, q2].iter().fold(BigInt::one(), |acc, &x| acc * cat(x - 1))
        * catalan(k_total as i64 + 1 - s as i64)?
        * (k_total + 2 - s)
        * (k_total + 1 - s);
    let den = cat(k_total - 1) * (k_total - 1) * (k_total - 1);
    Ok(BigRat::new(num, den))
}

/// `(p)_l (q)_l / l!` for `l = 0..=min(p, q)`.
fn link_weights(p: usize, q: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    for l in 1..=p.min(q) {
        let v = &out[l - 1] * (p - l + 1) * (q - l + 1) / l;
        out.push(v);
    }
    out
}

/// Number of perfect matchings of `[K]` linking the two blocks, i.e.
/// `(K-1)!! C(p,q,K)`, from `Σ_l (-1)^{l+1} (p)_l (q)_l / l! (K-2l-1)!!`.
fn linking_count(p: usize, q: usize, k_total: usize, df: &[BigInt]) -> BigInt {
    let half = k_total / 2;
    let mut acc = BigInt::zero();
    for (l, w) in link_weights(p, q).iter().enumerate().skip(1) {
        let t = w * &df[half - l];
        if l % 2 == 1 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    acc
}

/// `C(p,q,K)`, the probability that a uniform perfect matching of `[K]` has
/// at least one edge between a block of `p` points and a disjoint block of
/// `q` points, via the full inclusion-exclusion sum.
pub fn match_prob_exact(p: usize, q: usize, k_total: usize) -> Result<BigRat> {
    check_blocks(&[(p, q)], k_total)?;
    let df = odd_double_factorials(k_total / 2);
    let n = linking_count(p, q, k_total, &df);
    Ok(BigRat::new(n, df[k_total / 2].clone()))
}

/// The alternating series in floating point. Returns `None` when the
/// estimated rounding error would exceed [`ROUNDING_LIMIT`].
fn series_f64(p: usize, q: usize, k: usize, tol: f64) -> Option<Bounded> {
    let l_max = p.min(q);
    let mut t = (p * q) as f64 / (k - 1) as f64;
    let (mut sum, mut abs_sum) = (0.0, 0.0);
    for l in 1..=l_max {
        if l % 2 == 1 {
            sum += t;
        } else {
            sum -= t;
        }
        abs_sum += t;
        let rounding = abs_sum * (5 * l + 2) as f64 * f64::EPSILON;
        if rounding > ROUNDING_LIMIT {
            return None;
        }
        if l == l_max {
            return Some(Bounded {
                value: sum,
                error_bound: rounding,
            });
        }
        let ratio = ((p - l) * (q - l)) as f64 / ((k - 2 * l - 1) * (l + 1)) as f64;
        let next = t * ratio;
        // Once the ratio drops below 1 it stays below 1, so the terms
        // decrease from here on and the first omitted term bounds the tail.
        if ratio < 1.0 && next < tol {
            return Some(Bounded {
                value: sum,
                error_bound: next + rounding,
            });
        }
        t = next;
    }
    unreachable!("loop returns at l = l_max")
}

/// Probability that no edge joins the two blocks: `Q(p', q, n - p')` for
/// `p' = 0..=n`, where the third block holds the remaining points.
///
/// Conditioning on the partner of one point of the first block gives
/// `Q(p,q,r) = ((p-1) Q(p-2,q,r) + r Q(p-1,q,r-1)) / (p+q+r-1)`. Both
/// branches lower `p + r` by two, so the recursion runs over anti-diagonals
/// `p + r = m` of the parity of `n`, each with a single denominator. Every
/// step is a sub-convex combination of values in `[0, 1]`, so the absolute
/// rounding error grows by a few ulps per diagonal, plus the flush
/// threshold for values set to zero.
fn no_link_diagonal(q: usize, n: usize) -> Vec<f64> {
    let index: Vec<f64> = (0..=n).map(|i| i as f64).collect();
    let mut cur: Vec<f64> = vec![1.0; 1 + n % 2];
    if n % 2 == 1 {
        // m = 1: Q(0, q, 1) = 1, Q(1, q, 0) = 0.
        cur[1] = 0.0;
    }
    let mut next: Vec<f64> = Vec::with_capacity(n + 1);
    for m in (n % 2 + 2..=n).step_by(2) {
        let (mf, w) = (index[m], 1.0 / (q + m - 1) as f64);
        next.clear();
        next.push(1.0);
        next.push(flush(index[m - 1] * cur[0] * w));
        // p = 2..=m-1 uses both branches; at p = m the third block is empty.
        next.extend(
            cur[..m - 2]
                .iter()
                .zip(&cur[1..m - 1])
                .zip(&index[2..m])
                .map(|((&a, &b), &pf)| flush(((pf - 1.0) * a + (mf - pf) * b) * w)),
        );
        next.push(flush(index[m - 1] * cur[m - 2] * w));
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// Values below this are set to zero; subnormal arithmetic is very slow.
const FLUSH_BELOW: f64 = 1e-290;

fn flush(x: f64) -> f64 {
    if x < FLUSH_BELOW {
        0.0
    } else {
        x
    }
}

fn no_link_error(p: usize) -> f64 {
    (4 * p + 6) as f64 * f64::EPSILON + p as f64 * FLUSH_BELOW
}

/// `C(p,q,K)` in floating point. The alternating series is summed until the
/// terms are decreasing and below `tol`; where cancellation would be severe
/// the complement recursion is used instead. The bound covers truncation
/// and rounding.
pub fn match_prob_truncated(p: usize, q: usize, k_total: usize, tol: f64) -> Result<Bounded> {
    check_blocks(&[(p, q)], k_total)?;
    if !(tol > 0.0) {
        return invalid("tol must be positive");
    }
    if let Some(b) = series_f64(p, q, k_total, tol) {
        return Ok(b);
    }
    let (small, large) = (p.min(q), p.max(q));
    let q0 = no_link_diagonal(large, k_total - large)[small];
    Ok(Bounded {
        value: 1.0 - q0,
        error_bound: no_link_error(small),
    })
}

/// `1 - exp(-pq/K)`.
pub fn match_prob_approx(p: usize, q: usize, k_total: usize) -> Result<f64> {
    check_blocks(&[(p, q)], k_total)?;
    Ok(-(-((p * q) as f64) / k_total as f64).exp_m1())
}

pub fn match_prob(p: usize, q: usize, k_total: usize, mode: EvalMode) -> Result<KernelValue> {
    Ok(match mode {
        EvalMode::Exact => KernelValue::Exact(match_prob_exact(p, q, k_total)?),
        EvalMode::Truncated => match_prob_truncated(p, q, k_total, 1e-16)?.into(),
        EvalMode::Approx => KernelValue::Float {
            value: match_prob_approx(p, q, k_total)?,
            error_bound: None,
        },
    })
}

/// Probability that a uniform perfect matching links both block pairs
/// `(p1, q1)` and `(p2, q2)`, via the double inclusion-exclusion sum
/// `Σ (-1)^{l1+l2} (p1)_{l1} (q1)_{l1} (p2)_{l2} (q2)_{l2} / (l1! l2! (K-1)(K-3)...(K-2l1-2l2+1))`.
pub fn match_prob_double_exact(p1: usize, q1: usize, p2: usize, q2: usize, k_total: usize) -> Result<BigRat> {
    check_blocks(&[(p1, q1), (p2, q2)], k_total)?;
    let half = k_total / 2;
    let df = odd_double_factorials(half);
    let (w1, w2) = (link_weights(p1, q1), link_weights(p2, q2));
    let mut acc = BigInt::zero();
    for (l1, a) in w1.iter().enumerate().skip(1) {
        for (l2, b) in w2.iter().enumerate().skip(1) {
            let t = a * b * &df[half - l1 - l2];
            if (l1 + l2) % 2 == 0 {
                acc += t;
            } else {
                acc -= t;
            }
        }
    }
    Ok(BigRat::new(acc, df[half].clone()))
}

/// The double sum in floating point, with terms formed in log space. No
/// truncation; the bound covers rounding only and grows with the size of the
/// largest term, so this is meant for moderate block sizes.
pub fn match_prob_double_truncated(p1: usize, q1: usize, p2: usize, q2: usize, k_total: usize) -> Result<Bounded> {
    check_blocks(&[(p1, q1), (p2, q2)], k_total)?;
    let ln_weights = |p: usize, q: usize| {
        let mut out = vec![0.0f64];
        for l in 1..=p.min(q) {
            let v = out[l - 1] + (((p - l + 1) * (q - l + 1)) as f64 / l as f64).ln();
            out.push(v);
        }
        out
    };
    let (w1, w2) = (ln_weights(p1, q1), ln_weights(p2, q2));
    let l_total = w1.len() + w2.len() - 2;
    let mut ln_den = vec![0.0f64];
    for l in 1..=l_total {
        let v = ln_den[l - 1] + ((k_total - 2 * l + 1) as f64).ln();
        ln_den.push(v);
    }
    let (mut sum, mut abs_sum) = (0.0, 0.0);
    for (l1, a) in w1.iter().enumerate().skip(1) {
        for (l2, b) in w2.iter().enumerate().skip(1) {
            let t = (a + b - ln_den[l1 + l2]).exp();
            if (l1 + l2) % 2 == 0 {
                sum += t;
            } else {
                sum -= t;
            }
            abs_sum += t;
        }
    }
    // Each log-space term carries a relative error of a few ulps per factor.
    let terms = ((w1.len() - 1) * (w2.len() - 1)) as f64;
    let error_bound = abs_sum * (8.0 * l_total as f64 + terms + 4.0) * f64::EPSILON;
    Ok(Bounded {
        value: sum,
        error_bound,
    })
}

pub fn match_prob_double_approx(p1: usize, q1: usize, p2: usize, q2: usize, k_total: usize) -> Result<f64> {
    check_blocks(&[(p1, q1), (p2, q2)], k_total)?;
    let k = k_total as f64;
    Ok((-(-((p1 * q1) as f64) / k).exp_m1()) * (-(-((p2 * q2) as f64) / k).exp_m1()))
}

pub fn match_prob_double(p1: usize, q1: usize, p2: usize, q2: usize, k_total: usize, mode: EvalMode) -> Result<KernelValue> {
    Ok(match mode {
        EvalMode::Exact => KernelValue::Exact(match_prob_double_exact(p1, q1, p2, q2, k_total)?),
        EvalMode::Truncated => match_prob_double_truncated(p1, q1, p2, q2, k_total)?.into(),
        EvalMode::Approx => KernelValue::Float {
            value: match_prob_double_approx(p1, q1, p2, q2, k_total)?,
            error_bound: None,
        },
    })
}

/// Largest `K` accepted by [`bruteforce_match_prob`] (`11!! = 10395`
/// matchings).
pub const MAX_BRUTEFORCE_K: usize = 12;

/// Probability, by enumerating every perfect matching of `[K]`, that each
/// block pair is linked at least once. Blocks are laid out consecutively.
pub fn bruteforce_match_prob(blocks: &[(usize, usize)], k_total: usize) -> Result<BigRat> {
    if blocks.is_empty() {
        return invalid("need at least one block pair");
    }
    check_blocks(blocks, k_total)?;
    if k_total > MAX_BRUTEFORCE_K {
        return invalid(format!("enumeration limited to K <= {MAX_BRUTEFORCE_K}"));
    }
    // side[x] = Some((pair, 0 or 1)) for points inside a block.
    let mut side = vec![None; k_total];
    let mut pos = 0;
    for (i, &(p, q)) in blocks.iter().enumerate() {
        for s in &mut side[pos..pos + p] {
            *s = Some((i, 0));
        }
        for s in &mut side[pos + p..pos + p + q] {
            *s = Some((i, 1));
        }
        pos += p + q;
    }
    let all_linked = (1u32 << blocks.len()) - 1;

    fn walk(free: u32, linked: u32, side: &[Option<(usize, u8)>], target: u32, hits: &mut u64, total: &mut u64) {
        if free == 0 {
            *total += 1;
            if linked == target {
                *hits += 1;
            }
            return;
        }
        let a = free.trailing_zeros() as usize;
        let rest = free & !(1 << a);
        let mut others = rest;
        while others != 0 {
            let b = others.trailing_zeros() as usize;
            others &= others - 1;
            let link = match (side[a], side[b]) {
                (Some((i, sa)), Some((j, sb))) if i == j && sa != sb => 1 << i,
                _ => 0,
            };
            walk(rest & !(1 << b), linked | link, side, target, hits, total);
        }
    }

    let (mut hits, mut total) = (0u64, 0u64);
    walk((1u32 << k_total) - 1, 0, &side, all_linked, &mut hits, &mut total);
    Ok(BigRat::new(hits.into(), total.into()))
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return invalid("k must be >= 1");
    }
    Ok(())
}

/// `E S_k` as an exact rational. All intermediate quantities are integers;
/// the single division happens at the end.
pub fn expected_sk_exact(k: usize) -> Result<BigRat> {
    check_k(k)?;
    let kt = 2 * k;
    let cat = catalans(kt);
    let df = odd_double_factorials(k);
    let mut acc = BigInt::zero();
    for q in 1..kt {
        for p in q..=kt - q {
            let mut t = &cat[p - 1] * &cat[q - 1] * &cat[kt - p - q] * (kt + 1 - p - q) * linking_count(p, q, kt, &df);
            if p != q {
                t *= 2u32;
            }
            acc += t;
        }
    }
    Ok(BigRat::new(acc, &cat[kt - 1] * &df[k]))
}

/// `E S_k` in floating point. Each `C(p,q,K)` comes from the series where
/// that is numerically safe; for block sizes where it is not, one complement
/// table per `q` serves all remaining `p`. Total cost is `O(K^3)` in the
/// worst case.
pub fn expected_sk_truncated(k: usize) -> Result<Bounded> {
    check_k(k)?;
    let kt = 2 * k;
    let c = scaled_catalans(kt);
    let (mut acc, mut err) = (0.0, 0.0);
    for q in 1..=k {
        let mut table: Option<Vec<f64>> = None;
        for p in q..=kt - q {
            let weight = if p == q { 1.0 } else { 2.0 } * scaled_subtree_law(&c, p, q, kt);
            let link = match (&table, series_f64(p, q, kt, 1e-20)) {
                (None, Some(b)) => b,
                _ => {
                    let t = table.get_or_insert_with(|| no_link_diagonal(q, kt - q));
                    Bounded {
                        value: 1.0 - t[p],
                        error_bound: no_link_error(p),
                    }
                }
            };
            acc += weight * link.value;
            err += weight * link.error_bound;
        }
    }
    let scale = (kt - 1) as f64;
    // The scaled Catalan recurrence and the products in the subtree law
    // contribute a relative error of O(K) ulps.
    let law_error = acc * (6 * kt + 10) as f64 * f64::EPSILON;
    Ok(Bounded {
        value: scale * acc,
        error_bound: scale * (err + law_error),
    })
}

/// `E S_k` with `C(p,q,K)` replaced by `1 - exp(-pq/K)`.
pub fn expected_sk_approx(k: usize) -> Result<f64> {
    check_k(k)?;
    let kt = 2 * k;
    let c = scaled_catalans(kt);
    let mut acc = 0.0;
    for q in 1..=k {
        for p in q..=kt - q {
            let weight = if p == q { 1.0 } else { 2.0 } * scaled_subtree_law(&c, p, q, kt);
            acc += weight * -(-((p * q) as f64) / kt as f64).exp_m1();
        }
    }
    Ok((kt - 1) as f64 * acc)
}

pub fn expected_sk(k: usize, mode: EvalMode) -> Result<KernelValue> {
    Ok(match mode {
        EvalMode::Exact => KernelValue::Exact(expected_sk_exact(k)?),
        EvalMode::Truncated => expected_sk_truncated(k)?.into(),
        EvalMode::Approx => KernelValue::Float {
            value: expected_sk_approx(k)?,
            error_bound: None,
        },
    })
}

/// `(1/√(2π)) √k ln k`.
pub fn expected_sk_asymptote(k: usize) -> f64 {
    let k = k as f64;
    k.sqrt() * k.ln() / (2.0 * std::f64::consts::PI).sqrt()
}

/// One row of the `E S_k` table. `ratio_to_asymptote` is infinite at `k = 1`,
/// where the asymptote vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedSkRow {
    pub k: usize,
    pub exact: Option<BigRat>,
    pub float: Bounded,
    pub ratio_to_asymptote: f64,
}

pub fn expected_sk_row(k: usize, with_exact: bool) -> Result<ExpectedSkRow> {
    let float = expected_sk_truncated(k)?;
    let exact = if with_exact { Some(expected_sk_exact(k)?) } else { None };
    Ok(ExpectedSkRow {
        k,
        exact,
        float,
        ratio_to_asymptote: float.value / expected_sk_asymptote(k),
    })
}
