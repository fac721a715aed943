//! Exhaustive enumeration of `T_k` for tiny `k`, used as an oracle.

use num_bigint::BigInt;

use super::{sk_of_tree, LabeledTree};
use crate::error::{invalid, Result};
use crate::rational::BigRat;

/// Largest `k` accepted by the enumerators (30240 trees at `k = 3`).
pub const MAX_ENUMERATION_K: usize = 3;

/// Iterator over every planted binary tree with `2k` labelled leaves. Rémy
/// insertion sequences are in bijection with these trees, so walking all
/// mixed-radix choice vectors visits each tree exactly once.
#[derive(Debug, Clone)]
pub struct TreeEnumeration {
    radices: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for TreeEnumeration {
    type Item = LabeledTree;

    fn next(&mut self) -> Option<LabeledTree> {
        if self.done {
            return None;
        }
        let tree = LabeledTree::from_remy_choices(&self.digits);
        // Increment the last digit first.
        self.done = true;
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.radices[i] {
                self.done = false;
                break;
            }
            self.digits[i] = 0;
        }
        Some(tree)
    }
}

pub fn enumerate_trees(k: usize) -> Result<TreeEnumeration> {
    if k == 0 || k > MAX_ENUMERATION_K {
        return invalid(format!("enumerate_trees supports 1 <= k <= {MAX_ENUMERATION_K}, got {k}"));
    }
    let radices: Vec<usize> = (1..2 * k).map(|i| 2 * (2 * i - 1)).collect();
    Ok(TreeEnumeration {
        digits: vec![0; radices.len()],
        radices,
        done: false,
    })
}

/// Exact law `[P(S_k = 1), ..., P(S_k = k)]` by counting over all of `T_k`.
pub fn bruteforce_sk_distribution(k: usize) -> Result<Vec<BigRat>> {
    let mut counts = vec![0u64; k];
    let mut total = 0u64;
    for tree in enumerate_trees(k)? {
        counts[sk_of_tree(&tree)? - 1] += 1;
        total += 1;
    }
    Ok(counts
        .into_iter()
        .map(|c| BigRat::new(BigInt::from(c), BigInt::from(total)))
        .collect())
}
