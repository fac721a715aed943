//! Last common ancestors of leaf pairs.
//!
//! In the in-order sequence of a full binary tree leaves and binary
//! vertices alternate: leaf, vertex, leaf, ..., leaf. The LCA of two leaves
//! is the unique shallowest vertex strictly between them in that sequence,
//! so pair LCAs reduce to range-minimum queries over the vertex depths
//! (the in-order restriction of an Euler tour).

use super::LabeledTree;
use crate::error::{invalid, Result};

/// Sparse table for `O(1)` range minimum over a fixed slice.
#[derive(Debug, Clone)]
pub struct SparseTableMin<T> {
    n: usize,
    // levels[j][i] = min(a[i .. i + 2^j])
    levels: Vec<Vec<T>>,
}

impl<T: Ord + Copy> SparseTableMin<T> {
    pub fn new(a: &[T]) -> Self {
        let n = a.len();
        let mut levels = vec![a.to_vec()];
        let mut width = 1;
        while 2 * width <= n {
            let prev = levels.last().unwrap();
            let next: Vec<T> = (0..=n - 2 * width)
                .map(|i| prev[i].min(prev[i + width]))
                .collect();
            levels.push(next);
            width *= 2;
        }
        Self { n, levels }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Minimum of `a[lo..hi]`; panics on an empty range.
    pub fn query(&self, lo: usize, hi: usize) -> T {
        assert!(lo < hi && hi <= self.n, "bad range {lo}..{hi}");
        let j = (hi - lo).ilog2() as usize;
        let row = &self.levels[j];
        row[lo].min(row[hi - (1 << j)])
    }
}

/// In-order positions of leaves, and `(depth, node)` of the binary vertex
/// sitting in each gap between consecutive leaves.
fn inorder_gaps(tree: &LabeledTree) -> (Vec<u32>, Vec<(u32, u32)>) {
    let n = tree.n_leaves();
    let mut leaf_pos = vec![0u32; n];
    let mut gaps = Vec::with_capacity(n.saturating_sub(1));
    let mut leaves_seen = 0u32;
    // (node, depth, expanded)
    let mut stack = vec![(tree.top(), 1u32, false)];
    while let Some((v, d, expanded)) = stack.pop() {
        match tree.children(v) {
            None => {
                leaf_pos[tree.label[v as usize] as usize] = leaves_seen;
                leaves_seen += 1;
            }
            Some((l, r)) if !expanded => {
                stack.push((r, d + 1, false));
                stack.push((v, d, true));
                stack.push((l, d + 1, false));
            }
            Some(_) => gaps.push((d, v)),
        }
    }
    (leaf_pos, gaps)
}

/// LCA node of each leaf pair `(2i, 2i+1)`, in pair order.
pub fn pair_lcas(tree: &LabeledTree) -> Result<Vec<u32>> {
    let n = tree.n_leaves();
    if !n.is_multiple_of(2) {
        return invalid(format!("leaf pairs need an even number of leaves, got {n}"));
    }
    let (leaf_pos, gaps) = inorder_gaps(tree);
    let keyed: Vec<(u32, u32)> = gaps
        .iter()
        .enumerate()
        .map(|(i, &(d, _))| (d, i as u32))
        .collect();
    let rmq = SparseTableMin::new(&keyed);
    Ok(leaf_pos
        .chunks_exact(2)
        .map(|pair| {
            let (a, b) = (pair[0].min(pair[1]) as usize, pair[0].max(pair[1]) as usize);
            gaps[rmq.query(a, b).1 as usize].1
        })
        .collect())
}

/// `S(T)`: the number of distinct LCAs of the leaf pairs `(2i, 2i+1)`.
pub fn sk_of_tree(tree: &LabeledTree) -> Result<usize> {
    let mut seen = vec![false; tree.n_nodes()];
    Ok(pair_lcas(tree)?
        .into_iter()
        .filter(|&v| !std::mem::replace(&mut seen[v as usize], true))
        .count())
}
