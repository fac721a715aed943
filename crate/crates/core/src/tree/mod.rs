//! Planted binary trees with labelled leaves, sampled uniformly by Rémy's
//! insertion, plus the pair-LCA statistic `S_k` and a discrete excursion
//! model used to couple `S_k` with interval graphs.

mod enumerate;
mod excursion;
mod lca;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{invalid, Error, Result};

pub use enumerate::{bruteforce_sk_distribution, enumerate_trees, TreeEnumeration, MAX_ENUMERATION_K};
pub use excursion::{coupled_sample, dyck_sample, CoupledDraw, Excursion, PairSample};
pub use lca::{pair_lcas, sk_of_tree, SparseTableMin};

const NONE: u32 = u32::MAX;

/// Arena-backed planted binary tree. Node 0 is the unary root; every other
/// internal node has exactly two children. Leaves carry labels
/// `0..n_leaves`.
#[derive(Clone, PartialEq, Eq)]
pub struct LabeledTree {
    parent: Vec<u32>,
    left: Vec<u32>,
    right: Vec<u32>,
    label: Vec<u32>,
    leaf_of_label: Vec<u32>,
}

impl LabeledTree {
    /// The single-leaf planted tree: root -> leaf 0.
    pub fn single_leaf() -> Self {
        Self {
            parent: vec![NONE, 0],
            left: vec![1, NONE],
            right: vec![NONE, NONE],
            label: vec![NONE, 0],
            leaf_of_label: vec![1],
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.leaf_of_label.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> u32 {
        0
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        let p = self.parent[v as usize];
        (p != NONE).then_some(p)
    }

    /// `(left, right)` for a binary node, `None` for leaves and the planted
    /// root.
    pub fn children(&self, v: u32) -> Option<(u32, u32)> {
        let (l, r) = (self.left[v as usize], self.right[v as usize]);
        (l != NONE && r != NONE).then_some((l, r))
    }

    pub fn label(&self, v: u32) -> Option<u32> {
        let l = self.label[v as usize];
        (l != NONE).then_some(l)
    }

    pub fn leaf(&self, label: u32) -> u32 {
        self.leaf_of_label[label as usize]
    }

    pub fn is_leaf(&self, v: u32) -> bool {
        self.label[v as usize] != NONE
    }

    /// The top binary vertex (child of the planted root), or the only leaf.
    pub fn top(&self) -> u32 {
        self.left[0]
    }

    /// Binary vertices, i.e. every node except leaves and the planted root.
    pub fn internal_nodes(&self) -> impl Iterator<Item = u32> + '_ {
        (1..self.n_nodes() as u32).filter(|&v| !self.is_leaf(v))
    }

    /// Inserts a new leaf with the next label. `choice` indexes the
    /// `2 * (n_nodes - 1)` edge sides: the edge above node `1 + choice / 2`,
    /// with the new leaf on the left when `choice` is even.
    pub fn insert_leaf(&mut self, choice: usize) {
        let edges = self.n_nodes() - 1;
        assert!(choice < 2 * edges, "choice {choice} out of range");
        let x = (1 + choice / 2) as u32;
        let leaf_on_left = choice.is_multiple_of(2);
        let par = self.parent[x as usize];
        let u = self.n_nodes() as u32;
        let leaf = u + 1;
        let new_label = self.n_leaves() as u32;

        if self.left[par as usize] == x {
            self.left[par as usize] = u;
        } else {
            self.right[par as usize] = u;
        }
        let (l, r) = if leaf_on_left { (leaf, x) } else { (x, leaf) };
        self.parent.extend([par, u]);
        self.left.extend([l, NONE]);
        self.right.extend([r, NONE]);
        self.label.extend([NONE, new_label]);
        self.leaf_of_label.push(leaf);
        self.parent[x as usize] = u;
    }

    /// Builds the tree from a full sequence of Rémy choices; choice `i`
    /// (0-based) must lie in `0..2 * (2i + 1)`.
    pub fn from_remy_choices(choices: &[usize]) -> Self {
        let mut tree = Self::single_leaf();
        for &c in choices {
            tree.insert_leaf(c);
        }
        tree
    }

    /// Preorder encoding: `None` for a binary vertex, `Some(label)` for a
    /// leaf. Two trees are equal as plane labelled trees iff their codes
    /// match.
    pub fn canonical_code(&self) -> Vec<Option<u32>> {
        let mut out = Vec::with_capacity(self.n_nodes() - 1);
        let mut stack = vec![self.top()];
        while let Some(v) = stack.pop() {
            match self.children(v) {
                Some((l, r)) => {
                    out.push(None);
                    stack.push(r);
                    stack.push(l);
                }
                None => out.push(self.label(v)),
            }
        }
        out
    }

    /// Depth of every node, the planted root at depth 0.
    pub fn depths(&self) -> Vec<u32> {
        let mut depth = vec![0u32; self.n_nodes()];
        let mut stack = vec![self.top()];
        depth[self.top() as usize] = 1;
        while let Some(v) = stack.pop() {
            if let Some((l, r)) = self.children(v) {
                let d = depth[v as usize] + 1;
                depth[l as usize] = d;
                depth[r as usize] = d;
                stack.push(l);
                stack.push(r);
            }
        }
        depth
    }

    /// Number of leaves below each node.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![0usize; self.n_nodes()];
        let mut order = Vec::with_capacity(self.n_nodes());
        let mut stack = vec![self.top()];
        while let Some(v) = stack.pop() {
            order.push(v);
            if let Some((l, r)) = self.children(v) {
                stack.push(l);
                stack.push(r);
            }
        }
        for &v in order.iter().rev() {
            size[v as usize] = match self.children(v) {
                Some((l, r)) => size[l as usize] + size[r as usize],
                None => 1,
            };
        }
        size[0] = size[self.top() as usize];
        size
    }
}

/// A uniform planted binary tree with `n_leaves` labelled leaves.
pub fn remy_sample<R: Rng + ?Sized>(n_leaves: usize, rng: &mut R) -> Result<LabeledTree> {
    if n_leaves == 0 {
        return invalid("remy_sample needs at least one leaf");
    }
    let mut tree = LabeledTree::single_leaf();
    tree.parent.reserve(2 * n_leaves);
    tree.left.reserve(2 * n_leaves);
    tree.right.reserve(2 * n_leaves);
    tree.label.reserve(2 * n_leaves);
    tree.leaf_of_label.reserve(n_leaves);
    for i in 1..n_leaves {
        tree.insert_leaf(rng.random_range(0..2 * (2 * i - 1)));
    }
    Ok(tree)
}

/// One draw of `S_k` for `k` leaf pairs.
pub fn sample_sk<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<usize> {
    if k == 0 {
        return invalid("sample_sk needs k >= 1");
    }
    sk_of_tree(&remy_sample(2 * k, rng)?)
}

impl fmt::Display for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &LabeledTree, v: u32, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t.children(v) {
                Some((l, r)) => {
                    write!(f, "(")?;
                    go(t, l, f)?;
                    write!(f, ",")?;
                    go(t, r, f)?;
                    write!(f, ")")
                }
                None => write!(f, "{}", t.label[v as usize]),
            }
        }
        go(self, self.top(), f)
    }
}

impl fmt::Debug for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LabeledTree({self})")
    }
}

/// Parses the nested form printed by `Display`, e.g. `((0,2),(1,3))`.
impl FromStr for LabeledTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedTree(s.to_string());
        let bytes: Vec<u8> = s.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
        let mut tree = LabeledTree {
            parent: vec![NONE],
            left: vec![NONE],
            right: vec![NONE],
            label: vec![NONE],
            leaf_of_label: Vec::new(),
        };
        let mut labels = Vec::new();
        let mut pos = 0usize;

        fn node(t: &mut LabeledTree, parent: u32) -> u32 {
            let id = t.parent.len() as u32;
            t.parent.push(parent);
            t.left.push(NONE);
            t.right.push(NONE);
            t.label.push(NONE);
            id
        }

        fn parse(
            b: &[u8],
            pos: &mut usize,
            t: &mut LabeledTree,
            parent: u32,
            labels: &mut Vec<(u32, u32)>,
        ) -> Option<u32> {
            let id = node(t, parent);
            if *b.get(*pos)? == b'(' {
                *pos += 1;
                let l = parse(b, pos, t, id, labels)?;
                if *b.get(*pos)? != b',' {
                    return None;
                }
                *pos += 1;
                let r = parse(b, pos, t, id, labels)?;
                if *b.get(*pos)? != b')' {
                    return None;
                }
                *pos += 1;
                t.left[id as usize] = l;
                t.right[id as usize] = r;
            } else {
                let start = *pos;
                while b.get(*pos).is_some_and(u8::is_ascii_digit) {
                    *pos += 1;
                }
                let lab: u32 = std::str::from_utf8(&b[start..*pos]).ok()?.parse().ok()?;
                t.label[id as usize] = lab;
                labels.push((lab, id));
            }
            Some(id)
        }

        let top = parse(&bytes, &mut pos, &mut tree, 0, &mut labels).ok_or_else(bad)?;
        if pos != bytes.len() {
            return Err(bad());
        }
        tree.left[0] = top;
        labels.sort_unstable();
        if labels.iter().enumerate().any(|(i, &(lab, _))| lab as usize != i) {
            return Err(bad());
        }
        tree.leaf_of_label = labels.into_iter().map(|(_, id)| id).collect();
        Ok(tree)
    }
}
