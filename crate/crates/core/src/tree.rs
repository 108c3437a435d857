//! Isolation trees shared by all three detectors.
//!
//! A tree is stored as a flat preorder node list. Internal nodes carry a
//! [`SplitRule`]; leaves carry the number of training points that reached
//! them and their depth. The split strategy is pluggable through
//! [`Splitter`].

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::RngStream;

/// Euler–Mascheroni constant, truncated to the ten digits used by the
/// harmonic-number approximation `H(i) ≈ ln(i) + γ`.
pub const EULER_GAMMA: f64 = 0.5772156649;

/// Average path length of an unsuccessful search in a binary search tree
/// holding `n` keys: `2·H(n−1) − 2(n−1)/n`, with `c(0) = c(1) = 0`.
pub fn c_factor(n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let n = n as f64;
    2.0 * ((n - 1.0).ln() + EULER_GAMMA) - 2.0 * (n - 1.0) / n
}

#[derive(Clone, Debug, PartialEq)]
pub enum SplitRule {
    /// `x[dim] < value` goes left.
    Axis { dim: usize, value: f64 },
    /// `(x − intercept)·normal < 0` goes left.
    Hyperplane {
        normal: Vec<f64>,
        intercept: Vec<f64>,
    },
}

impl SplitRule {
    #[inline]
    pub fn goes_left(&self, x: &[f64]) -> bool {
        match self {
            SplitRule::Axis { dim, value } => x[*dim] < *value,
            SplitRule::Hyperplane { normal, intercept } => {
                let side: f64 = x
                    .iter()
                    .zip(intercept)
                    .zip(normal)
                    .map(|((xi, pi), ni)| (xi - pi) * ni)
                    .sum();
                side < 0.0
            }
        }
    }

    /// Reals needed to store the rule: 2 for an axis split (dimension and
    /// value), `2d` for a hyperplane (normal and intercept).
    pub fn storage_len(&self) -> usize {
        match self {
            SplitRule::Axis { .. } => 2,
            SplitRule::Hyperplane { normal, intercept } => normal.len() + intercept.len(),
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            SplitRule::Axis { dim: j, value } => {
                if *j >= dim || !value.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "axis split on dimension {j} with value {value} in a {dim}-D tree"
                    )));
                }
            }
            SplitRule::Hyperplane { normal, intercept } => {
                if normal.len() != dim || intercept.len() != dim {
                    return Err(Error::InvalidParameter(format!(
                        "hyperplane of dimension {}/{} in a {dim}-D tree",
                        normal.len(),
                        intercept.len()
                    )));
                }
                let norm = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-12 || intercept.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "hyperplane normal has norm {norm}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Internal {
        rule: SplitRule,
        left: usize,
        right: usize,
    },
    Leaf {
        size: usize,
        level: usize,
    },
}

/// Draws split rules for a node.
///
/// Implementations must only return rules that leave both sides of the
/// node's points non-empty. `None` means no separating rule was found within
/// the implementation's retry budget and the node becomes a leaf.
pub trait Splitter {
    fn draw(&self, points: &Matrix, idx: &[usize], rng: &mut RngStream) -> Option<SplitRule>;
}

/// Axis-aligned splits: a uniformly random dimension, split at a uniform
/// value inside that dimension's range at the node.
#[derive(Clone, Copy, Debug, Default)]
pub struct AxisSplitter;

impl AxisSplitter {
    const VALUE_RETRIES: usize = 8;
}

impl Splitter for AxisSplitter {
    fn draw(&self, points: &Matrix, idx: &[usize], rng: &mut RngStream) -> Option<SplitRule> {
        let d = points.cols();
        // A constant dimension is redrawn, at most d times in total.
        for _ in 0..d {
            let dim = rng.index(d);
            let (lo, hi) = column_range(points, idx, dim);
            if lo >= hi {
                continue;
            }
            for _ in 0..Self::VALUE_RETRIES {
                let value = rng.uniform(lo, hi);
                // value == lo would leave the left side empty
                if value > lo {
                    return Some(SplitRule::Axis { dim, value });
                }
            }
        }
        None
    }
}

/// Minimum and maximum of one column over the selected rows.
pub fn column_range(points: &Matrix, idx: &[usize], dim: usize) -> (f64, f64) {
    idx.iter()
        .map(|&i| points[(i, dim)])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

fn all_identical(points: &Matrix, idx: &[usize]) -> bool {
    let first = points.row(idx[0]);
    idx[1..].iter().all(|&i| points.row(i) == first)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ITree {
    nodes: Vec<Node>,
    depth_limit: usize,
    dim: usize,
    training_size: usize,
}

impl ITree {
    /// Grows a tree over every row of `points`.
    pub fn build<S: Splitter + ?Sized>(
        points: &Matrix,
        depth_limit: usize,
        splitter: &S,
        rng: &mut RngStream,
    ) -> Result<ITree> {
        if points.rows() == 0 {
            return Err(Error::TooFewPoints(0));
        }
        let mut idx: Vec<usize> = (0..points.rows()).collect();
        let mut tree = ITree {
            nodes: Vec::new(),
            depth_limit,
            dim: points.cols(),
            training_size: points.rows(),
        };
        tree.grow(points, &mut idx, 0, splitter, rng);
        Ok(tree)
    }

    fn grow<S: Splitter + ?Sized>(
        &mut self,
        points: &Matrix,
        idx: &mut [usize],
        level: usize,
        splitter: &S,
        rng: &mut RngStream,
    ) -> usize {
        let at = self.nodes.len();
        let n = idx.len();
        let leaf = Node::Leaf { size: n, level };
        if n <= 1 || level >= self.depth_limit || all_identical(points, idx) {
            self.nodes.push(leaf);
            return at;
        }
        let Some(rule) = splitter.draw(points, idx, rng) else {
            self.nodes.push(leaf);
            return at;
        };
        let split = partition(idx, |&i| rule.goes_left(points.row(i)));
        if split == 0 || split == n {
            debug_assert!(false, "splitter returned a rule with an empty side");
            self.nodes.push(leaf);
            return at;
        }
        self.nodes.push(Node::Internal {
            rule,
            left: 0,
            right: 0,
        });
        let (left_idx, right_idx) = idx.split_at_mut(split);
        let left = self.grow(points, left_idx, level + 1, splitter, rng);
        let right = self.grow(points, right_idx, level + 1, splitter, rng);
        if let Node::Internal {
            left: l, right: r, ..
        } = &mut self.nodes[at]
        {
            *l = left;
            *r = right;
        }
        at
    }

    /// Reassembles a tree from a preorder node list, checking that child
    /// links form a proper preorder binary tree, that leaf levels match
    /// their depth and stay within `depth_limit`, and that leaves are
    /// non-empty. Runs in one pass without recursion, so hostile inputs
    /// cannot exhaust the stack.
    pub fn from_nodes(nodes: Vec<Node>, depth_limit: usize, dim: usize) -> Result<ITree> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        // Internal nodes whose right subtree has not started yet, with the
        // level of that subtree.
        let mut pending: Vec<(usize, usize)> = Vec::new();
        let mut level = Some(0);
        let mut training_size = 0usize;
        for (at, node) in nodes.iter().enumerate() {
            let Some(depth) = level else {
                return bad(format!(
                    "tree has {} nodes but only {at} are reachable",
                    nodes.len()
                ));
            };
            match node {
                Node::Leaf { size, level: l } => {
                    if *l != depth {
                        return bad(format!("leaf {at} records level {l} at depth {depth}"));
                    }
                    if *size == 0 {
                        return bad(format!("leaf {at} is empty"));
                    }
                    training_size = training_size.saturating_add(*size);
                    level = match pending.pop() {
                        Some((parent, child_level)) => {
                            let Node::Internal { right, .. } = &nodes[parent] else {
                                unreachable!("only internal nodes are pending");
                            };
                            if *right != at + 1 {
                                return bad(format!(
                                    "node {parent}: right child {right} is not {}",
                                    at + 1
                                ));
                            }
                            Some(child_level)
                        }
                        None => None,
                    };
                }
                Node::Internal { rule, left, .. } => {
                    rule.validate(dim)?;
                    if *left != at + 1 {
                        return bad(format!("node {at}: left child {left} is not {}", at + 1));
                    }
                    if depth >= depth_limit {
                        return bad(format!(
                            "node {at} splits at depth {depth}, limit is {depth_limit}"
                        ));
                    }
                    pending.push((at, depth + 1));
                    level = Some(depth + 1);
                }
            }
        }
        if level.is_some() {
            return bad(format!("node {} out of range", nodes.len()));
        }
        Ok(ITree {
            nodes,
            depth_limit,
            dim,
            training_size,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn depth_limit(&self) -> usize {
        self.depth_limit
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of training points the tree was grown on.
    pub fn training_size(&self) -> usize {
        self.training_size
    }

    pub fn internal_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Internal { .. }))
            .count()
    }

    pub fn leaves(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf { size, level } => Some((*size, *level)),
            Node::Internal { .. } => None,
        })
    }

    /// Index of the leaf node `x` falls into.
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { .. } => return at,
                Node::Internal { rule, left, right } => {
                    at = if rule.goes_left(x) { *left } else { *right };
                }
            }
        }
    }

    /// Depth of the leaf reached by `x` plus `c(size)` of that leaf.
    pub fn path_length(&self, x: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(x)] {
            Node::Leaf { size, level } => level as f64 + c_factor(size),
            Node::Internal { .. } => unreachable!(),
        }
    }

    /// Reals used by split rules across all internal nodes.
    pub fn split_storage_len(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| match n {
                Node::Internal { rule, .. } => rule.storage_len(),
                Node::Leaf { .. } => 0,
            })
            .sum()
    }
}

/// Unstable in-place partition; returns the number of elements for
/// which `pred` holds, which end up at the front.
fn partition<T, F: Fn(&T) -> bool>(items: &mut [T], pred: F) -> usize {
    let mut front = 0;
    for i in 0..items.len() {
        if pred(&items[i]) {
            items.swap(front, i);
            front += 1;
        }
    }
    front
}
