//! Single decision tree: arena representation, growth, prediction.

use serde::{Deserialize, Serialize};

use super::impurity::Criterion;
use super::split::best_split;
use crate::rng::SplitMix64;

/// One node of a tree. Nodes live in a flat arena (`Tree::nodes`) with
/// the root at index 0, which keeps serialization non-recursive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        /// Laplace-smoothed vandalism probability (v+1)/(n+2)
        probability: f64,
    },
    Split {
        feature: u32,
        threshold: f64,
        /// rows with a missing (NaN) value follow this flag
        missing_left: bool,
        left: u32,
        right: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

pub(crate) struct GrowParams {
    pub max_depth: usize,
    pub features_per_split: usize,
    pub n_features: usize,
    pub criterion: Criterion,
    pub min_samples_leaf: usize,
}

impl Tree {
    /// Leaf probability for one row; NaN cells follow each split's
    /// missing direction.
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { probability } => return *probability,
                TreeNode::Split {
                    feature,
                    threshold,
                    missing_left,
                    left,
                    right,
                } => {
                    let v = row[*feature as usize];
                    let goes_left = if v.is_nan() { *missing_left } else { v <= *threshold };
                    at = if goes_left { *left } else { *right } as usize;
                }
            }
        }
    }

    /// Longest root-to-leaf path, counted in splits (a lone leaf is 0).
    pub fn depth(&self) -> usize {
        let mut deepest = 0;
        let mut stack = vec![(0u32, 0usize)];
        while let Some((at, d)) = stack.pop() {
            match &self.nodes[at as usize] {
                TreeNode::Leaf { .. } => deepest = deepest.max(d),
                TreeNode::Split { left, right, .. } => {
                    stack.push((*left, d + 1));
                    stack.push((*right, d + 1));
                }
            }
        }
        deepest
    }

    pub fn leaf_probabilities(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                TreeNode::Leaf { probability } => Some(*probability),
                _ => None,
            })
            .collect()
    }

    pub fn split_features(&self) -> Vec<u32> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                TreeNode::Split { feature, .. } => Some(*feature),
                _ => None,
            })
            .collect()
    }

    /// Grows a tree on the multiset of rows given by `indices`. The RNG
    /// is the tree's private stream; draws happen in a fixed depth-first
    /// order, so growth is deterministic.
    pub(crate) fn grow(
        matrix: &[Vec<f64>],
        labels: &[bool],
        indices: Vec<usize>,
        params: &GrowParams,
        rng: &mut SplitMix64,
    ) -> Tree {
        let mut nodes = Vec::new();
        grow_into(&mut nodes, matrix, labels, indices, 0, params, rng);
        Tree { nodes }
    }
}

fn laplace(pos: u64, n: u64) -> f64 {
    (pos + 1) as f64 / (n + 2) as f64
}

/// k distinct feature indices via partial Fisher–Yates.
fn sample_features(n_features: usize, k: usize, rng: &mut SplitMix64) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n_features).collect();
    let k = k.min(n_features);
    for i in 0..k {
        let j = i + rng.next_below((n_features - i) as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

fn grow_into(
    nodes: &mut Vec<TreeNode>,
    matrix: &[Vec<f64>],
    labels: &[bool],
    indices: Vec<usize>,
    depth: usize,
    params: &GrowParams,
    rng: &mut SplitMix64,
) -> u32 {
    let n = indices.len() as u64;
    let pos = indices.iter().filter(|&&i| labels[i]).count() as u64;
    let probability = laplace(pos, n);

    let must_stop = depth >= params.max_depth
        || pos == 0
        || pos == n
        || (n as usize) < 2 * params.min_samples_leaf
        || params.n_features == 0;
    let split = if must_stop {
        None
    } else {
        let candidates = sample_features(params.n_features, params.features_per_split, rng);
        best_split(
            matrix,
            &indices,
            labels,
            &candidates,
            params.criterion,
            params.min_samples_leaf,
        )
    };

    let Some(s) = split else {
        nodes.push(TreeNode::Leaf { probability });
        return (nodes.len() - 1) as u32;
    };

    let (mut left_idx, mut right_idx) = (Vec::new(), Vec::new());
    for i in indices {
        let v = matrix[i][s.feature];
        let goes_left = if v.is_nan() { s.missing_left } else { v <= s.threshold };
        if goes_left {
            left_idx.push(i);
        } else {
            right_idx.push(i);
        }
    }

    let slot = nodes.len();
    nodes.push(TreeNode::Leaf { probability }); // placeholder, patched below
    let left = grow_into(nodes, matrix, labels, left_idx, depth + 1, params, rng);
    let right = grow_into(nodes, matrix, labels, right_idx, depth + 1, params, rng);
    nodes[slot] = TreeNode::Split {
        feature: s.feature as u32,
        threshold: s.threshold,
        missing_left: s.missing_left,
        left,
        right,
    };
    slot as u32
}
