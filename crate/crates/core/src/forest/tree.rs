use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::split::{best_split_with_min_leaf, FeatureMatrix};
use crate::rng::Rng;

/// Growth controls for a single tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeParams {
    pub mtry: usize,
    pub min_node: usize,
    pub max_depth: Option<usize>,
}

/// A binary regression tree stored as flat node arrays.
///
/// Node `k` is a leaf when `feature[k] < 0`; then `value[k]` is the leaf
/// mean. Otherwise `value[k]` is the split threshold and rows with
/// `x[feature] <= threshold` descend to `left[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub feature: Vec<i32>,
    pub value: Vec<f64>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    /// Training rows reaching the node (with bootstrap multiplicity).
    pub count: Vec<u32>,
    /// Bootstrap row indices, kept for out-of-bag estimates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<Vec<u32>>,
}

impl Tree {
    pub fn n_nodes(&self) -> usize {
        self.feature.len()
    }

    pub fn n_leaves(&self) -> usize {
        self.feature.iter().filter(|&&f| f < 0).count()
    }

    pub fn is_leaf(&self, k: usize) -> bool {
        self.feature[k] < 0
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, k: usize) -> usize {
            if t.is_leaf(k) {
                0
            } else {
                1 + go(t, t.left[k] as usize).max(go(t, t.right[k] as usize))
            }
        }
        go(self, 0)
    }

    /// Predict from a slice of the scalar features.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut k = 0;
        while self.feature[k] >= 0 {
            k = if x[self.feature[k] as usize] <= self.value[k] {
                self.left[k]
            } else {
                self.right[k]
            } as usize;
        }
        self.value[k]
    }

    /// Predict row `row` of a feature matrix without copying it.
    pub fn predict_row(&self, x: &FeatureMatrix, row: usize) -> f64 {
        let mut k = 0;
        while self.feature[k] >= 0 {
            k = if x.get(row, self.feature[k] as usize) <= self.value[k] {
                self.left[k]
            } else {
                self.right[k]
            } as usize;
        }
        self.value[k]
    }

    fn push_placeholder(&mut self) -> usize {
        self.feature.push(-1);
        self.value.push(0.0);
        self.left.push(0);
        self.right.push(0);
        self.count.push(0);
        self.feature.len() - 1
    }
}

/// Grow one tree on `rows` (a bootstrap sample, duplicates allowed).
///
/// A node becomes a leaf when it has fewer than `2 · min_node` rows, hits the
/// depth limit, or no split over a fresh random subset of `mtry` features
/// reduces the RSS. Splits never create a child below `min_node` rows.
pub fn grow_tree(rows: &[usize], y: &[f64], x: &FeatureMatrix, params: &TreeParams, rng: &mut Rng) -> Tree {
    assert!(!rows.is_empty(), "cannot grow a tree on an empty sample");
    let m = x.m();
    let mtry = params.mtry.clamp(1, m);
    let min_node = params.min_node.max(1);

    let mut tree = Tree {
        feature: Vec::new(),
        value: Vec::new(),
        left: Vec::new(),
        right: Vec::new(),
        count: Vec::new(),
        bootstrap: None,
    };
    let root = tree.push_placeholder();
    let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(root, rows.to_vec(), 0)];

    while let Some((node, node_rows, depth)) = stack.pop() {
        tree.count[node] = node_rows.len() as u32;
        let depth_ok = params.max_depth.is_none_or(|d| depth < d);
        let split = if node_rows.len() >= 2 * min_node && depth_ok {
            let features = sample(rng, m, mtry).into_vec();
            best_split_with_min_leaf(&node_rows, y, &features, x, min_node)
        } else {
            None
        };
        match split {
            None => {
                let mean = node_rows.iter().map(|&r| y[r]).sum::<f64>() / node_rows.len() as f64;
                tree.value[node] = mean;
            }
            Some(s) => {
                let col = x.column(s.feature);
                let (l_rows, r_rows): (Vec<usize>, Vec<usize>) =
                    node_rows.iter().partition(|&&r| col[r] <= s.threshold);
                let l = tree.push_placeholder();
                let r = tree.push_placeholder();
                tree.feature[node] = s.feature as i32;
                tree.value[node] = s.threshold;
                tree.left[node] = l as u32;
                tree.right[node] = r as u32;
                // Right first so the left subtree is numbered first.
                stack.push((r, r_rows, depth + 1));
                stack.push((l, l_rows, depth + 1));
            }
        }
    }
    tree
}
