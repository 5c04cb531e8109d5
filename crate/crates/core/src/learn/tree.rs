//! Extremely randomized trees for regression.
//!
//! Every tree is grown on the full sample. At each node, one uniform
//! random cut point is drawn per candidate feature whose values are not
//! constant, and the cut with the best variance reduction wins (ties go
//! to the lower feature index). Rows with `x ≤ cut` go left. Trees are
//! stored as a flat node list with the root at index 0.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::mix_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtraTreesParams {
    pub n_estimators: usize,
    pub min_samples_leaf: usize,
    pub min_samples_split: usize,
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for ExtraTreesParams {
    fn default() -> Self {
        ExtraTreesParams {
            n_estimators: 500,
            min_samples_leaf: 1,
            min_samples_split: 2,
            max_depth: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtraTreesModel {
    pub trees: Vec<Tree>,
    pub params: ExtraTreesParams,
}

impl ExtraTreesModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict_row(row)).sum();
        sum / self.trees.len() as f64
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_fn(x.nrows(), |i, _| {
            let row: Vec<f64> = x.row(i).iter().copied().collect();
            self.predict_row(&row)
        })
    }
}

pub fn extra_trees_fit(x: &DMatrix<f64>, y: &DVector<f64>, params: &ExtraTreesParams) -> ExtraTreesModel {
    assert!(x.nrows() >= 1, "extra trees require at least one row");
    assert!(params.n_estimators >= 1, "need at least one estimator");
    assert!(params.min_samples_leaf >= 1);
    assert!(params.min_samples_split >= 2);
    let trees = (0..params.n_estimators)
        .map(|t| {
            let mut rng = ChaCha20Rng::seed_from_u64(mix_seed(params.seed, 0x72_65_65, t as u64));
            grow_tree(x, y, params, &mut rng)
        })
        .collect();
    ExtraTreesModel {
        trees,
        params: params.clone(),
    }
}

/// Fits a single extra tree; exposed for use as an AdaBoost weak learner.
pub fn grow_tree(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    params: &ExtraTreesParams,
    rng: &mut ChaCha20Rng,
) -> Tree {
    let mut nodes: Vec<Node> = vec![Node::Leaf { value: 0.0 }];
    let root_rows: Vec<usize> = (0..x.nrows()).collect();
    // Explicit work stack keeps recursion depth off the thread stack;
    // children are pushed right-then-left so the left subtree is built
    // first, giving a fixed traversal order for the RNG stream.
    let mut work: Vec<(usize, Vec<usize>, usize)> = vec![(0, root_rows, 0)];
    while let Some((slot, rows, depth)) = work.pop() {
        match choose_split(x, y, &rows, depth, params, rng) {
            None => {
                nodes[slot] = Node::Leaf {
                    value: mean_y(y, &rows),
                };
            }
            Some((feature, threshold, left_rows, right_rows)) => {
                let left = nodes.len();
                nodes.push(Node::Leaf { value: 0.0 });
                let right = nodes.len();
                nodes.push(Node::Leaf { value: 0.0 });
                nodes[slot] = Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                work.push((right, right_rows, depth + 1));
                work.push((left, left_rows, depth + 1));
            }
        }
    }
    Tree { nodes }
}

fn mean_y(y: &DVector<f64>, rows: &[usize]) -> f64 {
    rows.iter().map(|&i| y[i]).sum::<f64>() / rows.len() as f64
}

fn sse(y: &DVector<f64>, rows: &[usize]) -> f64 {
    let n = rows.len() as f64;
    let sum: f64 = rows.iter().map(|&i| y[i]).sum();
    let sumsq: f64 = rows.iter().map(|&i| y[i] * y[i]).sum();
    (sumsq - sum * sum / n).max(0.0)
}

#[allow(clippy::type_complexity)]
fn choose_split(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    rows: &[usize],
    depth: usize,
    params: &ExtraTreesParams,
    rng: &mut ChaCha20Rng,
) -> Option<(usize, f64, Vec<usize>, Vec<usize>)> {
    if rows.len() < params.min_samples_split {
        return None;
    }
    if let Some(limit) = params.max_depth {
        if depth >= limit {
            return None;
        }
    }
    let first = y[rows[0]];
    if rows.iter().all(|&i| y[i] == first) {
        return None;
    }

    let mut best: Option<(f64, usize, f64, Vec<usize>, Vec<usize>)> = None;
    for feature in 0..x.ncols() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &i in rows {
            let v = x[(i, feature)];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
            continue;
        }
        let cut = rng.gen_range(lo..hi);
        let mut left = Vec::new();
        let mut right = Vec::new();
        for &i in rows {
            if x[(i, feature)] <= cut {
                left.push(i);
            } else {
                right.push(i);
            }
        }
        if left.len() < params.min_samples_leaf || right.len() < params.min_samples_leaf {
            continue;
        }
        let score = sse(y, &left) + sse(y, &right);
        let better = match &best {
            None => true,
            Some((best_score, ..)) => score < *best_score,
        };
        if better {
            best = Some((score, feature, cut, left, right));
        }
    }
    best.map(|(_, feature, cut, left, right)| (feature, cut, left, right))
}
