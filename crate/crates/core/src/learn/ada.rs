//! AdaBoost.R2 (Drucker) with linear loss and depth-limited extra-tree
//! weak learners trained on weighted resamples. Prediction is the
//! weighted median of the weak learners' outputs.

use nalgebra::{DMatrix, DVector};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::mix_seed;
use super::tree::{grow_tree, ExtraTreesParams, Tree};

const PERFECT_LOSS_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostParams {
    pub n_estimators: usize,
    pub weak_max_depth: usize,
    pub seed: u64,
}

impl Default for AdaBoostParams {
    fn default() -> Self {
        AdaBoostParams {
            n_estimators: 500,
            weak_max_depth: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostModel {
    pub learners: Vec<Tree>,
    /// ln(1/β) per kept learner; all strictly positive.
    pub log_weights: Vec<f64>,
    /// True when boosting halted before `n_estimators` rounds.
    pub stopped_early: bool,
    /// True in the degenerate case where the very first learner already
    /// had average loss ≥ 0.5 and was kept alone.
    pub first_learner_kept_despite_loss: bool,
}

impl AdaBoostModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let preds: Vec<f64> = self.learners.iter().map(|t| t.predict_row(row)).collect();
        weighted_median(&preds, &self.log_weights)
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_fn(x.nrows(), |i, _| {
            let row: Vec<f64> = x.row(i).iter().copied().collect();
            self.predict_row(&row)
        })
    }
}

/// Weighted median: sort values ascending (stable) and return the first
/// value whose cumulative weight reaches half the total.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> f64 {
    assert_eq!(values.len(), weights.len());
    assert!(!values.is_empty(), "weighted median of empty slice");
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite predictions"));
    let total: f64 = weights.iter().sum();
    let half = total / 2.0;
    let mut cum = 0.0;
    for &i in &order {
        cum += weights[i];
        if cum >= half {
            return values[i];
        }
    }
    values[*order.last().expect("non-empty")]
}

pub fn adaboost_fit(x: &DMatrix<f64>, y: &DVector<f64>, params: &AdaBoostParams) -> AdaBoostModel {
    assert!(x.nrows() >= 1, "adaboost requires at least one row");
    assert!(params.n_estimators >= 1);
    let n = x.nrows();
    let tree_params = ExtraTreesParams {
        n_estimators: 1,
        min_samples_leaf: 1,
        min_samples_split: 2,
        max_depth: Some(params.weak_max_depth),
        seed: 0,
    };

    let mut weights = vec![1.0 / n as f64; n];
    let mut learners: Vec<Tree> = Vec::new();
    let mut log_weights: Vec<f64> = Vec::new();
    let mut stopped_early = false;
    let mut first_kept_despite_loss = false;

    for round in 0..params.n_estimators {
        let mut rng = ChaCha20Rng::seed_from_u64(mix_seed(params.seed, 0xada_b00, round as u64));
        // Weighted resample with replacement, n draws.
        let dist = WeightedIndex::new(&weights).expect("weights positive and finite");
        let sample: Vec<usize> = (0..n).map(|_| dist.sample(&mut rng)).collect();
        let xs = DMatrix::from_fn(n, x.ncols(), |i, j| x[(sample[i], j)]);
        let ys = DVector::from_fn(n, |i, _| y[sample[i]]);
        let tree = grow_tree(&xs, &ys, &tree_params, &mut rng);

        // Linear loss on the original sample.
        let errors: Vec<f64> = (0..n)
            .map(|i| {
                let row: Vec<f64> = x.row(i).iter().copied().collect();
                (tree.predict_row(&row) - y[i]).abs()
            })
            .collect();
        let max_err = errors.iter().cloned().fold(0.0f64, f64::max);
        let avg_loss = if max_err > 0.0 {
            errors
                .iter()
                .zip(&weights)
                .map(|(e, w)| w * e / max_err)
                .sum::<f64>()
        } else {
            0.0
        };

        if avg_loss >= 0.5 {
            if learners.is_empty() {
                // Keep the lone learner so the model can still predict,
                // and flag the degeneracy.
                learners.push(tree);
                log_weights.push((1.0f64 / 0.5f64).ln());
                first_kept_despite_loss = true;
            }
            stopped_early = true;
            break;
        }

        let beta = (avg_loss.max(PERFECT_LOSS_FLOOR)) / (1.0 - avg_loss.max(PERFECT_LOSS_FLOOR));
        learners.push(tree);
        log_weights.push((1.0 / beta).ln());

        if avg_loss <= PERFECT_LOSS_FLOOR {
            // Perfect fit: further rounds would only resample noise.
            stopped_early = round + 1 < params.n_estimators;
            break;
        }

        // Reweight: w ← w · β^(1 − loss_i), then renormalize.
        for (w, e) in weights.iter_mut().zip(&errors) {
            let loss_i = if max_err > 0.0 { e / max_err } else { 0.0 };
            *w *= beta.powf(1.0 - loss_i);
        }
        let total: f64 = weights.iter().sum();
        assert!(total > 0.0, "all boosting weights collapsed to zero");
        for w in weights.iter_mut() {
            *w /= total;
        }
    }

    AdaBoostModel {
        learners,
        log_weights,
        stopped_early,
        first_learner_kept_despite_loss: first_kept_despite_loss,
    }
}
