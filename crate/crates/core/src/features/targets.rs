//! Unsupervised target construction: per-context pooled similarity
//! scores with a quadratic fallback, and the cross-context change
//! score.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{FeatureError, Instance, MarkedContext, SimMatrix};
use crate::simlex::{Pair, SimStore};

/// Fitted quadratic `a·x² + b·x + c` over dataset positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadModel {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadModel {
    pub fn predict(&self, x: f64) -> f64 {
        self.a * x * x + self.b * x + self.c
    }
}

/// Least-squares quadratic fit via the 3×3 normal equations.
pub fn fit_quadratic(points: &[(f64, f64)]) -> Result<QuadModel, FeatureError> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite x"));
    xs.dedup();
    if xs.len() < 3 {
        return Err(FeatureError::Degenerate {
            message: format!("{} distinct x values, need at least 3", xs.len()),
        });
    }
    let (mut s4, mut s3, mut s2, mut s1, mut s0) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut t2, mut t1, mut t0) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let x2 = x * x;
        s4 += x2 * x2;
        s3 += x2 * x;
        s2 += x2;
        s1 += x;
        s0 += 1.0;
        t2 += x2 * y;
        t1 += x * y;
        t0 += y;
    }
    let m = Matrix3::new(s4, s3, s2, s3, s2, s1, s2, s1, s0);
    let rhs = Vector3::new(t2, t1, t0);
    let sol = m.lu().solve(&rhs).ok_or_else(|| FeatureError::Degenerate {
        message: "singular normal equations".to_string(),
    })?;
    if !(sol[0].is_finite() && sol[1].is_finite() && sol[2].is_finite()) {
        return Err(FeatureError::Degenerate {
            message: "non-finite quadratic coefficients".to_string(),
        });
    }
    Ok(QuadModel {
        a: sol[0],
        b: sol[1],
        c: sol[2],
    })
}

/// Pooled similarity-store sums over the 3×3 cross-context region
/// cells. Each cell's terms are sorted by canonical pair key before
/// summation, so the matrix of a context-swapped instance is the exact
/// bitwise transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledMatrix {
    pub sums: [[f64; 3]; 3],
    pub counts: [[usize; 3]; 3],
}

impl PooledMatrix {
    pub fn cell_mean(&self, i: usize, j: usize) -> Option<f64> {
        (self.counts[i][j] > 0).then(|| self.sums[i][j] / self.counts[i][j] as f64)
    }

    /// Mean over every found pair of the whole 3×3 block.
    pub fn overall_pooled(&self) -> Option<f64> {
        let total: usize = self.counts.iter().flatten().sum();
        if total == 0 {
            return None;
        }
        let sum: f64 = self.sums.iter().flatten().sum();
        Some(sum / total as f64)
    }

    pub fn to_sim_matrix(&self) -> SimMatrix {
        let mut raw = [[None; 3]; 3];
        for (i, row) in raw.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.cell_mean(i, j);
            }
        }
        SimMatrix::from_cells(raw)
    }
}

/// Builds the pooled store matrix between the inter regions of two
/// contexts: cell (i, j) pools lookups of every word of region i of
/// context 1 against every word of region j of context 2.
pub fn pooled_store_matrix(
    regions1: &[Vec<String>],
    regions2: &[Vec<String>],
    store: &SimStore,
) -> PooledMatrix {
    assert_eq!(regions1.len(), 3);
    assert_eq!(regions2.len(), 3);
    let mut out = PooledMatrix {
        sums: [[0.0; 3]; 3],
        counts: [[0; 3]; 3],
    };
    for (i, region1) in regions1.iter().enumerate() {
        for (j, region2) in regions2.iter().enumerate() {
            let mut terms: Vec<(Pair, f64)> = Vec::new();
            for u in region1 {
                for v in region2 {
                    if let Some(s) = store.lookup(u, v) {
                        terms.push((Pair::new(u, v), s));
                    }
                }
            }
            terms.sort_by(|a, b| a.0.cmp(&b.0));
            out.sums[i][j] = terms.iter().map(|t| t.1).sum();
            out.counts[i][j] = terms.len();
        }
    }
    out
}

/// Mean store similarity over unordered token pairs inside one region;
/// None when no pair is found.
pub fn within_region_mean(region: &[String], store: &SimStore) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for (i, u) in region.iter().enumerate() {
        for v in &region[i + 1..] {
            if let Some(s) = store.lookup(u, v) {
                sum += s;
                n += 1;
            }
        }
    }
    (n > 0).then(|| sum / n as f64)
}

/// Pooled mean of store lookups over all token pairs spanning two
/// different intra regions of one context. Returns `(mean, coverage)`;
/// the mean is absent at coverage 0.
pub fn intra_cwps(ctx: &MarkedContext, store: &SimStore) -> (Option<f64>, usize) {
    let regions = ctx.split_intra();
    let (mut sum, mut n) = (0.0, 0usize);
    for a in 0..regions.len() {
        for b in (a + 1)..regions.len() {
            for u in &regions[a] {
                for v in &regions[b] {
                    if let Some(s) = store.lookup(u, v) {
                        sum += s;
                        n += 1;
                    }
                }
            }
        }
    }
    ((n > 0).then(|| sum / n as f64), n)
}

/// Unsupervised targets for one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Targets {
    /// Similarity score of the word pair in context 1, in [0, 10].
    pub score1: f64,
    /// Similarity score in context 2, in [0, 10].
    pub score2: f64,
    /// Score change from context 2 to context 1.
    pub change: f64,
}

/// Targets for a dataset plus the quadratic trend model fitted along
/// the way (reused as the final feature and for prediction-time
/// fallbacks).
#[derive(Debug, Clone, PartialEq)]
pub struct TargetsResult {
    pub targets: Vec<Targets>,
    pub quad: QuadModel,
}

/// Builds the unsupervised targets for a dataset (ordering-sensitive:
/// the quadratic trend is over dataset positions).
///
/// Per instance: each context's score is its pooled intra similarity,
/// falling back to the quadratic prediction at the instance's position
/// when uncovered; exactly equal scores have score2 nudged toward the
/// quadratic prediction with weight 0.1; scores are clamped to [0, 10].
/// The change score averages six values: per inter region r, the
/// within-region mean difference (c1 − c2) and the pooled cross-context
/// matrix's row minus column average at r.
pub fn build_targets(
    dataset: &[Instance],
    store: &SimStore,
) -> Result<TargetsResult, FeatureError> {
    let raw: Vec<(Option<f64>, Option<f64>)> = dataset
        .iter()
        .map(|inst| {
            (
                intra_cwps(&inst.context1, store).0,
                intra_cwps(&inst.context2, store).0,
            )
        })
        .collect();
    if raw.iter().all(|(a, b)| a.is_none() && b.is_none()) {
        return Err(FeatureError::NoCoverage);
    }

    // Quadratic trend over covered scores. Per instance the two
    // context scores enter in sorted order so a context swap fits the
    // bit-identical model.
    let mut points = Vec::new();
    for (idx, (s1, s2)) in raw.iter().enumerate() {
        let mut ys: Vec<f64> = s1.iter().chain(s2.iter()).copied().collect();
        ys.sort_by(|a, b| a.partial_cmp(b).expect("scores are finite"));
        for y in ys {
            points.push((idx as f64, y));
        }
    }
    let quad = fit_quadratic(&points)?;

    let mut targets = Vec::with_capacity(dataset.len());
    for (idx, instance) in dataset.iter().enumerate() {
        let q = quad.predict(idx as f64);
        let (s1, s2) = raw[idx];
        let score1 = s1.unwrap_or(q);
        let mut score2 = s2.unwrap_or(q);
        if score1 == score2 {
            score2 = 0.9 * score2 + 0.1 * q;
        }
        targets.push(Targets {
            score1: score1.clamp(0.0, 10.0),
            score2: score2.clamp(0.0, 10.0),
            change: change_score(instance, store),
        });
    }
    Ok(TargetsResult { targets, quad })
}

/// Mean of the six change sub-scores (see [`build_targets`]).
fn change_score(instance: &Instance, store: &SimStore) -> f64 {
    let inter1 = instance.context1.split_inter();
    let inter2 = instance.context2.split_inter();
    let matrix = pooled_store_matrix(&inter1, &inter2, store).to_sim_matrix();
    let mut six = [0.0; 6];
    for r in 0..3 {
        let w1 = within_region_mean(&inter1[r], store).unwrap_or(0.0);
        let w2 = within_region_mean(&inter2[r], store).unwrap_or(0.0);
        six[r] = w1 - w2;
        let row = if matrix.row_defined[r] {
            matrix.row_avgs[r]
        } else {
            0.0
        };
        let col = if matrix.col_defined[r] {
            matrix.col_avgs[r]
        } else {
            0.0
        };
        six[3 + r] = row - col;
    }
    six.iter().sum::<f64>() / 6.0
}
