//! Recursive feature elimination driven by ridge coefficients.
//!
//! Features are standardized, a ridge model is fit, and the feature with
//! the smallest |coefficient| is dropped (ties drop the lower original
//! index first); this repeats one feature at a time. Because each drop
//! is independent of the stopping point, the full elimination order is
//! computed once and any `k` is answered by taking the last `k`
//! survivors.

use nalgebra::{DMatrix, DVector};

use super::ridge::ridge_fit;
use super::Standardizer;

/// Ridge penalty used inside elimination fits. Selection is a
/// preprocessing step; the downstream model's own penalty is chosen by
/// the grid search.
pub const RFE_LAMBDA: f64 = 1.0;

/// Coefficients within this relative band of the smallest |coefficient|
/// count as tied, so exact ties (e.g. duplicated columns) resolve by
/// index instead of by solver rounding noise.
const TIE_EPS: f64 = 1e-9;

/// Returns original column indices in the order they were eliminated;
/// the final entry is the last surviving (most important) feature.
pub fn rfe_drop_order(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> Vec<usize> {
    let d = x.ncols();
    assert!(d >= 1, "need at least one feature");
    let std = Standardizer::fit(x);
    let xs = std.transform(x);
    let mut remaining: Vec<usize> = (0..d).collect();
    let mut order: Vec<usize> = Vec::with_capacity(d);
    while remaining.len() > 1 {
        let sub = select_columns(&xs, &remaining);
        let model = ridge_fit(&sub, y, lambda);
        let min_abs = model
            .coefficients
            .iter()
            .map(|c| c.abs())
            .fold(f64::INFINITY, f64::min);
        let band = min_abs + TIE_EPS * (1.0 + min_abs);
        let drop_pos = model
            .coefficients
            .iter()
            .position(|c| c.abs() <= band)
            .expect("at least the minimum itself is inside the band");
        order.push(remaining.remove(drop_pos));
    }
    order.push(remaining[0]);
    order
}

/// Selects `k` features by recursive elimination; returns original
/// indices in ascending order.
pub fn rfe_select(x: &DMatrix<f64>, y: &DVector<f64>, k: usize, lambda: f64) -> Vec<usize> {
    let d = x.ncols();
    assert!(k >= 1 && k <= d, "k must be in 1..=d");
    let order = rfe_drop_order(x, y, lambda);
    let mut kept: Vec<usize> = order[d - k..].to_vec();
    kept.sort_unstable();
    kept
}

pub(crate) fn select_columns(x: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), idx.len(), |i, j| x[(i, idx[j])])
}
