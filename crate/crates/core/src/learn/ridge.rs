//! Ridge regression with intercept via centering, plus a raw
//! (no-intercept) variant. Singular systems at λ = 0 fall back to the
//! minimum-norm least-squares solution and are flagged.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
    /// True when the λ = 0 normal equations were singular and the
    /// minimum-norm least-squares solution was used instead.
    pub min_norm_fallback: bool,
}

impl RidgeModel {
    pub fn predict(&self, x: &DMatrix<f64>) -> DVector<f64> {
        let beta = DVector::from_column_slice(&self.coefficients);
        x * beta + DVector::from_element(x.nrows(), self.intercept)
    }
}

/// Fits `(XᵀX + λI)β = Xᵀy` on centered data, with the intercept
/// recovered from the means.
pub fn ridge_fit(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> RidgeModel {
    assert!(x.nrows() >= 1, "ridge requires at least one row");
    assert!(lambda >= 0.0, "lambda must be non-negative");
    let n = x.nrows();
    let d = x.ncols();
    let x_means = DVector::from_fn(d, |j, _| x.column(j).sum() / n as f64);
    let y_mean = y.sum() / n as f64;
    let xc = DMatrix::from_fn(n, d, |i, j| x[(i, j)] - x_means[j]);
    let yc = DVector::from_fn(n, |i, _| y[i] - y_mean);
    let (beta, fallback) = solve_ridge(&xc, &yc, lambda);
    let intercept = y_mean - x_means.dot(&beta);
    RidgeModel {
        coefficients: beta.iter().copied().collect(),
        intercept,
        lambda,
        min_norm_fallback: fallback,
    }
}

/// Fits `(XᵀX + λI)β = Xᵀy` directly: no centering, no intercept.
pub fn ridge_fit_raw(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> RidgeModel {
    assert!(x.nrows() >= 1, "ridge requires at least one row");
    assert!(lambda >= 0.0, "lambda must be non-negative");
    let (beta, fallback) = solve_ridge(x, y, lambda);
    RidgeModel {
        coefficients: beta.iter().copied().collect(),
        intercept: 0.0,
        lambda,
        min_norm_fallback: fallback,
    }
}

fn solve_ridge(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> (DVector<f64>, bool) {
    let d = x.ncols();
    if lambda > 0.0 {
        let xtx = x.transpose() * x;
        let xty = x.transpose() * y;
        let regularized = &xtx + DMatrix::identity(d, d) * lambda;
        if let Some(chol) = regularized.cholesky() {
            return (chol.solve(&xty), false);
        }
        // Pathological conditioning despite the ridge: fall back to the
        // SVD form β = V diag(σ/(σ²+λ)) Uᵀy and flag it.
        let svd = x.clone().svd(true, true);
        let u = svd.u.as_ref().expect("u requested");
        let vt = svd.v_t.as_ref().expect("v_t requested");
        let mut beta = DVector::zeros(d);
        for i in 0..svd.singular_values.len() {
            let s = svd.singular_values[i];
            let coeff = s / (s * s + lambda) * u.column(i).dot(y);
            beta += vt.row(i).transpose() * coeff;
        }
        return (beta, true);
    }
    // λ = 0: rank-deficient designs have no unique solution, so detect
    // rank via SVD and return the minimum-norm least-squares solution,
    // flagged when the design was singular. (A plain Cholesky can
    // "succeed" on a singular XᵀX through rounding, silently producing
    // an arbitrary solution, so it is not used here.)
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let eps = smax * x.nrows().max(d) as f64 * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|s| **s > eps).count();
    let beta = svd
        .solve(y, eps)
        .expect("SVD solve with computed singular vectors cannot fail");
    (beta, rank < d)
}
