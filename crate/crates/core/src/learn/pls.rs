//! Partial least squares regression (PLS1) fit by NIPALS.
//!
//! Components are extracted from centered data with an inner iteration
//! (tolerance 1e-12, at most 500 iterations — immediate for a single
//! response) and the final coefficients use the rotation
//! `R = W (PᵀW)⁻¹`. When deflation exhausts the covariance before the
//! requested number of components, extraction stops early and the model
//! is flagged.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

const NIPALS_TOL: f64 = 1e-12;
const NIPALS_MAX_ITER: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlsModel {
    pub requested_components: usize,
    /// Components actually extracted (≤ requested).
    pub components: usize,
    pub x_means: Vec<f64>,
    pub y_mean: f64,
    /// Regression coefficients on centered inputs.
    pub coefficients: Vec<f64>,
    pub stopped_early: bool,
}

impl PlsModel {
    pub fn predict(&self, x: &DMatrix<f64>) -> DVector<f64> {
        let beta = DVector::from_column_slice(&self.coefficients);
        DVector::from_fn(x.nrows(), |i, _| {
            let mut dot = 0.0;
            for j in 0..x.ncols() {
                dot += (x[(i, j)] - self.x_means[j]) * beta[j];
            }
            self.y_mean + dot
        })
    }
}

pub fn pls_fit(x: &DMatrix<f64>, y: &DVector<f64>, n_components: usize) -> PlsModel {
    pls_fit_with_scores(x, y, n_components).0
}

/// Fit returning the score matrix T (one column per extracted component)
/// for diagnostics; columns are mutually orthogonal.
pub fn pls_fit_with_scores(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    n_components: usize,
) -> (PlsModel, DMatrix<f64>) {
    assert!(x.nrows() >= 2, "PLS requires at least two rows");
    assert!(n_components >= 1, "PLS requires at least one component");
    let n = x.nrows();
    let d = x.ncols();
    let x_means = DVector::from_fn(d, |j, _| x.column(j).sum() / n as f64);
    let y_mean = y.sum() / n as f64;
    let mut e = DMatrix::from_fn(n, d, |i, j| x[(i, j)] - x_means[j]);
    let mut f = DVector::from_fn(n, |i, _| y[i] - y_mean);

    let initial_cov_scale = (e.transpose() * &f).norm().max(1.0);
    let stop_eps = NIPALS_TOL * initial_cov_scale;

    let mut w_cols: Vec<DVector<f64>> = Vec::new();
    let mut p_cols: Vec<DVector<f64>> = Vec::new();
    let mut q_vals: Vec<f64> = Vec::new();
    let mut t_cols: Vec<DVector<f64>> = Vec::new();
    let mut stopped_early = false;

    for _ in 0..n_components {
        let cov = e.transpose() * &f;
        if cov.norm() <= stop_eps {
            stopped_early = true;
            break;
        }
        // Inner NIPALS iteration. With a single response the score
        // vector stabilizes on the second pass; the loop form keeps the
        // documented tolerance semantics.
        let mut u = f.clone();
        let mut t = DVector::zeros(n);
        let mut w = DVector::zeros(d);
        for _ in 0..NIPALS_MAX_ITER {
            let w_raw = e.transpose() * &u;
            let w_norm = w_raw.norm();
            if w_norm <= stop_eps {
                break;
            }
            w = w_raw / w_norm;
            let t_new = &e * &w;
            let delta = (&t_new - &t).norm();
            let scale = t_new.norm().max(1.0);
            t = t_new;
            if delta <= NIPALS_TOL * scale {
                break;
            }
            let tt = t.dot(&t);
            if tt <= stop_eps * stop_eps {
                break;
            }
            let q = f.dot(&t) / tt;
            if q.abs() <= NIPALS_TOL {
                break;
            }
            u = &f * (q / (q * q));
        }
        let tt = t.dot(&t);
        if tt <= stop_eps * stop_eps {
            stopped_early = true;
            break;
        }
        let p = e.transpose() * &t / tt;
        let q = f.dot(&t) / tt;
        e -= &t * p.transpose();
        f -= &t * q;
        w_cols.push(w);
        p_cols.push(p);
        q_vals.push(q);
        t_cols.push(t);
    }

    let k = w_cols.len();
    let coefficients = if k == 0 {
        // Nothing to extract (constant y): intercept-only model.
        vec![0.0; d]
    } else {
        let w = DMatrix::from_columns(&w_cols);
        let p = DMatrix::from_columns(&p_cols);
        let q = DVector::from_column_slice(&q_vals);
        let ptw = p.transpose() * &w;
        let ptw_inv = ptw
            .try_inverse()
            .expect("PᵀW has unit diagonal and is invertible");
        let rotation = w * ptw_inv;
        (rotation * q).iter().copied().collect()
    };

    let scores = if t_cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&t_cols)
    };
    (
        PlsModel {
            requested_components: n_components,
            components: k,
            x_means: x_means.iter().copied().collect(),
            y_mean,
            coefficients,
            stopped_early: stopped_early || k < n_components,
        },
        scores,
    )
}
