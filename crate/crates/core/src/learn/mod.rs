//! Regression suite: ridge, extra trees, AdaBoost.R2, recursive feature
//! elimination, and PLS, tied together by a seeded cross-validated grid
//! search, top-k model averaging, and two-stage stacking over paired
//! rows. All fits are deterministic functions of (data, hyperparameters,
//! seed).

pub mod ada;
pub mod pls;
pub mod rfe;
pub mod ridge;
pub mod tree;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use ada::{adaboost_fit, AdaBoostModel, AdaBoostParams};
use pls::{pls_fit, PlsModel};
use rfe::{rfe_drop_order, select_columns, RFE_LAMBDA};
use ridge::{ridge_fit, RidgeModel};
use tree::{extra_trees_fit, ExtraTreesModel, ExtraTreesParams};

/// Version tag written into persisted models.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("dataset: {0}")]
    Data(String),
    #[error("{n} rows is fewer than {folds} folds; reduce the fold count")]
    TooFewRows { n: usize, folds: usize },
    #[error("pairing: {0}")]
    Pairing(String),
    #[error("model persistence: {0}")]
    Persist(String),
}

/// A design matrix with aligned targets, feature names, and row ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub feature_names: Vec<String>,
    pub row_ids: Vec<String>,
}

impl Dataset {
    pub fn new(
        x: DMatrix<f64>,
        y: DVector<f64>,
        feature_names: Vec<String>,
        row_ids: Vec<String>,
    ) -> Result<Dataset, LearnError> {
        if x.nrows() != y.len() {
            return Err(LearnError::Data(format!(
                "{} rows of features but {} targets",
                x.nrows(),
                y.len()
            )));
        }
        if x.ncols() != feature_names.len() {
            return Err(LearnError::Data(format!(
                "{} feature columns but {} names",
                x.ncols(),
                feature_names.len()
            )));
        }
        if x.nrows() != row_ids.len() {
            return Err(LearnError::Data(format!(
                "{} rows but {} row ids",
                x.nrows(),
                row_ids.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(LearnError::Data("non-finite value in dataset".to_string()));
        }
        Ok(Dataset {
            x,
            y,
            feature_names,
            row_ids,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }
}

/// Per-column mean/standard-deviation scaling fit on training data.
/// Zero-variance columns keep std 1 so they pass through centered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &DMatrix<f64>) -> Standardizer {
        let n = x.nrows() as f64;
        let mut means = Vec::with_capacity(x.ncols());
        let mut stds = Vec::with_capacity(x.ncols());
        for j in 0..x.ncols() {
            let mean = x.column(j).sum() / n;
            let var = x.column(j).iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let std = var.sqrt();
            means.push(mean);
            stds.push(if std > 1e-12 { std } else { 1.0 });
        }
        Standardizer { means, stds }
    }

    pub fn transform(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(x.ncols(), self.means.len(), "column count mismatch");
        DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
            (x[(i, j)] - self.means[j]) / self.stds[j]
        })
    }

    /// Restriction of the statistics to the given columns, equal to
    /// fitting on the column subset directly.
    pub fn subset(&self, idx: &[usize]) -> Standardizer {
        Standardizer {
            means: idx.iter().map(|&j| self.means[j]).collect(),
            stds: idx.iter().map(|&j| self.stds[j]).collect(),
        }
    }
}

/// Deterministic seed mixing (SplitMix64 rounds) for deriving
/// per-candidate and per-fold seeds from one base seed.
pub fn mix_seed(base: u64, stream: u64, index: u64) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(splitmix(base ^ splitmix(stream)) ^ splitmix(index.wrapping_add(0xA5A5_A5A5_A5A5_A5A5)))
}

/// Hyperparameter grid; the defaults expand to 55 candidates on a
/// dataset wide and long enough to avoid clamping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperGrid {
    pub ridge_lambdas: Vec<f64>,
    pub tree_min_samples_leaf: Vec<usize>,
    pub tree_min_samples_split: Vec<usize>,
    pub fs_k: Vec<usize>,
    pub pls_components: Vec<usize>,
    pub n_estimators: usize,
}

impl Default for HyperGrid {
    fn default() -> Self {
        HyperGrid {
            ridge_lambdas: vec![0.01, 0.1, 1.0, 10.0, 100.0],
            tree_min_samples_leaf: vec![1, 2, 4],
            tree_min_samples_split: vec![2, 4, 8],
            fs_k: vec![20, 50, 100, 145],
            pls_components: vec![2, 5, 10, 20],
            n_estimators: 500,
        }
    }
}

/// One grid-search candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelSpec {
    Ridge { lambda: f64 },
    FsRidge { k: usize, lambda: f64 },
    Pls { components: usize },
    FsPls { k: usize, components: usize },
    ExtraTrees { min_samples_leaf: usize, min_samples_split: usize },
    AdaBoost,
}

impl std::fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelSpec::Ridge { lambda } => write!(f, "ridge(lambda={lambda})"),
            ModelSpec::FsRidge { k, lambda } => write!(f, "fs({k})+ridge(lambda={lambda})"),
            ModelSpec::Pls { components } => write!(f, "pls(components={components})"),
            ModelSpec::FsPls { k, components } => {
                write!(f, "fs({k})+pls(components={components})")
            }
            ModelSpec::ExtraTrees {
                min_samples_leaf,
                min_samples_split,
            } => write!(f, "trees(leaf={min_samples_leaf},split={min_samples_split})"),
            ModelSpec::AdaBoost => write!(f, "adaboost"),
        }
    }
}

/// Expands the grid into a deterministic candidate list. `k` values are
/// clamped to the feature count and component counts to
/// `min(min_train_rows − 1, d)`; duplicates after clamping collapse.
pub fn candidates(grid: &HyperGrid, min_train_rows: usize, d: usize) -> Vec<ModelSpec> {
    let clamp_k = |k: usize| k.min(d).max(1);
    let comp_cap = d.min(min_train_rows.saturating_sub(1)).max(1);
    let clamp_c = |c: usize| c.min(comp_cap).max(1);

    let mut out: Vec<ModelSpec> = Vec::new();
    let push = |spec: ModelSpec, out: &mut Vec<ModelSpec>| {
        if !out.contains(&spec) {
            out.push(spec);
        }
    };
    for &lambda in &grid.ridge_lambdas {
        push(ModelSpec::Ridge { lambda }, &mut out);
    }
    for &k in &grid.fs_k {
        for &lambda in &grid.ridge_lambdas {
            push(
                ModelSpec::FsRidge {
                    k: clamp_k(k),
                    lambda,
                },
                &mut out,
            );
        }
    }
    for &c in &grid.pls_components {
        push(
            ModelSpec::Pls {
                components: clamp_c(c),
            },
            &mut out,
        );
    }
    for &k in &grid.fs_k {
        for &c in &grid.pls_components {
            push(
                ModelSpec::FsPls {
                    k: clamp_k(k),
                    components: clamp_c(c.min(clamp_k(k))),
                },
                &mut out,
            );
        }
    }
    for &leaf in &grid.tree_min_samples_leaf {
        for &split in &grid.tree_min_samples_split {
            push(
                ModelSpec::ExtraTrees {
                    min_samples_leaf: leaf,
                    min_samples_split: split,
                },
                &mut out,
            );
        }
    }
    push(ModelSpec::AdaBoost, &mut out);
    out
}

/// Seeded fold partition of `0..n`: a function of `(n, folds, seed)`
/// only. Every index appears in exactly one fold; sizes differ by at
/// most one; each fold's indices are sorted ascending.
pub fn cv_folds(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    assert!(folds >= 2, "need at least two folds");
    assert!(n >= folds, "need at least as many rows as folds");
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(mix_seed(seed, 0xF01D, folds as u64));
    idx.shuffle(&mut rng);
    let base = n / folds;
    let extra = n % folds;
    let mut out = Vec::with_capacity(folds);
    let mut at = 0usize;
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        let mut fold: Vec<usize> = idx[at..at + size].to_vec();
        fold.sort_unstable();
        out.push(fold);
        at += size;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    Ridge(RidgeModel),
    Pls(PlsModel),
    Trees(ExtraTreesModel),
    Ada(AdaBoostModel),
}

/// A fitted candidate: preprocessing (optional feature selection, then
/// optional standardization) plus the model itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub spec: ModelSpec,
    pub cv_mae: f64,
    /// Selected original feature indices, ascending (`None` = all).
    pub selected: Option<Vec<usize>>,
    /// Applied after selection (`None` for tree models).
    pub standardizer: Option<Standardizer>,
    pub model: ModelKind,
}

impl FittedModel {
    pub fn predict(&self, x: &DMatrix<f64>) -> DVector<f64> {
        let stage1;
        let selected = match &self.selected {
            Some(idx) => {
                stage1 = select_columns(x, idx);
                &stage1
            }
            None => x,
        };
        let staged;
        let prepared = match &self.standardizer {
            Some(s) => {
                staged = s.transform(selected);
                &staged
            }
            None => selected,
        };
        match &self.model {
            ModelKind::Ridge(m) => m.predict(prepared),
            ModelKind::Pls(m) => m.predict(prepared),
            ModelKind::Trees(m) => m.predict(prepared),
            ModelKind::Ada(m) => m.predict(prepared),
        }
    }
}

/// Grid-search output: candidates refit on the full data, sorted by
/// ascending cross-validated MAE (ties keep candidate order), plus the
/// averaging weight hook (all 1.0 = unweighted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub models: Vec<FittedModel>,
    pub weights: Vec<f64>,
}

impl ModelBundle {
    pub fn best(&self) -> &FittedModel {
        &self.models[0]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&Envelope {
            version: MODEL_FORMAT_VERSION,
            payload: self,
        })
        .expect("model bundles serialize without error")
    }

    pub fn from_json(text: &str) -> Result<ModelBundle, LearnError> {
        let env: EnvelopeOwned<ModelBundle> =
            serde_json::from_str(text).map_err(|e| LearnError::Persist(e.to_string()))?;
        if env.version != MODEL_FORMAT_VERSION {
            return Err(LearnError::Persist(format!(
                "unsupported model format version {} (expected {})",
                env.version, MODEL_FORMAT_VERSION
            )));
        }
        Ok(env.payload)
    }
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    version: u32,
    payload: &'a T,
}

/// Owned twin of [`Envelope`] used on the deserialization side.
#[derive(Deserialize)]
struct EnvelopeOwned<T> {
    version: u32,
    payload: T,
}

fn subset_rows(x: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), x.ncols(), |i, j| x[(idx[i], j)])
}

fn subset_vec(y: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    DVector::from_fn(idx.len(), |i, _| y[idx[i]])
}

/// Lazily computed RFE elimination order for one training matrix.
///
/// The order depends only on the training data (the elimination ridge
/// penalty is a fixed constant), so all feature-selecting candidates
/// evaluated on the same fold share one chain.
struct DropOrderCache<'a> {
    x: &'a DMatrix<f64>,
    y: &'a DVector<f64>,
    order: Option<Vec<usize>>,
}

impl<'a> DropOrderCache<'a> {
    fn new(x: &'a DMatrix<f64>, y: &'a DVector<f64>) -> DropOrderCache<'a> {
        DropOrderCache { x, y, order: None }
    }

    fn get(&mut self) -> &[usize] {
        if self.order.is_none() {
            self.order = Some(rfe_drop_order(self.x, self.y, RFE_LAMBDA));
        }
        self.order.as_deref().expect("order just computed")
    }
}

fn fit_spec(
    spec: &ModelSpec,
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    n_estimators: usize,
    seed: u64,
    drop_order: &mut DropOrderCache,
) -> FittedModel {
    match spec {
        ModelSpec::Ridge { lambda } => {
            let std = Standardizer::fit(x);
            let xs = std.transform(x);
            FittedModel {
                spec: spec.clone(),
                cv_mae: 0.0,
                selected: None,
                standardizer: Some(std),
                model: ModelKind::Ridge(ridge_fit(&xs, y, *lambda)),
            }
        }
        ModelSpec::FsRidge { k, lambda } => {
            let (selected, std) = select_and_standardize(x, drop_order.get(), *k);
            let xs = std.transform(&select_columns(x, &selected));
            FittedModel {
                spec: spec.clone(),
                cv_mae: 0.0,
                selected: Some(selected),
                standardizer: Some(std),
                model: ModelKind::Ridge(ridge_fit(&xs, y, *lambda)),
            }
        }
        ModelSpec::Pls { components } => {
            let std = Standardizer::fit(x);
            let xs = std.transform(x);
            FittedModel {
                spec: spec.clone(),
                cv_mae: 0.0,
                selected: None,
                standardizer: Some(std),
                model: ModelKind::Pls(pls_fit(&xs, y, *components)),
            }
        }
        ModelSpec::FsPls { k, components } => {
            let (selected, std) = select_and_standardize(x, drop_order.get(), *k);
            let xs = std.transform(&select_columns(x, &selected));
            let comps = (*components).min(selected.len()).max(1);
            FittedModel {
                spec: spec.clone(),
                cv_mae: 0.0,
                selected: Some(selected),
                standardizer: Some(std),
                model: ModelKind::Pls(pls_fit(&xs, y, comps)),
            }
        }
        ModelSpec::ExtraTrees {
            min_samples_leaf,
            min_samples_split,
        } => {
            let params = ExtraTreesParams {
                n_estimators,
                min_samples_leaf: *min_samples_leaf,
                min_samples_split: *min_samples_split,
                max_depth: None,
                seed,
            };
            FittedModel {
                spec: spec.clone(),
                cv_mae: 0.0,
                selected: None,
                standardizer: None,
                model: ModelKind::Trees(extra_trees_fit(x, y, &params)),
            }
        }
        ModelSpec::AdaBoost => {
            let params = AdaBoostParams {
                n_estimators,
                weak_max_depth: 3,
                seed,
            };
            FittedModel {
                spec: spec.clone(),
                cv_mae: 0.0,
                selected: None,
                standardizer: None,
                model: ModelKind::Ada(adaboost_fit(x, y, &params)),
            }
        }
    }
}

fn select_and_standardize(
    x: &DMatrix<f64>,
    order: &[usize],
    k: usize,
) -> (Vec<usize>, Standardizer) {
    let d = x.ncols();
    let k = k.min(d).max(1);
    let mut selected: Vec<usize> = order[d - k..].to_vec();
    selected.sort_unstable();
    let std = Standardizer::fit(x).subset(&selected);
    (selected, std)
}

/// Exhaustive grid search with seeded k-fold cross-validation, ranked by
/// mean fold MAE. Every candidate is refit on the full data.
pub fn grid_search(
    data: &Dataset,
    grid: &HyperGrid,
    folds: usize,
    seed: u64,
) -> Result<ModelBundle, LearnError> {
    let n = data.n_rows();
    let d = data.n_features();
    if folds < 2 {
        return Err(LearnError::Data("fold count must be at least 2".to_string()));
    }
    if n < folds {
        return Err(LearnError::TooFewRows { n, folds });
    }
    let partition = cv_folds(n, folds, seed);
    let max_fold = partition.iter().map(Vec::len).max().unwrap_or(0);
    let min_train = n - max_fold;
    if min_train == 0 {
        return Err(LearnError::TooFewRows { n, folds });
    }
    let specs = candidates(grid, min_train, d);

    // Fold-major evaluation so each fold's training subset (and its RFE
    // elimination order) is built once and shared by all candidates.
    let mut mae_sums = vec![0.0f64; specs.len()];
    for (fi, val_idx) in partition.iter().enumerate() {
        let mut train_idx: Vec<usize> = Vec::with_capacity(n - val_idx.len());
        let mut val_cursor = 0usize;
        for i in 0..n {
            if val_cursor < val_idx.len() && val_idx[val_cursor] == i {
                val_cursor += 1;
            } else {
                train_idx.push(i);
            }
        }
        let xt = subset_rows(&data.x, &train_idx);
        let yt = subset_vec(&data.y, &train_idx);
        let xv = subset_rows(&data.x, val_idx);
        let yv = subset_vec(&data.y, val_idx);
        let mut drop_order = DropOrderCache::new(&xt, &yt);
        for (ci, spec) in specs.iter().enumerate() {
            let fitted = fit_spec(
                spec,
                &xt,
                &yt,
                grid.n_estimators,
                mix_seed(seed, ci as u64 + 1, fi as u64 + 1),
                &mut drop_order,
            );
            let pred = fitted.predict(&xv);
            mae_sums[ci] += (&pred - &yv).abs().sum() / yv.len() as f64;
        }
    }
    let cv_scores: Vec<f64> = mae_sums.iter().map(|s| s / folds as f64).collect();

    let mut order: Vec<usize> = (0..specs.len()).collect();
    order.sort_by(|&a, &b| {
        cv_scores[a]
            .partial_cmp(&cv_scores[b])
            .expect("finite CV scores")
            .then(a.cmp(&b))
    });

    let mut full_order = DropOrderCache::new(&data.x, &data.y);
    let mut models = Vec::with_capacity(specs.len());
    for &ci in &order {
        let mut fitted = fit_spec(
            &specs[ci],
            &data.x,
            &data.y,
            grid.n_estimators,
            mix_seed(seed, ci as u64 + 1, 0),
            &mut full_order,
        );
        fitted.cv_mae = cv_scores[ci];
        models.push(fitted);
    }
    let weights = vec![1.0; models.len()];
    Ok(ModelBundle { models, weights })
}

/// Unweighted mean of the top `k` ranked models' predictions (`k` is
/// clamped to the bundle size). The `weights` field of the bundle is the
/// hook for CV-weighted averaging; the default weights are all 1.
pub fn average_top_k(bundle: &ModelBundle, k: usize, x: &DMatrix<f64>) -> DVector<f64> {
    let k = k.max(1).min(bundle.models.len());
    let mut sum = DVector::zeros(x.nrows());
    let mut weight_total = 0.0;
    for (model, w) in bundle.models.iter().zip(&bundle.weights).take(k) {
        sum += model.predict(x) * *w;
        weight_total += *w;
    }
    sum / weight_total
}

/// The five interaction terms fed to stage 2 of the stacker:
/// `(ŷ1, ŷ2, |ŷ1−ŷ2|, (ŷ1+ŷ2)/2, √(ŷ1·ŷ2) or 0 if the product is
/// negative)`.
pub fn combine_predictions(y1: f64, y2: f64) -> [f64; 5] {
    let product = y1 * y2;
    let geo = if product < 0.0 { 0.0 } else { product.sqrt() };
    [y1, y2, (y1 - y2).abs(), (y1 + y2) / 2.0, geo]
}

/// Two-stage stacked model over paired rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackedModel {
    pub stage1: ModelBundle,
    pub stage2: ModelBundle,
    pub top_k: usize,
}

impl StackedModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&Envelope {
            version: MODEL_FORMAT_VERSION,
            payload: self,
        })
        .expect("stacked models serialize without error")
    }

    pub fn from_json(text: &str) -> Result<StackedModel, LearnError> {
        let env: EnvelopeOwned<StackedModel> =
            serde_json::from_str(text).map_err(|e| LearnError::Persist(e.to_string()))?;
        if env.version != MODEL_FORMAT_VERSION {
            return Err(LearnError::Persist(format!(
                "unsupported model format version {} (expected {})",
                env.version, MODEL_FORMAT_VERSION
            )));
        }
        Ok(env.payload)
    }
}

/// Checks the paired-row layout (rows 2t and 2t+1 belong to instance t)
/// and returns the per-pair ids.
fn validate_pairs(rows: &Dataset) -> Result<Vec<String>, LearnError> {
    let n = rows.n_rows();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(LearnError::Pairing(format!(
            "paired dataset needs an even, positive row count, got {n}"
        )));
    }
    let mut ids = Vec::with_capacity(n / 2);
    for t in 0..n / 2 {
        let a = &rows.row_ids[2 * t];
        let b = &rows.row_ids[2 * t + 1];
        if a != b {
            return Err(LearnError::Pairing(format!(
                "rows {} and {} should share one instance id but have '{a}' and '{b}'",
                2 * t,
                2 * t + 1
            )));
        }
        ids.push(a.clone());
    }
    Ok(ids)
}

/// Builds the stage-2 design: one row per pair, `2d + 5` columns —
/// features of row 1, features of row 2, then `combine_predictions` of
/// the stage-1 predictions for the two rows.
fn stage2_design(
    rows: &Dataset,
    yhat: &DVector<f64>,
) -> (DMatrix<f64>, Vec<String>) {
    let d = rows.n_features();
    let pairs = rows.n_rows() / 2;
    let width = 2 * d + 5;
    let x2 = DMatrix::from_fn(pairs, width, |t, j| {
        if j < d {
            rows.x[(2 * t, j)]
        } else if j < 2 * d {
            rows.x[(2 * t + 1, j - d)]
        } else {
            let combined = combine_predictions(yhat[2 * t], yhat[2 * t + 1]);
            combined[j - 2 * d]
        }
    });
    let mut names = Vec::with_capacity(width);
    for name in &rows.feature_names {
        names.push(format!("row1.{name}"));
    }
    for name in &rows.feature_names {
        names.push(format!("row2.{name}"));
    }
    for c in ["pred1", "pred2", "absdiff", "mean", "geomean"] {
        names.push(format!("comb.{c}"));
    }
    (x2, names)
}

/// Fits the two-stage stacker: stage 1 is a grid search over all rows
/// against the row-level targets in `rows.y`; stage 2 is a grid search
/// over one row per pair (width `2d + 5`) against `pair_targets`.
pub fn stacked_fit(
    rows: &Dataset,
    pair_targets: &DVector<f64>,
    grid: &HyperGrid,
    folds: usize,
    seed: u64,
    top_k: usize,
) -> Result<StackedModel, LearnError> {
    let ids = validate_pairs(rows)?;
    if pair_targets.len() != ids.len() {
        return Err(LearnError::Pairing(format!(
            "{} pairs but {} pair targets",
            ids.len(),
            pair_targets.len()
        )));
    }
    let stage1 = grid_search(rows, grid, folds, mix_seed(seed, 1, 0))?;
    let yhat = average_top_k(&stage1, top_k, &rows.x);
    let (x2, names) = stage2_design(rows, &yhat);
    let data2 = Dataset::new(x2, pair_targets.clone(), names, ids)?;
    let stage2 = grid_search(&data2, grid, folds, mix_seed(seed, 2, 0))?;
    Ok(StackedModel {
        stage1,
        stage2,
        top_k,
    })
}

/// Applies a stacked model to paired rows; returns one prediction per
/// pair.
pub fn stacked_predict(model: &StackedModel, rows: &Dataset) -> Result<DVector<f64>, LearnError> {
    validate_pairs(rows)?;
    let yhat = average_top_k(&model.stage1, model.top_k, &rows.x);
    let (x2, _) = stage2_design(rows, &yhat);
    Ok(average_top_k(&model.stage2, model.top_k, &x2))
}
