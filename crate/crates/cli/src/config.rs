//! Flat key=value configuration with CLI-flag overrides.
//!
//! Precedence, lowest to highest: built-in defaults, the `--config`
//! file, the `CWSIM_CACHE` environment variable (cache directory only),
//! then command-line flags. Every config key has a flag of the same
//! name, and both funnel through [`Settings::apply`].

use std::fmt;
use std::path::{Path, PathBuf};

use cwsim_core::learn::HyperGrid;

#[derive(Debug)]
pub struct ConfigError {
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(message: impl Into<String>) -> ConfigError {
    ConfigError {
        message: message.into(),
    }
}

/// Fully resolved pipeline settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub manifest: Option<PathBuf>,
    pub wordnet_dir: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub gwsc: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub marker_open: String,
    pub marker_close: String,
    pub passes: usize,
    pub smoothing: f64,
    pub seed: u64,
    pub folds: usize,
    pub top_k: usize,
    pub jobs: usize,
    pub ridge_lambdas: Vec<f64>,
    pub fs_k: Vec<usize>,
    pub pls_components: Vec<usize>,
    pub tree_leaf: Vec<usize>,
    pub tree_split: Vec<usize>,
    pub n_estimators: usize,
    pub cache_dir: PathBuf,
    pub store_out: Option<PathBuf>,
    pub ic_out: Option<PathBuf>,
    pub features_out: PathBuf,
    pub predictions_out: PathBuf,
    pub model_out: Option<PathBuf>,
    pub report_out: Option<PathBuf>,
    pub strict: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            manifest: None,
            wordnet_dir: None,
            corpus: None,
            gwsc: None,
            gold: None,
            marker_open: "<strong>".to_string(),
            marker_close: "</strong>".to_string(),
            passes: 1,
            smoothing: 1.0,
            seed: 42,
            folds: 7,
            top_k: 3,
            jobs: 1,
            ridge_lambdas: vec![0.01, 0.1, 1.0, 10.0, 100.0],
            fs_k: vec![20, 50, 100, 145],
            pls_components: vec![2, 5, 10, 20],
            tree_leaf: vec![1, 2, 4],
            tree_split: vec![2, 4, 8],
            n_estimators: 500,
            cache_dir: PathBuf::from(".cwsim-cache"),
            store_out: None,
            ic_out: None,
            features_out: PathBuf::from("features.tsv"),
            predictions_out: PathBuf::from("predictions.tsv"),
            model_out: None,
            report_out: None,
            strict: false,
        }
    }
}

impl Settings {
    /// Applies one `key=value` assignment from either the config file
    /// or a same-named command-line flag.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "manifest" => self.manifest = Some(PathBuf::from(value)),
            "wordnet-dir" => self.wordnet_dir = Some(PathBuf::from(value)),
            "corpus" => self.corpus = Some(PathBuf::from(value)),
            "gwsc" => self.gwsc = Some(PathBuf::from(value)),
            "gold" => self.gold = Some(PathBuf::from(value)),
            "marker-open" => self.marker_open = value.to_string(),
            "marker-close" => self.marker_close = value.to_string(),
            "passes" => self.passes = parse_num(key, value)?,
            "smoothing" => self.smoothing = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "folds" => self.folds = parse_num(key, value)?,
            "top-k" => self.top_k = parse_num(key, value)?,
            "jobs" => self.jobs = parse_num(key, value)?,
            "ridge-lambdas" => self.ridge_lambdas = parse_list(key, value)?,
            "fs-k" => self.fs_k = parse_list(key, value)?,
            "pls-components" => self.pls_components = parse_list(key, value)?,
            "tree-leaf" => self.tree_leaf = parse_list(key, value)?,
            "tree-split" => self.tree_split = parse_list(key, value)?,
            "n-estimators" => self.n_estimators = parse_num(key, value)?,
            "cache-dir" => self.cache_dir = PathBuf::from(value),
            "store-out" => self.store_out = Some(PathBuf::from(value)),
            "ic-out" => self.ic_out = Some(PathBuf::from(value)),
            "features-out" => self.features_out = PathBuf::from(value),
            "predictions-out" => self.predictions_out = PathBuf::from(value),
            "model-out" => self.model_out = Some(PathBuf::from(value)),
            "report-out" => self.report_out = Some(PathBuf::from(value)),
            "strict" => self.strict = parse_bool(key, value)?,
            other => return Err(err(format!("unknown configuration key '{other}'"))),
        }
        Ok(())
    }

    /// Reads a flat key=value file; `#` starts a comment and blank
    /// lines are skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(format!("cannot read config file {}: {e}", path.display())))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                err(format!(
                    "{}:{}: expected key=value, got '{line}'",
                    path.display(),
                    idx + 1
                ))
            })?;
            self.apply(key.trim(), value.trim()).map_err(|e| {
                err(format!("{}:{}: {}", path.display(), idx + 1, e.message))
            })?;
        }
        Ok(())
    }

    /// Applies the `CWSIM_CACHE` override when the variable is set.
    pub fn apply_env(&mut self) {
        if let Ok(dir) = std::env::var("CWSIM_CACHE") {
            if !dir.is_empty() {
                self.cache_dir = PathBuf::from(dir);
            }
        }
    }

    pub fn grid(&self) -> HyperGrid {
        HyperGrid {
            ridge_lambdas: self.ridge_lambdas.clone(),
            tree_min_samples_leaf: self.tree_leaf.clone(),
            tree_min_samples_split: self.tree_split.clone(),
            fs_k: self.fs_k.clone(),
            pls_components: self.pls_components.clone(),
            n_estimators: self.n_estimators,
        }
    }

    pub fn store_path(&self) -> PathBuf {
        self.store_out
            .clone()
            .unwrap_or_else(|| self.cache_dir.join("store.tsv"))
    }

    pub fn ic_path(&self) -> PathBuf {
        self.ic_out
            .clone()
            .unwrap_or_else(|| self.cache_dir.join("ic.tsv"))
    }

    pub fn taxonomy_path(&self) -> PathBuf {
        self.cache_dir.join("taxonomy.json")
    }

    /// Returns a required input path or a usage error naming the key.
    pub fn require(&self, key: &str) -> Result<PathBuf, ConfigError> {
        let value = match key {
            "manifest" => &self.manifest,
            "wordnet-dir" => &self.wordnet_dir,
            "corpus" => &self.corpus,
            "gwsc" => &self.gwsc,
            "gold" => &self.gold,
            other => return Err(err(format!("internal: unknown required key '{other}'"))),
        };
        value
            .clone()
            .ok_or_else(|| err(format!("missing required setting '{key}' (config key or --{key})")))
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| err(format!("invalid value '{value}' for '{key}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(err(format!("invalid boolean '{other}' for '{key}'"))),
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError> {
    let mut out = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(parse_num(key, part)?);
    }
    if out.is_empty() {
        return Err(err(format!("empty list for '{key}'")));
    }
    Ok(out)
}
