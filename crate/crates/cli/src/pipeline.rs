//! Shared pipeline stages behind the subcommands: cached asset
//! construction, instance loading, and feature-matrix assembly.
//!
//! Cached artifacts are always *read back* after being written so that
//! cache-hit and cache-miss runs feed bit-identical values downstream
//! (the TSV formats round scores, so the freshly computed values can
//! differ from the re-read ones in the last decimals).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use cwsim_core::features::{
    build_targets, feature_names, parse_gwsc_str, FeatureExtractor, Instance, QuadModel,
    TargetsResult, FEATURE_COUNT,
};
use cwsim_core::learn::{LearnError, StackedModel};
use cwsim_core::simlex::{
    load_lexicon, load_manifest, merge, transitive_close, ClosureConfig, SimStore,
};
use cwsim_core::text::tokenize;
use cwsim_core::wordnet::{compute_ic, parse_wordnet, IcConfig, IcTable, TaxonomyIndex, WnSim};

use crate::cache::{cache_hit, ensure_parent, record, InputHasher};
use crate::config::Settings;
use crate::error::CmdError;

const WORDNET_FILES: [&str; 8] = [
    "data.noun",
    "index.noun",
    "data.verb",
    "index.verb",
    "data.adj",
    "index.adj",
    "data.adv",
    "index.adv",
];

/// Builds (or reuses) the closed similarity store.
///
/// Returns the store as read back from its TSV plus the summary line
/// `pairs_before TAB pairs_after`, where `pairs_before` counts the
/// merged store before the closure.
pub fn ensure_store(settings: &Settings) -> Result<(SimStore, String), CmdError> {
    let manifest_path = settings.require("manifest")?;
    let out = settings.store_path();

    let mut hasher = InputHasher::new("store");
    hasher.file("manifest", &manifest_path)?;
    let manifest = load_manifest(&manifest_path)?;
    for (idx, line) in manifest.iter().enumerate() {
        hasher.text("lexicon-tag", &format!("{idx}:{}:{}", line.source, line.scale_max));
        hasher.file("lexicon", &line.path)?;
    }
    hasher.text("passes", &settings.passes.to_string());
    let digest = hasher.finish();

    if let Some(summary) = cache_hit(&out, &digest) {
        return Ok((SimStore::read_tsv(&out)?, summary));
    }

    let mut lexicons = Vec::with_capacity(manifest.len());
    for line in &manifest {
        lexicons.push(load_lexicon(&line.path, line.scale_max, &line.source)?);
    }
    let merged = merge(&lexicons);
    let pairs_before = merged.len();
    let closed = transitive_close(
        &merged,
        &ClosureConfig {
            passes: settings.passes,
            ..ClosureConfig::default()
        },
    );
    let pairs_after = closed.len();

    ensure_parent(&out)?;
    let mut buf = Vec::new();
    closed.write_tsv(&mut buf)?;
    fs::write(&out, &buf)?;
    let summary = format!("{pairs_before}\t{pairs_after}");
    record(&out, &digest, &summary)?;

    Ok((SimStore::read_tsv(&out)?, summary))
}

fn wordnet_digest(kind: &str, dir: &Path, extra: &[(&str, String)]) -> Result<String, CmdError> {
    let mut hasher = InputHasher::new(kind);
    for name in WORDNET_FILES {
        hasher.file(name, &dir.join(name))?;
    }
    for (label, value) in extra {
        hasher.text(label, value);
    }
    Ok(hasher.finish())
}

/// Parses (or reloads) the WordNet taxonomy, cached as JSON.
pub fn ensure_taxonomy(settings: &Settings) -> Result<TaxonomyIndex, CmdError> {
    let dir = settings.require("wordnet-dir")?;
    let out = settings.taxonomy_path();
    let digest = wordnet_digest("taxonomy", &dir, &[])?;

    if cache_hit(&out, &digest).is_some() {
        let text = fs::read_to_string(&out)?;
        return Ok(TaxonomyIndex::from_cache_json(&text)?);
    }

    let tax = parse_wordnet(&dir)?;
    ensure_parent(&out)?;
    fs::write(&out, tax.to_cache_json())?;
    let summary = format!("synsets\t{}", tax.len());
    record(&out, &digest, &summary)?;
    Ok(tax)
}

/// Computes (or reloads) the information-content table.
///
/// The table is returned as read back from its TSV; its totals are not
/// needed once per-synset values exist.
pub fn ensure_ic(settings: &Settings, tax: &TaxonomyIndex) -> Result<IcTable, CmdError> {
    let dir = settings.require("wordnet-dir")?;
    let corpus_path = settings.require("corpus")?;
    let out = settings.ic_path();
    let mut extra = vec![("smoothing", settings.smoothing.to_string())];
    let corpus_text = fs::read_to_string(&corpus_path).map_err(|e| {
        CmdError::Data(format!("cannot read corpus {}: {e}", corpus_path.display()))
    })?;
    extra.push(("corpus", corpus_text.clone()));
    let digest = wordnet_digest("ic", &dir, &extra)?;

    if cache_hit(&out, &digest).is_some() {
        return Ok(IcTable::read_tsv(&out)?);
    }

    let mut counts: BTreeMap<String, f64> = BTreeMap::new();
    for token in tokenize(&corpus_text) {
        *counts.entry(token).or_insert(0.0) += 1.0;
    }
    let ic = compute_ic(
        tax,
        &counts,
        &IcConfig {
            smoothing: settings.smoothing,
        },
    );

    ensure_parent(&out)?;
    let mut buf = Vec::new();
    ic.write_tsv(&mut buf)?;
    fs::write(&out, &buf)?;
    record(&out, &digest, &format!("entries\t{}", ic.ic.len()))?;

    Ok(IcTable::read_tsv(&out)?)
}

/// Loads GWSC instances line by line with 1-based ordinal ids.
///
/// Under `--strict` the first bad line aborts; otherwise bad lines are
/// skipped with a warning on stderr. Returns the instances and the
/// number of skipped lines.
pub fn load_instances(settings: &Settings) -> Result<(Vec<Instance>, usize), CmdError> {
    let path = settings.require("gwsc")?;
    let text = fs::read_to_string(&path)
        .map_err(|e| CmdError::Data(format!("cannot read {}: {e}", path.display())))?;

    let mut instances = Vec::new();
    let mut skipped = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_gwsc_str(line, &settings.marker_open, &settings.marker_close) {
            Ok(mut parsed) => {
                debug_assert_eq!(parsed.len(), 1);
                let mut inst = parsed.remove(0);
                inst.id = (instances.len() + 1).to_string();
                instances.push(inst);
            }
            Err(e) => {
                let message = format!("{}:{}: {e}", path.display(), lineno + 1);
                if settings.strict {
                    return Err(CmdError::Data(message));
                }
                eprintln!("warning: skipping instance: {message}");
                skipped += 1;
            }
        }
    }
    if instances.is_empty() {
        return Err(CmdError::Data(format!(
            "{}: no parseable instances",
            path.display()
        )));
    }
    Ok((instances, skipped))
}

/// Feature rows for a dataset: two rows per instance (original order,
/// then contexts swapped), aligned ids, and the unsupervised targets.
pub struct FeatureRows {
    pub x: DMatrix<f64>,
    pub names: Vec<String>,
    pub row_ids: Vec<String>,
    /// Per-row targets: `score1` for even rows, `score2` for odd rows.
    pub y: DVector<f64>,
    /// Per-instance change targets.
    pub pair_targets: DVector<f64>,
    pub quad: QuadModel,
}

/// Extracts the full feature matrix plus targets for training.
pub fn build_feature_rows(
    instances: &[Instance],
    store: &SimStore,
    wn: &WnSim,
) -> Result<FeatureRows, CmdError> {
    let TargetsResult { targets, quad } = build_targets(instances, store)?;
    let x = extract_matrix(instances, store, wn, &quad);
    let mut row_ids = Vec::with_capacity(2 * instances.len());
    let mut y = Vec::with_capacity(2 * instances.len());
    let mut pair_targets = Vec::with_capacity(instances.len());
    for (inst, t) in instances.iter().zip(&targets) {
        row_ids.push(inst.id.clone());
        row_ids.push(inst.id.clone());
        y.push(t.score1);
        y.push(t.score2);
        pair_targets.push(t.change);
    }
    Ok(FeatureRows {
        x,
        names: feature_names(),
        row_ids,
        y: DVector::from_vec(y),
        pair_targets: DVector::from_vec(pair_targets),
        quad,
    })
}

/// Extracts the 2-rows-per-instance feature matrix with a fixed
/// quadratic model (prediction time). Row `2t` is instance `t` as
/// given; row `2t+1` has its contexts swapped. Parallel over instances
/// when a rayon pool with more than one thread is active; the indexed
/// collect keeps output order independent of scheduling.
pub fn extract_matrix(
    instances: &[Instance],
    store: &SimStore,
    wn: &WnSim,
    quad: &QuadModel,
) -> DMatrix<f64> {
    let rows: Vec<(Vec<f64>, Vec<f64>)> = instances
        .par_iter()
        .enumerate()
        .map(|(t, inst)| {
            let extractor = FeatureExtractor::new(store, wn);
            let a = extractor.extract(inst, t as f64, quad);
            let b = extractor.extract(&inst.swapped(), t as f64, quad);
            (a, b)
        })
        .collect();

    let mut flat = Vec::with_capacity(2 * instances.len() * FEATURE_COUNT);
    for (a, b) in rows {
        flat.extend_from_slice(&a);
        flat.extend_from_slice(&b);
    }
    DMatrix::from_row_slice(2 * instances.len(), FEATURE_COUNT, &flat)
}

pub const SAVED_PIPELINE_VERSION: u32 = 1;

/// A trained model plus the quadratic trend needed to rebuild the
/// position feature for unseen data.
#[derive(Debug, Serialize, Deserialize)]
pub struct SavedPipeline {
    pub version: u32,
    pub quad: QuadModel,
    pub model: StackedModel,
}

impl SavedPipeline {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pipeline serializes")
    }

    pub fn from_json(text: &str) -> Result<SavedPipeline, LearnError> {
        let saved: SavedPipeline = serde_json::from_str(text)
            .map_err(|e| LearnError::Persist(format!("invalid pipeline JSON: {e}")))?;
        if saved.version != SAVED_PIPELINE_VERSION {
            return Err(LearnError::Persist(format!(
                "pipeline version {} is not supported (expected {})",
                saved.version, SAVED_PIPELINE_VERSION
            )));
        }
        Ok(saved)
    }
}
