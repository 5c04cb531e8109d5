//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DVector;

use cwsim_core::features::feature_names;
use cwsim_core::learn::{average_top_k, stacked_fit, stacked_predict, Dataset, StackedModel};
use cwsim_core::metrics::{
    bws_scores, f1_binary, format_report, iaa_tau, mae, maer, mraer, pearson, rae,
    rank_pair_counts, riaa_tau, BwsTally, PairedSeries, RELATIVE_ERROR_EPS,
};
use cwsim_core::simlex::SimStore;
use cwsim_core::wordnet::WnSim;

use crate::cache::ensure_parent;
use crate::config::Settings;
use crate::error::CmdError;
use crate::pipeline::{
    build_feature_rows, ensure_ic, ensure_store, ensure_taxonomy, extract_matrix, load_instances,
    FeatureRows, SavedPipeline, SAVED_PIPELINE_VERSION,
};

/// Threshold splitting "similar" from "dissimilar" on the 0–10 scale.
const SCORE_F1_THRESHOLD: f64 = 5.0;
/// Threshold splitting positive from negative change scores.
const CHANGE_F1_THRESHOLD: f64 = 0.0;

pub fn cmd_build_store(settings: &Settings) -> Result<(), CmdError> {
    let (_, summary) = ensure_store(settings)?;
    println!("{summary}");
    Ok(())
}

pub fn cmd_build_ic(settings: &Settings) -> Result<(), CmdError> {
    let tax = ensure_taxonomy(settings)?;
    let ic = ensure_ic(settings, &tax)?;
    println!("synsets\t{}", tax.len());
    println!("ic_entries\t{}", ic.ic.len());
    Ok(())
}

fn load_assets(settings: &Settings) -> Result<(SimStore, WnSim), CmdError> {
    let (store, _) = ensure_store(settings)?;
    let tax = ensure_taxonomy(settings)?;
    let ic = ensure_ic(settings, &tax)?;
    Ok((store, WnSim::new(tax, ic)))
}

fn write_artifact(path: &Path, body: &str) -> Result<(), CmdError> {
    ensure_parent(path)?;
    fs::write(path, body)
        .map_err(|e| CmdError::Data(format!("cannot write {}: {e}", path.display())))
}

fn features_tsv(rows: &FeatureRows) -> String {
    let mut out = String::new();
    out.push_str("id");
    for name in &rows.names {
        out.push('\t');
        out.push_str(name);
    }
    out.push('\n');
    for r in 0..rows.x.nrows() {
        out.push_str(&rows.row_ids[r]);
        for c in 0..rows.x.ncols() {
            let _ = write!(out, "\t{}", rows.x[(r, c)]);
        }
        out.push('\n');
    }
    out
}

fn predictions_tsv(ids: &[String], score1: &[f64], score2: &[f64], change: &[f64]) -> String {
    let mut out = String::from("id\tscore1\tscore2\tchange\n");
    for (((id, s1), s2), ch) in ids.iter().zip(score1).zip(score2).zip(change) {
        let _ = writeln!(out, "{id}\t{s1:.6}\t{s2:.6}\t{ch:.6}");
    }
    out
}

/// Per-instance similarity scores from per-row stage-1 predictions:
/// even rows are `score1`, odd rows `score2`, both clamped to the wps
/// scale.
fn split_scores(yhat: &DVector<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = yhat.len() / 2;
    let mut score1 = Vec::with_capacity(n);
    let mut score2 = Vec::with_capacity(n);
    for t in 0..n {
        score1.push(yhat[2 * t].clamp(0.0, 10.0));
        score2.push(yhat[2 * t + 1].clamp(0.0, 10.0));
    }
    (score1, score2)
}

fn fit_stacked(
    settings: &Settings,
    rows: &FeatureRows,
) -> Result<(Dataset, StackedModel), CmdError> {
    let dataset = Dataset::new(
        rows.x.clone(),
        rows.y.clone(),
        rows.names.clone(),
        rows.row_ids.clone(),
    )?;
    let model = stacked_fit(
        &dataset,
        &rows.pair_targets,
        &settings.grid(),
        settings.folds,
        settings.seed,
        settings.top_k,
    )?;
    Ok((dataset, model))
}

fn save_model(path: &Path, rows: &FeatureRows, model: &StackedModel) -> Result<(), CmdError> {
    let saved = SavedPipeline {
        version: SAVED_PIPELINE_VERSION,
        quad: rows.quad,
        model: model.clone(),
    };
    write_artifact(path, &saved.to_json())
}

/// `score` (and `extract-features` via `features_only`): parse, extract
/// features, optionally train and predict.
pub fn cmd_score(settings: &Settings, features_only: bool) -> Result<(), CmdError> {
    let (store, wn) = load_assets(settings)?;
    let (instances, _skipped) = load_instances(settings)?;
    let rows = build_feature_rows(&instances, &store, &wn)?;

    if features_only {
        write_artifact(&settings.features_out, &features_tsv(&rows))?;
        println!("instances\t{}", instances.len());
        return Ok(());
    }

    let (dataset, model) = fit_stacked(settings, &rows)?;
    let yhat = average_top_k(&model.stage1, model.top_k, &dataset.x);
    let (score1, score2) = split_scores(&yhat);
    let change = stacked_predict(&model, &dataset)?;

    let ids: Vec<String> = instances.iter().map(|i| i.id.clone()).collect();
    let tsv = predictions_tsv(&ids, &score1, &score2, change.as_slice());
    write_artifact(&settings.predictions_out, &tsv)?;
    if let Some(model_out) = &settings.model_out {
        save_model(model_out, &rows, &model)?;
    }
    println!("instances\t{}", instances.len());
    Ok(())
}

/// `train`: fit the stacked model and persist it without predicting.
pub fn cmd_train(settings: &Settings) -> Result<(), CmdError> {
    let model_out = settings.model_out.clone().ok_or_else(|| {
        CmdError::Usage("missing required setting 'model-out' (config key or --model-out)".into())
    })?;
    let (store, wn) = load_assets(settings)?;
    let (instances, _skipped) = load_instances(settings)?;
    let rows = build_feature_rows(&instances, &store, &wn)?;
    let (_, model) = fit_stacked(settings, &rows)?;
    save_model(&model_out, &rows, &model)?;
    println!("instances\t{}", instances.len());
    Ok(())
}

/// `predict`: load a saved model and score a new GWSC file.
pub fn cmd_predict(settings: &Settings) -> Result<(), CmdError> {
    let model_path = settings.model_out.clone().ok_or_else(|| {
        CmdError::Usage("missing required setting 'model-out' (config key or --model-out)".into())
    })?;
    let text = fs::read_to_string(&model_path)
        .map_err(|e| CmdError::Data(format!("cannot read {}: {e}", model_path.display())))?;
    let saved = SavedPipeline::from_json(&text)?;

    let (store, wn) = load_assets(settings)?;
    let (instances, _skipped) = load_instances(settings)?;
    let x = extract_matrix(&instances, &store, &wn, &saved.quad);

    let mut row_ids = Vec::with_capacity(2 * instances.len());
    for inst in &instances {
        row_ids.push(inst.id.clone());
        row_ids.push(inst.id.clone());
    }
    let dataset = Dataset::new(x, DVector::zeros(2 * instances.len()), feature_names(), row_ids)?;

    let yhat = average_top_k(&saved.model.stage1, saved.model.top_k, &dataset.x);
    let (score1, score2) = split_scores(&yhat);
    let change = stacked_predict(&saved.model, &dataset)?;

    let ids: Vec<String> = instances.iter().map(|i| i.id.clone()).collect();
    let tsv = predictions_tsv(&ids, &score1, &score2, change.as_slice());
    write_artifact(&settings.predictions_out, &tsv)?;
    println!("instances\t{}", instances.len());
    Ok(())
}

/// Row order plus the per-id `(score1, score2, change)` triples of a
/// predictions-format TSV.
type PredictionTable = (Vec<String>, BTreeMap<String, [f64; 3]>);

/// Reads a predictions-format TSV; the header row is optional and row
/// order is preserved.
fn read_prediction_table(path: &Path) -> Result<PredictionTable, CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CmdError::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut order = Vec::new();
    let mut table = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(CmdError::Data(format!(
                "{}:{}: expected 4 tab-separated columns, found {}",
                path.display(),
                lineno + 1,
                cols.len()
            )));
        }
        if lineno == 0 && cols[1].parse::<f64>().is_err() {
            continue; // header row
        }
        let mut values = [0.0; 3];
        for (slot, raw) in values.iter_mut().zip(&cols[1..]) {
            *slot = raw.parse().map_err(|_| {
                CmdError::Data(format!(
                    "{}:{}: '{raw}' is not a number",
                    path.display(),
                    lineno + 1
                ))
            })?;
        }
        if table.insert(cols[0].to_string(), values).is_some() {
            return Err(CmdError::Data(format!(
                "{}:{}: duplicate id '{}'",
                path.display(),
                lineno + 1,
                cols[0]
            )));
        }
        order.push(cols[0].to_string());
    }
    if order.is_empty() {
        return Err(CmdError::Data(format!("{}: no data rows", path.display())));
    }
    Ok((order, table))
}

/// `evaluate`: align predictions with gold by id and report the metric
/// suite separately for score1, score2, and change.
pub fn cmd_evaluate(settings: &Settings, predictions: Option<&Path>) -> Result<(), CmdError> {
    let pred_path = predictions
        .map(PathBuf::from)
        .unwrap_or_else(|| settings.predictions_out.clone());
    let gold_path = settings.require("gold")?;
    let (order, pred) = read_prediction_table(&pred_path)?;
    let (_, gold) = read_prediction_table(&gold_path)?;

    let missing_gold: Vec<&String> = pred.keys().filter(|id| !gold.contains_key(*id)).collect();
    let missing_pred: Vec<&String> = gold.keys().filter(|id| !pred.contains_key(*id)).collect();
    if !missing_gold.is_empty() || !missing_pred.is_empty() {
        let mut message = String::from("id alignment failed;");
        if !missing_gold.is_empty() {
            let ids: Vec<&str> = missing_gold.iter().map(|s| s.as_str()).collect();
            let _ = write!(message, " missing from gold: {}", ids.join(", "));
        }
        if !missing_pred.is_empty() {
            let ids: Vec<&str> = missing_pred.iter().map(|s| s.as_str()).collect();
            let _ = write!(message, " missing from predictions: {}", ids.join(", "));
        }
        return Err(CmdError::Data(message));
    }

    let mut entries: Vec<(String, f64)> = Vec::new();
    let targets = [
        ("score1", 0usize, SCORE_F1_THRESHOLD),
        ("score2", 1, SCORE_F1_THRESHOLD),
        ("change", 2, CHANGE_F1_THRESHOLD),
    ];
    for (prefix, idx, f1_threshold) in targets {
        let p: Vec<f64> = order.iter().map(|id| pred[id][idx]).collect();
        let g: Vec<f64> = order.iter().map(|id| gold[id][idx]).collect();
        let series = PairedSeries::new(p.clone(), g.clone())?;

        entries.push((format!("{prefix}.r"), pearson(&series)?));
        entries.push((format!("{prefix}.mae"), mae(&series)));
        entries.push((format!("{prefix}.rae"), rae(&series)?));
        entries.push((format!("{prefix}.maer"), maer(&series, RELATIVE_ERROR_EPS)));
        entries.push((format!("{prefix}.mraer"), mraer(&series, RELATIVE_ERROR_EPS)));
        let gold_bins: Vec<bool> = g.iter().map(|v| *v > f1_threshold).collect();
        let outcome = f1_binary(&p, &gold_bins, f1_threshold);
        if outcome.degenerate {
            eprintln!("warning: {prefix}.f1 is degenerate (no positive class on either side)");
        }
        entries.push((format!("{prefix}.f1"), outcome.f1));
        entries.push((format!("{prefix}.iaa_tau"), iaa_tau(&rank_pair_counts(&p, &g)?)?));
        entries.push((
            format!("{prefix}.riaa_tau"),
            riaa_tau(&p, &g, settings.seed)?,
        ));
    }

    let borrowed: Vec<(&str, f64)> = entries.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let report = format_report(&borrowed);
    print!("{report}");
    if let Some(report_out) = &settings.report_out {
        write_artifact(report_out, &report)?;
    }
    Ok(())
}

fn read_score_column(path: &Path) -> Result<Vec<f64>, CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CmdError::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(line.parse().map_err(|_| {
            CmdError::Data(format!(
                "{}:{}: '{line}' is not a number",
                path.display(),
                lineno + 1
            ))
        })?);
    }
    Ok(out)
}

/// `agree tau`: agreement statistics between two score lists.
pub fn cmd_agree_tau(settings: &Settings, a: &Path, b: &Path) -> Result<(), CmdError> {
    let sa = read_score_column(a)?;
    let sb = read_score_column(b)?;
    let counts = rank_pair_counts(&sa, &sb)?;
    let iaa = iaa_tau(&counts)?;
    let riaa = riaa_tau(&sa, &sb, settings.seed)?;
    print!(
        "{}",
        format_report(&[("iaa_tau", iaa), ("riaa_tau", riaa)])
    );
    Ok(())
}

/// `agree bws`: best–worst-scaling scores from a tally file, one
/// `best TAB worst TAB annotations` line per item.
pub fn cmd_agree_bws(path: &Path) -> Result<(), CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CmdError::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut tallies = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(CmdError::Data(format!(
                "{}:{}: expected 3 tab-separated columns, found {}",
                path.display(),
                lineno + 1,
                cols.len()
            )));
        }
        let parse = |raw: &str| -> Result<u64, CmdError> {
            raw.parse().map_err(|_| {
                CmdError::Data(format!(
                    "{}:{}: '{raw}' is not a count",
                    path.display(),
                    lineno + 1
                ))
            })
        };
        tallies.push(BwsTally {
            best: parse(cols[0])?,
            worst: parse(cols[1])?,
            annotations: parse(cols[2])?,
        });
    }
    for score in bws_scores(&tallies)? {
        println!("{score:.4}");
    }
    Ok(())
}
