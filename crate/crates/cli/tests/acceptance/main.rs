//! Acceptance suite: one line of output per criterion.
//!
//! Each criterion checks the library (or the binary) against an
//! independent oracle, an exact identity, or a budgeted property at
//! realistic scale, and prints exactly one line:
//!
//! ```text
//! ACCEPTANCE <n> <name>: PASS (<detail>) | FAIL (<why>)
//! ```
//!
//! The process exits nonzero if any criterion fails. Run it alone with
//! `cargo test --test acceptance`.

mod oracles;

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use cwsim_core::features::{
    build_targets, feature_names, fit_quadratic, intra_cwps, parse_gwsc_str, serialize_gwsc,
    FeatureExtractor, Instance, DEFAULT_MARKER_CLOSE, DEFAULT_MARKER_OPEN, FEATURE_COUNT,
    WN_SCHEMES,
};
use cwsim_core::learn::ada::{adaboost_fit, AdaBoostParams};
use cwsim_core::learn::pls::pls_fit;
use cwsim_core::learn::ridge::ridge_fit;
use cwsim_core::learn::tree::{extra_trees_fit, ExtraTreesParams};
use cwsim_core::learn::{
    average_top_k, combine_predictions, grid_search, mix_seed, stacked_fit, Dataset, HyperGrid,
};
use cwsim_core::metrics::{
    bws_scores, iaa_tau, mraer, pearson, rae, rank_pair_counts, riaa_tau, BwsTally, PairedSeries,
    RankPairCounts, RELATIVE_ERROR_EPS,
};
use cwsim_core::simlex::{
    load_lexicon, merge, transitive_close, ClosureConfig, Provenance, SimStore,
};
use cwsim_core::wordnet::{
    compute_ic, parse_wordnet, wnsim, IcConfig, IcTable, PartOfSpeech, Synset, SynsetId,
    TaxonomyIndex,
};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Criterion = fn() -> Result<String, String>;

fn main() {
    // Panic payloads are reported in the criterion's own line.
    std::panic::set_hook(Box::new(|_| {}));
    let criteria: [(&str, Criterion); 9] = [
        ("closure-oracle", c1_closure_oracle),
        ("closure-growth", c2_closure_growth),
        ("feature-contract", c3_feature_contract),
        ("identity-degeneracies", c4_identity_degeneracies),
        ("learner-oracles", c5_learner_oracles),
        ("stacking-contract", c6_stacking_contract),
        ("metrics-identities", c7_metrics_identities),
        ("wordnet-pipeline", c8_wordnet_pipeline),
        ("determinism", c9_determinism),
    ];
    let mut failed = 0usize;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let line = match catch_unwind(AssertUnwindSafe(run)) {
            Ok(Ok(detail)) => format!("ACCEPTANCE {} {}: PASS ({})", i + 1, name, detail),
            Ok(Err(why)) => {
                failed += 1;
                format!("ACCEPTANCE {} {}: FAIL ({})", i + 1, name, why)
            }
            Err(payload) => {
                failed += 1;
                format!(
                    "ACCEPTANCE {} {}: FAIL (panic: {})",
                    i + 1,
                    name,
                    panic_text(payload.as_ref())
                )
            }
        };
        println!("{line}");
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn panic_text(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".to_string()
    }
}

// ---------------------------------------------------------------------
// 1. Closure equals a brute-force triple scan on 200 random stores.
// ---------------------------------------------------------------------

fn c1_closure_oracle() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(0xACC1);
    let mut derived_total = 0usize;
    for case in 0..200usize {
        let spec = gen::random_store(&mut rng);
        let cfg = ClosureConfig {
            neutral: 5.0,
            cap: 10.0,
            passes: 1 + case % 3,
        };
        let mut store = SimStore::new();
        for &(i, j, s) in &spec.edges {
            store.insert(&spec.words[i], &spec.words[j], s, Provenance::Original);
        }
        let closed = transitive_close(&store, &cfg);
        let oracle = oracles::close_brute_force(
            spec.words.len(),
            &spec.edges,
            cfg.neutral,
            cfg.cap,
            cfg.passes,
        );
        if closed.len() != oracle.pair_count() {
            return Err(format!(
                "case {case}: {} pairs vs oracle {}",
                closed.len(),
                oracle.pair_count()
            ));
        }
        let n = spec.words.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let got = closed.lookup(&spec.words[i], &spec.words[j]);
                let want = oracle.score(i, j);
                if got != want {
                    return Err(format!(
                        "case {case}: pair ({}, {}) scored {got:?}, oracle {want:?}",
                        spec.words[i], spec.words[j]
                    ));
                }
                if want.is_some() {
                    let want_prov = if oracle.is_derived(i, j) {
                        Provenance::Derived
                    } else {
                        Provenance::Original
                    };
                    let got_prov = closed.provenance(&spec.words[i], &spec.words[j]);
                    if got_prov != Some(want_prov) {
                        return Err(format!(
                            "case {case}: pair ({}, {}) provenance {got_prov:?}, oracle {want_prov:?}",
                            spec.words[i], spec.words[j]
                        ));
                    }
                    if oracle.is_derived(i, j) {
                        derived_total += 1;
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 10.0 {
        return Err(format!("took {secs:.1}s, budget is 10s"));
    }
    Ok(format!(
        "200 stores, {derived_total} derived pairs matched bitwise, {secs:.2}s"
    ))
}

// ---------------------------------------------------------------------
// 2. One closure pass grows six benchmark-size lexicons at least 5x.
// ---------------------------------------------------------------------

fn c2_closure_growth() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha20Rng::seed_from_u64(0xACC2);
    let files = gen::write_six_lexicons(dir.path(), &mut rng);
    let mut lexicons = Vec::new();
    for (path, scale, name) in &files {
        lexicons.push(load_lexicon(path, *scale, name).map_err(|e| e.to_string())?);
    }
    let merged = merge(&lexicons);
    if merged.len() != 10_397 {
        return Err(format!(
            "merged store has {} pairs, expected 10397",
            merged.len()
        ));
    }
    let closed = transitive_close(&merged, &ClosureConfig::default());
    let growth = closed.len() as f64 / merged.len() as f64;
    if growth < 5.0 {
        return Err(format!(
            "one pass grew 10397 -> {} pairs ({growth:.2}x), below the 5x bound",
            closed.len()
        ));
    }
    Ok(format!(
        "one pass grew 10397 -> {} pairs ({growth:.1}x)",
        closed.len()
    ))
}

// ---------------------------------------------------------------------
// 3. 145 finite features per parsed instance; the 80 cross-context
//    WordNet aggregates match direct pair enumeration bitwise.
// ---------------------------------------------------------------------

fn c3_feature_contract() -> Result<String, String> {
    let mut rng = ChaCha20Rng::seed_from_u64(0xACC3);
    let wn = gen::small_wnsim();
    let vocab: Vec<String> = [
        "entity", "animal", "cat", "dog", "car", "truck", "move", "run", "walk", // covered
        "zzq", "blorp", "wug", "fep", "nid", "quax", "vorn", // out of vocabulary
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();

    let instances: Vec<Instance> = (0..50)
        .map(|i| gen::random_instance(&mut rng, i, &vocab, &vocab))
        .collect();
    let text = serialize_gwsc(&instances, DEFAULT_MARKER_OPEN, DEFAULT_MARKER_CLOSE);
    let parsed =
        parse_gwsc_str(&text, DEFAULT_MARKER_OPEN, DEFAULT_MARKER_CLOSE).map_err(|e| e.to_string())?;
    if parsed != instances {
        return Err("serialize/parse round trip altered the instances".into());
    }

    // Partial store coverage so pooled features mix defined and
    // undefined cells.
    let mut store = SimStore::new();
    for i in 0..vocab.len() {
        for j in (i + 1)..vocab.len() {
            if rng.gen::<f64>() < 0.4 {
                store.insert(
                    &vocab[i],
                    &vocab[j],
                    rng.gen_range(0.0..10.0),
                    Provenance::Original,
                );
            }
        }
    }
    let quad = fit_quadratic(&[(0.0, 2.0), (10.0, 4.0), (25.0, 5.5), (49.0, 3.0)])
        .map_err(|e| e.to_string())?;
    let extractor = FeatureExtractor::new(&store, &wn);

    let names = feature_names();
    let base = names
        .iter()
        .position(|n| n == "inter.maxmax.r1c1")
        .ok_or("feature names lack the WordNet block")?;
    let mut compared = 0usize;
    for (idx, inst) in parsed.iter().enumerate() {
        let values = extractor.extract(inst, idx as f64, &quad);
        if values.len() != FEATURE_COUNT {
            return Err(format!(
                "instance {}: {} features, expected {FEATURE_COUNT}",
                inst.id,
                values.len()
            ));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(format!("instance {}: non-finite feature {bad}", inst.id));
        }
        let regions1 = inst.context1.split_inter();
        let regions2 = inst.context2.split_inter();
        for (s, (scheme, outer, inner)) in WN_SCHEMES.iter().enumerate() {
            let want = oracles::wn_sixteen_by_hand(&wn, &regions1, &regions2, *outer, *inner);
            for (k, want_v) in want.iter().enumerate() {
                let got = values[base + 16 * s + k];
                if got != *want_v {
                    return Err(format!(
                        "instance {} scheme {scheme} slot {k}: {got} vs oracle {want_v}",
                        inst.id
                    ));
                }
                compared += 1;
            }
        }
    }
    Ok(format!(
        "50 instances x {FEATURE_COUNT} finite features; {compared} wnsim aggregates matched bitwise"
    ))
}

// ---------------------------------------------------------------------
// 4. Identical contexts degenerate exactly; swapping contexts swaps the
//    scores and negates the change, bitwise, on 100 random instances.
// ---------------------------------------------------------------------

fn c4_identity_degeneracies() -> Result<String, String> {
    let mut rng = ChaCha20Rng::seed_from_u64(0xACC4);
    // Full pair coverage with continuous scores: every pooled lookup is
    // defined and exact pooled-score ties have probability zero.
    let vocab: Vec<String> = (0..16).map(|i| format!("v{i:02}")).collect();
    let mut store = SimStore::new();
    for i in 0..vocab.len() {
        for j in (i + 1)..vocab.len() {
            store.insert(
                &vocab[i],
                &vocab[j],
                rng.gen_range(0.0..10.0),
                Provenance::Original,
            );
        }
    }
    let wn = gen::small_wnsim();
    let extractor = FeatureExtractor::new(&store, &wn);
    let names = feature_names();
    let quad = fit_quadratic(&[(0.0, 3.0), (5.0, 4.0), (12.0, 6.0), (20.0, 5.0)])
        .map_err(|e| e.to_string())?;

    for case in 0..30usize {
        let w1 = vocab[rng.gen_range(0..vocab.len())].clone();
        let w2 = loop {
            let w = vocab[rng.gen_range(0..vocab.len())].clone();
            if w != w1 {
                break w;
            }
        };
        let fillers: Vec<String> = vocab.iter().filter(|v| **v != w1 && **v != w2).cloned().collect();
        let ctx = gen::random_marked_context(&mut rng, &w1, &w2, &fillers, 6, 14);
        let inst = Instance {
            id: (case + 1).to_string(),
            word1: w1,
            word2: w2,
            context1: ctx.clone(),
            context2: ctx,
        };
        let values = extractor.extract(&inst, case as f64, &quad);
        for (name, v) in names.iter().zip(&values) {
            if name.starts_with("inter.editdist.") && *v != 0.0 {
                return Err(format!("case {case}: {name} = {v}, expected 0 exactly"));
            }
            let cross_ratio = name.starts_with("inter.charratio.")
                || name.starts_with("inter.tokratio.")
                || name.starts_with("intra.ratio.");
            if cross_ratio && *v != 1.0 {
                return Err(format!("case {case}: {name} = {v}, expected 1 exactly"));
            }
        }
        let raw1 = intra_cwps(&inst.context1, &store).0;
        let raw2 = intra_cwps(&inst.context2, &store).0;
        if raw1.is_none() || raw1 != raw2 {
            return Err(format!(
                "case {case}: pre-blend scores {raw1:?} vs {raw2:?}, expected equal and defined"
            ));
        }
    }

    // Swap identity. Instances whose raw context scores tie (or lack
    // coverage) are rejected: the tie-breaking nudge is deliberately
    // asymmetric, so exact ties are outside the swap contract.
    let fillers: Vec<String> = vocab[2..].to_vec();
    let mut dataset: Vec<Instance> = Vec::with_capacity(100);
    let mut attempts = 0usize;
    while dataset.len() < 100 {
        attempts += 1;
        if attempts > 10_000 {
            return Err("could not generate 100 tie-free instances".into());
        }
        let inst = Instance {
            id: (dataset.len() + 1).to_string(),
            word1: vocab[0].clone(),
            word2: vocab[1].clone(),
            context1: gen::random_marked_context(&mut rng, &vocab[0], &vocab[1], &fillers, 6, 12),
            context2: gen::random_marked_context(&mut rng, &vocab[0], &vocab[1], &fillers, 6, 12),
        };
        let raw1 = intra_cwps(&inst.context1, &store).0;
        let raw2 = intra_cwps(&inst.context2, &store).0;
        if raw1.is_none() || raw2.is_none() || raw1 == raw2 {
            continue;
        }
        dataset.push(inst);
    }
    let swapped: Vec<Instance> = dataset.iter().map(Instance::swapped).collect();
    let forward = build_targets(&dataset, &store).map_err(|e| e.to_string())?;
    let backward = build_targets(&swapped, &store).map_err(|e| e.to_string())?;
    if forward.quad != backward.quad {
        return Err("quadratic trend differs between original and swapped datasets".into());
    }
    for (t, (f, b)) in forward.targets.iter().zip(&backward.targets).enumerate() {
        if f.score1 != b.score2 || f.score2 != b.score1 {
            return Err(format!("instance {t}: scores did not swap exactly"));
        }
        if f.change != -b.change {
            return Err(format!("instance {t}: change did not negate exactly"));
        }
    }
    Ok(
        "30 identity instances: editdist 0, ratios 1, pre-blend scores equal; \
         swap identity bitwise on 100 instances"
            .into(),
    )
}

// ---------------------------------------------------------------------
// 5. Learners match hand-solved systems; trees/boosting are seeded and
//    accurate; the full grid with top-3 averaging correlates > 0.99.
// ---------------------------------------------------------------------

fn c5_learner_oracles() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(0xACC5);

    let lambdas = [0.0, 0.01, 0.1, 1.0, 10.0, 100.0];
    let mut max_ridge_err = 0.0f64;
    for case in 0..20usize {
        let n = rng.gen_range(10..=40);
        let d = rng.gen_range(2..=6);
        let lambda = lambdas[case % lambdas.len()];
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| gen::gauss(&mut rng)).collect())
            .collect();
        let coef: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|row| {
                row.iter().zip(&coef).map(|(a, c)| a * c).sum::<f64>()
                    + 1.5
                    + 0.3 * gen::gauss(&mut rng)
            })
            .collect();
        let xm = DMatrix::from_fn(n, d, |i, j| x[i][j]);
        let ym = DVector::from_iterator(n, y.iter().copied());
        let model = ridge_fit(&xm, &ym, lambda);
        let (beta, intercept) = oracles::ridge_by_hand(&x, &y, lambda);
        for (got, want) in model.coefficients.iter().zip(&beta) {
            max_ridge_err = max_ridge_err.max((got - want).abs());
        }
        max_ridge_err = max_ridge_err.max((model.intercept - intercept).abs());
    }
    if max_ridge_err > 1e-6 {
        return Err(format!(
            "ridge deviates from the hand normal-equations solution by {max_ridge_err:.2e}"
        ));
    }

    let mut max_pls_err = 0.0f64;
    for _ in 0..10 {
        let n = 30;
        let d = rng.gen_range(2..=5);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| gen::gauss(&mut rng)).collect())
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|row| row.iter().sum::<f64>() * 0.8 - 0.5 + 0.2 * gen::gauss(&mut rng))
            .collect();
        let xm = DMatrix::from_fn(n, d, |i, j| x[i][j]);
        let ym = DVector::from_iterator(n, y.iter().copied());
        let model = pls_fit(&xm, &ym, d);
        let got = model.predict(&xm);
        let want = oracles::ols_predictions(&x, &y);
        for i in 0..n {
            max_pls_err = max_pls_err.max((got[i] - want[i]).abs());
        }
    }
    if max_pls_err > 1e-6 {
        return Err(format!(
            "full-component pls deviates from least squares by {max_pls_err:.2e}"
        ));
    }

    // y = 3x + noise, held-out evaluation.
    let (train_x, train_y) = gen::linear_task(&mut rng, 200, 0.1);
    let (test_x, test_y) = gen::linear_task(&mut rng, 200, 0.1);
    let xm = DMatrix::from_fn(200, 3, |i, j| train_x[i][j]);
    let ym = DVector::from_iterator(200, train_y.iter().copied());
    let txm = DMatrix::from_fn(200, 3, |i, j| test_x[i][j]);
    let train_mean = train_y.iter().sum::<f64>() / train_y.len() as f64;
    let mean_mae =
        test_y.iter().map(|y| (y - train_mean).abs()).sum::<f64>() / test_y.len() as f64;

    let tree_params = ExtraTreesParams {
        n_estimators: 200,
        min_samples_leaf: 1,
        min_samples_split: 2,
        max_depth: None,
        seed: 7,
    };
    let trees_a = extra_trees_fit(&xm, &ym, &tree_params);
    let trees_b = extra_trees_fit(&xm, &ym, &tree_params);
    if trees_a != trees_b {
        return Err("extra trees are not deterministic for a fixed seed".into());
    }
    let trees_other = extra_trees_fit(
        &xm,
        &ym,
        &ExtraTreesParams {
            seed: 8,
            ..tree_params.clone()
        },
    );
    let trees_pred = trees_a.predict(&txm);
    let other_pred = trees_other.predict(&txm);
    if (0..200).all(|i| trees_pred[i] == other_pred[i]) {
        return Err("different tree seeds produced identical predictions".into());
    }
    let trees_mae = (0..200).map(|i| (trees_pred[i] - test_y[i]).abs()).sum::<f64>() / 200.0;

    let boost_params = AdaBoostParams {
        n_estimators: 300,
        weak_max_depth: 3,
        seed: 7,
    };
    let boost_a = adaboost_fit(&xm, &ym, &boost_params);
    let boost_b = adaboost_fit(&xm, &ym, &boost_params);
    if boost_a != boost_b {
        return Err("adaboost is not deterministic for a fixed seed".into());
    }
    let boost_other = adaboost_fit(
        &xm,
        &ym,
        &AdaBoostParams {
            seed: 8,
            ..boost_params.clone()
        },
    );
    let boost_pred = boost_a.predict(&txm);
    let boost_other_pred = boost_other.predict(&txm);
    if (0..200).all(|i| boost_pred[i] == boost_other_pred[i]) {
        return Err("different boosting seeds produced identical predictions".into());
    }
    let boost_mae = (0..200).map(|i| (boost_pred[i] - test_y[i]).abs()).sum::<f64>() / 200.0;

    let trees_gain = mean_mae / trees_mae;
    let boost_gain = mean_mae / boost_mae;
    if trees_gain < 5.0 || boost_gain < 5.0 {
        return Err(format!(
            "MAE gain over the mean predictor: trees {trees_gain:.1}x, boost {boost_gain:.1}x; \
             both must be >= 5x"
        ));
    }

    let data = Dataset::new(
        xm,
        ym,
        vec!["x0".into(), "x1".into(), "x2".into()],
        (0..200).map(|i| format!("r{i}")).collect(),
    )
    .map_err(|e| e.to_string())?;
    let bundle = grid_search(&data, &HyperGrid::default(), 7, 0xACC5).map_err(|e| e.to_string())?;
    let averaged = average_top_k(&bundle, 3, &txm);
    let series = PairedSeries::new(averaged.iter().copied().collect(), test_y.clone())
        .map_err(|e| e.to_string())?;
    let r = pearson(&series).map_err(|e| e.to_string())?;
    if r <= 0.99 {
        return Err(format!("grid search + top-3 averaging reached r = {r:.4}"));
    }

    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(format!("took {secs:.1}s, budget is 60s"));
    }
    Ok(format!(
        "ridge {max_ridge_err:.1e} / pls {max_pls_err:.1e} within 1e-6; seeded; \
         MAE gain {trees_gain:.1}x trees, {boost_gain:.1}x boost; grid r = {r:.4}; {secs:.1}s"
    ))
}

// ---------------------------------------------------------------------
// 6. Stage-2 width is 2d'+5, the interaction values are exact, and
//    stacking beats the best unstacked model's CV MAE.
// ---------------------------------------------------------------------

fn c6_stacking_contract() -> Result<String, String> {
    let combined = combine_predictions(1.0, 4.0);
    if combined != [1.0, 4.0, 3.0, 2.5, 2.0] {
        return Err(format!(
            "combine_predictions(1, 4) = {combined:?}, expected [1, 4, 3, 2.5, 2]"
        ));
    }

    let mut rng = ChaCha20Rng::seed_from_u64(0xACC6);
    let pairs = 30usize;
    let d = 4usize;
    let n = 2 * pairs;
    let mut x = Vec::with_capacity(n);
    let mut row_y = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..1.0)).collect();
        row_y.push(2.0 * row[0] - row[1] + 0.5 * row[2] + 0.02 * gen::gauss(&mut rng));
        x.push(row);
    }
    // The pair target is the absolute row-target difference, which the
    // stacked design exposes directly as an interaction column while
    // the unstacked design must approximate it.
    let pair_targets: Vec<f64> = (0..pairs)
        .map(|t| (row_y[2 * t] - row_y[2 * t + 1]).abs())
        .collect();

    let rows = Dataset::new(
        DMatrix::from_fn(n, d, |i, j| x[i][j]),
        DVector::from_iterator(n, row_y.iter().copied()),
        (0..d).map(|j| format!("f{j}")).collect(),
        (0..n).map(|i| format!("p{}", i / 2)).collect(),
    )
    .map_err(|e| e.to_string())?;
    let seed = 0xACC6u64;
    let model = stacked_fit(
        &rows,
        &DVector::from_iterator(pairs, pair_targets.iter().copied()),
        &HyperGrid::default(),
        7,
        seed,
        3,
    )
    .map_err(|e| e.to_string())?;

    let width = 2 * d + 5;
    let plain = model
        .stage2
        .models
        .iter()
        .find(|m| m.selected.is_none() && m.standardizer.is_some())
        .ok_or("stage 2 has no unselected standardized candidate")?;
    let got_width = plain.standardizer.as_ref().expect("checked above").means.len();
    if got_width != width {
        return Err(format!("stage-2 width {got_width}, expected {width}"));
    }
    for m in &model.stage2.models {
        if let Some(idx) = &m.selected {
            if idx.iter().any(|&j| j >= width) {
                return Err("stage-2 feature selection exceeds the design width".into());
            }
        }
    }

    // Unstacked baseline: same pair targets over the two rows' features
    // concatenated, searched with the same fold seed as stage 2.
    let concat = Dataset::new(
        DMatrix::from_fn(pairs, 2 * d, |t, j| {
            if j < d {
                x[2 * t][j]
            } else {
                x[2 * t + 1][j - d]
            }
        }),
        DVector::from_iterator(pairs, pair_targets.iter().copied()),
        (0..2 * d).map(|j| format!("c{j}")).collect(),
        (0..pairs).map(|t| format!("p{t}")).collect(),
    )
    .map_err(|e| e.to_string())?;
    let baseline =
        grid_search(&concat, &HyperGrid::default(), 7, mix_seed(seed, 2, 0)).map_err(|e| e.to_string())?;

    let stacked_mae = model.stage2.models[0].cv_mae;
    let unstacked_mae = baseline.models[0].cv_mae;
    if stacked_mae >= unstacked_mae {
        return Err(format!(
            "stage-2 cv mae {stacked_mae:.4} is not below the unstacked best {unstacked_mae:.4}"
        ));
    }
    Ok(format!(
        "combine(1, 4) exact; width {width}; cv mae {stacked_mae:.4} < unstacked {unstacked_mae:.4}"
    ))
}

// ---------------------------------------------------------------------
// 7. Metric identities: mean predictor, tau, tie-free RIAA, best-worst
//    scaling, and Pearson affine invariance.
// ---------------------------------------------------------------------

fn c7_metrics_identities() -> Result<String, String> {
    let gold = vec![1.0, 2.25, 7.5, 9.0, 4.0, 6.125, 8.25, 0.5, 3.25, 9.75];
    let mean = gold.iter().sum::<f64>() / gold.len() as f64;
    if gold.iter().any(|g| (g - mean).abs() <= RELATIVE_ERROR_EPS) {
        return Err("fixture gold vector comes too close to its own mean".into());
    }
    let series = PairedSeries::new(vec![mean; gold.len()], gold.clone()).map_err(|e| e.to_string())?;
    let rae_value = rae(&series).map_err(|e| e.to_string())?;
    let mraer_value = mraer(&series, RELATIVE_ERROR_EPS);
    if (rae_value - 1.0).abs() > 1e-12 || (mraer_value - 1.0).abs() > 1e-12 {
        return Err(format!(
            "mean predictor: rae = {rae_value}, mraer = {mraer_value}, both must be 1 +- 1e-12"
        ));
    }

    let tau = iaa_tau(&RankPairCounts {
        concordant: 3,
        discordant: 1,
        tied: 0,
    })
    .map_err(|e| e.to_string())?;
    if tau != 0.5 {
        return Err(format!("iaa tau = {tau}, expected 0.5 exactly"));
    }

    let mut rng = ChaCha20Rng::seed_from_u64(0xACC7);
    let a: Vec<f64> = (0..25).map(|i| i as f64 + rng.gen_range(0.0..0.5)).collect();
    let mut b = a.clone();
    b.shuffle(&mut rng);
    let counts = rank_pair_counts(&a, &b).map_err(|e| e.to_string())?;
    if counts.tied != 0 {
        return Err("tie-free fixture rankings contain ties".into());
    }
    let iaa = iaa_tau(&counts).map_err(|e| e.to_string())?;
    for seed in 0..100u64 {
        let resolved = riaa_tau(&a, &b, seed).map_err(|e| e.to_string())?;
        if resolved != iaa {
            return Err(format!("riaa(seed {seed}) = {resolved}, iaa = {iaa}"));
        }
    }

    let bws = bws_scores(&[BwsTally {
        best: 3,
        worst: 1,
        annotations: 4,
    }])
    .map_err(|e| e.to_string())?;
    if bws != vec![0.75] {
        return Err(format!("bws scores = {bws:?}, expected [0.75]"));
    }

    let mut max_dev = 0.0f64;
    for _ in 0..10 {
        let u: Vec<f64> = (0..60).map(|_| gen::gauss(&mut rng)).collect();
        let v: Vec<f64> = u.iter().map(|x| 0.7 * x + 0.5 * gen::gauss(&mut rng)).collect();
        let r1 = pearson(&PairedSeries::new(u.clone(), v.clone()).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let ut: Vec<f64> = u.iter().map(|x| 3.7 * x + 11.0).collect();
        let vt: Vec<f64> = v.iter().map(|x| 0.02 * x - 5.0).collect();
        let r2 = pearson(&PairedSeries::new(ut, vt).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        max_dev = max_dev.max((r1 - r2).abs());
    }
    if max_dev > 1e-12 {
        return Err(format!("pearson affine deviation {max_dev:.2e} exceeds 1e-12"));
    }

    Ok(format!(
        "rae = mraer = 1 exact; tau(3,1) = 0.5; riaa == iaa over 100 seeds; bws 0.75; \
         affine dev {max_dev:.1e}"
    ))
}

// ---------------------------------------------------------------------
// 8. Hand-checked similarity value, full-size database parse under the
//    clock with counted records, and IC monotone along every edge.
// ---------------------------------------------------------------------

fn c8_wordnet_pipeline() -> Result<String, String> {
    let noun = |o: u32| SynsetId::new(PartOfSpeech::Noun, o);
    let synsets = vec![
        Synset {
            id: noun(1),
            lemmas: vec!["entity".into()],
            hypernyms: vec![],
        },
        Synset {
            id: noun(2),
            lemmas: vec!["cat".into()],
            hypernyms: vec![noun(1)],
        },
        Synset {
            id: noun(3),
            lemmas: vec!["dog".into()],
            hypernyms: vec![noun(1)],
        },
    ];
    let lemma_entries = vec![
        ("cat".to_string(), PartOfSpeech::Noun, vec![noun(2)]),
        ("dog".to_string(), PartOfSpeech::Noun, vec![noun(3)]),
    ];
    let toy = TaxonomyIndex::build(synsets, lemma_entries).map_err(|e| e.to_string())?;
    let toy_ic = IcTable {
        ic: [(noun(1), 0.0), (noun(2), 2.0), (noun(3), 3.0)]
            .into_iter()
            .collect(),
        totals: BTreeMap::new(),
    };
    let forward = wnsim(&toy, &toy_ic, "cat", "dog");
    let reverse = wnsim(&toy, &toy_ic, "dog", "cat");
    if forward != 0.2 || reverse != 0.2 {
        return Err(format!(
            "toy similarity {forward} / {reverse}, expected 0.2 exactly both ways"
        ));
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha20Rng::seed_from_u64(0xACC8);
    gen::write_wordnet_db(dir.path(), &mut rng);
    let start = Instant::now();
    let tax = parse_wordnet(dir.path()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    if secs >= 30.0 {
        return Err(format!("full-size parse took {secs:.1}s, budget is 30s"));
    }

    let mut total = 0usize;
    for (pos, expected) in gen::WN_COUNTS {
        let path = dir.path().join(format!("data.{}", pos.file_suffix()));
        let counted = gen::count_data_records(&path);
        if counted != expected {
            return Err(format!(
                "data.{} holds {counted} records, expected {expected}",
                pos.file_suffix()
            ));
        }
        let parsed = tax.count_by_pos(pos);
        if parsed != counted {
            return Err(format!(
                "data.{}: parsed {parsed} synsets, file holds {counted} records",
                pos.file_suffix()
            ));
        }
        total += parsed;
    }

    let mut corpus: BTreeMap<String, f64> = BTreeMap::new();
    for i in (0..82_115usize).step_by(9) {
        corpus.insert(format!("nw{i:05}"), ((i % 17) + 1) as f64);
    }
    for i in (0..13_767usize).step_by(5) {
        corpus.insert(format!("vw{i:05}"), ((i % 11) + 1) as f64);
    }
    for j in 0..250 {
        corpus.insert(format!("npoly{j:03}"), 3.0);
        corpus.insert(format!("vpoly{j:03}"), 2.0);
    }
    let ic = compute_ic(&tax, &corpus, &IcConfig::default());
    let mut edges = 0usize;
    for synset in tax.synsets() {
        let child = ic
            .get(synset.id)
            .ok_or_else(|| format!("{} has no information content", synset.id))?;
        for hyper in &synset.hypernyms {
            let parent = ic
                .get(*hyper)
                .ok_or_else(|| format!("{hyper} has no information content"))?;
            if parent > child + 1e-12 {
                return Err(format!(
                    "IC not monotone on {hyper} -> {}: {parent} > {child}",
                    synset.id
                ));
            }
            edges += 1;
        }
    }
    Ok(format!(
        "toy value 0.2 exact; {total} synsets parsed in {secs:.2}s, counts match all four files; \
         IC monotone on {edges} edges"
    ))
}

// ---------------------------------------------------------------------
// 9. Cold-cache score runs are byte-identical, including --jobs 4.
// ---------------------------------------------------------------------

fn repo_data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .canonicalize()
        .expect("bundled data directory")
}

fn c9_determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = repo_data();
    let arg = |p: &str| data.join(p).to_string_lossy().into_owned();

    let run = |label: &str, jobs: Option<&str>| -> Result<Vec<u8>, String> {
        let cache = dir.path().join(format!("cache-{label}"));
        let pred = dir.path().join(format!("pred-{label}.tsv"));
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_cwsim"));
        cmd.current_dir(dir.path());
        cmd.env_remove("CWSIM_CACHE");
        cmd.arg("score");
        cmd.args(["--config", &arg("config.sample")]);
        cmd.args(["--manifest", &arg("manifest.tsv")]);
        cmd.args(["--wordnet-dir", &arg("wordnet")]);
        cmd.args(["--corpus", &arg("corpus.txt")]);
        cmd.args(["--gwsc", &arg("gwsc.tsv")]);
        cmd.args(["--gold", &arg("gold.tsv")]);
        cmd.args(["--cache-dir", &cache.to_string_lossy()]);
        cmd.args(["--predictions-out", &pred.to_string_lossy()]);
        if let Some(j) = jobs {
            cmd.args(["--jobs", j]);
        }
        let out = cmd.output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!(
                "run {label} failed: {}",
                String::from_utf8_lossy(&out.stderr).trim()
            ));
        }
        fs::read(&pred).map_err(|e| e.to_string())
    };

    let first = run("a", None)?;
    let second = run("b", None)?;
    let parallel = run("c", Some("4"))?;
    if first != second {
        return Err("two cold-cache runs produced different prediction files".into());
    }
    if first != parallel {
        return Err("the --jobs 4 run produced a different prediction file".into());
    }
    let rows = first
        .split(|&byte| byte == b'\n')
        .filter(|line| !line.is_empty())
        .count()
        .saturating_sub(1);
    Ok(format!(
        "3 cold-cache score runs byte-identical ({} bytes, {rows} prediction rows), \
         including --jobs 4",
        first.len()
    ))
}
