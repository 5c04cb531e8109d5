//! Evaluation and annotation-aggregation measures: Pearson r, MAE, RAE,
//! MAER, MRAER, pairwise-ranking agreement (τ with and without random
//! tie resolution), best–worst-scaling scores, and binary F1 with
//! threshold sweeping.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

/// Floor for the per-instance denominators of MAER and MRAER.
pub const RELATIVE_ERROR_EPS: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("paired series: {0}")]
    BadSeries(String),
    #[error("correlation undefined: {0} series has zero variance")]
    ZeroVariance(&'static str),
    #[error("relative absolute error undefined: gold series is constant")]
    ConstantGold,
    #[error("tau undefined: no comparable pairs")]
    NoComparablePairs,
    #[error("best-worst tally {index}: {message}")]
    BadTally { index: usize, message: String },
}

/// Predictions aligned with gold values; at least two finite pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSeries {
    pub predictions: Vec<f64>,
    pub gold: Vec<f64>,
}

impl PairedSeries {
    pub fn new(predictions: Vec<f64>, gold: Vec<f64>) -> Result<PairedSeries, MetricsError> {
        if predictions.len() != gold.len() {
            return Err(MetricsError::BadSeries(format!(
                "{} predictions vs {} gold values",
                predictions.len(),
                gold.len()
            )));
        }
        if predictions.len() < 2 {
            return Err(MetricsError::BadSeries(format!(
                "need at least 2 pairs, got {}",
                predictions.len()
            )));
        }
        if predictions.iter().chain(gold.iter()).any(|v| !v.is_finite()) {
            return Err(MetricsError::BadSeries("non-finite value".to_string()));
        }
        Ok(PairedSeries { predictions, gold })
    }

    fn n(&self) -> f64 {
        self.gold.len() as f64
    }

    fn gold_mean(&self) -> f64 {
        self.gold.iter().sum::<f64>() / self.n()
    }
}

/// Product-moment correlation; errors when either series is constant.
pub fn pearson(s: &PairedSeries) -> Result<f64, MetricsError> {
    let n = s.n();
    let mx = s.predictions.iter().sum::<f64>() / n;
    let my = s.gold_mean();
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in s.predictions.iter().zip(&s.gold) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(MetricsError::ZeroVariance("prediction"));
    }
    if syy == 0.0 {
        return Err(MetricsError::ZeroVariance("gold"));
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Mean absolute error.
pub fn mae(s: &PairedSeries) -> f64 {
    s.predictions
        .iter()
        .zip(&s.gold)
        .map(|(p, g)| (p - g).abs())
        .sum::<f64>()
        / s.n()
}

/// Relative absolute error: total absolute error normalized by the mean
/// predictor's total absolute error.
pub fn rae(s: &PairedSeries) -> Result<f64, MetricsError> {
    let mean = s.gold_mean();
    let denom: f64 = s.gold.iter().map(|g| (mean - g).abs()).sum();
    if denom == 0.0 {
        return Err(MetricsError::ConstantGold);
    }
    let num: f64 = s
        .predictions
        .iter()
        .zip(&s.gold)
        .map(|(p, g)| (p - g).abs())
        .sum();
    Ok(num / denom)
}

/// Mean absolute error relative to |gold|, floored at ε per instance.
pub fn maer(s: &PairedSeries, eps: f64) -> f64 {
    s.predictions
        .iter()
        .zip(&s.gold)
        .map(|(p, g)| (p - g).abs() / g.abs().max(eps))
        .sum::<f64>()
        / s.n()
}

/// Mean absolute error relative to the gold value's deviation from the
/// gold mean, floored at ε per instance.
pub fn mraer(s: &PairedSeries, eps: f64) -> f64 {
    let mean = s.gold_mean();
    s.predictions
        .iter()
        .zip(&s.gold)
        .map(|(p, g)| (p - g).abs() / (g - mean).abs().max(eps))
        .sum::<f64>()
        / s.n()
}

/// Concordant / discordant / tied counts over all index pairs of two
/// aligned rankings. A pair is tied when either ranking ties on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankPairCounts {
    pub concordant: u64,
    pub discordant: u64,
    pub tied: u64,
}

pub fn rank_pair_counts(a: &[f64], b: &[f64]) -> Result<RankPairCounts, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::BadSeries(format!(
            "{} vs {} ranking entries",
            a.len(),
            b.len()
        )));
    }
    let mut counts = RankPairCounts {
        concordant: 0,
        discordant: 0,
        tied: 0,
    };
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let da = a[i] - a[j];
            let db = b[i] - b[j];
            if da == 0.0 || db == 0.0 {
                counts.tied += 1;
            } else if (da > 0.0) == (db > 0.0) {
                counts.concordant += 1;
            } else {
                counts.discordant += 1;
            }
        }
    }
    Ok(counts)
}

/// Inter-annotator τ = (C − D) / (C + D); ties are excluded.
pub fn iaa_tau(counts: &RankPairCounts) -> Result<f64, MetricsError> {
    let c = counts.concordant as f64;
    let d = counts.discordant as f64;
    if c + d == 0.0 {
        return Err(MetricsError::NoComparablePairs);
    }
    Ok((c - d) / (c + d))
}

/// τ after resolving every tied pair to concordant or discordant with a
/// seeded fair coin (pairs visited in (i, j), i < j order). With no
/// ties this equals [`iaa_tau`] for every seed.
pub fn riaa_tau(a: &[f64], b: &[f64], seed: u64) -> Result<f64, MetricsError> {
    let counts = rank_pair_counts(a, b)?;
    let mut c = counts.concordant;
    let mut d = counts.discordant;
    if counts.tied > 0 {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        for _ in 0..counts.tied {
            if rng.gen::<bool>() {
                c += 1;
            } else {
                d += 1;
            }
        }
    }
    if c + d == 0 {
        return Err(MetricsError::NoComparablePairs);
    }
    Ok((c as f64 - d as f64) / (c as f64 + d as f64))
}

/// Per-item best / worst annotation counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BwsTally {
    pub best: u64,
    pub worst: u64,
    pub annotations: u64,
}

/// Best–worst-scaling scores: raw = (best − worst)/annotations in
/// [−1, 1], returned as (raw + 1)/2 in [0, 1].
pub fn bws_scores(tallies: &[BwsTally]) -> Result<Vec<f64>, MetricsError> {
    let mut out = Vec::with_capacity(tallies.len());
    for (index, t) in tallies.iter().enumerate() {
        if t.annotations == 0 {
            return Err(MetricsError::BadTally {
                index,
                message: "zero annotations".to_string(),
            });
        }
        if t.best + t.worst > t.annotations {
            return Err(MetricsError::BadTally {
                index,
                message: format!(
                    "best {} + worst {} exceeds annotations {}",
                    t.best, t.worst, t.annotations
                ),
            });
        }
        let raw = (t.best as f64 - t.worst as f64) / t.annotations as f64;
        out.push((raw + 1.0) / 2.0);
    }
    Ok(out)
}

/// F1 of the positive class with `predicted positive ⇔ ŷ ≥ threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F1Outcome {
    pub f1: f64,
    /// True when there were no positive predictions and no positive
    /// gold labels, where F1 is defined as 0 by convention.
    pub degenerate: bool,
}

pub fn f1_binary(predictions: &[f64], gold: &[bool], threshold: f64) -> F1Outcome {
    assert_eq!(predictions.len(), gold.len(), "aligned vectors required");
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut fn_ = 0u64;
    for (p, g) in predictions.iter().zip(gold) {
        let pos = *p >= threshold;
        match (pos, *g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    if tp + fp == 0 && tp + fn_ == 0 {
        return F1Outcome {
            f1: 0.0,
            degenerate: true,
        };
    }
    if tp == 0 {
        return F1Outcome {
            f1: 0.0,
            degenerate: false,
        };
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    F1Outcome {
        f1: 2.0 * precision * recall / (precision + recall),
        degenerate: false,
    }
}

/// Sweeps thresholds over the observed prediction values and returns
/// the (threshold, F1) pair with the highest F1; exact ties keep the
/// smallest threshold.
pub fn best_f1_threshold(predictions: &[f64], gold: &[bool]) -> (f64, f64) {
    assert!(!predictions.is_empty(), "need at least one prediction");
    let mut candidates: Vec<f64> = predictions.to_vec();
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("finite predictions"));
    candidates.dedup();
    let mut best_threshold = candidates[0];
    let mut best_f1 = f1_binary(predictions, gold, candidates[0]).f1;
    for &t in &candidates[1..] {
        let f1 = f1_binary(predictions, gold, t).f1;
        if f1 > best_f1 {
            best_f1 = f1;
            best_threshold = t;
        }
    }
    (best_threshold, best_f1)
}

/// Formats a report as `metric TAB value` lines with 4 decimal places.
pub fn format_report(entries: &[(&str, f64)]) -> String {
    let mut out = String::new();
    for (key, value) in entries {
        out.push_str(&format!("{key}\t{value:.4}\n"));
    }
    out
}
