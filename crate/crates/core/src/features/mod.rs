//! Context instances, region splitting, similarity matrices, and the
//! 145-dimension feature extractor.
//!
//! An instance is a word pair observed in two contexts. Each context is
//! split two ways: a 4-region *intra* split anchored on the target-word
//! positions (used for within-context similarity pooling) and a 3-region
//! *inter* split by equal thirds (used for cross-context comparison).
//! Features compare region surface text (edit distance, length ratios),
//! pooled similarity-store lookups, and aggregated WordNet similarities,
//! and end with the dataset-level quadratic trend prediction.

mod gwsc;
mod targets;

pub use gwsc::{
    parse_gwsc, parse_gwsc_str, serialize_gwsc, DEFAULT_MARKER_CLOSE, DEFAULT_MARKER_OPEN,
};
pub use targets::{
    build_targets, fit_quadratic, intra_cwps, pooled_store_matrix, within_region_mean,
    PooledMatrix, QuadModel, Targets, TargetsResult,
};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::simlex::{Pair, SimStore};
use crate::text::{normalized_levenshtein, ratio};
use crate::wordnet::WnSim;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected {expected} tab-separated columns, found {found}")]
    ColumnCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("instance {id}: {message}")]
    Format { id: String, message: String },
    #[error(
        "no word pair of any instance is covered by the similarity store; \
         provide a larger lexicon or smaller contexts"
    )]
    NoCoverage,
    #[error("quadratic fit is degenerate: {message}")]
    Degenerate { message: String },
}

/// A context with the two target-word positions marked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedContext {
    pub tokens: Vec<String>,
    /// Position of the instance's word1 in `tokens`.
    pub pos1: usize,
    /// Position of the instance's word2 in `tokens`.
    pub pos2: usize,
}

impl MarkedContext {
    pub fn new(tokens: Vec<String>, pos1: usize, pos2: usize) -> Result<MarkedContext, String> {
        if tokens.is_empty() {
            return Err("context is empty".to_string());
        }
        if pos1 == pos2 {
            return Err("target positions coincide".to_string());
        }
        if pos1 >= tokens.len() || pos2 >= tokens.len() {
            return Err("target position outside context".to_string());
        }
        Ok(MarkedContext { tokens, pos1, pos2 })
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }

    fn target_span(&self) -> (usize, usize) {
        (self.pos1.min(self.pos2), self.pos1.max(self.pos2))
    }

    /// Four regions anchored on the target words: left of the earlier
    /// target, first and second halves of the span between the targets
    /// (split at ⌈n/2⌉), and right of the later target. Target tokens
    /// are excluded; regions may be empty.
    pub fn split_intra(&self) -> Vec<Vec<String>> {
        let (first, second) = self.target_span();
        let left: Vec<String> = self.tokens[..first].to_vec();
        let between: Vec<String> = self.tokens[first + 1..second].to_vec();
        let cut = between.len().div_ceil(2);
        let mid1 = between[..cut].to_vec();
        let mid2 = between[cut..].to_vec();
        let right: Vec<String> = self.tokens[second + 1..].to_vec();
        vec![left, mid1, mid2, right]
    }

    /// Three regions of equal thirds over the non-target tokens,
    /// remainder tokens assigned left to right.
    pub fn split_inter(&self) -> Vec<Vec<String>> {
        let rest: Vec<String> = self
            .tokens
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.pos1 && *i != self.pos2)
            .map(|(_, t)| t.clone())
            .collect();
        let n = rest.len();
        let (base, extra) = (n / 3, n % 3);
        let mut regions = Vec::with_capacity(3);
        let mut start = 0;
        for r in 0..3 {
            let len = base + usize::from(r < extra);
            regions.push(rest[start..start + len].to_vec());
            start += len;
        }
        regions
    }
}

/// One word pair observed in two contexts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    pub word1: String,
    pub word2: String,
    pub context1: MarkedContext,
    pub context2: MarkedContext,
}

impl Instance {
    /// The same instance with its contexts exchanged.
    pub fn swapped(&self) -> Instance {
        Instance {
            id: self.id.clone(),
            word1: self.word1.clone(),
            word2: self.word2.clone(),
            context1: self.context2.clone(),
            context2: self.context1.clone(),
        }
    }
}

/// Aggregator over a non-empty value sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agg {
    Max,
    Min,
    Mean,
}

impl Agg {
    pub fn apply(self, values: &[f64]) -> Option<f64> {
        if values.is_empty() {
            return None;
        }
        Some(match self {
            Agg::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Agg::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
            Agg::Mean => values.iter().sum::<f64>() / values.len() as f64,
        })
    }
}

/// A 3×3 cross-context region matrix with row, column, and overall
/// averages over the defined cells. Undefined cells read as 0 and are
/// excluded from every average.
#[derive(Debug, Clone, PartialEq)]
pub struct SimMatrix {
    pub cells: [[f64; 3]; 3],
    pub defined: [[bool; 3]; 3],
    pub row_avgs: [f64; 3],
    pub row_defined: [bool; 3],
    pub col_avgs: [f64; 3],
    pub col_defined: [bool; 3],
    pub overall: f64,
    pub overall_defined: bool,
}

impl SimMatrix {
    pub fn from_cells(raw: [[Option<f64>; 3]; 3]) -> SimMatrix {
        let mut cells = [[0.0; 3]; 3];
        let mut defined = [[false; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                if let Some(v) = raw[i][j] {
                    cells[i][j] = v;
                    defined[i][j] = true;
                }
            }
        }
        let mut row_avgs = [0.0; 3];
        let mut row_defined = [false; 3];
        for i in 0..3 {
            let (mut sum, mut n) = (0.0, 0usize);
            for j in 0..3 {
                if defined[i][j] {
                    sum += cells[i][j];
                    n += 1;
                }
            }
            if n > 0 {
                row_avgs[i] = sum / n as f64;
                row_defined[i] = true;
            }
        }
        let mut col_avgs = [0.0; 3];
        let mut col_defined = [false; 3];
        for j in 0..3 {
            let (mut sum, mut n) = (0.0, 0usize);
            for i in 0..3 {
                if defined[i][j] {
                    sum += cells[i][j];
                    n += 1;
                }
            }
            if n > 0 {
                col_avgs[j] = sum / n as f64;
                col_defined[j] = true;
            }
        }
        let (mut sum, mut n) = (0.0, 0usize);
        for i in 0..3 {
            for j in 0..3 {
                if defined[i][j] {
                    sum += cells[i][j];
                    n += 1;
                }
            }
        }
        let overall_defined = n > 0;
        let overall = if overall_defined { sum / n as f64 } else { 0.0 };
        SimMatrix {
            cells,
            defined,
            row_avgs,
            row_defined,
            col_avgs,
            col_defined,
            overall,
            overall_defined,
        }
    }

    /// The 16 values of one aggregation scheme in feature order:
    /// 9 cells row-major, 3 row averages, 3 column averages, overall.
    pub fn sixteen(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        let mut k = 0;
        for i in 0..3 {
            for j in 0..3 {
                out[k] = self.cells[i][j];
                k += 1;
            }
        }
        for i in 0..3 {
            out[k] = self.row_avgs[i];
            k += 1;
        }
        for j in 0..3 {
            out[k] = self.col_avgs[j];
            k += 1;
        }
        out[15] = self.overall;
        out
    }
}

/// Cross-context aggregation matrix: cell (i, j) applies `inner` over
/// the similarities of one word of region i (context 1) against all
/// words of region j (context 2), then `outer` over region i's words.
/// Words whose inner aggregation is undefined are skipped; cells with
/// no contributing word are undefined.
pub fn inter_matrix(
    regions1: &[Vec<String>],
    regions2: &[Vec<String>],
    simfn: &mut dyn FnMut(&str, &str) -> Option<f64>,
    inner: Agg,
    outer: Agg,
) -> SimMatrix {
    assert_eq!(regions1.len(), 3);
    assert_eq!(regions2.len(), 3);
    let mut raw = [[None; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut per_word = Vec::new();
            for u in &regions1[i] {
                let values: Vec<f64> =
                    regions2[j].iter().filter_map(|v| simfn(u, v)).collect();
                if let Some(agg) = inner.apply(&values) {
                    per_word.push(agg);
                }
            }
            raw[i][j] = outer.apply(&per_word);
        }
    }
    SimMatrix::from_cells(raw)
}

/// Memoizing wrapper over symmetric WordNet similarity, keyed on the
/// unordered token pair. One per extracted instance.
struct SimCache<'a> {
    wn: &'a WnSim,
    memo: BTreeMap<Pair, f64>,
}

impl<'a> SimCache<'a> {
    fn new(wn: &'a WnSim) -> SimCache<'a> {
        SimCache {
            wn,
            memo: BTreeMap::new(),
        }
    }

    fn sim(&mut self, a: &str, b: &str) -> f64 {
        let key = Pair::new(a, b);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = self.wn.sim(a, b);
        self.memo.insert(key, v);
        v
    }
}

/// The five (outer, inner) aggregation schemes of the WordNet feature
/// block, in feature order.
pub const WN_SCHEMES: [(&str, Agg, Agg); 5] = [
    ("maxmax", Agg::Max, Agg::Max),
    ("meanmax", Agg::Mean, Agg::Max),
    ("meanmin", Agg::Mean, Agg::Min),
    ("minmin", Agg::Min, Agg::Min),
    ("meanmean", Agg::Mean, Agg::Mean),
];

/// Number of features per vector.
pub const FEATURE_COUNT: usize = 145;

/// The 145 stable feature names, in emission order.
pub fn feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(FEATURE_COUNT);
    // Surface comparison of region combinations across contexts.
    for i in 1..=3 {
        for j in 1..=3 {
            names.push(format!("inter.editdist.r{i}c{j}"));
            names.push(format!("inter.charratio.r{i}c{j}"));
            names.push(format!("inter.tokratio.r{i}c{j}"));
        }
    }
    names.push("inter.editdist.whole".to_string());
    names.push("inter.charratio.whole".to_string());
    names.push("inter.tokratio.whole".to_string());
    // Similarity-store means for aligned regions plus overall.
    for i in 1..=3 {
        names.push(format!("inter.storemean.r{i}c{i}"));
    }
    names.push("inter.storemean.overall".to_string());
    // WordNet similarity aggregation schemes, 16 values each.
    for (scheme, _, _) in WN_SCHEMES {
        for i in 1..=3 {
            for j in 1..=3 {
                names.push(format!("inter.{scheme}.r{i}c{j}"));
            }
        }
        for i in 1..=3 {
            names.push(format!("inter.{scheme}.row{i}"));
        }
        for j in 1..=3 {
            names.push(format!("inter.{scheme}.col{j}"));
        }
        names.push(format!("inter.{scheme}.overall"));
    }
    // Within-context surface features.
    for ctx in ["c1", "c2"] {
        for a in 1..=4 {
            for b in (a + 1)..=4 {
                names.push(format!("intra.editdist.{ctx}.r{a}r{b}"));
            }
        }
        for r in 1..=4 {
            names.push(format!("intra.tokratio.{ctx}.r{r}"));
        }
    }
    // Within-context WordNet aggregates and their cross-context ratios.
    for scheme in ["meanmean", "meanmax", "meanmin"] {
        names.push(format!("intra.{scheme}.c1"));
        names.push(format!("intra.{scheme}.c2"));
        names.push(format!("intra.ratio.{scheme}"));
    }
    names.push("intra.ratio.product".to_string());
    // Dataset-level quadratic trend prediction.
    names.push("change.quad.pred".to_string());
    debug_assert_eq!(names.len(), FEATURE_COUNT);
    names
}

/// Extracts feature vectors. Holds the immutable assets; `extract` is
/// pure per instance and safe to call concurrently.
pub struct FeatureExtractor<'a> {
    pub store: &'a SimStore,
    pub wn: &'a WnSim,
}

impl<'a> FeatureExtractor<'a> {
    pub fn new(store: &'a SimStore, wn: &'a WnSim) -> FeatureExtractor<'a> {
        FeatureExtractor { store, wn }
    }

    /// Emits the 145 features for one instance. `x` is the instance's
    /// position in the dataset ordering; `quad` is the dataset-level
    /// quadratic model whose prediction at `x` is the final feature.
    pub fn extract(&self, instance: &Instance, x: f64, quad: &QuadModel) -> Vec<f64> {
        let mut values = Vec::with_capacity(FEATURE_COUNT);
        let inter1 = instance.context1.split_inter();
        let inter2 = instance.context2.split_inter();
        let intra1 = instance.context1.split_intra();
        let intra2 = instance.context2.split_intra();
        let mut cache = SimCache::new(self.wn);

        // Surface comparison: for each region pair (i, j), the texts of
        // regions i and j concatenated within each context are compared
        // across contexts, so identical contexts compare as identical.
        for i in 0..3 {
            for j in 0..3 {
                let a = combo_text(&inter1[i], &inter1[j]);
                let b = combo_text(&inter2[i], &inter2[j]);
                values.push(normalized_levenshtein(&a, &b));
                values.push(ratio(
                    a.chars().count() as f64,
                    b.chars().count() as f64,
                ));
                values.push(ratio(
                    (inter1[i].len() + inter1[j].len()) as f64,
                    (inter2[i].len() + inter2[j].len()) as f64,
                ));
            }
        }
        let whole1 = instance.context1.text();
        let whole2 = instance.context2.text();
        values.push(normalized_levenshtein(&whole1, &whole2));
        values.push(ratio(
            whole1.chars().count() as f64,
            whole2.chars().count() as f64,
        ));
        values.push(ratio(
            instance.context1.tokens.len() as f64,
            instance.context2.tokens.len() as f64,
        ));

        // Similarity-store pooled means: aligned region pairs + overall.
        let pooled = pooled_store_matrix(&inter1, &inter2, self.store);
        for i in 0..3 {
            values.push(pooled.cell_mean(i, i).unwrap_or(0.0));
        }
        values.push(pooled.overall_pooled().unwrap_or(0.0));

        // WordNet aggregation schemes over the inter regions.
        for (_, outer, inner) in WN_SCHEMES {
            let matrix = inter_matrix(
                &inter1,
                &inter2,
                &mut |a, b| Some(cache.sim(a, b)),
                inner,
                outer,
            );
            values.extend(matrix.sixteen());
        }

        // Within-context surface features.
        for (regions, ctx) in [(&intra1, &instance.context1), (&intra2, &instance.context2)] {
            for a in 0..4 {
                for b in (a + 1)..4 {
                    values.push(normalized_levenshtein(
                        &regions[a].join(" "),
                        &regions[b].join(" "),
                    ));
                }
            }
            let total = ctx.tokens.len() as f64;
            for region in regions.iter() {
                values.push(ratio(region.len() as f64, total));
            }
        }

        // Within-context WordNet aggregates and cross-context ratios.
        let mut ratios = Vec::with_capacity(3);
        let mut intra_wn_values = Vec::with_capacity(9);
        for inner in [Agg::Mean, Agg::Max, Agg::Min] {
            let v1 = intra_wn_aggregate(&intra1, &mut cache, inner);
            let v2 = intra_wn_aggregate(&intra2, &mut cache, inner);
            let r = ratio(v1.unwrap_or(0.0), v2.unwrap_or(0.0));
            intra_wn_values.push(v1.unwrap_or(0.0));
            intra_wn_values.push(v2.unwrap_or(0.0));
            intra_wn_values.push(r);
            ratios.push(r);
        }
        values.extend(intra_wn_values);
        values.push(ratios[0] * ratios[1] * ratios[2]);

        // Quadratic trend prediction at this instance's position.
        values.push(quad.predict(x));

        assert_eq!(values.len(), FEATURE_COUNT);
        assert!(
            values.iter().all(|v| v.is_finite()),
            "non-finite feature emitted"
        );
        values
    }
}

fn combo_text(a: &[String], b: &[String]) -> String {
    let mut parts: Vec<&str> = Vec::with_capacity(a.len() + b.len());
    parts.extend(a.iter().map(String::as_str));
    parts.extend(b.iter().map(String::as_str));
    parts.join(" ")
}

/// Mean over the 6 intra region pairs of `inner`-aggregated WordNet
/// similarity between the two regions' words. Cells with an empty
/// region are excluded; None when every cell is empty.
fn intra_wn_aggregate(
    regions: &[Vec<String>],
    cache: &mut SimCache<'_>,
    inner: Agg,
) -> Option<f64> {
    let mut cell_values = Vec::new();
    for a in 0..4 {
        for b in (a + 1)..4 {
            let mut pairs = Vec::new();
            for u in &regions[a] {
                for v in &regions[b] {
                    pairs.push(cache.sim(u, v));
                }
            }
            if let Some(v) = inner.apply(&pairs) {
                cell_values.push(v);
            }
        }
    }
    Agg::Mean.apply(&cell_values)
}
