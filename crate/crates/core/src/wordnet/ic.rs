//! Corpus-based information content over the taxonomy, the least common
//! subsumer, and Jiang–Conrath similarity.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{PartOfSpeech, SynsetId, TaxonomyIndex, WordnetError};

/// Distance floor in the Jiang–Conrath similarity `1 / max(d, ε)`.
pub const JCN_EPS: f64 = 1e-4;
/// Similarity ceiling, `1 / JCN_EPS`.
pub const JCN_MAX: f64 = 1e4;

/// Information-content parameters.
#[derive(Debug, Clone, Copy)]
pub struct IcConfig {
    /// Count added to every synset before propagation (add-one by
    /// default, so no synset has zero probability).
    pub smoothing: f64,
}

impl Default for IcConfig {
    fn default() -> Self {
        IcConfig { smoothing: 1.0 }
    }
}

/// Per-synset information content in nats, with per-part-of-speech
/// normalizing totals (the propagated root counts).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IcTable {
    pub ic: BTreeMap<SynsetId, f64>,
    pub totals: BTreeMap<PartOfSpeech, f64>,
}

impl IcTable {
    pub fn get(&self, id: SynsetId) -> Option<f64> {
        self.ic.get(&id).copied()
    }

    fn value_or_zero(&self, id: SynsetId) -> f64 {
        self.ic.get(&id).copied().unwrap_or(0.0)
    }

    /// Writes the cache TSV `synset_id TAB ic` (8 decimal places).
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (id, value) in &self.ic {
            writeln!(out, "{id}\t{value:.8}")?;
        }
        Ok(())
    }

    /// Reads the cache TSV back. Totals are not part of the cache
    /// format; the loaded table carries the per-synset values only,
    /// which is all similarity computation needs.
    pub fn read_tsv(path: &Path) -> Result<IcTable, WordnetError> {
        let file = std::fs::File::open(path).map_err(|e| WordnetError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut ic = BTreeMap::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| WordnetError::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(raw_id), Some(raw_ic), None) = (cols.next(), cols.next(), cols.next())
            else {
                return Err(WordnetError::Cache(format!(
                    "{}:{}: expected 2 tab-separated columns",
                    path.display(),
                    idx + 1
                )));
            };
            let id: SynsetId = raw_id.parse().map_err(WordnetError::Cache)?;
            let value: f64 = raw_ic.parse().map_err(|_| {
                WordnetError::Cache(format!(
                    "{}:{}: bad ic value '{raw_ic}'",
                    path.display(),
                    idx + 1
                ))
            })?;
            ic.insert(id, value);
        }
        Ok(IcTable {
            ic,
            totals: BTreeMap::new(),
        })
    }
}

/// Computes information content from corpus token counts.
///
/// Each token's count is split equally among its senses within each
/// part of speech; `cfg.smoothing` is added to every synset; counts
/// propagate once per strict ancestor per synset; the per-pos total is
/// the sum of that pos's propagated root counts; `IC = -ln(count/total)`.
pub fn compute_ic(
    tax: &TaxonomyIndex,
    corpus: &BTreeMap<String, f64>,
    cfg: &IcConfig,
) -> IcTable {
    let mut base: BTreeMap<SynsetId, f64> =
        tax.synsets().map(|s| (s.id, cfg.smoothing)).collect();
    for (token, &count) in corpus {
        for pos in PartOfSpeech::ALL {
            let senses = tax.senses(token, pos);
            if senses.is_empty() {
                continue;
            }
            let share = count / senses.len() as f64;
            for sid in senses {
                *base.get_mut(sid).expect("sense resolves") += share;
            }
        }
    }

    let mut counts = base.clone();
    for (&sid, &b) in &base {
        if b == 0.0 {
            continue;
        }
        let ancestors = tax
            .ancestors_inclusive(sid)
            .expect("taxonomy validated at build time");
        for anc in ancestors {
            if anc != sid {
                *counts.get_mut(&anc).expect("ancestor resolves") += b;
            }
        }
    }

    let mut totals: BTreeMap<PartOfSpeech, f64> = BTreeMap::new();
    for &root in tax.roots() {
        *totals.entry(root.pos).or_insert(0.0) += counts[&root];
    }

    let ic = counts
        .iter()
        .map(|(&sid, &count)| {
            let total = totals.get(&sid.pos).copied().unwrap_or(0.0);
            let value = if total > 0.0 && count > 0.0 {
                (-(count / total).ln()).max(0.0)
            } else {
                0.0
            };
            (sid, value)
        })
        .collect();
    IcTable { ic, totals }
}

/// Least common subsumer: the common hypernym ancestor of `s1` and `s2`
/// (including themselves) with maximal information content. Ties break
/// toward the smallest synset id.
pub fn lcs(
    tax: &TaxonomyIndex,
    ic: &IcTable,
    s1: SynsetId,
    s2: SynsetId,
) -> Result<Option<SynsetId>, WordnetError> {
    let anc1 = tax.ancestors_inclusive(s1)?;
    let anc2: BTreeSet<SynsetId> = tax.ancestors_inclusive(s2)?.into_iter().collect();
    let mut best: Option<(f64, SynsetId)> = None;
    for cand in anc1 {
        if !anc2.contains(&cand) {
            continue;
        }
        let value = ic.value_or_zero(cand);
        if best.is_none_or(|(b, _)| value > b) {
            best = Some((value, cand));
        }
    }
    Ok(best.map(|(_, id)| id))
}

/// Jiang–Conrath word similarity: the maximum of `1 / max(d, ε)` with
/// `d = IC(s1) + IC(s2) - 2·IC(lcs)` over all noun and verb sense pairs
/// of the two words. Out-of-vocabulary words (or words with no common
/// ancestor in any sense pair) score 0.
pub fn wnsim(tax: &TaxonomyIndex, ic: &IcTable, w1: &str, w2: &str) -> f64 {
    let w1 = w1.to_lowercase();
    let w2 = w2.to_lowercase();
    let mut best = 0.0_f64;
    for pos in [PartOfSpeech::Noun, PartOfSpeech::Verb] {
        for &s1 in tax.senses(&w1, pos) {
            for &s2 in tax.senses(&w2, pos) {
                let Ok(Some(anc)) = lcs(tax, ic, s1, s2) else {
                    continue;
                };
                let d = ic.value_or_zero(s1) + ic.value_or_zero(s2)
                    - 2.0 * ic.value_or_zero(anc);
                let sim = 1.0 / d.max(JCN_EPS);
                if sim > best {
                    best = sim;
                }
            }
        }
    }
    best
}

/// Taxonomy plus IC table: the similarity function the feature
/// extractor consumes. Immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct WnSim {
    pub tax: TaxonomyIndex,
    pub ic: IcTable,
}

impl WnSim {
    pub fn new(tax: TaxonomyIndex, ic: IcTable) -> WnSim {
        WnSim { tax, ic }
    }

    pub fn sim(&self, a: &str, b: &str) -> f64 {
        wnsim(&self.tax, &self.ic, a, b)
    }
}
