//! Word-pair similarity store: lexicon loading, merging, and monotonic
//! transitive closure.
//!
//! Scores live on a canonical `[0, 10]` scale where 10 means similar, 0
//! dissimilar, and 5 neutral. Lexicons on other scales are rescaled
//! linearly at load time.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Canonical scale ceiling.
pub const SCALE_MAX: f64 = 10.0;
/// Neutral similarity on the canonical scale.
pub const NEUTRAL: f64 = 5.0;

#[derive(Debug, Error)]
pub enum SimlexError {
    #[error("{path}:{line}: expected 3 tab-separated columns, found {found}")]
    ColumnCount {
        path: String,
        line: usize,
        found: usize,
    },
    #[error("{path}:{line}: score '{raw}' is not a number")]
    BadScore {
        path: String,
        line: usize,
        raw: String,
    },
    #[error("{path}:{line}: score {score} outside [0, {max}]")]
    ScoreRange {
        path: String,
        line: usize,
        score: f64,
        max: f64,
    },
    #[error("{path}:{line}: scale_max '{raw}' is not a positive number")]
    BadScale {
        path: String,
        line: usize,
        raw: String,
    },
    #[error("{path}:{line}: provenance '{raw}' is not 'original' or 'derived'")]
    BadProvenance {
        path: String,
        line: usize,
        raw: String,
    },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn io_err(path: &Path, source: std::io::Error) -> SimlexError {
    SimlexError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// One row of a loaded lexicon, already on the canonical scale.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub word_a: String,
    pub word_b: String,
    pub score: f64,
    pub source: String,
}

/// Whether a pair was read from a lexicon or produced by the closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Original,
    Derived,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Original => write!(f, "original"),
            Provenance::Derived => write!(f, "derived"),
        }
    }
}

/// Unordered word pair, stored lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair(String, String);

impl Pair {
    pub fn new(a: &str, b: &str) -> Pair {
        let a = a.to_lowercase();
        let b = b.to_lowercase();
        if a <= b {
            Pair(a, b)
        } else {
            Pair(b, a)
        }
    }

    pub fn first(&self) -> &str {
        &self.0
    }

    pub fn second(&self) -> &str {
        &self.1
    }
}

/// Symmetric word-pair similarity map on the canonical scale.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimStore {
    pairs: BTreeMap<Pair, (f64, Provenance)>,
}

/// Parameters of the transitive closure.
#[derive(Debug, Clone, Copy)]
pub struct ClosureConfig {
    pub neutral: f64,
    pub cap: f64,
    pub passes: usize,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        ClosureConfig {
            neutral: NEUTRAL,
            cap: SCALE_MAX,
            passes: 1,
        }
    }
}

/// Loads a TSV lexicon (`word TAB word TAB raw_score`) and rescales raw
/// scores from `[0, scale_max]` onto the canonical scale.
pub fn load_lexicon(
    path: &Path,
    scale_max: f64,
    source: &str,
) -> Result<Vec<LexiconEntry>, SimlexError> {
    assert!(scale_max > 0.0, "scale_max must be positive");
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut entries = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(SimlexError::ColumnCount {
                path: path.display().to_string(),
                line: lineno,
                found: cols.len(),
            });
        }
        let raw: f64 = cols[2].trim().parse().map_err(|_| SimlexError::BadScore {
            path: path.display().to_string(),
            line: lineno,
            raw: cols[2].to_string(),
        })?;
        if !raw.is_finite() || raw < 0.0 || raw > scale_max {
            return Err(SimlexError::ScoreRange {
                path: path.display().to_string(),
                line: lineno,
                score: raw,
                max: scale_max,
            });
        }
        entries.push(LexiconEntry {
            word_a: cols[0].trim().to_lowercase(),
            word_b: cols[1].trim().to_lowercase(),
            score: raw * SCALE_MAX / scale_max,
            source: source.to_string(),
        });
    }
    Ok(entries)
}

/// One line of a lexicon manifest: where the file is and what scale it uses.
#[derive(Debug, Clone)]
pub struct ManifestLine {
    pub path: PathBuf,
    pub scale_max: f64,
    pub source: String,
}

/// Reads a manifest TSV (`path TAB scale_max TAB source_tag`).
///
/// Relative lexicon paths are resolved against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestLine>, SimlexError> {
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(SimlexError::ColumnCount {
                path: path.display().to_string(),
                line: lineno,
                found: cols.len(),
            });
        }
        let scale_max: f64 = cols[1].trim().parse().map_err(|_| SimlexError::BadScale {
            path: path.display().to_string(),
            line: lineno,
            raw: cols[1].to_string(),
        })?;
        if !scale_max.is_finite() || scale_max <= 0.0 {
            return Err(SimlexError::BadScale {
                path: path.display().to_string(),
                line: lineno,
                raw: cols[1].to_string(),
            });
        }
        let rel = PathBuf::from(cols[0].trim());
        let resolved = if rel.is_absolute() {
            rel
        } else {
            base.join(rel)
        };
        lines.push(ManifestLine {
            path: resolved,
            scale_max,
            source: cols[2].trim().to_string(),
        });
    }
    Ok(lines)
}

/// Merges lexicons into one store. Duplicate pairs (within or across
/// lexicons, in either orientation) collapse to the arithmetic mean of
/// their scores.
pub fn merge(lexicons: &[Vec<LexiconEntry>]) -> SimStore {
    let mut acc: BTreeMap<Pair, (f64, usize)> = BTreeMap::new();
    for lexicon in lexicons {
        for entry in lexicon {
            let key = Pair::new(&entry.word_a, &entry.word_b);
            let slot = acc.entry(key).or_insert((0.0, 0));
            slot.0 += entry.score;
            slot.1 += 1;
        }
    }
    let pairs = acc
        .into_iter()
        .map(|(k, (sum, n))| (k, (sum / n as f64, Provenance::Original)))
        .collect();
    SimStore { pairs }
}

impl SimStore {
    pub fn new() -> SimStore {
        SimStore::default()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Inserts a pair, replacing any previous score.
    pub fn insert(&mut self, a: &str, b: &str, score: f64, provenance: Provenance) {
        self.pairs.insert(Pair::new(a, b), (score, provenance));
    }

    /// Symmetric lookup. Identical tokens are maximally similar by
    /// convention even when absent from the store.
    pub fn lookup(&self, a: &str, b: &str) -> Option<f64> {
        let key = Pair::new(a, b);
        if key.0 == key.1 {
            return Some(SCALE_MAX);
        }
        self.pairs.get(&key).map(|(s, _)| *s)
    }

    pub fn provenance(&self, a: &str, b: &str) -> Option<Provenance> {
        self.pairs.get(&Pair::new(a, b)).map(|(_, p)| *p)
    }

    /// Pairs in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&Pair, f64, Provenance)> {
        self.pairs.iter().map(|(k, (s, p))| (k, *s, *p))
    }

    /// Distinct words, sorted.
    pub fn words(&self) -> Vec<String> {
        let mut set = BTreeSet::new();
        for pair in self.pairs.keys() {
            set.insert(pair.0.clone());
            set.insert(pair.1.clone());
        }
        set.into_iter().collect()
    }

    /// Writes the sorted-pair TSV cache (`word_a TAB word_b TAB score TAB
    /// provenance`, 6 decimal places, word_a < word_b).
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (pair, score, prov) in self.iter() {
            writeln!(out, "{}\t{}\t{:.6}\t{}", pair.0, pair.1, score, prov)?;
        }
        Ok(())
    }

    /// Reads a store back from the TSV cache format.
    pub fn read_tsv(path: &Path) -> Result<SimStore, SimlexError> {
        let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
        let reader = BufReader::new(file);
        let mut store = SimStore::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| io_err(path, e))?;
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(SimlexError::ColumnCount {
                    path: path.display().to_string(),
                    line: lineno,
                    found: cols.len(),
                });
            }
            let score: f64 = cols[2].parse().map_err(|_| SimlexError::BadScore {
                path: path.display().to_string(),
                line: lineno,
                raw: cols[2].to_string(),
            })?;
            let prov = match cols[3] {
                "original" => Provenance::Original,
                "derived" => Provenance::Derived,
                other => {
                    return Err(SimlexError::BadProvenance {
                        path: path.display().to_string(),
                        line: lineno,
                        raw: other.to_string(),
                    })
                }
            };
            store.insert(cols[0], cols[1], score, prov);
        }
        Ok(store)
    }
}

/// Expands the store by the monotonic transitivity rule.
///
/// For each ordered triple `(i, j, k)` with edges `(i, j)` and `(j, k)`
/// present and `(i, k)` absent, when `s_jk > s_ij` and `s_jk > neutral`:
///
/// * `s_ij > neutral`: add `s_ik = min(s_ij + (s_jk - s_ij) * s_jk / cap, cap)`
/// * `s_ij < neutral`: compute the same blend and add it only if it stays
///   below neutral.
///
/// Triples are visited in lexicographic `(i, j, k)` order; the first
/// witness for a missing pair wins. Pairs derived in a pass become usable
/// edges only in the next pass, and existing pairs are never overwritten.
pub fn transitive_close(store: &SimStore, cfg: &ClosureConfig) -> SimStore {
    assert!(
        cfg.neutral > 0.0 && cfg.neutral < cfg.cap,
        "closure requires 0 < neutral < cap"
    );
    let mut base = store.clone();
    for _ in 0..cfg.passes {
        let added = closure_pass(&base, cfg);
        if added.is_empty() {
            break;
        }
        for (pair, score) in added {
            base.pairs.insert(pair, (score, Provenance::Derived));
        }
    }
    base
}

fn closure_pass(base: &SimStore, cfg: &ClosureConfig) -> BTreeMap<Pair, f64> {
    // Sorted adjacency so the scan is exactly lexicographic in (i, j, k).
    let mut adj: BTreeMap<&str, Vec<(&str, f64)>> = BTreeMap::new();
    for (pair, score, _) in base.iter() {
        adj.entry(pair.first())
            .or_default()
            .push((pair.second(), score));
        adj.entry(pair.second())
            .or_default()
            .push((pair.first(), score));
    }
    for neighbors in adj.values_mut() {
        neighbors.sort_by(|a, b| a.0.cmp(b.0));
    }

    let mut added: BTreeMap<Pair, f64> = BTreeMap::new();
    for (&word_i, edges_i) in &adj {
        for &(word_j, s_ij) in edges_i {
            let Some(edges_j) = adj.get(word_j) else {
                continue;
            };
            for &(word_k, s_jk) in edges_j {
                if word_k == word_i {
                    continue;
                }
                if !(s_jk > s_ij && s_jk > cfg.neutral) {
                    continue;
                }
                let blended = s_ij + (s_jk - s_ij) * s_jk / cfg.cap;
                // Both admitted regimes blend the same way; the arms are
                // kept separate because they gate on different conditions
                // and the middle regime must fall through to `continue`.
                #[allow(clippy::if_same_then_else)]
                let new_score = if s_ij > cfg.neutral {
                    blended.min(cfg.cap)
                } else if s_ij < cfg.neutral && blended < cfg.neutral {
                    blended.min(cfg.cap)
                } else {
                    continue;
                };
                let key = Pair::new(word_i, word_k);
                if base.pairs.contains_key(&key) || added.contains_key(&key) {
                    continue;
                }
                added.insert(key, new_score);
            }
        }
    }
    added
}
