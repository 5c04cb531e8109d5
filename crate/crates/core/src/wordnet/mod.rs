//! WordNet 3.0 database parsing, information content, and
//! Jiang–Conrath word similarity.
//!
//! The taxonomy is the hypernym graph over synsets (`@` and `@i`
//! pointers). Information content comes from corpus token counts
//! divided over senses and propagated to ancestors; similarity is the
//! Jiang–Conrath measure `1 / max(IC(s1) + IC(s2) - 2·IC(lcs), ε)`
//! maximized over same-part-of-speech sense pairs.

mod ic;
mod parse;

pub use ic::{compute_ic, lcs, wnsim, IcConfig, IcTable, WnSim, JCN_EPS, JCN_MAX};
pub use parse::parse_wordnet;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WordnetError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: byte offset {offset}: {message}")]
    Parse {
        path: String,
        offset: usize,
        message: String,
    },
    #[error("hypernym cycle through synset {id}")]
    Cycle { id: SynsetId },
    #[error("synset {from} points to unknown hypernym {to}")]
    DanglingHypernym { from: SynsetId, to: SynsetId },
    #[error("index entry for '{lemma}' ({pos:?}) references unknown synset {id}")]
    DanglingSense {
        lemma: String,
        pos: PartOfSpeech,
        id: SynsetId,
    },
    #[error("unknown synset id {id}")]
    UnknownId { id: SynsetId },
    #[error("cache format: {0}")]
    Cache(String),
}

/// The four WordNet part-of-speech spaces. Adjective satellites
/// (`ss_type` `s`) share the adjective space.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum PartOfSpeech {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl PartOfSpeech {
    pub const ALL: [PartOfSpeech; 4] = [
        PartOfSpeech::Noun,
        PartOfSpeech::Verb,
        PartOfSpeech::Adj,
        PartOfSpeech::Adv,
    ];

    /// Single-character tag used in database files and synset ids.
    pub fn tag(self) -> char {
        match self {
            PartOfSpeech::Noun => 'n',
            PartOfSpeech::Verb => 'v',
            PartOfSpeech::Adj => 'a',
            PartOfSpeech::Adv => 'r',
        }
    }

    /// Maps a database pos/ss_type character; `s` (satellite) maps to Adj.
    pub fn from_tag(c: char) -> Option<PartOfSpeech> {
        match c {
            'n' => Some(PartOfSpeech::Noun),
            'v' => Some(PartOfSpeech::Verb),
            'a' | 's' => Some(PartOfSpeech::Adj),
            'r' => Some(PartOfSpeech::Adv),
            _ => None,
        }
    }

    /// Database file suffix (`data.noun`, `index.noun`, ...).
    pub fn file_suffix(self) -> &'static str {
        match self {
            PartOfSpeech::Noun => "noun",
            PartOfSpeech::Verb => "verb",
            PartOfSpeech::Adj => "adj",
            PartOfSpeech::Adv => "adv",
        }
    }
}

/// Synset identifier: part of speech plus the byte offset that names the
/// record in its data file. Rendered as e.g. `n00001740`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SynsetId {
    pub pos: PartOfSpeech,
    pub offset: u32,
}

impl SynsetId {
    pub fn new(pos: PartOfSpeech, offset: u32) -> SynsetId {
        SynsetId { pos, offset }
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:08}", self.pos.tag(), self.offset)
    }
}

impl FromStr for SynsetId {
    type Err = String;

    fn from_str(s: &str) -> Result<SynsetId, String> {
        let mut chars = s.chars();
        let tag = chars.next().ok_or_else(|| "empty synset id".to_string())?;
        let pos = PartOfSpeech::from_tag(tag).ok_or_else(|| format!("bad pos tag in '{s}'"))?;
        let offset: u32 = chars
            .as_str()
            .parse()
            .map_err(|_| format!("bad offset in '{s}'"))?;
        Ok(SynsetId { pos, offset })
    }
}

/// One synset: its lemmas and direct hypernyms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synset {
    pub id: SynsetId,
    pub lemmas: Vec<String>,
    pub hypernyms: Vec<SynsetId>,
}

/// The parsed database: synsets, the (lemma, pos) sense index, and the
/// hypernym-less roots. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxonomyIndex {
    synsets: BTreeMap<SynsetId, Synset>,
    lemma_index: BTreeMap<(String, PartOfSpeech), Vec<SynsetId>>,
    roots: Vec<SynsetId>,
}

impl TaxonomyIndex {
    /// Validates and indexes raw parsed material: every hypernym and
    /// sense reference must resolve, and the hypernym graph must be
    /// acyclic.
    pub fn build(
        synsets: Vec<Synset>,
        lemma_entries: Vec<(String, PartOfSpeech, Vec<SynsetId>)>,
    ) -> Result<TaxonomyIndex, WordnetError> {
        let mut map = BTreeMap::new();
        for synset in synsets {
            map.insert(synset.id, synset);
        }
        for synset in map.values() {
            for hyper in &synset.hypernyms {
                if !map.contains_key(hyper) {
                    return Err(WordnetError::DanglingHypernym {
                        from: synset.id,
                        to: *hyper,
                    });
                }
            }
        }
        check_acyclic(&map)?;

        let mut lemma_index: BTreeMap<(String, PartOfSpeech), Vec<SynsetId>> = BTreeMap::new();
        for (lemma, pos, ids) in lemma_entries {
            for id in &ids {
                if !map.contains_key(id) {
                    return Err(WordnetError::DanglingSense {
                        lemma: lemma.clone(),
                        pos,
                        id: *id,
                    });
                }
            }
            lemma_index.entry((lemma, pos)).or_default().extend(ids);
        }

        let roots = map
            .values()
            .filter(|s| s.hypernyms.is_empty())
            .map(|s| s.id)
            .collect();
        Ok(TaxonomyIndex {
            synsets: map,
            lemma_index,
            roots,
        })
    }

    pub fn synset(&self, id: SynsetId) -> Option<&Synset> {
        self.synsets.get(&id)
    }

    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn count_by_pos(&self, pos: PartOfSpeech) -> usize {
        self.synsets.keys().filter(|id| id.pos == pos).count()
    }

    /// Sense list for a (lowercase) lemma in one part of speech, in
    /// database order.
    pub fn senses(&self, lemma: &str, pos: PartOfSpeech) -> &[SynsetId] {
        self.lemma_index
            .get(&(lemma.to_string(), pos))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    pub fn roots(&self) -> &[SynsetId] {
        &self.roots
    }

    pub fn lemma_entries(
        &self,
    ) -> impl Iterator<Item = (&(String, PartOfSpeech), &Vec<SynsetId>)> {
        self.lemma_index.iter()
    }

    /// All strict-and-reflexive hypernym ancestors of `id`.
    pub fn ancestors_inclusive(&self, id: SynsetId) -> Result<Vec<SynsetId>, WordnetError> {
        if !self.synsets.contains_key(&id) {
            return Err(WordnetError::UnknownId { id });
        }
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(cur) = stack.pop() {
            if !seen.insert(cur) {
                continue;
            }
            out.push(cur);
            if let Some(s) = self.synsets.get(&cur) {
                stack.extend(s.hypernyms.iter().copied());
            }
        }
        out.sort();
        Ok(out)
    }

    /// Round-trip cache as versioned JSON.
    pub fn to_cache_json(&self) -> String {
        let synsets = self
            .synsets
            .values()
            .map(|s| CacheSynset {
                id: s.id.to_string(),
                lemmas: s.lemmas.clone(),
                hypernyms: s.hypernyms.iter().map(|h| h.to_string()).collect(),
            })
            .collect();
        let lemma_index = self
            .lemma_index
            .iter()
            .map(|((lemma, pos), ids)| CacheLemma {
                lemma: lemma.clone(),
                pos: pos.tag(),
                synsets: ids.iter().map(|i| i.to_string()).collect(),
            })
            .collect();
        let cache = CacheFile {
            version: CACHE_VERSION,
            synsets,
            lemma_index,
        };
        serde_json::to_string(&cache).expect("taxonomy cache serialization cannot fail")
    }

    pub fn from_cache_json(text: &str) -> Result<TaxonomyIndex, WordnetError> {
        let cache: CacheFile =
            serde_json::from_str(text).map_err(|e| WordnetError::Cache(e.to_string()))?;
        if cache.version != CACHE_VERSION {
            return Err(WordnetError::Cache(format!(
                "unsupported cache version {} (expected {})",
                cache.version, CACHE_VERSION
            )));
        }
        let parse_id = |raw: &str| SynsetId::from_str(raw).map_err(WordnetError::Cache);
        let mut synsets = Vec::with_capacity(cache.synsets.len());
        for s in &cache.synsets {
            let id = parse_id(&s.id)?;
            let hypernyms = s
                .hypernyms
                .iter()
                .map(|h| parse_id(h))
                .collect::<Result<Vec<_>, _>>()?;
            synsets.push(Synset {
                id,
                lemmas: s.lemmas.clone(),
                hypernyms,
            });
        }
        let mut lemma_entries = Vec::with_capacity(cache.lemma_index.len());
        for entry in &cache.lemma_index {
            let pos = PartOfSpeech::from_tag(entry.pos)
                .ok_or_else(|| WordnetError::Cache(format!("bad pos '{}'", entry.pos)))?;
            let ids = entry
                .synsets
                .iter()
                .map(|i| parse_id(i))
                .collect::<Result<Vec<_>, _>>()?;
            lemma_entries.push((entry.lemma.clone(), pos, ids));
        }
        TaxonomyIndex::build(synsets, lemma_entries)
    }
}

const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    synsets: Vec<CacheSynset>,
    lemma_index: Vec<CacheLemma>,
}

#[derive(Serialize, Deserialize)]
struct CacheSynset {
    id: String,
    lemmas: Vec<String>,
    hypernyms: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CacheLemma {
    lemma: String,
    pos: char,
    synsets: Vec<String>,
}

/// Iterative three-color DFS over hypernym edges.
fn check_acyclic(map: &BTreeMap<SynsetId, Synset>) -> Result<(), WordnetError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let mut color: BTreeMap<SynsetId, Color> =
        map.keys().map(|&k| (k, Color::White)).collect();
    for &start in map.keys() {
        if color[&start] != Color::White {
            continue;
        }
        // Stack holds (node, next-hypernym-index) frames.
        let mut stack: Vec<(SynsetId, usize)> = vec![(start, 0)];
        color.insert(start, Color::Gray);
        while let Some(&mut (node, ref mut idx)) = stack.last_mut() {
            let hypernyms = &map[&node].hypernyms;
            if *idx < hypernyms.len() {
                let next = hypernyms[*idx];
                *idx += 1;
                match color[&next] {
                    Color::White => {
                        color.insert(next, Color::Gray);
                        stack.push((next, 0));
                    }
                    Color::Gray => return Err(WordnetError::Cycle { id: next }),
                    Color::Black => {}
                }
            } else {
                color.insert(node, Color::Black);
                stack.pop();
            }
        }
    }
    Ok(())
}
