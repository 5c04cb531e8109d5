//! Parser for WordNet 3.0 `data.*` / `index.*` database files.
//!
//! Only the material the taxonomy needs is kept: synset ids, lemmas,
//! and hypernym pointers (`@`, `@i`). Verb frames and glosses are
//! validated positionally and discarded.

use std::path::Path;

use super::{PartOfSpeech, Synset, SynsetId, TaxonomyIndex, WordnetError};

/// Parses a WordNet 3.0 database directory (all eight
/// `data.{noun,verb,adj,adv}` / `index.*` files) into a validated
/// taxonomy.
pub fn parse_wordnet(dir: &Path) -> Result<TaxonomyIndex, WordnetError> {
    let mut synsets = Vec::new();
    let mut lemma_entries = Vec::new();
    for pos in PartOfSpeech::ALL {
        let path = dir.join(format!("data.{}", pos.file_suffix()));
        let text = read_file(&path)?;
        parse_data_file(&path, pos, &text, &mut synsets)?;
    }
    for pos in PartOfSpeech::ALL {
        let path = dir.join(format!("index.{}", pos.file_suffix()));
        let text = read_file(&path)?;
        parse_index_file(&path, pos, &text, &mut lemma_entries)?;
    }
    TaxonomyIndex::build(synsets, lemma_entries)
}

fn read_file(path: &Path) -> Result<String, WordnetError> {
    std::fs::read_to_string(path).map_err(|e| WordnetError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Yields `(byte_offset_of_line_start, line_without_newline)`.
fn lines_with_offsets(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut offset = 0usize;
    text.split_inclusive('\n').map(move |raw| {
        let start = offset;
        offset += raw.len();
        (start, raw.trim_end_matches('\n'))
    })
}

fn is_license_header(line: &str) -> bool {
    line.starts_with("  ")
}

struct FieldCursor<'a> {
    path: &'a Path,
    offset: usize,
    fields: Vec<&'a str>,
    idx: usize,
}

impl<'a> FieldCursor<'a> {
    fn new(path: &'a Path, offset: usize, body: &'a str) -> FieldCursor<'a> {
        FieldCursor {
            path,
            offset,
            fields: body.split_whitespace().collect(),
            idx: 0,
        }
    }

    fn err(&self, message: String) -> WordnetError {
        WordnetError::Parse {
            path: self.path.display().to_string(),
            offset: self.offset,
            message,
        }
    }

    fn next(&mut self, what: &str) -> Result<&'a str, WordnetError> {
        let field = self
            .fields
            .get(self.idx)
            .copied()
            .ok_or_else(|| self.err(format!("record truncated: missing {what}")))?;
        self.idx += 1;
        Ok(field)
    }

    fn next_fixed_decimal(&mut self, what: &str, width: usize) -> Result<u32, WordnetError> {
        let field = self.next(what)?;
        if field.len() != width || !field.bytes().all(|b| b.is_ascii_digit()) {
            return Err(self.err(format!(
                "{what} '{field}' is not a {width}-digit decimal"
            )));
        }
        field
            .parse()
            .map_err(|_| self.err(format!("{what} '{field}' out of range")))
    }

    fn next_decimal(&mut self, what: &str) -> Result<u32, WordnetError> {
        let field = self.next(what)?;
        field
            .parse()
            .map_err(|_| self.err(format!("{what} '{field}' is not a decimal integer")))
    }

    fn next_fixed_hex(&mut self, what: &str, width: usize) -> Result<u32, WordnetError> {
        let field = self.next(what)?;
        if field.len() != width || !field.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(self.err(format!("{what} '{field}' is not a {width}-digit hex value")));
        }
        u32::from_str_radix(field, 16)
            .map_err(|_| self.err(format!("{what} '{field}' out of range")))
    }

    fn next_pos(&mut self, what: &str) -> Result<PartOfSpeech, WordnetError> {
        let field = self.next(what)?;
        let mut chars = field.chars();
        let (Some(tag), None) = (chars.next(), chars.next()) else {
            return Err(self.err(format!("{what} '{field}' is not a single pos tag")));
        };
        PartOfSpeech::from_tag(tag).ok_or_else(|| self.err(format!("unknown pos tag '{field}'")))
    }

    fn finish(&self) -> Result<(), WordnetError> {
        if self.idx != self.fields.len() {
            return Err(self.err(format!(
                "bad field count: {} trailing fields after record body",
                self.fields.len() - self.idx
            )));
        }
        Ok(())
    }
}

/// Strips the adjective syntactic markers `(a)`, `(p)`, `(ip)` and
/// lowercases a data-file word.
fn clean_lemma(word: &str) -> String {
    let stripped = word
        .strip_suffix("(a)")
        .or_else(|| word.strip_suffix("(p)"))
        .or_else(|| word.strip_suffix("(ip)"))
        .unwrap_or(word);
    stripped.to_lowercase()
}

fn parse_data_file(
    path: &Path,
    file_pos: PartOfSpeech,
    text: &str,
    out: &mut Vec<Synset>,
) -> Result<(), WordnetError> {
    for (offset, line) in lines_with_offsets(text) {
        if line.is_empty() || is_license_header(line) {
            continue;
        }
        out.push(parse_data_record(path, file_pos, offset, line)?);
    }
    Ok(())
}

fn parse_data_record(
    path: &Path,
    file_pos: PartOfSpeech,
    offset: usize,
    line: &str,
) -> Result<Synset, WordnetError> {
    let body = line.split_once(" | ").map_or(line, |(head, _)| head);
    let mut cur = FieldCursor::new(path, offset, body);

    let declared = cur.next_fixed_decimal("synset_offset", 8)?;
    if declared as usize != offset {
        return Err(cur.err(format!(
            "offset mismatch: record declares {declared:08} but starts at byte {offset}"
        )));
    }
    cur.next_fixed_decimal("lex_filenum", 2)?;
    let ss_type = cur.next_pos("ss_type")?;
    if ss_type != file_pos {
        return Err(cur.err(format!(
            "ss_type belongs to {:?}, not this file's {:?}",
            ss_type, file_pos
        )));
    }

    let w_cnt = cur.next_fixed_hex("w_cnt", 2)?;
    if w_cnt == 0 {
        return Err(cur.err("w_cnt must be at least 1".to_string()));
    }
    let mut lemmas = Vec::with_capacity(w_cnt as usize);
    for _ in 0..w_cnt {
        let word = cur.next("word")?;
        cur.next_fixed_hex("lex_id", 1)?;
        lemmas.push(clean_lemma(word));
    }

    let p_cnt = cur.next_fixed_decimal("p_cnt", 3)?;
    let mut hypernyms = Vec::new();
    for _ in 0..p_cnt {
        let symbol = cur.next("pointer_symbol")?;
        let ptr_offset = cur.next_fixed_decimal("pointer offset", 8)?;
        let ptr_pos = cur.next_pos("pointer pos")?;
        cur.next_fixed_hex("source/target", 4)?;
        if symbol == "@" || symbol == "@i" {
            if ptr_pos != file_pos {
                return Err(cur.err(format!(
                    "hypernym pointer crosses part of speech ({:?} -> {:?})",
                    file_pos, ptr_pos
                )));
            }
            hypernyms.push(SynsetId::new(ptr_pos, ptr_offset));
        }
    }

    if file_pos == PartOfSpeech::Verb {
        let f_cnt = cur.next_fixed_decimal("f_cnt", 2)?;
        for _ in 0..f_cnt {
            let plus = cur.next("frame marker")?;
            if plus != "+" {
                return Err(cur.err(format!("expected frame marker '+', found '{plus}'")));
            }
            cur.next_fixed_decimal("f_num", 2)?;
            cur.next_fixed_hex("w_num", 2)?;
        }
    }
    cur.finish()?;

    Ok(Synset {
        id: SynsetId::new(file_pos, declared),
        lemmas,
        hypernyms,
    })
}

fn parse_index_file(
    path: &Path,
    file_pos: PartOfSpeech,
    text: &str,
    out: &mut Vec<(String, PartOfSpeech, Vec<SynsetId>)>,
) -> Result<(), WordnetError> {
    for (offset, line) in lines_with_offsets(text) {
        if line.is_empty() || is_license_header(line) {
            continue;
        }
        let mut cur = FieldCursor::new(path, offset, line);
        let lemma = cur.next("lemma")?.to_lowercase();
        let pos = cur.next_pos("pos")?;
        if pos != file_pos {
            return Err(cur.err(format!(
                "index pos belongs to {:?}, not this file's {:?}",
                pos, file_pos
            )));
        }
        let synset_cnt = cur.next_decimal("synset_cnt")?;
        if synset_cnt == 0 {
            return Err(cur.err("synset_cnt must be at least 1".to_string()));
        }
        let p_cnt = cur.next_decimal("p_cnt")?;
        for _ in 0..p_cnt {
            cur.next("ptr_symbol")?;
        }
        cur.next_decimal("sense_cnt")?;
        cur.next_decimal("tagsense_cnt")?;
        let mut ids = Vec::with_capacity(synset_cnt as usize);
        for _ in 0..synset_cnt {
            let off = cur.next_fixed_decimal("sense synset_offset", 8)?;
            ids.push(SynsetId::new(file_pos, off));
        }
        cur.finish()?;
        out.push((lemma, pos, ids));
    }
    Ok(())
}
