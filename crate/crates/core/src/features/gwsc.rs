//! Reader and writer for the 4-column instance TSV
//! (`word1 TAB word2 TAB context1 TAB context2`), with the two target
//! words wrapped in a marker (default `<strong>` ... `</strong>`)
//! inside each context.

use std::path::Path;

use super::{FeatureError, Instance, MarkedContext};
use crate::text::{clean_token, tokenize};

/// Default marker pair.
pub const DEFAULT_MARKER_OPEN: &str = "<strong>";
pub const DEFAULT_MARKER_CLOSE: &str = "</strong>";

/// Parses an instance file. Instance ids are the 1-based ordinal of the
/// data row.
pub fn parse_gwsc(
    path: &Path,
    marker_open: &str,
    marker_close: &str,
) -> Result<Vec<Instance>, FeatureError> {
    let text = std::fs::read_to_string(path).map_err(|e| FeatureError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_gwsc_str(&text, marker_open, marker_close)
}

/// Parses instance rows from text (see [`parse_gwsc`]).
pub fn parse_gwsc_str(
    text: &str,
    marker_open: &str,
    marker_close: &str,
) -> Result<Vec<Instance>, FeatureError> {
    let mut instances = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(FeatureError::ColumnCount {
                line: lineno + 1,
                expected: 4,
                found: cols.len(),
            });
        }
        let id = (instances.len() + 1).to_string();
        let word1 = clean_token(cols[0]);
        let word2 = clean_token(cols[1]);
        if word1.is_empty() || word2.is_empty() {
            return Err(FeatureError::Format {
                id,
                message: "empty target word".to_string(),
            });
        }
        let context1 =
            parse_marked_context(cols[2], marker_open, marker_close, &word1, &word2, &id, "context1")?;
        let context2 =
            parse_marked_context(cols[3], marker_open, marker_close, &word1, &word2, &id, "context2")?;
        instances.push(Instance {
            id,
            word1,
            word2,
            context1,
            context2,
        });
    }
    Ok(instances)
}

#[allow(clippy::too_many_arguments)]
fn parse_marked_context(
    raw: &str,
    open: &str,
    close: &str,
    word1: &str,
    word2: &str,
    id: &str,
    which: &str,
) -> Result<MarkedContext, FeatureError> {
    let fail = |message: String| FeatureError::Format {
        id: id.to_string(),
        message: format!("{which}: {message}"),
    };

    let mut tokens: Vec<String> = Vec::new();
    let mut marked: Vec<(usize, String)> = Vec::new();
    let mut rest = raw;
    loop {
        match rest.find(open) {
            None => {
                tokens.extend(tokenize(rest));
                break;
            }
            Some(at) => {
                tokens.extend(tokenize(&rest[..at]));
                let after_open = &rest[at + open.len()..];
                let end = after_open
                    .find(close)
                    .ok_or_else(|| fail(format!("marker '{open}' is never closed")))?;
                let span_tokens = tokenize(&after_open[..end]);
                if span_tokens.len() != 1 {
                    return Err(fail(format!(
                        "marked span '{}' must contain exactly one token",
                        &after_open[..end]
                    )));
                }
                marked.push((tokens.len(), span_tokens[0].clone()));
                tokens.push(span_tokens[0].clone());
                rest = &after_open[end + close.len()..];
            }
        }
    }

    if marked.len() != 2 {
        return Err(fail(format!(
            "expected exactly 2 marked target words, found {}",
            marked.len()
        )));
    }
    let (pos1, pos2) = if word1 == word2 {
        (marked[0].0, marked[1].0)
    } else {
        let pos_of = |w: &str| {
            marked
                .iter()
                .find(|(_, t)| t == w)
                .map(|(p, _)| *p)
                .ok_or_else(|| fail(format!("no marker found for target word '{w}'")))
        };
        (pos_of(word1)?, pos_of(word2)?)
    };
    if marked[0].1 != *word1 && marked[0].1 != *word2 {
        return Err(fail(format!(
            "marked token '{}' matches neither target word",
            marked[0].1
        )));
    }
    if marked[1].1 != *word1 && marked[1].1 != *word2 {
        return Err(fail(format!(
            "marked token '{}' matches neither target word",
            marked[1].1
        )));
    }
    MarkedContext::new(tokens, pos1, pos2).map_err(fail)
}

/// Serializes instances back to the 4-column marked TSV. Canonical
/// already-tokenized input round-trips byte-identically (modulo
/// whitespace normalization of the original).
pub fn serialize_gwsc(instances: &[Instance], marker_open: &str, marker_close: &str) -> String {
    let mut out = String::new();
    for instance in instances {
        let render = |ctx: &MarkedContext| {
            let mut parts = Vec::with_capacity(ctx.tokens.len());
            for (i, tok) in ctx.tokens.iter().enumerate() {
                if i == ctx.pos1 || i == ctx.pos2 {
                    parts.push(format!("{marker_open}{tok}{marker_close}"));
                } else {
                    parts.push(tok.clone());
                }
            }
            parts.join(" ")
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            instance.word1,
            instance.word2,
            render(&instance.context1),
            render(&instance.context2)
        ));
    }
    out
}
