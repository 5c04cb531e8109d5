//! Shared text utilities: tokenization, edit distance, guarded ratios.

/// Floor applied to ratio denominators.
pub const RATIO_EPS: f64 = 1e-9;

/// Lowercases, strips ASCII punctuation, and splits on whitespace.
///
/// Tokens that are empty after stripping are dropped. This is the single
/// tokenizer used for lexicon corpora and for instance contexts.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|raw| {
            let tok: String = raw
                .chars()
                .filter(|c| !c.is_ascii_punctuation())
                .flat_map(|c| c.to_lowercase())
                .collect();
            if tok.is_empty() {
                None
            } else {
                Some(tok)
            }
        })
        .collect()
}

/// Cleans a single token the same way `tokenize` would.
pub fn clean_token(raw: &str) -> String {
    raw.chars()
        .filter(|c| !c.is_ascii_punctuation())
        .flat_map(|c| c.to_lowercase())
        .collect()
}

/// Levenshtein distance in characters.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Levenshtein distance normalized by the longer string length.
///
/// Two empty strings are identical, distance 0.
pub fn normalized_levenshtein(a: &str, b: &str) -> f64 {
    let longer = a.chars().count().max(b.chars().count());
    if longer == 0 {
        return 0.0;
    }
    levenshtein(a, b) as f64 / longer as f64
}

/// Ratio a/b with the denominator floored at `RATIO_EPS`.
///
/// Equal operands give exactly 1.0, so comparing a quantity to itself
/// (including 0 to 0) reads as identity.
pub fn ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else {
        a / b.max(RATIO_EPS)
    }
}
