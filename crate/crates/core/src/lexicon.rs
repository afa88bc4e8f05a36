//! Sentiment lexica, their positive/negative halves, and the counting baseline.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::ingest::{stem::stem_word, Corpus, NEGATION_PREFIX};

/// Word → value map over `[-scale, scale]`. Neutral words are absent, never zero-valued.
#[derive(Debug, Clone, PartialEq)]
pub struct SentimentLexicon {
    pub name: String,
    entries: IndexMap<String, f64>,
    scale: f64,
}

/// A parsed lexicon plus the rows that did not make it in.
#[derive(Debug, Clone)]
pub struct LexiconLoad {
    pub lexicon: SentimentLexicon,
    /// Rows whose word had already been seen; the later value wins.
    pub duplicates: usize,
    /// Zero-valued or unparsable rows.
    pub rejected: usize,
}

impl SentimentLexicon {
    /// Build from `(word, value)` pairs. Later duplicates overwrite earlier
    /// ones; zero and non-finite values are an error.
    pub fn from_entries<I, S>(name: impl Into<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut map = IndexMap::new();
        for (word, value) in entries {
            let word = word.into();
            if value == 0.0 || !value.is_finite() {
                return Err(Error::InvalidInput(format!("lexicon entry {word:?} has value {value}")));
            }
            map.insert(word, value);
        }
        Self::from_map(name.into(), map)
    }

    fn from_map(name: String, entries: IndexMap<String, f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyLexicon);
        }
        let scale = entries.values().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(SentimentLexicon { name, entries, scale })
    }

    pub fn value(&self, word: &str) -> Option<f64> {
        self.entries.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    /// Largest absolute value; every entry lies in `[-scale, scale]`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(w, &v)| (w.as_str(), v))
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Lexicon with every word passed through the token stemmer, so it
    /// matches stemmed documents. Colliding stems keep the last value.
    pub fn stemmed(&self) -> SentimentLexicon {
        let mut map = IndexMap::new();
        for (w, &v) in &self.entries {
            map.insert(stem_word(w), v);
        }
        SentimentLexicon { name: self.name.clone(), entries: map, scale: self.scale }
    }

    /// Lexicon extended with `"neg" + w` entries valued `-0.5 * value(w)`, so
    /// that scoring negation-merged tokens reproduces the negation rule of
    /// [`count_score`]. Existing entries are left untouched.
    pub fn with_merged_negations(&self) -> SentimentLexicon {
        let mut map = self.entries.clone();
        for (w, &v) in &self.entries {
            if w.starts_with(NEGATION_PREFIX) {
                continue;
            }
            map.entry(format!("{NEGATION_PREFIX}{w}")).or_insert(-0.5 * v);
        }
        SentimentLexicon { name: self.name.clone(), entries: map, scale: self.scale }
    }
}

fn parse_row(line: &str) -> Option<(String, f64)> {
    let (word, value) = match line.split_once('\t') {
        Some((w, v)) => (w.trim(), v.trim()),
        None => line.trim().rsplit_once(char::is_whitespace).map(|(w, v)| (w.trim(), v.trim()))?,
    };
    if word.is_empty() {
        return None;
    }
    let value = value.replace('\u{2212}', "-").parse::<f64>().ok()?;
    Some((word.to_lowercase(), value))
}

/// Parse `word<TAB>value` rows (whitespace also accepted as separator).
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_lexicon(name: impl Into<String>, text: &str) -> Result<LexiconLoad> {
    let mut entries = IndexMap::new();
    let (mut duplicates, mut rejected) = (0, 0);
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match parse_row(line) {
            Some((_, v)) if v == 0.0 || !v.is_finite() => rejected += 1,
            Some((w, v)) => {
                if entries.insert(w, v).is_some() {
                    duplicates += 1;
                }
            }
            None => rejected += 1,
        }
    }
    let lexicon = SentimentLexicon::from_map(name.into(), entries)?;
    Ok(LexiconLoad { lexicon, duplicates, rejected })
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<LexiconLoad> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_lexicon(name, &text)
}

/// Unique positive and negative words of a lexicon.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LexiconHalves {
    pub positive: Vec<String>,
    pub negative: Vec<String>,
}

impl LexiconHalves {
    /// Write `positive.txt` and `negative.txt`, one word per line.
    pub fn write_word_lists(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        for (file, words) in [("positive.txt", &self.positive), ("negative.txt", &self.negative)] {
            let path = dir.join(file);
            let mut body = words.join("\n");
            body.push('\n');
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

/// Split a lexicon by sign, keeping lexicon order.
pub fn halves(lexicon: &SentimentLexicon) -> Result<LexiconHalves> {
    if lexicon.is_empty() {
        return Err(Error::EmptyLexicon);
    }
    let mut h = LexiconHalves::default();
    for (w, v) in lexicon.entries() {
        if v > 0.0 {
            h.positive.push(w.to_string());
        } else {
            h.negative.push(w.to_string());
        }
    }
    Ok(h)
}

/// Add `"neg" + w` to the positive half for every negative word `w`, and
/// vice versa. Words that already carry the prefix are not used as
/// sources, which makes the operation idempotent.
pub fn augment_negations(h: &LexiconHalves) -> LexiconHalves {
    let mut seen: HashSet<String> = h.positive.iter().chain(&h.negative).cloned().collect();
    let mut out = h.clone();
    let mut add = |sources: &[String], target: &mut Vec<String>| {
        for w in sources.iter().filter(|w| !w.starts_with(NEGATION_PREFIX)) {
            let merged = format!("{NEGATION_PREFIX}{w}");
            if seen.insert(merged.clone()) {
                target.push(merged);
            }
        }
    };
    add(&h.negative, &mut out.positive);
    add(&h.positive, &mut out.negative);
    out
}

/// Counting-lexicon score: the sum of word values, doubled after an
/// amplifier and multiplied by -0.5 after a negation (only the immediately
/// preceding token counts). Higher means more positive.
pub fn count_score(tokens: &[String], lexicon: &SentimentLexicon, amplifiers: &[String], negations: &[String]) -> f64 {
    let mut score = 0.0;
    for (i, token) in tokens.iter().enumerate() {
        let Some(mut value) = lexicon.value(token) else { continue };
        if let Some(prev) = i.checked_sub(1).map(|j| &tokens[j]) {
            if amplifiers.contains(prev) {
                value *= 2.0;
            } else if negations.contains(prev) {
                value *= -0.5;
            }
        }
        score += value;
    }
    score
}

/// Score every document's baseline token view and store the score on the document.
pub fn corpus_scores(corpus: &mut Corpus, lexicon: &SentimentLexicon, amplifiers: &[String], negations: &[String]) -> Vec<f64> {
    corpus
        .documents
        .iter_mut()
        .map(|d| {
            d.lexicon_score = count_score(&d.baseline_tokens, lexicon, amplifiers, negations);
            d.lexicon_score
        })
        .collect()
}
