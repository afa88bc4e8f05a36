//! Planted-sentiment corpora for tests and demos.
//!
//! Positive documents oversample a planted positive vocabulary and negative
//! documents a planted negative one; the rest is Zipf-distributed filler. The
//! accompanying lexicon covers only a few planted words per pole.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::distributions::WeightedIndex;
use rand::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::{self, stem::stem_word, Corpus, Document, Label, PreprocessConfig};
use crate::lexicon::SentimentLexicon;
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedConfig {
    pub documents: usize,
    pub tokens_per_document: usize,
    pub neutral_vocabulary: usize,
    pub planted_per_pole: usize,
    pub lexicon_per_pole: usize,
    /// Probability that a token is drawn from a planted vocabulary.
    pub sentiment_rate: f64,
    /// Share of planted phrases drawn from the opposite pole.
    pub cross_rate: f64,
    /// Planted tokens come in same-pole runs of this length.
    pub phrase_length: usize,
    pub positive_fraction: f64,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            documents: 2000,
            tokens_per_document: 60,
            neutral_vocabulary: 400,
            planted_per_pole: 40,
            lexicon_per_pole: 8,
            sentiment_rate: 0.15,
            cross_rate: 0.25,
            phrase_length: 1,
            positive_fraction: 0.5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    /// Raw texts with gold labels; not yet preprocessed.
    pub corpus: Corpus,
    pub lexicon: SentimentLexicon,
    pub positive_words: Vec<String>,
    pub negative_words: Vec<String>,
    pub neutral_words: Vec<String>,
}

const ONSETS: &[u8] = b"bdfgklmnprtvz";
const VOWELS: &[u8] = b"aiou";

/// Pronounceable CVCVC(V) pseudo-words that the preprocessing pipeline keeps intact.
fn fresh_words<R: Rng>(n: usize, taken: &mut HashSet<String>, rng: &mut R) -> Vec<String> {
    let config = PreprocessConfig::default();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut w = String::new();
        for i in 0..5 {
            let set = if i % 2 == 0 { ONSETS } else { VOWELS };
            w.push(*set.choose(rng).unwrap() as char);
        }
        if rng.gen_bool(0.5) {
            w.push(*VOWELS.choose(rng).unwrap() as char);
        }
        if stem_word(&w) != w || config.stopwords.contains(&w) || taken.contains(&w) {
            continue;
        }
        taken.insert(w.clone());
        out.push(w);
    }
    out
}

pub fn generate(config: &PlantedConfig) -> Result<PlantedCorpus> {
    if config.lexicon_per_pole == 0 || config.lexicon_per_pole > config.planted_per_pole {
        return Err(Error::InvalidInput("lexicon_per_pole must lie in 1..=planted_per_pole".into()));
    }
    if config.neutral_vocabulary == 0 || config.documents == 0 || config.tokens_per_document == 0 || config.phrase_length == 0 {
        return Err(Error::InvalidInput("planted corpus sizes must be positive".into()));
    }
    let mut rng = seed::rng(seed::derive_named(config.seed, "planted"));
    let mut taken = HashSet::new();
    let neutral = fresh_words(config.neutral_vocabulary, &mut taken, &mut rng);
    let positive = fresh_words(config.planted_per_pole, &mut taken, &mut rng);
    let negative = fresh_words(config.planted_per_pole, &mut taken, &mut rng);
    let zipf = WeightedIndex::new((1..=neutral.len()).map(|r| 1.0 / r as f64)).expect("positive weights");

    let n_pos = (config.positive_fraction * config.documents as f64).round() as usize;
    let mut labels: Vec<Label> = (0..config.documents).map(|i| if i < n_pos { Label::Positive } else { Label::Negative }).collect();
    labels.shuffle(&mut rng);

    let documents = labels
        .iter()
        .enumerate()
        .map(|(i, &label)| {
            let (own, other) = match label {
                Label::Positive => (&positive, &negative),
                Label::Negative => (&negative, &positive),
            };
            let phrase_rate = config.sentiment_rate / config.phrase_length as f64;
            let mut words: Vec<&str> = Vec::with_capacity(config.tokens_per_document);
            while words.len() < config.tokens_per_document {
                if rng.gen_bool(phrase_rate) {
                    let pool = if rng.gen_bool(config.cross_rate) { other } else { own };
                    for _ in 0..config.phrase_length.min(config.tokens_per_document - words.len()) {
                        words.push(pool.choose(&mut rng).unwrap().as_str());
                    }
                } else {
                    words.push(neutral[zipf.sample(&mut rng)].as_str());
                }
            }
            Document::new(format!("planted/{i}"), words.join(" "), Some(label))
        })
        .collect();

    let mut entries = Vec::with_capacity(2 * config.lexicon_per_pole);
    for (k, (p, n)) in positive.iter().zip(&negative).take(config.lexicon_per_pole).enumerate() {
        let magnitude = 1.0 + (k % 3) as f64;
        entries.push((p.clone(), magnitude));
        entries.push((n.clone(), -magnitude));
    }
    Ok(PlantedCorpus {
        corpus: Corpus::new("planted", documents),
        lexicon: SentimentLexicon::from_entries("planted", entries)?,
        positive_words: positive,
        negative_words: negative,
        neutral_words: neutral,
    })
}

impl PlantedCorpus {
    /// Preprocess with the default pipeline and return the corpus.
    pub fn preprocessed(&self) -> Corpus {
        let mut c = self.corpus.clone();
        c.preprocess(&PreprocessConfig::default());
        c
    }

    /// Write `reviews.jsonl` and `lexicon.tsv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut jsonl = String::new();
        for d in &self.corpus.documents {
            let row = serde_json::json!({ "text": d.raw, "sentiment": d.gold.map(|l| l.to_string()) });
            let _ = writeln!(jsonl, "{row}");
        }
        let path = dir.join("reviews.jsonl");
        fs::write(&path, jsonl).map_err(|e| Error::io(&path, e))?;
        let mut tsv = String::new();
        for (w, v) in self.lexicon.entries() {
            let _ = writeln!(tsv, "{w}\t{v}");
        }
        let path = dir.join("lexicon.tsv");
        fs::write(&path, tsv).map_err(|e| Error::io(&path, e))
    }
}

/// Load a directory written by [`PlantedCorpus::write`].
pub fn load_written(dir: impl AsRef<Path>) -> Result<(Corpus, SentimentLexicon)> {
    let dir = dir.as_ref();
    let (corpus, _) = ingest::load_dataset(dir.join("reviews.jsonl"), ingest::DatasetFormat::Jsonl, &Default::default())?;
    let lexicon = crate::lexicon::load_lexicon(dir.join("lexicon.tsv"))?.lexicon;
    Ok((corpus, lexicon))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> PlantedConfig {
        PlantedConfig { documents: 50, tokens_per_document: 20, neutral_vocabulary: 30, planted_per_pole: 6, lexicon_per_pole: 2, seed: 5, ..Default::default() }
    }

    #[test]
    fn shapes_and_determinism() {
        let a = generate(&small()).unwrap();
        let b = generate(&small()).unwrap();
        assert_eq!(a.corpus, b.corpus);
        assert_eq!(a.corpus.len(), 50);
        assert_eq!(a.lexicon.len(), 4);
        assert_eq!(a.corpus.positive_fraction(), Some(0.5));
        let c = a.preprocessed();
        assert!(c.documents.iter().all(|d| d.tokens.len() == 20));
    }

    #[test]
    fn write_and_reload() {
        let dir = tempfile::tempdir().unwrap();
        let p = generate(&small()).unwrap();
        p.write(dir.path()).unwrap();
        let (c, lex) = load_written(dir.path()).unwrap();
        assert_eq!(c.gold_labels().unwrap(), p.corpus.gold_labels().unwrap());
        assert_eq!(lex.entries().collect::<Vec<_>>(), p.lexicon.entries().collect::<Vec<_>>());
    }
}
