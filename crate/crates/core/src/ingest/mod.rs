//! Dataset loading, preprocessing and corpus handling.

mod dataset;
mod preprocess;
pub mod stem;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

pub use dataset::{load_dataset, DatasetFormat, LoadOptions, LoadReport};
pub use preprocess::{
    merge_negations, parse_word_list, preprocess, preprocess_baseline, remove_stopwords, tokenize,
    PreprocessConfig, DEFAULT_AMPLIFIERS, DEFAULT_NEGATIONS, NEGATION_PREFIX,
};
pub use stem::stem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn flipped(self) -> Label {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" | "pos" => Ok(Label::Positive),
            "negative" | "neg" => Ok(Label::Negative),
            other => Err(Error::InvalidInput(format!("unknown label {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    /// Dense index within its corpus.
    pub id: usize,
    /// Where the document came from (file path or row number), kept for exports.
    pub source: String,
    pub raw: String,
    /// Negation-merged tokens, consumed by the embedding method.
    pub tokens: Vec<String>,
    /// Tokens with negations kept separate, consumed by the counting baseline.
    pub baseline_tokens: Vec<String>,
    pub gold: Option<Label>,
    pub lexicon_score: f64,
}

impl Document {
    pub fn new(source: impl Into<String>, raw: impl Into<String>, gold: Option<Label>) -> Self {
        Document {
            id: 0,
            source: source.into(),
            raw: raw.into(),
            tokens: Vec::new(),
            baseline_tokens: Vec::new(),
            gold,
            lexicon_score: 0.0,
        }
    }

    /// Document already given as tokens; both token views are set to `tokens`.
    pub fn from_tokens(tokens: Vec<String>, gold: Option<Label>) -> Self {
        let raw = tokens.join(" ");
        Document {
            baseline_tokens: tokens.clone(),
            tokens,
            ..Document::new(String::new(), raw, gold)
        }
    }

    /// Flag for documents left without tokens after preprocessing.
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    pub name: String,
    pub documents: Vec<Document>,
}

impl Corpus {
    /// Build a corpus, renumbering document ids densely in the given order.
    pub fn new(name: impl Into<String>, mut documents: Vec<Document>) -> Self {
        for (i, d) in documents.iter_mut().enumerate() {
            d.id = i;
        }
        Corpus {
            name: name.into(),
            documents,
        }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn preprocess(&mut self, config: &PreprocessConfig) {
        self.documents.par_iter_mut().for_each(|d| {
            d.tokens = preprocess(&d.raw, config);
            d.baseline_tokens = preprocess_baseline(&d.raw, config);
        });
    }

    pub fn empty_document_count(&self) -> usize {
        self.documents.iter().filter(|d| d.is_empty()).count()
    }

    /// Gold labels in corpus order, or an error naming the first unlabeled document.
    pub fn gold_labels(&self) -> Result<Vec<Label>> {
        self.documents
            .iter()
            .map(|d| {
                d.gold
                    .ok_or_else(|| Error::InvalidInput(format!("document {} has no gold label", d.id)))
            })
            .collect()
    }

    /// Fraction of gold-labeled documents that are positive.
    pub fn positive_fraction(&self) -> Option<f64> {
        let labeled: Vec<Label> = self.documents.iter().filter_map(|d| d.gold).collect();
        if labeled.is_empty() {
            return None;
        }
        let positive = labeled.iter().filter(|&&l| l == Label::Positive).count();
        Some(positive as f64 / labeled.len() as f64)
    }

    /// New corpus holding the documents at `ids` (in that order), ids re-densified.
    pub fn select(&self, ids: &[usize]) -> Corpus {
        Corpus::new(
            self.name.clone(),
            ids.iter().map(|&i| self.documents[i].clone()).collect(),
        )
    }
}

/// Result of a train/test split. `train_ids`/`test_ids` map the new dense
/// ids back to ids of the source corpus.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Corpus,
    pub test: Corpus,
    pub train_ids: Vec<usize>,
    pub test_ids: Vec<usize>,
}

/// Stratified, seeded split. Each label class (and the unlabeled group)
/// contributes `round(fraction * class size)` documents to the train side.
pub fn split_train_test(corpus: &Corpus, fraction: f64, seed_value: u64) -> Result<Split> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "split fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let mut rng = seed::rng(seed::derive_named(seed_value, "split"));
    let mut train_ids = Vec::new();
    let mut test_ids = Vec::new();
    for class in [Some(Label::Positive), Some(Label::Negative), None] {
        let mut ids: Vec<usize> = corpus
            .documents
            .iter()
            .filter(|d| d.gold == class)
            .map(|d| d.id)
            .collect();
        ids.shuffle(&mut rng);
        let n_train = (fraction * ids.len() as f64).round() as usize;
        test_ids.extend_from_slice(&ids[n_train..]);
        ids.truncate(n_train);
        train_ids.extend(ids);
    }
    train_ids.sort_unstable();
    test_ids.sort_unstable();
    Ok(Split {
        train: corpus.select(&train_ids),
        test: corpus.select(&test_ids),
        train_ids,
        test_ids,
    })
}
