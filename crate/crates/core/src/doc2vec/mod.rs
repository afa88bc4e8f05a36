//! Paragraph-vector embeddings (distributed memory): each word is predicted
//! from the mean of its window's word vectors and the document vector,
//! through a hierarchical softmax over a Huffman tree of the vocabulary.

mod io;
mod model;
mod train;
mod vocab;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use model::{EdgeMode, EmbeddingModel, Example, Matrix, ModelGradients};
pub use train::train;
pub use vocab::{build_vocab, Vocabulary};

/// A training document: its tag (looked up by [`EmbeddingModel::doc_vector`]) and words.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedDocument {
    pub tag: usize,
    pub words: Vec<String>,
}

impl TaggedDocument {
    /// Document from whitespace-separated text.
    pub fn new(tag: usize, text: &str) -> Self {
        TaggedDocument { tag, words: text.split_whitespace().map(String::from).collect() }
    }

    pub fn from_tokens(tag: usize, words: Vec<String>) -> Self {
        TaggedDocument { tag, words }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    /// Embedding dimension.
    pub dim: usize,
    /// Maximum context window; the effective window of every position is
    /// drawn uniformly from `1..=window`.
    pub window: usize,
    pub epochs: usize,
    pub alpha_start: f64,
    pub alpha_end: f64,
    pub min_count: usize,
    /// Frequent-word down-sampling threshold for context words; 0 disables it.
    pub subsample: f64,
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            dim: 100,
            window: 5,
            epochs: 10,
            alpha_start: 0.025,
            alpha_end: 1e-4,
            min_count: 5,
            subsample: 1e-3,
            seed: 0,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidInput(format!("training parameters: {msg}")));
        if self.dim == 0 {
            return bad("dim must be at least 1");
        }
        if self.window == 0 {
            return bad("window must be at least 1");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if !(self.alpha_start > self.alpha_end && self.alpha_end > 0.0) {
            return bad("need alpha_start > alpha_end > 0");
        }
        if !(self.subsample >= 0.0 && self.subsample.is_finite()) {
            return bad("subsample must be a finite non-negative number");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_validation() {
        assert!(TrainParams::default().validate().is_ok());
        for p in [
            TrainParams { dim: 0, ..Default::default() },
            TrainParams { window: 0, ..Default::default() },
            TrainParams { epochs: 0, ..Default::default() },
            TrainParams { alpha_end: 0.1, ..Default::default() },
            TrainParams { alpha_end: 0.0, ..Default::default() },
        ] {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }
}
