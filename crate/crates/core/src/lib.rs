//! Unsupervised sentiment classification with lexicon-anchored, bagged
//! paragraph-vector embeddings, plus a lexicon counting baseline.

pub mod bagging;
pub mod cli;
pub mod doc2vec;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod lbte;
pub mod lexicon;
pub mod resample;
pub mod seed;
pub mod synthetic;

pub use error::{Error, ErrorCategory, Result};
