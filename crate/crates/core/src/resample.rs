//! Per-document text resampling.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Corpus;
use crate::lexicon::SentimentLexicon;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ResamplingKind {
    #[serde(rename = "none")]
    None,
    /// Bootstrap draw of the document's own words.
    #[default]
    #[serde(rename = "bword")]
    BWord,
    /// Uniform permutation of the document's words.
    #[serde(rename = "bwperm")]
    BWordPermutation,
    /// Ablation: sentiment words moved to the end of the text.
    #[serde(rename = "sorted")]
    Sorted,
}

impl FromStr for ResamplingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ResamplingKind::None),
            "bword" => Ok(ResamplingKind::BWord),
            "bwperm" | "bwordpermutation" => Ok(ResamplingKind::BWordPermutation),
            "sorted" => Ok(ResamplingKind::Sorted),
            other => Err(Error::Config(format!("unknown resampling kind {other:?}"))),
        }
    }
}

impl fmt::Display for ResamplingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResamplingKind::None => "none",
            ResamplingKind::BWord => "bword",
            ResamplingKind::BWordPermutation => "bwperm",
            ResamplingKind::Sorted => "sorted",
        })
    }
}

/// Draw `n` tokens uniformly with replacement from the `n` input tokens.
pub fn bword<R: Rng + ?Sized>(tokens: &[String], rng: &mut R) -> Vec<String> {
    let n = tokens.len();
    (0..n).map(|_| tokens[rng.gen_range(0..n)].clone()).collect()
}

/// Uniformly random permutation of the input tokens.
pub fn bwordpermutation<R: Rng + ?Sized>(tokens: &[String], rng: &mut R) -> Vec<String> {
    let mut out = tokens.to_vec();
    out.shuffle(rng);
    out
}

/// Non-sentiment tokens first in original order, then sentiment tokens
/// ordered by ascending absolute lexicon value (stable).
pub fn sorted_ablation(tokens: &[String], lexicon: &SentimentLexicon) -> Vec<String> {
    let (mut sentiment, neutral): (Vec<(f64, &String)>, Vec<(f64, &String)>) = tokens
        .iter()
        .map(|t| (lexicon.value(t).map_or(f64::NAN, f64::abs), t))
        .partition(|(v, _)| !v.is_nan());
    sentiment.sort_by(|a, b| a.0.total_cmp(&b.0));
    neutral.into_iter().chain(sentiment).map(|(_, t)| t.clone()).collect()
}

/// Resample every document's token view independently. Document `d` draws
/// from its own stream seeded by `(seed, d)`, so the result does not depend
/// on processing order. Ids, raw text and labels are preserved.
pub fn resample_corpus(corpus: &Corpus, kind: ResamplingKind, lexicon: &SentimentLexicon, seed_value: u64) -> Corpus {
    let mut out = corpus.clone();
    if kind == ResamplingKind::None {
        return out;
    }
    out.documents.par_iter_mut().for_each(|d| {
        let mut rng = seed::rng(seed::derive(seed_value, d.id as u64));
        d.tokens = match kind {
            ResamplingKind::None => unreachable!(),
            ResamplingKind::BWord => bword(&d.tokens, &mut rng),
            ResamplingKind::BWordPermutation => bwordpermutation(&d.tokens, &mut rng),
            ResamplingKind::Sorted => sorted_ablation(&d.tokens, lexicon),
        };
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Document;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    fn lexicon() -> SentimentLexicon {
        SentimentLexicon::from_entries("t", [("good", 3.0), ("bad", -1.0), ("great", 2.0)]).unwrap()
    }

    #[test]
    fn bword_small_cases() {
        let mut rng = seed::rng(1);
        assert!(bword(&[], &mut rng).is_empty());
        assert_eq!(bword(&toks(&["a"]), &mut rng), toks(&["a"]));
    }

    #[test]
    fn bword_two_tokens_is_uniform() {
        // chi-square over the four equiprobable outcomes aa, ab, ba, bb
        let input = toks(&["a", "b"]);
        let draws = 20_000;
        let mut counts = [0usize; 4];
        for s in 0..draws {
            let out = bword(&input, &mut seed::rng(s));
            let idx = (out[0] == "b") as usize * 2 + (out[1] == "b") as usize;
            counts[idx] += 1;
        }
        let expected = draws as f64 / 4.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 0.99 quantile of chi-square with 3 degrees of freedom
        assert!(chi2 < 11.345, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn permutation_small_cases() {
        let mut rng = seed::rng(3);
        assert_eq!(bwordpermutation(&toks(&["a"]), &mut rng), toks(&["a"]));
        assert_eq!(bwordpermutation(&toks(&["a", "a"]), &mut rng), toks(&["a", "a"]));
        let mut out = bwordpermutation(&toks(&["a", "b", "c"]), &mut rng);
        out.sort();
        assert_eq!(out, toks(&["a", "b", "c"]));
    }

    #[test]
    fn sorted_examples() {
        let l = lexicon();
        assert_eq!(sorted_ablation(&toks(&["good", "table"]), &l), toks(&["table", "good"]));
        assert_eq!(sorted_ablation(&toks(&["table", "chair"]), &l), toks(&["table", "chair"]));
        assert!(sorted_ablation(&[], &l).is_empty());
        assert_eq!(
            sorted_ablation(&toks(&["good", "x", "bad", "great", "y", "bad"]), &l),
            toks(&["x", "y", "bad", "bad", "great", "good"])
        );
    }

    fn corpus() -> Corpus {
        Corpus::new(
            "c",
            vec![
                Document::from_tokens(toks(&["a1", "a2", "a3", "a1"]), None),
                Document::from_tokens(toks(&["b1", "b2"]), None),
                Document::from_tokens(vec![], None),
            ],
        )
    }

    #[test]
    fn corpus_resampling() {
        let c = corpus();
        assert_eq!(resample_corpus(&c, ResamplingKind::None, &lexicon(), 5), c);
        let a = resample_corpus(&c, ResamplingKind::BWordPermutation, &lexicon(), 5);
        for (orig, res) in c.documents.iter().zip(&a.documents) {
            let (mut x, mut y) = (orig.tokens.clone(), res.tokens.clone());
            x.sort();
            y.sort();
            assert_eq!(x, y);
            assert_eq!(orig.id, res.id);
        }
        let b = resample_corpus(&c, ResamplingKind::BWord, &lexicon(), 5);
        assert_eq!(b, resample_corpus(&c, ResamplingKind::BWord, &lexicon(), 5));
    }

    #[test]
    fn documents_never_mix() {
        let c = corpus();
        for s in 0..50 {
            let r = resample_corpus(&c, ResamplingKind::BWord, &lexicon(), s);
            for (orig, res) in c.documents.iter().zip(&r.documents) {
                let vocab: HashSet<_> = orig.tokens.iter().collect();
                assert!(res.tokens.iter().all(|t| vocab.contains(t)));
            }
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("bwperm".parse::<ResamplingKind>().unwrap(), ResamplingKind::BWordPermutation);
        assert!("shuffle".parse::<ResamplingKind>().is_err());
    }

    proptest! {
        #[test]
        fn bword_preserves_length_and_vocab(words in proptest::collection::vec("[a-e]", 0..40), s in any::<u64>()) {
            let out = bword(&words, &mut seed::rng(s));
            prop_assert_eq!(out.len(), words.len());
            prop_assert!(out.iter().all(|t| words.contains(t)));
        }

        #[test]
        fn permutation_preserves_multiset(words in proptest::collection::vec("[a-e]", 0..40), s in any::<u64>()) {
            let mut out = bwordpermutation(&words, &mut seed::rng(s));
            let mut sorted = words.clone();
            out.sort();
            sorted.sort();
            prop_assert_eq!(out, sorted);
        }
    }
}
