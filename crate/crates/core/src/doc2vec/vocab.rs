use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use indexmap::IndexMap;

use crate::error::{Error, Result};

/// Retained words with their counts and Huffman coding.
///
/// Words are ordered by descending count; equal counts keep first-occurrence
/// order. A word's index in this order is its leaf id in the Huffman tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    min_count: usize,
    subsample_threshold: f64,
    keep_probability: Vec<f64>,
    codes: Vec<Vec<u8>>,
    paths: Vec<Vec<usize>>,
}

impl Vocabulary {
    /// Vocabulary from explicit `(word, count)` pairs, sorted by descending
    /// count with ties in the given order. Huffman coding is not built yet.
    pub fn from_counts<I, S>(counts: I, min_count: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut pairs: Vec<(String, u64)> = counts
            .into_iter()
            .map(|(w, c)| (w.into(), c))
            .filter(|(_, c)| *c >= min_count as u64 && *c > 0)
            .collect();
        if pairs.is_empty() {
            return Err(Error::EmptyVocabulary { min_count });
        }
        pairs.sort_by_key(|(_, c)| Reverse(*c));
        let index = pairs.iter().enumerate().map(|(i, (w, _))| (w.clone(), i)).collect();
        let (words, counts): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let n = words.len();
        Ok(Vocabulary {
            words,
            counts,
            index,
            min_count,
            subsample_threshold: 0.0,
            keep_probability: vec![1.0; n],
            codes: Vec::new(),
            paths: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.index.get(word).map(|&i| self.counts[i])
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn min_count(&self) -> usize {
        self.min_count
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn code(&self, word: usize) -> &[u8] {
        &self.codes[word]
    }

    /// Inner-node ids from the root down to the word's parent.
    pub fn path(&self, word: usize) -> &[usize] {
        &self.paths[word]
    }

    pub fn has_huffman(&self) -> bool {
        self.codes.len() == self.words.len()
    }

    /// Probability of keeping a word as context under frequent-word
    /// down-sampling. 1 when down-sampling is off.
    pub fn keep_probability(&self, word: usize) -> f64 {
        self.keep_probability[word]
    }

    pub fn subsample_threshold(&self) -> f64 {
        self.subsample_threshold
    }

    /// Configure frequent-word down-sampling. A word with corpus frequency
    /// `f` is kept with probability `(sqrt(f/t) + 1) * t/f`, capped at 1.
    /// `threshold = 0` disables down-sampling.
    pub fn set_subsampling(&mut self, threshold: f64) {
        self.subsample_threshold = threshold;
        let total = self.total_count() as f64;
        self.keep_probability = self
            .counts
            .iter()
            .map(|&c| {
                if threshold <= 0.0 {
                    return 1.0;
                }
                let scaled = threshold * total;
                let c = c as f64;
                (((c / scaled).sqrt() + 1.0) * scaled / c).min(1.0)
            })
            .collect();
    }

    /// Build the binary Huffman tree over word counts and fill codes and
    /// paths. Ties are broken by (count, insertion order): leaves in
    /// vocabulary order, then inner nodes in creation order. The first node
    /// popped becomes the 0 branch.
    pub fn build_huffman(&mut self) -> Result<()> {
        let n = self.words.len();
        if n < 2 {
            return Err(Error::VocabularyTooSmall(n));
        }
        // nodes 0..n are leaves, n..2n-1 inner nodes (inner id = node - n)
        let mut parent = vec![0usize; 2 * n - 1];
        let mut bit = vec![0u8; 2 * n - 1];
        let mut heap: BinaryHeap<Reverse<(u64, usize)>> =
            self.counts.iter().enumerate().map(|(i, &c)| Reverse((c, i))).collect();
        for created in 0..n - 1 {
            let Reverse((c0, a)) = heap.pop().expect("heap holds at least two nodes");
            let Reverse((c1, b)) = heap.pop().expect("heap holds at least two nodes");
            let node = n + created;
            parent[a] = node;
            parent[b] = node;
            bit[a] = 0;
            bit[b] = 1;
            heap.push(Reverse((c0 + c1, node)));
        }
        let root = 2 * n - 2;
        self.codes = Vec::with_capacity(n);
        self.paths = Vec::with_capacity(n);
        for leaf in 0..n {
            let mut code = Vec::new();
            let mut path = Vec::new();
            let mut node = leaf;
            while node != root {
                code.push(bit[node]);
                node = parent[node];
                path.push(node - n);
            }
            code.reverse();
            path.reverse();
            self.codes.push(code);
            self.paths.push(path);
        }
        Ok(())
    }
}

/// Count tokens across documents, drop words below `min_count`.
pub fn build_vocab<'a, I, D>(documents: I, min_count: usize) -> Result<Vocabulary>
where
    I: IntoIterator<Item = D>,
    D: IntoIterator<Item = &'a String>,
{
    let mut counts: IndexMap<&str, u64> = IndexMap::new();
    for doc in documents {
        for token in doc {
            *counts.entry(token.as_str()).or_insert(0) += 1;
        }
    }
    Vocabulary::from_counts(counts, min_count)
}
