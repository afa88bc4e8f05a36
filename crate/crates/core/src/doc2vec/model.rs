use std::collections::HashMap;

use rand::Rng;

use super::vocab::Vocabulary;
use super::{TaggedDocument, TrainParams};
use crate::error::{Error, Result};
use crate::seed;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `ln(sigmoid(x))` without overflow for large `|x|`.
#[inline]
fn ln_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Walk a word's Huffman path for a given context vector.
///
/// Adds `d ln p / d context` into `context_grad` and stores, for every
/// inner node on the path, the coefficient `g` with
/// `d ln p / d inner_node = g * context` into `node_coeffs`. Returns `ln p`
/// when `want_log` is set (0 otherwise).
pub(crate) fn hs_backward(
    context: &[f64],
    inner: &Matrix,
    path: &[usize],
    code: &[u8],
    context_grad: &mut [f64],
    node_coeffs: &mut Vec<(usize, f64)>,
    want_log: bool,
) -> f64 {
    node_coeffs.clear();
    let mut log_p = 0.0;
    for (&node, &bit) in path.iter().zip(code) {
        let row = inner.row(node);
        let x = dot(context, row);
        if want_log {
            log_p += ln_sigmoid(if bit == 0 { x } else { -x });
        }
        // d/dx ln sigmoid(+-x) = 1 - bit - sigmoid(x)
        let g = 1.0 - bit as f64 - sigmoid(x);
        axpy(context_grad, g, row);
        node_coeffs.push((node, g));
    }
    log_p
}

/// One prediction: the target word given a document and context words
/// (word ids; duplicates allowed).
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub doc_tag: usize,
    pub context: Vec<usize>,
    pub target: usize,
}

/// Whether log-likelihood evaluation counts every position (windows
/// truncated at document edges, as in training) or only positions whose
/// full `max_window` fits on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeMode {
    #[default]
    Truncated,
    Strict,
}

/// Word, document and Huffman inner-node vectors of a paragraph-vector model.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub params: TrainParams,
    pub vocab: Vocabulary,
    pub(crate) word_vectors: Matrix,
    pub(crate) doc_vectors: Matrix,
    pub(crate) inner_vectors: Matrix,
    doc_tags: Vec<usize>,
    tag_rows: HashMap<usize, usize>,
}

/// Gradients of a loss with respect to every model parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGradients {
    pub words: Matrix,
    pub docs: Matrix,
    pub inner: Matrix,
}

impl EmbeddingModel {
    /// Freshly initialized model: word and document vectors uniform in
    /// `[-0.5/dim, 0.5/dim]`, inner-node vectors zero.
    pub fn new(vocab: Vocabulary, doc_tags: Vec<usize>, params: TrainParams) -> Result<Self> {
        params.validate()?;
        if !vocab.has_huffman() {
            return Err(Error::InvalidInput("vocabulary has no Huffman coding".into()));
        }
        let mut tag_rows = HashMap::with_capacity(doc_tags.len());
        for (row, &tag) in doc_tags.iter().enumerate() {
            if tag_rows.insert(tag, row).is_some() {
                return Err(Error::InvalidInput(format!("duplicate document tag {tag}")));
            }
        }
        let dim = params.dim;
        let mut rng = seed::rng(seed::derive_named(params.seed, "init"));
        let bound = 0.5 / dim as f64;
        let mut uniform = |rows: usize| {
            let data = (0..rows * dim).map(|_| rng.gen_range(-bound..bound)).collect();
            Matrix::from_vec(rows, dim, data).expect("shape matches")
        };
        let word_vectors = uniform(vocab.len());
        let doc_vectors = uniform(doc_tags.len());
        let inner_vectors = Matrix::zeros(vocab.len() - 1, dim);
        Ok(EmbeddingModel { params, vocab, word_vectors, doc_vectors, inner_vectors, doc_tags, tag_rows })
    }

    pub(crate) fn from_parts(
        params: TrainParams,
        vocab: Vocabulary,
        word_vectors: Matrix,
        doc_vectors: Matrix,
        inner_vectors: Matrix,
        doc_tags: Vec<usize>,
    ) -> Result<Self> {
        let tag_rows = doc_tags.iter().enumerate().map(|(r, &t)| (t, r)).collect();
        let model = EmbeddingModel { params, vocab, word_vectors, doc_vectors, inner_vectors, doc_tags, tag_rows };
        let dim = model.params.dim;
        let shapes = [
            (model.word_vectors.rows(), model.vocab.len()),
            (model.doc_vectors.rows(), model.doc_tags.len()),
            (model.inner_vectors.rows(), model.vocab.len() - 1),
        ];
        for (found, expected) in shapes {
            if found != expected {
                return Err(Error::LengthMismatch { expected, found });
            }
        }
        for m in [&model.word_vectors, &model.doc_vectors, &model.inner_vectors] {
            if m.cols() != dim {
                return Err(Error::LengthMismatch { expected: dim, found: m.cols() });
            }
        }
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.params.dim
    }

    pub fn doc_tags(&self) -> &[usize] {
        &self.doc_tags
    }

    pub fn doc_row(&self, tag: usize) -> Result<usize> {
        self.tag_rows.get(&tag).copied().ok_or(Error::UnknownDocument(tag))
    }

    /// Trained vector of the document with this tag.
    pub fn doc_vector(&self, tag: usize) -> Result<&[f64]> {
        Ok(self.doc_vectors.row(self.doc_row(tag)?))
    }

    pub fn word_vector(&self, word: &str) -> Result<&[f64]> {
        let i = self.word_index(word)?;
        Ok(self.word_vectors.row(i))
    }

    fn word_index(&self, word: &str) -> Result<usize> {
        self.vocab.index_of(word).ok_or_else(|| Error::OutOfVocabulary(word.to_string()))
    }

    pub fn word_vectors(&self) -> &Matrix {
        &self.word_vectors
    }

    pub fn doc_vectors(&self) -> &Matrix {
        &self.doc_vectors
    }

    pub fn inner_vectors(&self) -> &Matrix {
        &self.inner_vectors
    }

    pub fn word_vectors_mut(&mut self) -> &mut Matrix {
        &mut self.word_vectors
    }

    pub fn doc_vectors_mut(&mut self) -> &mut Matrix {
        &mut self.doc_vectors
    }

    pub fn inner_vectors_mut(&mut self) -> &mut Matrix {
        &mut self.inner_vectors
    }

    pub fn is_finite(&self) -> bool {
        self.word_vectors.is_finite() && self.doc_vectors.is_finite() && self.inner_vectors.is_finite()
    }

    /// Hierarchical-softmax probability of `target` given a context vector:
    /// the product of `sigmoid(+-<inner, context>)` along the word's path.
    pub fn hs_probability(&self, context: &[f64], target: &str) -> Result<f64> {
        let w = self.word_index(target)?;
        Ok(self.hs_probability_id(context, w))
    }

    pub fn hs_probability_id(&self, context: &[f64], word: usize) -> f64 {
        self.vocab
            .path(word)
            .iter()
            .zip(self.vocab.code(word))
            .map(|(&node, &bit)| {
                let x = dot(context, self.inner_vectors.row(node));
                if bit == 0 { sigmoid(x) } else { sigmoid(-x) }
            })
            .product()
    }

    /// Mean of the document vector and the context word vectors.
    pub fn context_vector(&self, doc_row: usize, context: &[usize]) -> Vec<f64> {
        let mut out = self.doc_vectors.row(doc_row).to_vec();
        for &w in context {
            axpy(&mut out, 1.0, self.word_vectors.row(w));
        }
        let inv = 1.0 / (context.len() + 1) as f64;
        out.iter_mut().for_each(|v| *v *= inv);
        out
    }

    /// Negative log-likelihood summed over the examples, computed from
    /// [`hs_probability_id`](Self::hs_probability_id).
    pub fn objective(&self, examples: &[Example]) -> Result<f64> {
        let mut loss = 0.0;
        for ex in examples {
            let ctx = self.context_vector(self.doc_row(ex.doc_tag)?, &ex.context);
            loss -= self.hs_probability_id(&ctx, ex.target).ln();
        }
        Ok(loss)
    }

    /// Analytic gradient of [`objective`](Self::objective) with respect to
    /// all word, document and inner-node vectors. Uses the same kernel as
    /// the training step.
    pub fn objective_gradients(&self, examples: &[Example]) -> Result<ModelGradients> {
        let dim = self.dim();
        let mut grads = ModelGradients {
            words: Matrix::zeros(self.word_vectors.rows(), dim),
            docs: Matrix::zeros(self.doc_vectors.rows(), dim),
            inner: Matrix::zeros(self.inner_vectors.rows(), dim),
        };
        let mut ctx_grad = vec![0.0; dim];
        let mut coeffs = Vec::new();
        for ex in examples {
            let row = self.doc_row(ex.doc_tag)?;
            let ctx = self.context_vector(row, &ex.context);
            ctx_grad.iter_mut().for_each(|v| *v = 0.0);
            let w = ex.target;
            hs_backward(&ctx, &self.inner_vectors, self.vocab.path(w), self.vocab.code(w), &mut ctx_grad, &mut coeffs, false);
            // loss = -ln p
            for &(node, g) in &coeffs {
                axpy(grads.inner.row_mut(node), -g, &ctx);
            }
            let share = -1.0 / (ex.context.len() + 1) as f64;
            axpy(grads.docs.row_mut(row), share, &ctx_grad);
            for &c in &ex.context {
                axpy(grads.words.row_mut(c), share, &ctx_grad);
            }
        }
        Ok(grads)
    }

    /// Sum of `ln p(word | window, document)` over documents and positions.
    ///
    /// Window sizes are drawn uniformly from `1..=max_window` with a
    /// generator seeded by `eval_seed`; nothing is updated and no context
    /// down-sampling is applied. Out-of-vocabulary tokens are skipped.
    pub fn log_likelihood(&self, docs: &[TaggedDocument], eval_seed: u64, edges: EdgeMode) -> Result<f64> {
        let mut rng = seed::rng(eval_seed);
        let k_max = self.params.window;
        let mut total = 0.0;
        let mut context = Vec::new();
        for doc in docs {
            let row = self.doc_row(doc.tag)?;
            let ids: Vec<usize> = doc.words.iter().filter_map(|w| self.vocab.index_of(w)).collect();
            let n = ids.len();
            for pos in 0..n {
                let k = rng.gen_range(1..=k_max);
                if edges == EdgeMode::Strict && (pos < k_max || pos + k_max >= n) {
                    continue;
                }
                context.clear();
                let lo = pos.saturating_sub(k);
                let hi = (pos + k + 1).min(n);
                context.extend((lo..hi).filter(|&j| j != pos).map(|j| ids[j]));
                let ctx = self.context_vector(row, &context);
                let w = ids[pos];
                let mut log_p = 0.0;
                for (&node, &bit) in self.vocab.path(w).iter().zip(self.vocab.code(w)) {
                    let x = dot(&ctx, self.inner_vectors.row(node));
                    log_p += ln_sigmoid(if bit == 0 { x } else { -x });
                }
                total += log_p;
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc2vec::build_vocab;

    fn params(dim: usize) -> TrainParams {
        TrainParams { dim, window: 2, epochs: 1, min_count: 1, subsample: 0.0, ..TrainParams::default() }
    }

    fn tiny_model(dim: usize) -> (EmbeddingModel, Vec<TaggedDocument>) {
        let docs = vec![
            TaggedDocument::new(0, "a b c a d"),
            TaggedDocument::new(1, "e f a b"),
        ];
        let mut v = build_vocab(docs.iter().map(|d| &d.words), 1).unwrap();
        v.build_huffman().unwrap();
        (EmbeddingModel::new(v, vec![0, 1], params(dim)).unwrap(), docs)
    }

    #[test]
    fn zero_inner_vectors_give_power_of_two() {
        let (model, _) = tiny_model(3);
        let ctx = [0.3, -1.0, 2.0];
        for (i, w) in model.vocab.words().iter().enumerate() {
            let p = model.hs_probability(&ctx, w).unwrap();
            assert_eq!(p, 0.5f64.powi(model.vocab.code(i).len() as i32));
        }
        assert!(matches!(model.hs_probability(&ctx, "zzz"), Err(Error::OutOfVocabulary(_))));
    }

    #[test]
    fn zero_model_likelihood() {
        let (model, docs) = tiny_model(4);
        let ll = model.log_likelihood(&docs, 1, EdgeMode::Truncated).unwrap();
        let expected: f64 = docs
            .iter()
            .flat_map(|d| d.words.iter())
            .map(|w| -(model.vocab.code(model.vocab.index_of(w).unwrap()).len() as f64) * std::f64::consts::LN_2)
            .sum();
        assert!((ll - expected).abs() < 1e-12);
        let strict = model.log_likelihood(&docs, 1, EdgeMode::Strict).unwrap();
        // window 2: only position 2 of the 5-token document has a full window
        let c = model.vocab.index_of("c").unwrap();
        assert!((strict + model.vocab.code(c).len() as f64 * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn doc_lookup() {
        let (model, _) = tiny_model(2);
        assert!(model.doc_vector(0).unwrap().iter().all(|v| v.is_finite()));
        assert!(matches!(model.doc_vector(7), Err(Error::UnknownDocument(7))));
        for v in model.word_vectors().as_slice() {
            assert!(v.abs() <= 0.25);
        }
    }

    #[test]
    fn duplicate_tags_rejected() {
        let (model, _) = tiny_model(2);
        assert!(EmbeddingModel::new(model.vocab.clone(), vec![3, 3], params(2)).is_err());
    }

    #[test]
    fn log_sigmoid_is_stable() {
        assert!((ln_sigmoid(0.0) + std::f64::consts::LN_2).abs() < 1e-15);
        assert!(ln_sigmoid(800.0).abs() < 1e-300);
        assert!((ln_sigmoid(-800.0) + 800.0).abs() < 1e-9);
    }
}
