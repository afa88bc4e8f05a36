use rand::Rng;

use super::model::{axpy, hs_backward, EmbeddingModel};
use super::vocab::build_vocab;
use super::{TaggedDocument, TrainParams};
use crate::error::{Error, Result};
use crate::seed;

/// Build the vocabulary over `docs`, initialize a model and train it.
pub fn train(docs: &[TaggedDocument], params: &TrainParams) -> Result<EmbeddingModel> {
    params.validate()?;
    if docs.is_empty() {
        return Err(Error::EmptyCorpus(String::new()));
    }
    let mut vocab = build_vocab(docs.iter().map(|d| &d.words), params.min_count)?;
    vocab.build_huffman()?;
    vocab.set_subsampling(params.subsample);
    let tags = docs.iter().map(|d| d.tag).collect();
    let mut model = EmbeddingModel::new(vocab, tags, params.clone())?;
    model.train_epochs(docs)?;
    Ok(model)
}

impl EmbeddingModel {
    /// Run `params.epochs` passes of SGD over `docs` (in order).
    ///
    /// Frequent words are subsampled out of each document per epoch. Each
    /// remaining position draws its window size from `1..=window`; windows
    /// are truncated at document edges. The learning rate decays linearly
    /// from `alpha_start` to `alpha_end` over all input positions. Single
    /// threaded and deterministic for a fixed `params.seed`.
    pub fn train_epochs(&mut self, docs: &[TaggedDocument]) -> Result<()> {
        let encoded: Vec<(usize, Vec<usize>)> = docs
            .iter()
            .map(|d| {
                let row = self.doc_row(d.tag)?;
                Ok((row, d.words.iter().filter_map(|w| self.vocab.index_of(w)).collect()))
            })
            .collect::<Result<_>>()?;
        let params = self.params.clone();
        let positions: usize = encoded.iter().map(|(_, ids)| ids.len()).sum();
        let total_updates = (params.epochs * positions).max(1) as f64;
        let mut rng = seed::rng(seed::derive_named(params.seed, "train"));

        let dim = params.dim;
        let mut context = Vec::new();
        let mut ctx = vec![0.0; dim];
        let mut ctx_grad = vec![0.0; dim];
        let mut coeffs = Vec::new();
        let mut kept = Vec::new();
        let mut done = 0usize;

        for _ in 0..params.epochs {
            for (row, ids) in &encoded {
                // frequent words are dropped from the sequence before windowing
                kept.clear();
                for &w in ids {
                    let keep = self.vocab.keep_probability(w);
                    if keep >= 1.0 || rng.gen::<f64>() < keep {
                        kept.push(w);
                    }
                }
                let alpha_before = done;
                done += ids.len();
                let n = kept.len();
                for pos in 0..n {
                    let progress = alpha_before as f64 + (pos as f64 / n as f64) * ids.len() as f64;
                    let alpha = params.alpha_start - (params.alpha_start - params.alpha_end) * (progress / total_updates);
                    let k = rng.gen_range(1..=params.window);
                    context.clear();
                    context.extend((pos.saturating_sub(k)..(pos + k + 1).min(n)).filter(|&j| j != pos).map(|j| kept[j]));

                    let inv_count = 1.0 / (context.len() + 1) as f64;
                    ctx.copy_from_slice(self.doc_vectors.row(*row));
                    for &w in &context {
                        axpy(&mut ctx, 1.0, self.word_vectors.row(w));
                    }
                    ctx.iter_mut().for_each(|v| *v *= inv_count);
                    ctx_grad.iter_mut().for_each(|v| *v = 0.0);

                    let target = kept[pos];
                    hs_backward(
                        &ctx,
                        &self.inner_vectors,
                        self.vocab.path(target),
                        self.vocab.code(target),
                        &mut ctx_grad,
                        &mut coeffs,
                        false,
                    );
                    for &(node, g) in &coeffs {
                        axpy(self.inner_vectors.row_mut(node), alpha * g, &ctx);
                    }
                    // the context vector is a mean, so each member gets 1/count of its gradient
                    let step = alpha;
                    axpy(self.doc_vectors.row_mut(*row), step, &ctx_grad);
                    for &w in &context {
                        axpy(self.word_vectors.row_mut(w), step, &ctx_grad);
                    }
                }
            }
        }
        if !self.is_finite() {
            return Err(Error::Numeric("training produced non-finite vectors".into()));
        }
        Ok(())
    }
}
