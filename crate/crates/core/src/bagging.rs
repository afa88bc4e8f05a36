//! Grid-bagged lexicon-based text embeddings.
//!
//! For every cell of an (epochs, window, dim) grid the corpus is resampled,
//! ordered by absolute lexicon score, extended with the two lexicon halves as
//! pseudo-documents, and used to train one embedding model. The per-document
//! diff values of all cells are averaged into the final classifier.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::doc2vec::{self, EmbeddingModel, TaggedDocument, TrainParams};
use crate::error::{Error, Result};
use crate::ingest::{Corpus, Label};
use crate::lbte::{diff_from_vectors, diff_vector, DiffVector};
use crate::lexicon::{augment_negations, count_score, halves, LexiconHalves, SentimentLexicon};
use crate::resample::{resample_corpus, ResamplingKind};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    #[serde(deserialize_with = "one_or_many")]
    pub epochs: Vec<usize>,
    #[serde(deserialize_with = "one_or_many")]
    pub windows: Vec<usize>,
    #[serde(deserialize_with = "one_or_many")]
    pub dims: Vec<usize>,
}

/// Accept a bare value where a list is expected.
fn one_or_many<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<usize>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(usize),
        Many(Vec<usize>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

impl Default for GridSpec {
    /// The 3 x 3 x 4 grid, 36 cells.
    fn default() -> Self {
        GridSpec { epochs: vec![5, 10, 15], windows: vec![5, 10, 15], dims: vec![50, 100, 150, 200] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCell {
    pub index: usize,
    pub epochs: usize,
    pub window: usize,
    pub dim: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, set) in [("epochs", &self.epochs), ("windows", &self.windows), ("dims", &self.dims)] {
            if set.is_empty() {
                return Err(Error::Config(format!("grid.{name} must not be empty")));
            }
            if set.contains(&0) {
                return Err(Error::Config(format!("grid.{name} values must be positive")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.epochs.len() * self.windows.len() * self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cells with epochs varying slowest and dims fastest.
    pub fn cells(&self) -> Vec<GridCell> {
        let mut out = Vec::with_capacity(self.len());
        for &epochs in &self.epochs {
            for &window in &self.windows {
                for &dim in &self.dims {
                    out.push(GridCell { index: out.len(), epochs, window, dim });
                }
            }
        }
        out
    }
}

/// How the embeddings of the two lexicon halves are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum HalfEmbedding {
    /// Halves trained jointly with the corpus as two extra documents.
    #[default]
    PseudoDocuments,
    /// Mean of the trained word vectors of each half's in-vocabulary words.
    WordMean,
}

/// Training hyperparameters that the grid does not set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainDefaults {
    pub alpha_start: f64,
    pub alpha_end: f64,
    /// `None` picks 5, or 1 for corpora under 2,000 documents.
    pub min_count: Option<usize>,
    pub subsample: f64,
}

impl Default for TrainDefaults {
    fn default() -> Self {
        TrainDefaults { alpha_start: 0.025, alpha_end: 1e-4, min_count: None, subsample: 1e-3 }
    }
}

impl TrainDefaults {
    pub fn min_count_for(&self, documents: usize) -> usize {
        self.min_count.unwrap_or(if documents < 2000 { 1 } else { 5 })
    }

    pub fn params(&self, cell: &GridCell, documents: usize, seed: u64) -> TrainParams {
        TrainParams {
            dim: cell.dim,
            window: cell.window,
            epochs: cell.epochs,
            alpha_start: self.alpha_start,
            alpha_end: self.alpha_end,
            min_count: self.min_count_for(documents),
            subsample: self.subsample,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaggingConfig {
    pub grid: GridSpec,
    pub resampling: ResamplingKind,
    pub train: TrainDefaults,
    pub half_embedding: HalfEmbedding,
    pub amplifiers: Vec<String>,
    pub negations: Vec<String>,
}

impl Default for BaggingConfig {
    fn default() -> Self {
        use crate::ingest::{DEFAULT_AMPLIFIERS, DEFAULT_NEGATIONS};
        BaggingConfig {
            grid: GridSpec::default(),
            resampling: ResamplingKind::BWord,
            train: TrainDefaults::default(),
            half_embedding: HalfEmbedding::PseudoDocuments,
            amplifiers: DEFAULT_AMPLIFIERS.iter().map(|s| s.to_string()).collect(),
            negations: DEFAULT_NEGATIONS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierSource {
    Lex2Sent,
    Counting,
}

impl fmt::Display for ClassifierSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassifierSource::Lex2Sent => "lex2sent",
            ClassifierSource::Counting => "counting",
        })
    }
}

/// One real score per document; higher means more positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierVector {
    pub values: Vec<f64>,
    pub source: ClassifierSource,
}

/// Produces the diff vector of one grid cell.
pub trait CellScorer: Sync {
    fn score(&self, corpus: &Corpus, cell: &GridCell, seed: u64) -> Result<DiffVector>;
}

/// Bookkeeping for one executed cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRecord {
    pub cell: GridCell,
    pub seed: u64,
    pub wall_ms: f64,
    pub degenerate: usize,
}

#[derive(Debug, Clone)]
pub struct BaggingOutcome {
    pub classifier: ClassifierVector,
    pub cells: Vec<CellRecord>,
    pub diffs: Vec<DiffVector>,
}

/// Componentwise mean of the cells' diff values, summed in cell order.
pub fn mean_diff(cells: &[DiffVector]) -> Result<Vec<f64>> {
    let first = cells.first().ok_or_else(|| Error::InvalidInput("no diff vectors to average".into()))?;
    let n = first.len();
    let mut sum = vec![0.0; n];
    for cell in cells {
        if cell.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: cell.len() });
        }
        for (s, v) in sum.iter_mut().zip(&cell.values) {
            *s += v;
        }
    }
    let b = cells.len() as f64;
    Ok(sum.into_iter().map(|s| s / b).collect())
}

/// Execute every grid cell with `scorer` and average the diff vectors.
/// Cell `i` gets seed `derive(master_seed, i)`. Any failed cell fails the run.
pub fn run_bagging(corpus: &Corpus, grid: &GridSpec, scorer: &dyn CellScorer, master_seed: u64) -> Result<BaggingOutcome> {
    grid.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus(String::new()));
    }
    let results: Vec<(DiffVector, CellRecord)> = grid
        .cells()
        .par_iter()
        .map(|cell| {
            let cell_seed = seed::derive(master_seed, cell.index as u64);
            let start = Instant::now();
            let diff = scorer.score(corpus, cell, cell_seed)?;
            if diff.len() != corpus.len() {
                return Err(Error::LengthMismatch { expected: corpus.len(), found: diff.len() });
            }
            if diff.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numeric(format!("cell {} produced non-finite diff values", cell.index)));
            }
            let record = CellRecord {
                cell: *cell,
                seed: cell_seed,
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
                degenerate: diff.degenerate,
            };
            Ok((diff, record))
        })
        .collect::<Result<_>>()?;
    let (diffs, cells): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let values = mean_diff(&diffs)?;
    Ok(BaggingOutcome { classifier: ClassifierVector { values, source: ClassifierSource::Lex2Sent }, cells, diffs })
}

/// Training documents for one cell: corpus documents (tagged by id) ordered
/// by ascending absolute lexicon score, stable, followed by the positive and
/// negative half as pseudo-documents tagged `D` and `D + 1` when `halves` is given.
pub fn training_documents(
    resampled: &Corpus,
    lexicon: &SentimentLexicon,
    amplifiers: &[String],
    negations: &[String],
    halves: Option<&LexiconHalves>,
) -> Vec<TaggedDocument> {
    let mut keyed: Vec<(f64, &crate::ingest::Document)> = resampled
        .documents
        .iter()
        .map(|d| (count_score(&d.tokens, lexicon, amplifiers, negations).abs(), d))
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut docs: Vec<TaggedDocument> =
        keyed.into_iter().map(|(_, d)| TaggedDocument::from_tokens(d.id, d.tokens.clone())).collect();
    if let Some(h) = halves {
        let n = resampled.len();
        docs.push(TaggedDocument::from_tokens(n, h.positive.clone()));
        docs.push(TaggedDocument::from_tokens(n + 1, h.negative.clone()));
    }
    docs
}

/// The embedding-based cell scorer.
pub struct EmbeddingScorer {
    /// Lexicon in token space, extended with merged-negation entries.
    lexicon: SentimentLexicon,
    halves: LexiconHalves,
    config: BaggingConfig,
}

impl EmbeddingScorer {
    /// `lexicon` must already be in the corpus token space (stemmed when the
    /// corpus is stemmed).
    pub fn new(lexicon: &SentimentLexicon, config: BaggingConfig) -> Result<Self> {
        let halves = augment_negations(&halves(lexicon)?);
        Ok(EmbeddingScorer { lexicon: lexicon.with_merged_negations(), halves, config })
    }

    pub fn halves(&self) -> &LexiconHalves {
        &self.halves
    }

    fn half_mean(model: &EmbeddingModel, words: &[String]) -> Vec<f64> {
        let mut mean = vec![0.0; model.dim()];
        let mut n = 0usize;
        for w in words {
            if let Ok(v) = model.word_vector(w) {
                mean.iter_mut().zip(v).for_each(|(m, x)| *m += x);
                n += 1;
            }
        }
        if n > 0 {
            mean.iter_mut().for_each(|m| *m /= n as f64);
        }
        mean
    }
}

impl CellScorer for EmbeddingScorer {
    fn score(&self, corpus: &Corpus, cell: &GridCell, cell_seed: u64) -> Result<DiffVector> {
        let cfg = &self.config;
        let resampled = resample_corpus(corpus, cfg.resampling, &self.lexicon, seed::derive_named(cell_seed, "resample"));
        let pseudo = cfg.half_embedding == HalfEmbedding::PseudoDocuments;
        let docs = training_documents(&resampled, &self.lexicon, &cfg.amplifiers, &cfg.negations, pseudo.then_some(&self.halves));
        let params = cfg.train.params(cell, corpus.len(), seed::derive_named(cell_seed, "train"));
        let model = doc2vec::train(&docs, &params)?;
        let n = corpus.len();
        let ids: Vec<usize> = (0..n).collect();
        let mut diff = match cfg.half_embedding {
            HalfEmbedding::PseudoDocuments => diff_vector(&model, &ids, n, n + 1, cell.index)?,
            HalfEmbedding::WordMean => {
                let positive = Self::half_mean(&model, &self.halves.positive);
                let negative = Self::half_mean(&model, &self.halves.negative);
                let vectors = ids.iter().map(|&t| model.doc_vector(t)).collect::<Result<Vec<_>>>()?;
                diff_from_vectors(vectors, &positive, &negative, cell.index)
            }
        };
        // untrained vectors of empty documents carry no information
        for (v, d) in diff.values.iter_mut().zip(&corpus.documents) {
            if d.tokens.is_empty() {
                *v = 0.0;
            }
        }
        Ok(diff)
    }
}

/// Bagged embedding classifier over the configured grid.
pub fn run_lex2sent(corpus: &Corpus, lexicon: &SentimentLexicon, config: &BaggingConfig, master_seed: u64) -> Result<BaggingOutcome> {
    let scorer = EmbeddingScorer::new(lexicon, config.clone())?;
    run_bagging(corpus, &config.grid, &scorer, master_seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    /// Fixed threshold 0; usable without labels.
    #[default]
    Zero,
    /// Empirical quantile at the true negative proportion.
    Proportion,
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" | "0" | "fixed" => Ok(ThresholdMode::Zero),
            "proportion" => Ok(ThresholdMode::Proportion),
            other => Err(Error::Config(format!("unknown threshold mode {other:?}"))),
        }
    }
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdMode::Zero => "zero",
            ThresholdMode::Proportion => "proportion",
        })
    }
}

/// 1-based rank `ceil(p * D)` of the proportion quantile.
fn quantile_rank(p: f64, n: usize) -> usize {
    // tolerate representation error such as 0.3 * 10 = 3.0000000000000004
    ((p * n as f64 - 1e-9).ceil() as usize).clamp(1, n)
}

/// Empirical `p`-quantile: the order statistic at rank `ceil(p * D)`.
pub fn proportion_threshold(x: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidInput(format!("quantile proportion must lie in (0, 1), got {p}")));
    }
    if x.is_empty() {
        return Err(Error::InvalidInput("empty classifier".into()));
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[quantile_rank(p, x.len()) - 1])
}

/// Positive above `t`, negative below, a fair coin at exactly `t`.
pub fn classify<R: Rng + ?Sized>(x: &[f64], t: f64, rng: &mut R) -> Vec<Label> {
    x.iter()
        .map(|&v| {
            if v > t {
                Label::Positive
            } else if v < t {
                Label::Negative
            } else if rng.gen::<bool>() {
                Label::Positive
            } else {
                Label::Negative
            }
        })
        .collect()
}

/// Label exactly `ceil(p * D)` documents negative: everything below the
/// `p`-quantile, plus as many documents tied at the quantile as needed,
/// picked uniformly at random among the tied ones.
pub fn classify_by_proportion<R: Rng + ?Sized>(x: &[f64], p: f64, rng: &mut R) -> Result<Vec<Label>> {
    let t = proportion_threshold(x, p)?;
    let k = quantile_rank(p, x.len());
    let below = x.iter().filter(|&&v| v < t).count();
    let mut tied: Vec<usize> = (0..x.len()).filter(|&i| x[i] == t).collect();
    tied.shuffle(rng);
    let mut labels: Vec<Label> = x.iter().map(|&v| if v < t { Label::Negative } else { Label::Positive }).collect();
    for &i in tied.iter().take(k - below) {
        labels[i] = Label::Negative;
    }
    Ok(labels)
}

/// Apply a threshold mode. `negative_fraction` is required for the proportion mode.
pub fn label_by_threshold<R: Rng + ?Sized>(
    x: &[f64],
    mode: ThresholdMode,
    negative_fraction: Option<f64>,
    rng: &mut R,
) -> Result<Vec<Label>> {
    match mode {
        ThresholdMode::Zero => Ok(classify(x, 0.0, rng)),
        ThresholdMode::Proportion => {
            let p = negative_fraction
                .ok_or_else(|| Error::InvalidInput("proportion threshold needs the negative fraction".into()))?;
            classify_by_proportion(x, p, rng)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Document;
    use proptest::prelude::*;

    struct FixedScorer(Vec<Vec<f64>>);

    impl CellScorer for FixedScorer {
        fn score(&self, _: &Corpus, cell: &GridCell, _: u64) -> Result<DiffVector> {
            Ok(DiffVector::new(self.0[cell.index % self.0.len()].clone(), cell.index))
        }
    }

    fn corpus(n: usize) -> Corpus {
        Corpus::new("c", (0..n).map(|i| Document::from_tokens(vec![format!("w{i}")], None)).collect())
    }

    fn grid(e: &[usize], w: &[usize], d: &[usize]) -> GridSpec {
        GridSpec { epochs: e.to_vec(), windows: w.to_vec(), dims: d.to_vec() }
    }

    #[test]
    fn default_grid_has_36_cells() {
        let cells = GridSpec::default().cells();
        assert_eq!(cells.len(), 36);
        assert_eq!(cells[0], GridCell { index: 0, epochs: 5, window: 5, dim: 50 });
        assert_eq!(cells[35], GridCell { index: 35, epochs: 15, window: 15, dim: 200 });
    }

    #[test]
    fn bagging_with_stub_scorer() {
        let c = corpus(2);
        let two = grid(&[1], &[1], &[1, 2]);
        let out = run_bagging(&c, &two, &FixedScorer(vec![vec![1.0, 3.0], vec![3.0, 5.0]]), 0).unwrap();
        assert_eq!(out.classifier.values, vec![2.0, 4.0]);
        assert_eq!(out.cells.len(), 2);
        let one = grid(&[1], &[1], &[1]);
        let out = run_bagging(&c, &one, &FixedScorer(vec![vec![0.25, -1.0]]), 0).unwrap();
        assert_eq!(out.classifier.values, vec![0.25, -1.0]);
    }

    #[test]
    fn bagging_rejects_bad_cells() {
        let c = corpus(3);
        let g = grid(&[1], &[1], &[1]);
        assert!(matches!(run_bagging(&c, &g, &FixedScorer(vec![vec![1.0]]), 0), Err(Error::LengthMismatch { .. })));
        assert!(run_bagging(&c, &grid(&[], &[1], &[1]), &FixedScorer(vec![vec![0.0; 3]]), 0).is_err());
    }

    #[test]
    fn mean_diff_cases() {
        let v = DiffVector::new(vec![0.5, -2.0], 0);
        assert_eq!(mean_diff(&[v.clone(), v.clone(), v.clone()]).unwrap(), v.values);
        let a = DiffVector::new(vec![1.0, -1.0], 0);
        let b = DiffVector::new(vec![-1.0, 1.0], 1);
        assert_eq!(mean_diff(&[a, b]).unwrap(), vec![0.0, 0.0]);
        let short = DiffVector::new(vec![1.0], 2);
        assert!(mean_diff(&[v, short]).is_err());
        assert!(mean_diff(&[]).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(proportion_threshold(&[1.0, 2.0, 3.0, 4.0], 0.5).unwrap(), 2.0);
        assert_eq!(proportion_threshold(&[7.0; 5], 0.3).unwrap(), 7.0);
        assert_eq!(proportion_threshold(&[10.0, 20.0, 30.0, 40.0], 0.25).unwrap(), 10.0);
        assert_eq!(proportion_threshold(&(1..=10).map(f64::from).collect::<Vec<_>>(), 0.3).unwrap(), 3.0);
        assert!(proportion_threshold(&[1.0], 0.0).is_err());
        assert!(proportion_threshold(&[1.0], 1.0).is_err());
    }

    #[test]
    fn classify_examples() {
        let mut rng = seed::rng(0);
        assert_eq!(classify(&[0.5, -0.5], 0.0, &mut rng), vec![Label::Positive, Label::Negative]);
    }

    #[test]
    fn ties_are_fair_coins() {
        let draws = 20_000u64;
        let positives: u64 = (0..draws)
            .map(|s| (classify(&[1.0], 1.0, &mut seed::rng(s))[0] == Label::Positive) as u64)
            .sum();
        // two-sided binomial test at alpha = 0.01: |z| < 2.576
        let z = (positives as f64 - draws as f64 / 2.0) / (draws as f64 / 4.0).sqrt();
        assert!(z.abs() < 2.576, "z = {z}");
    }

    #[test]
    fn max_threshold_ties_once() {
        let x = [0.1, 0.7, 0.3];
        let mut flips = std::collections::HashSet::new();
        for s in 0..64 {
            let labels = classify(&x, 0.7, &mut seed::rng(s));
            assert_eq!(&labels[..1], &[Label::Negative]);
            assert_eq!(labels[2], Label::Negative);
            flips.insert(labels[1]);
        }
        assert_eq!(flips.len(), 2);
    }

    #[test]
    fn proportion_labels_with_ties() {
        let x = [0.0, 1.0, 1.0, 1.0, 2.0];
        for s in 0..20 {
            let labels = classify_by_proportion(&x, 0.6, &mut seed::rng(s)).unwrap();
            assert_eq!(labels.iter().filter(|&&l| l == Label::Negative).count(), 3);
            assert_eq!(labels[0], Label::Negative);
            assert_eq!(labels[4], Label::Positive);
        }
    }

    #[test]
    fn pseudo_documents_come_last() {
        let lex = SentimentLexicon::from_entries("l", [("good", 2.0), ("bad", -1.0)]).unwrap();
        let toks = |s: &str| s.split_whitespace().map(String::from).collect::<Vec<_>>();
        let c = Corpus::new(
            "c",
            vec![
                Document::from_tokens(toks("good good x"), None),
                Document::from_tokens(toks("x y"), None),
                Document::from_tokens(toks("bad x"), None),
                Document::from_tokens(toks("z"), None),
            ],
        );
        let h = augment_negations(&halves(&lex).unwrap());
        let docs = training_documents(&c, &lex.with_merged_negations(), &[], &[], Some(&h));
        let tags: Vec<usize> = docs.iter().map(|d| d.tag).collect();
        assert_eq!(tags, vec![1, 3, 2, 0, 4, 5]);
        assert_eq!(docs[4].words, toks("good negbad"));
        assert_eq!(docs[5].words, toks("bad neggood"));
    }

    #[test]
    fn embedding_scorer_end_to_end_small() {
        let lex = SentimentLexicon::from_entries("l", [("good", 1.0), ("bad", -1.0)]).unwrap();
        let toks = |s: &str| s.split_whitespace().map(String::from).collect::<Vec<_>>();
        let docs = (0..20)
            .map(|i| Document::from_tokens(toks(if i % 2 == 0 { "good nice fine nice good" } else { "bad poor ugly poor bad" }), None))
            .collect();
        let c = Corpus::new("c", docs);
        let config = BaggingConfig { grid: grid(&[5], &[2], &[8, 4]), ..Default::default() };
        let a = run_lex2sent(&c, &lex, &config, 11).unwrap();
        let b = run_lex2sent(&c, &lex, &config, 11).unwrap();
        assert_eq!(a.classifier, b.classifier);
        assert_eq!(a.cells.len(), 2);
        assert!(a.classifier.values.iter().all(|v| v.is_finite() && v.abs() <= 2.0));
        let mut with_empty = c.clone();
        with_empty.documents[3].tokens.clear();
        let e = run_lex2sent(&with_empty, &lex, &config, 11).unwrap();
        assert_eq!(e.classifier.values[3], 0.0);
        let word_mean = BaggingConfig { half_embedding: HalfEmbedding::WordMean, ..config };
        assert_eq!(run_lex2sent(&c, &lex, &word_mean, 11).unwrap().classifier.values.len(), 20);
    }

    proptest! {
        #[test]
        fn mean_is_permutation_invariant_and_linear(
            cells in proptest::collection::vec(proptest::collection::vec(-2.0f64..2.0, 5), 1..8),
            c in -3.0f64..3.0,
        ) {
            let diffs: Vec<DiffVector> = cells.iter().enumerate().map(|(i, v)| DiffVector::new(v.clone(), i)).collect();
            let mean = mean_diff(&diffs).unwrap();
            let mut reversed = diffs.clone();
            reversed.reverse();
            for (a, b) in mean.iter().zip(mean_diff(&reversed).unwrap()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            let scaled: Vec<DiffVector> = diffs.iter().map(|d| DiffVector::new(d.values.iter().map(|v| c * v).collect(), d.cell_id)).collect();
            for (a, b) in mean.iter().zip(mean_diff(&scaled).unwrap()) {
                prop_assert!((c * a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn labels_invariant_under_increasing_affine_maps(
            x in proptest::collection::vec(-5.0f64..5.0, 1..30),
            t in -5.0f64..5.0,
            a in 0.1f64..10.0,
            b in -10.0f64..10.0,
            s in any::<u64>(),
        ) {
            // dyadic-grid values keep the affine map exact, so ties survive it
            let x: Vec<f64> = x.iter().map(|v| (v * 8.0).round() / 8.0).collect();
            let t = (t * 8.0).round() / 8.0;
            let (a, b) = ((a * 4.0).round().max(1.0) / 4.0, (b * 4.0).round() / 4.0);
            let mapped: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            prop_assert_eq!(classify(&x, t, &mut seed::rng(s)), classify(&mapped, a * t + b, &mut seed::rng(s)));
        }

        #[test]
        fn proportion_labels_exact_count(x in proptest::collection::hash_set(-1000i32..1000, 1..60), p in 0.01f64..0.99, s in any::<u64>()) {
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let labels = classify_by_proportion(&x, p, &mut seed::rng(s)).unwrap();
            let k = (p * x.len() as f64 - 1e-9).ceil().max(1.0) as usize;
            prop_assert_eq!(labels.iter().filter(|&&l| l == Label::Negative).count(), k);
        }
    }
}
