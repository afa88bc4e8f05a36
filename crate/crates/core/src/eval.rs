//! Repeated-run evaluation, method comparison, subsampling and label export.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bagging::{
    label_by_threshold, run_bagging, BaggingConfig, CellRecord, ClassifierSource, ClassifierVector, EmbeddingScorer,
    ThresholdMode,
};
use crate::error::{Error, Result};
use crate::ingest::{Corpus, Label};
use crate::lbte::DiffVector;
use crate::lexicon::{count_score, SentimentLexicon};
use crate::seed;

/// Fraction of positions where `labels` and `gold` agree.
pub fn classification_rate(labels: &[Label], gold: &[Label]) -> Result<f64> {
    if labels.len() != gold.len() {
        return Err(Error::LengthMismatch { expected: gold.len(), found: labels.len() });
    }
    if gold.is_empty() {
        return Err(Error::InvalidInput("classification rate of an empty corpus".into()));
    }
    let hits = labels.iter().zip(gold).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / gold.len() as f64)
}

/// Output of one scoring pass.
#[derive(Debug, Clone)]
pub struct MethodOutput {
    pub classifier: ClassifierVector,
    pub cells: Vec<CellRecord>,
    /// Per-cell diff vectors of bagged methods.
    pub diffs: Vec<DiffVector>,
}

/// A document scorer; higher values mean more positive.
pub trait Method: Sync {
    fn name(&self) -> &str;
    fn score(&self, corpus: &Corpus, seed: u64) -> Result<MethodOutput>;
}

/// Lexicon counting baseline over the baseline token view.
pub struct CountingMethod {
    name: String,
    lexicon: SentimentLexicon,
    amplifiers: Vec<String>,
    negations: Vec<String>,
}

impl CountingMethod {
    pub fn new(lexicon: SentimentLexicon, amplifiers: Vec<String>, negations: Vec<String>) -> Self {
        CountingMethod { name: format!("counting:{}", lexicon.name), lexicon, amplifiers, negations }
    }
}

impl Method for CountingMethod {
    fn name(&self) -> &str {
        &self.name
    }

    fn score(&self, corpus: &Corpus, _seed: u64) -> Result<MethodOutput> {
        let values = corpus
            .documents
            .iter()
            .map(|d| count_score(&d.baseline_tokens, &self.lexicon, &self.amplifiers, &self.negations))
            .collect();
        Ok(MethodOutput { classifier: ClassifierVector { values, source: ClassifierSource::Counting }, cells: Vec::new(), diffs: Vec::new() })
    }
}

/// Bagged embedding classifier.
pub struct Lex2SentMethod {
    name: String,
    scorer: EmbeddingScorer,
    config: BaggingConfig,
}

impl Lex2SentMethod {
    pub fn new(lexicon: &SentimentLexicon, config: BaggingConfig) -> Result<Self> {
        let scorer = EmbeddingScorer::new(lexicon, config.clone())?;
        Ok(Lex2SentMethod { name: format!("lex2sent:{}", lexicon.name), scorer, config })
    }
}

impl Method for Lex2SentMethod {
    fn name(&self) -> &str {
        &self.name
    }

    fn score(&self, corpus: &Corpus, seed: u64) -> Result<MethodOutput> {
        let out = run_bagging(corpus, &self.config.grid, &self.scorer, seed)?;
        Ok(MethodOutput { classifier: out.classifier, cells: out.cells, diffs: out.diffs })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub runs: usize,
    pub master_seed: u64,
    pub threshold: ThresholdMode,
    pub subsample: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { runs: 50, master_seed: 0, threshold: ThresholdMode::Zero, subsample: None }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("run.runs must be at least 1".into()));
        }
        if let Some(f) = self.subsample {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::Config(format!("run.subsample must lie in (0, 1], got {f}")));
            }
        }
        Ok(())
    }

    /// Seed of run `r`.
    pub fn run_seed(&self, r: usize) -> u64 {
        seed::derive(self.master_seed, r as u64)
    }
}

/// Sample `floor(fraction * D)` documents without replacement, kept in
/// corpus order. Returns the sampled corpus and the original id of each new id.
pub fn subsample<R: Rng + ?Sized>(corpus: &Corpus, fraction: f64, rng: &mut R) -> Result<(Corpus, Vec<usize>)> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidInput(format!("subsample fraction must lie in (0, 1], got {fraction}")));
    }
    let n = corpus.len();
    let k = (fraction * n as f64 + 1e-9).floor() as usize;
    if k == 0 {
        return Err(Error::EmptyCorpus(format!("subsample of {fraction} leaves no documents")));
    }
    let mut ids = if k >= n { (0..n).collect() } else { sample(rng, n, k).into_vec() };
    ids.sort_unstable();
    Ok((corpus.select(&ids), ids))
}

/// Result of one execution.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub run: usize,
    pub seed: u64,
    pub rate_zero: f64,
    pub rate_proportion: f64,
    pub positives_zero: usize,
    pub positives_proportion: usize,
    pub cells: Vec<CellRecord>,
}

impl RunResult {
    pub fn rate(&self, mode: ThresholdMode) -> f64 {
        match mode {
            ThresholdMode::Zero => self.rate_zero,
            ThresholdMode::Proportion => self.rate_proportion,
        }
    }

    pub fn positives(&self, mode: ThresholdMode) -> usize {
        match mode {
            ThresholdMode::Zero => self.positives_zero,
            ThresholdMode::Proportion => self.positives_proportion,
        }
    }
}

/// Labels for `x` under `mode`, with ties broken by the stream of `run_seed`.
pub fn predict(x: &ClassifierVector, mode: ThresholdMode, negative_fraction: Option<f64>, run_seed: u64) -> Result<Vec<Label>> {
    let mut rng = seed::rng(seed::derive_named(run_seed, "ties"));
    label_by_threshold(&x.values, mode, negative_fraction, &mut rng)
}

fn count_positive(labels: &[Label]) -> usize {
    labels.iter().filter(|&&l| l == Label::Positive).count()
}

/// Score `corpus` with the method stream of `run_seed`.
pub fn score_run(corpus: &Corpus, method: &dyn Method, run_seed: u64) -> Result<MethodOutput> {
    let out = method.score(corpus, seed::derive_named(run_seed, "method"))?;
    if out.classifier.values.len() != corpus.len() {
        return Err(Error::LengthMismatch { expected: corpus.len(), found: out.classifier.values.len() });
    }
    Ok(out)
}

/// One execution, scored under both threshold modes.
pub fn single_run(corpus: &Corpus, method: &dyn Method, config: &RunConfig, run: usize) -> Result<RunResult> {
    let run_seed = config.run_seed(run);
    let sampled;
    let corpus = match config.subsample {
        Some(f) if f < 1.0 => {
            sampled = subsample(corpus, f, &mut seed::rng(seed::derive_named(run_seed, "subsample")))?.0;
            &sampled
        }
        _ => corpus,
    };
    let gold = corpus.gold_labels()?;
    let negative_fraction = 1.0 - corpus.positive_fraction().unwrap_or(0.5);
    let out = score_run(corpus, method, run_seed)?;
    let zero = predict(&out.classifier, ThresholdMode::Zero, None, run_seed)?;
    let (rate_proportion, positives_proportion) = if negative_fraction > 0.0 && negative_fraction < 1.0 {
        let labels = predict(&out.classifier, ThresholdMode::Proportion, Some(negative_fraction), run_seed)?;
        (classification_rate(&labels, &gold)?, count_positive(&labels))
    } else {
        // single-class gold: the quantile rule degenerates to all one label
        let all = if negative_fraction >= 1.0 { Label::Negative } else { Label::Positive };
        let labels = vec![all; gold.len()];
        (classification_rate(&labels, &gold)?, count_positive(&labels))
    };
    Ok(RunResult {
        run,
        seed: run_seed,
        rate_zero: classification_rate(&zero, &gold)?,
        rate_proportion,
        positives_zero: count_positive(&zero),
        positives_proportion,
        cells: out.cells,
    })
}

/// All runs of `config`, in run order.
pub fn run_all(corpus: &Corpus, method: &dyn Method, config: &RunConfig) -> Result<Vec<RunResult>> {
    config.validate()?;
    (0..config.runs).into_par_iter().map(|r| single_run(corpus, method, config, r)).collect()
}

/// Aggregate over the runs of one method under one threshold mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub method: String,
    pub threshold: ThresholdMode,
    pub rates: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Rounded mean number of positive labels per run.
    pub positive_label_count: usize,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl EvalReport {
    pub fn from_rates(method: impl Into<String>, threshold: ThresholdMode, rates: Vec<f64>, positive_label_count: usize) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::InvalidInput("no runs to aggregate".into()));
        }
        let mut sorted = rates.clone();
        sorted.sort_by(f64::total_cmp);
        let mean = rates.iter().sum::<f64>() / rates.len() as f64;
        Ok(EvalReport {
            method: method.into(),
            threshold,
            mean,
            min: sorted[0],
            q1: quantile(&sorted, 0.25),
            median: quantile(&sorted, 0.5),
            q3: quantile(&sorted, 0.75),
            max: sorted[sorted.len() - 1],
            positive_label_count,
            rates,
        })
    }

    pub fn from_runs(method: impl Into<String>, threshold: ThresholdMode, runs: &[RunResult]) -> Result<Self> {
        let rates = runs.iter().map(|r| r.rate(threshold)).collect();
        let positives = if runs.is_empty() {
            0
        } else {
            (runs.iter().map(|r| r.positives(threshold) as f64).sum::<f64>() / runs.len() as f64).round() as usize
        };
        Self::from_rates(method, threshold, rates, positives)
    }

    pub const TSV_HEADER: &'static str = "method\tthreshold\truns\tmean\tmin\tq1\tmedian\tq3\tmax\tpositive_labels";

    pub fn tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.method,
            self.threshold,
            self.rates.len(),
            self.mean,
            self.min,
            self.q1,
            self.median,
            self.q3,
            self.max,
            self.positive_label_count
        )
    }

    pub fn to_text(&self) -> String {
        format!(
            "method      {}\nthreshold   {}\nruns        {}\nmean rate   {:.4}\nmin/q1/med/q3/max  {:.4} {:.4} {:.4} {:.4} {:.4}\npositive labels    {}\n",
            self.method,
            self.threshold,
            self.rates.len(),
            self.mean,
            self.min,
            self.q1,
            self.median,
            self.q3,
            self.max,
            self.positive_label_count
        )
    }

    /// One rate per line.
    pub fn plot_data(&self) -> String {
        self.rates.iter().map(|r| format!("{r}\n")).collect()
    }
}

/// Repeated executions of `method`, reported for `config.threshold`.
pub fn multi_run(corpus: &Corpus, method: &dyn Method, config: &RunConfig) -> Result<(EvalReport, Vec<RunResult>)> {
    let runs = run_all(corpus, method, config)?;
    Ok((EvalReport::from_runs(method.name(), config.threshold, &runs)?, runs))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub method: String,
    pub zero: EvalReport,
    pub proportion: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    /// Sorted by descending fixed-threshold mean rate.
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub const TSV_HEADER: &'static str = "method\tzero_mean\tzero_median\tproportion_mean\tproportion_median";

    pub fn to_tsv(&self) -> String {
        let mut s = format!("{}\n", Self::TSV_HEADER);
        for r in &self.rows {
            let _ = writeln!(s, "{}\t{}\t{}\t{}\t{}", r.method, r.zero.mean, r.zero.median, r.proportion.mean, r.proportion.median);
        }
        s
    }

    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|r| r.method.len()).max().unwrap_or(6).max(6);
        let mut s = format!("{:width$}  {:>9}  {:>11}  {:>9}  {:>11}\n", "method", "zero mean", "zero median", "prop mean", "prop median");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:width$}  {:>9.4}  {:>11.4}  {:>9.4}  {:>11.4}",
                r.method, r.zero.mean, r.zero.median, r.proportion.mean, r.proportion.median
            );
        }
        s
    }
}

/// Evaluate every method with the same run seeds and tabulate both threshold modes.
pub fn compare_methods(corpus: &Corpus, methods: &[&dyn Method], config: &RunConfig) -> Result<(Comparison, Vec<Vec<RunResult>>)> {
    if methods.len() < 2 {
        return Err(Error::InvalidInput(format!("comparison needs at least two methods, got {}", methods.len())));
    }
    let mut rows = Vec::with_capacity(methods.len());
    let mut all_runs = Vec::with_capacity(methods.len());
    for m in methods {
        let runs = run_all(corpus, *m, config)?;
        rows.push(ComparisonRow {
            method: m.name().to_string(),
            zero: EvalReport::from_runs(m.name(), ThresholdMode::Zero, &runs)?,
            proportion: EvalReport::from_runs(m.name(), ThresholdMode::Proportion, &runs)?,
        });
        all_runs.push(runs);
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[b].zero.mean.total_cmp(&rows[a].zero.mean));
    let rows = order.iter().map(|&i| rows[i].clone()).collect();
    let all_runs = order.iter().map(|&i| all_runs[i].clone()).collect();
    Ok((Comparison { rows }, all_runs))
}

/// One exported row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelRow {
    pub doc_id: usize,
    pub source: String,
    pub score: f64,
    pub label: Label,
    pub text: String,
}

const LABEL_HEADER: [&str; 5] = ["doc_id", "source", "score", "label", "text"];

/// Write `doc_id, source, score, label, text` rows with a header.
pub fn export_labels(corpus: &Corpus, scores: &[f64], labels: &[Label], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if labels.len() != corpus.len() {
        return Err(Error::LengthMismatch { expected: corpus.len(), found: labels.len() });
    }
    if scores.len() != corpus.len() {
        return Err(Error::LengthMismatch { expected: corpus.len(), found: scores.len() });
    }
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => Error::InvalidInput(format!("{other:?}")),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(LABEL_HEADER).map_err(io)?;
    for ((d, s), l) in corpus.documents.iter().zip(scores).zip(labels) {
        w.write_record([d.id.to_string(), d.source.clone(), s.to_string(), l.to_string(), d.raw.clone()]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Read back a file written by [`export_labels`].
pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<LabelRow>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => Error::InvalidInput(format!("{other:?}")),
    })?;
    let parse = |line: usize, m: String| Error::Parse { path: path.to_path_buf(), line, message: m };
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| parse(line, e.to_string()))?;
        if rec.len() != LABEL_HEADER.len() {
            return Err(parse(line, format!("expected {} fields, found {}", LABEL_HEADER.len(), rec.len())));
        }
        out.push(LabelRow {
            doc_id: rec[0].parse().map_err(|e| parse(line, format!("doc_id: {e}")))?,
            source: rec[1].to_string(),
            score: rec[2].parse().map_err(|e| parse(line, format!("score: {e}")))?,
            label: rec[3].parse().map_err(|e: Error| parse(line, e.to_string()))?,
            text: rec[4].to_string(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Document;
    use proptest::prelude::*;
    use Label::{Negative as N, Positive as P};

    fn labelled(n: usize) -> Corpus {
        Corpus::new(
            "c",
            (0..n)
                .map(|i| {
                    let (tok, gold) = if i % 2 == 0 { ("good", P) } else { ("bad", N) };
                    Document::from_tokens(vec![tok.to_string(), format!("w{i}")], Some(gold))
                })
                .collect(),
        )
    }

    struct Oracle;

    impl Method for Oracle {
        fn name(&self) -> &str {
            "oracle"
        }
        fn score(&self, c: &Corpus, _: u64) -> Result<MethodOutput> {
            let values = c.documents.iter().map(|d| if d.gold == Some(P) { 1.0 } else { -1.0 }).collect();
            Ok(MethodOutput { classifier: ClassifierVector { values, source: ClassifierSource::Counting }, cells: vec![], diffs: vec![] })
        }
    }

    struct Flat;

    impl Method for Flat {
        fn name(&self) -> &str {
            "flat"
        }
        fn score(&self, c: &Corpus, _: u64) -> Result<MethodOutput> {
            Ok(MethodOutput { classifier: ClassifierVector { values: vec![0.0; c.len()], source: ClassifierSource::Counting }, cells: vec![], diffs: vec![] })
        }
    }

    #[test]
    fn rate_examples() {
        assert_eq!(classification_rate(&[P, N], &[P, N]).unwrap(), 1.0);
        assert_eq!(classification_rate(&[N, P], &[P, N]).unwrap(), 0.0);
        assert_eq!(classification_rate(&[P, P, N, N], &[P, P, N, P]).unwrap(), 0.75);
        assert!(classification_rate(&[P], &[P, N]).is_err());
    }

    #[test]
    fn report_aggregates() {
        let one = EvalReport::from_rates("m", ThresholdMode::Zero, vec![0.6], 3).unwrap();
        assert_eq!(one.mean, 0.6);
        let r = EvalReport::from_rates("m", ThresholdMode::Zero, vec![0.7, 0.8, 0.9], 0).unwrap();
        assert!((r.mean - 0.8).abs() < 1e-12);
        assert_eq!((r.min, r.max), (0.7, 0.9));
        assert!((r.q1 - 0.75).abs() < 1e-12 && (r.q3 - 0.85).abs() < 1e-12);
        assert!(EvalReport::from_rates("m", ThresholdMode::Zero, vec![], 0).is_err());
    }

    #[test]
    fn multi_run_is_deterministic() {
        let c = labelled(40);
        let config = RunConfig { runs: 4, master_seed: 9, threshold: ThresholdMode::Zero, subsample: Some(0.5) };
        let (a, runs) = multi_run(&c, &Flat, &config).unwrap();
        let (b, _) = multi_run(&c, &Flat, &config).unwrap();
        assert_eq!(a, b);
        let seeds: std::collections::HashSet<u64> = runs.iter().map(|r| r.seed).collect();
        assert_eq!(seeds.len(), 4);
        let (o, _) = multi_run(&c, &Oracle, &config).unwrap();
        assert_eq!(o.rates, vec![1.0; 4]);
        assert_eq!(o.positive_label_count, 10);
    }

    #[test]
    fn comparison_table() {
        let c = labelled(20);
        let config = RunConfig { runs: 2, ..Default::default() };
        let (t, runs) = compare_methods(&c, &[&Flat, &Oracle], &config).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(runs.len(), 2);
        assert_eq!(t.rows[0].method, "oracle");
        let tsv = t.to_tsv();
        assert!(tsv.lines().all(|l| l.split('\t').count() == 5));
        assert!(compare_methods(&c, &[&Oracle], &config).is_err());
    }

    #[test]
    fn counting_method_uses_baseline_view() {
        let lex = SentimentLexicon::from_entries("l", [("good", 1.0), ("bad", -1.0)]).unwrap();
        let m = CountingMethod::new(lex, vec!["very".into()], vec!["not".into()]);
        let mut d = Document::from_tokens(vec!["neggood".into()], Some(N));
        d.baseline_tokens = vec!["not".into(), "good".into()];
        let out = m.score(&Corpus::new("c", vec![d]), 0).unwrap();
        assert_eq!(out.classifier.values, vec![-0.5]);
        assert_eq!(m.name(), "counting:l");
    }

    #[test]
    fn subsample_examples() {
        let c = labelled(100);
        let (full, ids) = subsample(&c, 1.0, &mut seed::rng(1)).unwrap();
        assert_eq!(full.len(), 100);
        assert_eq!(ids, (0..100).collect::<Vec<_>>());
        let (quarter, ids) = subsample(&c, 0.25, &mut seed::rng(1)).unwrap();
        assert_eq!(quarter.len(), 25);
        let distinct: std::collections::HashSet<_> = ids.iter().collect();
        assert_eq!(distinct.len(), 25);
        for (d, &orig) in quarter.documents.iter().zip(&ids) {
            assert_eq!(d.tokens, c.documents[orig].tokens);
        }
        assert!(subsample(&c, 0.0, &mut seed::rng(1)).is_err());
        assert!(subsample(&c, 1.5, &mut seed::rng(1)).is_err());
    }

    #[test]
    fn label_export_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = labelled(2);
        c.documents[0].raw = "a \"quoted\", text".into();
        let path = dir.path().join("labels.csv");
        export_labels(&c, &[0.25, -1.5], &[P, N], &path).unwrap();
        let rows = read_labels(&path).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows.iter().map(|r| r.label).collect::<Vec<_>>(), vec![P, N]);
        assert_eq!(rows[0].text, "a \"quoted\", text");
        assert_eq!(rows[1].score, -1.5);
        let empty = dir.path().join("empty.csv");
        export_labels(&Corpus::new("e", vec![]), &[], &[], &empty).unwrap();
        assert_eq!(std::fs::read_to_string(&empty).unwrap(), "doc_id,source,score,label,text\n");
        assert!(export_labels(&c, &[0.0, 0.0], &[P, N], dir.path().join("missing/x.csv")).is_err());
    }

    proptest! {
        #[test]
        fn rate_symmetric_under_joint_permutation(pairs in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..40), s in any::<u64>()) {
            use rand::seq::SliceRandom;
            let to = |b: bool| if b { P } else { N };
            let labels: Vec<Label> = pairs.iter().map(|p| to(p.0)).collect();
            let gold: Vec<Label> = pairs.iter().map(|p| to(p.1)).collect();
            let mut perm: Vec<usize> = (0..pairs.len()).collect();
            perm.shuffle(&mut seed::rng(s));
            let pl: Vec<Label> = perm.iter().map(|&i| labels[i]).collect();
            let pg: Vec<Label> = perm.iter().map(|&i| gold[i]).collect();
            prop_assert_eq!(classification_rate(&labels, &gold).unwrap(), classification_rate(&pl, &pg).unwrap());
        }
    }
}
