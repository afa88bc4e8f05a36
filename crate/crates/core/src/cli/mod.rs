//! Command-line front end.

pub mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;

use crate::bagging::{ClassifierVector, ThresholdMode};
use crate::error::{Error, Result};
use crate::eval::{
    compare_methods, export_labels, multi_run, predict, score_run, CountingMethod, EvalReport, Lex2SentMethod, Method,
    MethodOutput, RunResult,
};
use crate::ingest::{load_dataset, Corpus, Label, LoadReport};
use crate::lexicon::{augment_negations, halves, load_lexicon, SentimentLexicon};

pub use config::Config;

#[derive(Parser, Debug)]
#[command(name = "lex2sent", version, about = "Unsupervised sentiment classification with lexicon-anchored document embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load and preprocess a dataset; write tokens and lexicon halves
    Ingest(Common),
    /// Score the corpus once; write per-document scores and labels
    Run(Common),
    /// Score the corpus once with the lexicon counting baseline
    Baseline(Common),
    /// Repeat runs against gold labels and report classification rates
    Evaluate(Common),
    /// Write predicted labels as a supervised training set
    Export(Common),
    /// Compare the embedding classifier with counting baselines
    Compare(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// TOML configuration file
    #[arg(short, long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. grid.dims=50,100 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores)
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_parser = ["zero", "proportion"])]
    threshold: Option<String>,
    #[arg(long, value_parser = ["none", "bword", "bwperm", "sorted"])]
    resampling: Option<String>,
    /// Classifier used by run, evaluate and export
    #[arg(long, value_parser = ["lex2sent", "counting"], default_value = "lex2sent")]
    method: String,
    /// Output directory (default: $LEX2SENT_OUTPUT_DIR or ./lex2sent-out)
    #[arg(short, long, value_name = "DIR")]
    output: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<Config> {
        let mut overrides = self.overrides.clone();
        if let Some(s) = self.seed {
            overrides.push(format!("run.seed={s}"));
        }
        if let Some(w) = self.workers {
            overrides.push(format!("run.workers={w}"));
        }
        if let Some(t) = &self.threshold {
            overrides.push(format!("run.threshold=\"{t}\""));
        }
        if let Some(r) = &self.resampling {
            overrides.push(format!("run.resampling=\"{r}\""));
        }
        let mut config = Config::load(self.config.as_deref(), &overrides)?;
        if let Some(o) = &self.output {
            config.output.dir = Some(o.clone());
        }
        Ok(config)
    }
}

/// Parse `args` (including the program name), execute, and return the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if args.len() <= 1 {
        let _ = Cli::command().print_help();
        println!();
        return 0;
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let category = e.category();
            eprintln!("error [{}]: {e}", category.as_str());
            category.exit_code()
        }
    }
}

fn execute(command: Command) -> Result<()> {
    let (name, common) = match &command {
        Command::Ingest(c) => ("ingest", c),
        Command::Run(c) => ("run", c),
        Command::Baseline(c) => ("baseline", c),
        Command::Evaluate(c) => ("evaluate", c),
        Command::Export(c) => ("export", c),
        Command::Compare(c) => ("compare", c),
    };
    let config = common.config()?;
    eprintln!("# effective configuration\n{}", config.to_toml());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.run.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let method = common.method.as_str();
    pool.install(|| match command {
        Command::Ingest(_) => ingest(&config),
        Command::Run(_) => score_once(&config, name, method, false),
        Command::Baseline(_) => score_once(&config, name, "counting", false),
        Command::Evaluate(_) => evaluate(&config, method),
        Command::Export(_) => score_once(&config, name, method, true),
        Command::Compare(_) => compare(&config),
    })
}

struct LoadedLexicon {
    path: PathBuf,
    /// Lexicon in corpus token space.
    lexicon: SentimentLexicon,
    entries: usize,
    duplicates: usize,
    rejected: usize,
}

fn read_lexicon(path: &Path, stemming: bool) -> Result<LoadedLexicon> {
    let load = load_lexicon(path)?;
    let entries = load.lexicon.len();
    let lexicon = if stemming { load.lexicon.stemmed() } else { load.lexicon };
    Ok(LoadedLexicon { path: path.to_path_buf(), lexicon, entries, duplicates: load.duplicates, rejected: load.rejected })
}

struct Prepared {
    corpus: Corpus,
    report: LoadReport,
    lexicons: Vec<LoadedLexicon>,
    raw_lexicon_words: Vec<String>,
}

fn prepare(config: &Config, need_lexicon: bool, extra_lexicons: bool) -> Result<Prepared> {
    let mut lexicons = Vec::new();
    let mut raw_words = Vec::new();
    let main = match (&config.lexicon.path, need_lexicon) {
        (Some(p), _) => Some(p.as_path()),
        (None, true) => Some(config.lexicon_path()?),
        (None, false) => None,
    };
    let extra = if extra_lexicons { config.lexicon.compare.as_slice() } else { &[] };
    for path in main.into_iter().chain(extra.iter().map(PathBuf::as_path)) {
        raw_words.extend(load_lexicon(path)?.lexicon.words().map(str::to_string));
        lexicons.push(read_lexicon(path, config.preprocess.stemming)?);
    }
    let (mut corpus, report) = load_dataset(config.dataset_path()?, config.dataset.format, &config.load_options())?;
    let mut pp = config.preprocess_config(None)?;
    pp.protect(raw_words.iter().cloned());
    corpus.preprocess(&pp);
    Ok(Prepared { corpus, report, lexicons, raw_lexicon_words: raw_words })
}

fn make_method(config: &Config, kind: &str, lex: &LoadedLexicon) -> Result<Box<dyn Method>> {
    Ok(match kind {
        "counting" => Box::new(CountingMethod::new(
            lex.lexicon.clone(),
            config.preprocess.amplifiers.clone(),
            config.preprocess.negations.clone(),
        )),
        _ => Box::new(Lex2SentMethod::new(&lex.lexicon, config.bagging())?),
    })
}

#[derive(Serialize)]
struct LexiconSummary {
    name: String,
    path: String,
    entries: usize,
    duplicates: usize,
    rejected: usize,
}

#[derive(Serialize)]
struct SeedSummary {
    master: u64,
    /// Hex-encoded run seeds.
    runs: Vec<String>,
    /// Hex-encoded cell seeds per run of the embedding classifier.
    cells: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: String,
    command: &'a str,
    documents: usize,
    empty_documents: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    positive_fraction: Option<f64>,
    dataset: &'a LoadReport,
    lexicons: Vec<LexiconSummary>,
    seeds: SeedSummary,
    config: Config,
}

fn hex(seed: u64) -> String {
    format!("{seed:#018x}")
}

fn write_manifest(dir: &Path, command: &str, config: &Config, prepared: &Prepared, runs: &[&RunResult], run_seeds: &[u64]) -> Result<()> {
    let mut echoed = config.clone();
    echoed.output.dir = None;
    let manifest = Manifest {
        version: format!("lex2sent {}", env!("CARGO_PKG_VERSION")),
        command,
        documents: prepared.corpus.len(),
        empty_documents: prepared.corpus.empty_document_count(),
        positive_fraction: prepared.corpus.positive_fraction(),
        dataset: &prepared.report,
        lexicons: prepared
            .lexicons
            .iter()
            .map(|l| LexiconSummary {
                name: l.lexicon.name.clone(),
                path: l.path.display().to_string(),
                entries: l.entries,
                duplicates: l.duplicates,
                rejected: l.rejected,
            })
            .collect(),
        seeds: SeedSummary {
            master: config.run.seed,
            runs: run_seeds.iter().copied().map(hex).collect(),
            cells: runs.iter().filter(|r| !r.cells.is_empty()).map(|r| r.cells.iter().map(|c| hex(c.seed)).collect()).collect(),
        },
        config: echoed,
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::InvalidInput(format!("manifest: {e}")))?;
    write_file(&dir.join("manifest.toml"), &text)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn output_dir(config: &Config) -> Result<PathBuf> {
    let dir = config.output_dir();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn write_timings(dir: &Path, rows: &[(&str, &RunResult)]) -> Result<()> {
    let mut s = String::from("method\trun\tcell\tepochs\twindow\tdim\tseed\twall_ms\n");
    for (method, r) in rows {
        for c in &r.cells {
            let _ = writeln!(
                s,
                "{method}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.1}",
                r.run, c.cell.index, c.cell.epochs, c.cell.window, c.cell.dim, hex(c.seed), c.wall_ms
            );
        }
    }
    write_file(&dir.join("timings.tsv"), &s)
}

fn ingest(config: &Config) -> Result<()> {
    let prepared = prepare(config, false, false)?;
    let dir = output_dir(config)?;
    let mut s = String::from("doc_id\tsource\tgold\tn_tokens\ttokens\n");
    for d in &prepared.corpus.documents {
        let gold = d.gold.map(|g| g.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{}\t{}\t{gold}\t{}\t{}", d.id, d.source, d.tokens.len(), d.tokens.join(" "));
    }
    write_file(&dir.join("tokens.tsv"), &s)?;
    if let Some(lex) = prepared.lexicons.first() {
        augment_negations(&halves(&lex.lexicon)?).write_word_lists(&dir)?;
    }
    write_manifest(&dir, "ingest", config, &prepared, &[], &[])?;
    let r = &prepared.report;
    println!(
        "loaded {} documents ({} malformed, {} neutral and {} short dropped); {} empty after preprocessing; {} protected lexicon words",
        r.loaded,
        r.malformed,
        r.neutral_dropped,
        r.short_dropped,
        prepared.corpus.empty_document_count(),
        prepared.raw_lexicon_words.len()
    );
    println!("wrote {}", dir.display());
    Ok(())
}

fn negative_fraction(corpus: &Corpus, mode: ThresholdMode) -> Result<Option<f64>> {
    match (mode, corpus.positive_fraction()) {
        (ThresholdMode::Zero, p) => Ok(p.map(|p| 1.0 - p)),
        (ThresholdMode::Proportion, Some(p)) => Ok(Some(1.0 - p)),
        (ThresholdMode::Proportion, None) => Err(Error::Config("the proportion threshold needs gold labels".into())),
    }
}

fn classifier_rows(corpus: &Corpus, x: &ClassifierVector, labels: &[Label]) -> String {
    let mut s = String::from("doc_id\tscore\tlabel\n");
    for ((d, v), l) in corpus.documents.iter().zip(&x.values).zip(labels) {
        let _ = writeln!(s, "{}\t{v}\t{l}", d.id);
    }
    s
}

/// `run`, `baseline` and `export`: one scoring pass with the seeds of run 0.
fn score_once(config: &Config, command: &str, kind: &str, export: bool) -> Result<()> {
    let prepared = prepare(config, true, false)?;
    let corpus = &prepared.corpus;
    let method = make_method(config, kind, &prepared.lexicons[0])?;
    let run_seed = config.run_config().run_seed(0);
    let mode = config.run.threshold;
    let fraction = negative_fraction(corpus, mode)?;
    let MethodOutput { classifier, cells, diffs } = score_run(corpus, method.as_ref(), run_seed)?;
    let labels = predict(&classifier, mode, fraction, run_seed)?;
    let dir = output_dir(config)?;
    if export {
        export_labels(corpus, &classifier.values, &labels, dir.join("labels.csv"))?;
    } else {
        write_file(&dir.join("classifier.tsv"), &classifier_rows(corpus, &classifier, &labels))?;
    }
    if config.output.export_diffs {
        let diff_dir = dir.join("diffs");
        fs::create_dir_all(&diff_dir).map_err(|e| Error::io(&diff_dir, e))?;
        for d in &diffs {
            d.write_rows(diff_dir.join(format!("cell_{:03}.tsv", d.cell_id)))?;
        }
    }
    let result = RunResult { run: 0, seed: run_seed, rate_zero: 0.0, rate_proportion: 0.0, positives_zero: 0, positives_proportion: 0, cells };
    write_timings(&dir, &[(method.name(), &result)])?;
    write_manifest(&dir, command, config, &prepared, &[&result], &[run_seed])?;
    let positives = labels.iter().filter(|&&l| l == Label::Positive).count();
    println!("{}: {positives} of {} documents labelled positive ({mode} threshold)", method.name(), labels.len());
    if let Ok(gold) = corpus.gold_labels() {
        println!("classification rate {:.4}", crate::eval::classification_rate(&labels, &gold)?);
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn evaluate(config: &Config, kind: &str) -> Result<()> {
    let prepared = prepare(config, true, false)?;
    let method = make_method(config, kind, &prepared.lexicons[0])?;
    let run_config = config.run_config();
    let (report, runs) = multi_run(&prepared.corpus, method.as_ref(), &run_config)?;
    let dir = output_dir(config)?;
    write_file(&dir.join("report.txt"), &report.to_text())?;
    write_file(&dir.join("report.tsv"), &format!("{}\n{}\n", EvalReport::TSV_HEADER, report.tsv_row()))?;
    write_file(&dir.join("rates.txt"), &report.plot_data())?;
    let rows: Vec<(&str, &RunResult)> = runs.iter().map(|r| (method.name(), r)).collect();
    write_timings(&dir, &rows)?;
    let seeds: Vec<u64> = runs.iter().map(|r| r.seed).collect();
    write_manifest(&dir, "evaluate", config, &prepared, &runs.iter().collect::<Vec<_>>(), &seeds)?;
    print!("{}", report.to_text());
    println!("wrote {}", dir.display());
    Ok(())
}

fn file_stem_for(method: &str) -> String {
    method.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

fn compare(config: &Config) -> Result<()> {
    let prepared = prepare(config, true, true)?;
    let main = &prepared.lexicons[0];
    let mut methods = vec![make_method(config, "lex2sent", main)?];
    for lex in &prepared.lexicons {
        methods.push(make_method(config, "counting", lex)?);
    }
    let refs: Vec<&dyn Method> = methods.iter().map(|m| m.as_ref()).collect();
    let (table, runs) = compare_methods(&prepared.corpus, &refs, &config.run_config())?;
    let dir = output_dir(config)?;
    write_file(&dir.join("comparison.txt"), &table.to_text())?;
    write_file(&dir.join("comparison.tsv"), &table.to_tsv())?;
    let mut report = format!("{}\n", EvalReport::TSV_HEADER);
    let mut timing_rows = Vec::new();
    for (row, method_runs) in table.rows.iter().zip(&runs) {
        let _ = writeln!(report, "{}\n{}", row.zero.tsv_row(), row.proportion.tsv_row());
        write_file(&dir.join(format!("rates_{}.txt", file_stem_for(&row.method))), &row.zero.plot_data())?;
        timing_rows.extend(method_runs.iter().map(|r| (row.method.as_str(), r)));
    }
    write_file(&dir.join("report.tsv"), &report)?;
    write_timings(&dir, &timing_rows)?;
    let all: Vec<&RunResult> = runs.iter().flatten().collect();
    let seeds: Vec<u64> = runs.first().map(|r| r.iter().map(|x| x.seed).collect()).unwrap_or_default();
    write_manifest(&dir, "compare", config, &prepared, &all, &seeds)?;
    print!("{}", table.to_text());
    println!("wrote {}", dir.display());
    Ok(())
}
