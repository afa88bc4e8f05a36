//! TOML run configuration with dotted-key overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::bagging::{BaggingConfig, GridSpec, HalfEmbedding, ThresholdMode, TrainDefaults};
use crate::error::{Error, Result};
use crate::eval::RunConfig;
use crate::ingest::{parse_word_list, DatasetFormat, LoadOptions, PreprocessConfig, DEFAULT_AMPLIFIERS, DEFAULT_NEGATIONS};
use crate::lexicon::SentimentLexicon;
use crate::resample::ResamplingKind;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "LEX2SENT_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "lex2sent-out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub dataset: DatasetSection,
    pub lexicon: LexiconSection,
    pub preprocess: PreprocessSection,
    pub grid: GridSpec,
    pub train: TrainSection,
    pub run: RunSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSection {
    pub path: Option<PathBuf>,
    pub format: DatasetFormat,
    pub min_chars: Option<usize>,
}

impl Default for DatasetSection {
    fn default() -> Self {
        DatasetSection { path: None, format: DatasetFormat::Jsonl, min_chars: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct LexiconSection {
    pub path: Option<PathBuf>,
    /// Further lexicons evaluated as counting baselines by `compare`.
    pub compare: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessSection {
    pub stemming: bool,
    pub stopwords: Option<PathBuf>,
    pub negations: Vec<String>,
    pub amplifiers: Vec<String>,
}

impl Default for PreprocessSection {
    fn default() -> Self {
        PreprocessSection {
            stemming: true,
            stopwords: None,
            negations: DEFAULT_NEGATIONS.iter().map(|s| s.to_string()).collect(),
            amplifiers: DEFAULT_AMPLIFIERS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub alpha_start: f64,
    pub alpha_end: f64,
    pub min_count: Option<usize>,
    pub subsample: f64,
    pub half_embedding: HalfEmbedding,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainDefaults::default();
        TrainSection {
            alpha_start: t.alpha_start,
            alpha_end: t.alpha_end,
            min_count: t.min_count,
            subsample: t.subsample,
            half_embedding: HalfEmbedding::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    pub runs: usize,
    pub threshold: ThresholdMode,
    pub resampling: ResamplingKind,
    pub subsample: Option<f64>,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { seed: 0, runs: 50, threshold: ThresholdMode::Zero, resampling: ResamplingKind::BWord, subsample: None, workers: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    /// Also write each cell's diff vector.
    pub export_diffs: bool,
}

/// Parse `key.path=value`. Comma-separated values become arrays; values
/// that are not valid TOML are taken as strings.
pub fn parse_override(spec: &str) -> Result<(Vec<String>, Value)> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {spec:?} is not of the form key=value")))?;
    let path: Vec<String> = key.trim().split('.').map(|s| s.trim().to_string()).collect();
    if path.iter().any(String::is_empty) {
        return Err(Error::Config(format!("override {spec:?} has an empty key segment")));
    }
    let raw = raw.trim();
    let value = if raw.contains(',') && !raw.starts_with('[') && !raw.starts_with('"') {
        Value::Array(raw.split(',').map(|v| scalar(v.trim())).collect())
    } else {
        scalar(raw)
    };
    Ok((path, value))
}

fn scalar(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Set a dotted key in `table`, creating intermediate tables.
pub fn apply_override(table: &mut Table, path: &[String], value: Value) -> Result<()> {
    let (last, parents) = path.split_last().expect("non-empty override path");
    let mut node = table;
    for part in parents {
        let entry = node.entry(part.clone()).or_insert_with(|| Value::Table(Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override key {} crosses a non-table value", path.join("."))))?;
    }
    node.insert(last.clone(), value);
    Ok(())
}

impl Config {
    /// Parse TOML text, apply overrides and validate.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: Table = text.parse().map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        for spec in overrides {
            let (path, value) = parse_override(spec)?;
            apply_override(&mut table, &path, value)?;
        }
        let config: Config = table.try_into().map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Load `path` (if any) and apply overrides. Relative paths inside the
    /// file are resolved against the file's directory.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let (text, base) = match path {
            Some(p) => (fs::read_to_string(p).map_err(|e| Error::io(p, e))?, p.parent().map(Path::to_path_buf)),
            None => (String::new(), None),
        };
        let mut config = Self::from_toml(&text, overrides)?;
        if let Some(base) = base.filter(|b| !b.as_os_str().is_empty()) {
            config.resolve_paths(&base);
        }
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.dataset.path.iter_mut().for_each(fix);
        self.lexicon.path.iter_mut().for_each(fix);
        self.lexicon.compare.iter_mut().for_each(fix);
        self.preprocess.stopwords.iter_mut().for_each(fix);
        self.output.dir.iter_mut().for_each(fix);
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.bagging().train.params(&self.grid.cells()[0], 0, 0).validate().map_err(|e| Error::Config(e.to_string()))?;
        self.run_config().validate()?;
        if self.run.seed > i64::MAX as u64 {
            return Err(Error::Config(format!("run.seed must not exceed {}", i64::MAX)));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn dataset_path(&self) -> Result<&Path> {
        self.dataset.path.as_deref().ok_or_else(|| Error::Config("dataset.path is required".into()))
    }

    pub fn lexicon_path(&self) -> Result<&Path> {
        self.lexicon.path.as_deref().ok_or_else(|| Error::Config("lexicon.path is required".into()))
    }

    pub fn load_options(&self) -> LoadOptions {
        LoadOptions { min_chars: self.dataset.min_chars }
    }

    /// Preprocessing settings; every word of `lexicon` is protected from stopword removal.
    pub fn preprocess_config(&self, lexicon: Option<&SentimentLexicon>) -> Result<PreprocessConfig> {
        let p = &self.preprocess;
        let stopwords = match &p.stopwords {
            Some(path) => parse_word_list(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?).into_iter().collect(),
            None => PreprocessConfig::default().stopwords,
        };
        let mut config = PreprocessConfig::new(stopwords, p.negations.clone(), p.amplifiers.clone(), p.stemming);
        if let Some(lex) = lexicon {
            config.protect(lex.words());
        }
        Ok(config)
    }

    pub fn bagging(&self) -> BaggingConfig {
        let t = &self.train;
        BaggingConfig {
            grid: self.grid.clone(),
            resampling: self.run.resampling,
            train: TrainDefaults { alpha_start: t.alpha_start, alpha_end: t.alpha_end, min_count: t.min_count, subsample: t.subsample },
            half_embedding: t.half_embedding,
            amplifiers: self.preprocess.amplifiers.clone(),
            negations: self.preprocess.negations.clone(),
        }
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig { runs: self.run.runs, master_seed: self.run.seed, threshold: self.run.threshold, subsample: self.run.subsample }
    }

    /// Output directory: `output.dir`, else the environment default, else `lex2sent-out`.
    pub fn output_dir(&self) -> PathBuf {
        self.output
            .dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = Config::default();
        assert_eq!(Config::from_toml(&c.to_toml(), &[]).unwrap(), c);
        assert_eq!(c.grid.len(), 36);
        assert_eq!(c.preprocess.negations.len(), 10);
    }

    #[test]
    fn overrides_apply_last() {
        let text = "[grid]\ndims = [200]\n[run]\nseed = 4\n";
        let c = Config::from_toml(text, &["grid.dims=50,100".into(), "run.threshold=proportion".into(), "dataset.path=x/y.jsonl".into()]).unwrap();
        assert_eq!(c.grid.dims, vec![50, 100]);
        assert_eq!(c.grid.epochs, vec![5, 10, 15]);
        assert_eq!(c.run.seed, 4);
        assert_eq!(c.run.threshold, ThresholdMode::Proportion);
        assert_eq!(c.dataset.path, Some(PathBuf::from("x/y.jsonl")));
        let single = Config::from_toml("", &["grid.dims=[64]".into(), "run.subsample=0.25".into()]).unwrap();
        assert_eq!(single.grid.dims, vec![64]);
        let bare = Config::from_toml("", &["grid.dims=20".into()]).unwrap();
        assert_eq!(bare.grid.dims, vec![20]);
        assert_eq!(single.run.subsample, Some(0.25));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for bad in ["[grid]\ndim = [5]\n", "[bogus]\nx = 1\n", "top = 1\n"] {
            assert!(matches!(Config::from_toml(bad, &[]), Err(Error::Config(_))), "{bad}");
        }
        assert!(Config::from_toml("", &["run.bogus=1".into()]).is_err());
        assert!(Config::from_toml("", &["novalue".into()]).is_err());
        assert!(Config::from_toml("", &["run.runs=0".into()]).is_err());
        assert!(Config::from_toml("", &["grid.dims=abc".into()]).is_err());
    }

    #[test]
    fn relative_paths_follow_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        fs::write(&path, "[dataset]\npath = \"d.jsonl\"\n[lexicon]\npath = \"/abs/l.tsv\"\n").unwrap();
        let c = Config::load(Some(&path), &[]).unwrap();
        assert_eq!(c.dataset.path, Some(dir.path().join("d.jsonl")));
        assert_eq!(c.lexicon.path, Some(PathBuf::from("/abs/l.tsv")));
    }
}
