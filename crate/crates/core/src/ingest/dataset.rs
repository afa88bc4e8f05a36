use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Corpus, Document, Label};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetFormat {
    /// `pos/` and `neg/` directories of one-document text files.
    LabeledDirs,
    /// Delimited records with a text column and a 1-5 star rating.
    ReviewCsv,
    /// Delimited records with a text column and positive/negative/neutral sentiment.
    TweetCsv,
    /// One JSON object per line carrying text and either a rating or a sentiment.
    Jsonl,
}

impl FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "labeled-dirs" => Ok(DatasetFormat::LabeledDirs),
            "review-csv" => Ok(DatasetFormat::ReviewCsv),
            "tweet-csv" => Ok(DatasetFormat::TweetCsv),
            "jsonl" => Ok(DatasetFormat::Jsonl),
            other => Err(Error::Config(format!("unknown dataset format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadOptions {
    /// Drop documents with fewer characters than this.
    pub min_chars: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub loaded: usize,
    pub malformed: usize,
    pub neutral_dropped: usize,
    pub short_dropped: usize,
}

const TEXT_FIELDS: [&str; 4] = ["text", "reviewText", "review", "content"];
const RATING_FIELDS: [&str; 4] = ["rating", "overall", "stars", "score"];
const SENTIMENT_FIELDS: [&str; 3] = ["sentiment", "airline_sentiment", "label"];

/// Outcome of mapping one source record to a label.
enum Verdict {
    Keep(Label),
    Neutral,
    Malformed,
}

fn rating_verdict(rating: f64) -> Verdict {
    if rating.fract() != 0.0 || !(1.0..=5.0).contains(&rating) {
        return Verdict::Malformed;
    }
    match rating as u8 {
        4 | 5 => Verdict::Keep(Label::Positive),
        1 | 2 => Verdict::Keep(Label::Negative),
        _ => Verdict::Neutral,
    }
}

fn sentiment_verdict(s: &str) -> Verdict {
    match s.trim().to_ascii_lowercase().as_str() {
        "neutral" => Verdict::Neutral,
        other => match other.parse::<Label>() {
            Ok(label) => Verdict::Keep(label),
            Err(_) => Verdict::Malformed,
        },
    }
}

struct Collector<'a> {
    options: &'a LoadOptions,
    report: LoadReport,
    documents: Vec<Document>,
}

impl Collector<'_> {
    fn push(&mut self, source: String, text: Option<String>, verdict: Verdict) {
        let (text, label) = match (text, verdict) {
            (None, _) | (_, Verdict::Malformed) => {
                self.report.malformed += 1;
                return;
            }
            (_, Verdict::Neutral) => {
                self.report.neutral_dropped += 1;
                return;
            }
            (Some(text), Verdict::Keep(label)) => (text, label),
        };
        if let Some(min) = self.options.min_chars {
            if text.chars().count() < min {
                self.report.short_dropped += 1;
                return;
            }
        }
        self.report.loaded += 1;
        self.documents.push(Document::new(source, text, Some(label)));
    }
}

fn read_dir_sorted(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    Ok(files)
}

fn load_labeled_dirs(root: &Path, c: &mut Collector<'_>) -> Result<()> {
    for (sub, label) in [("pos", Label::Positive), ("neg", Label::Negative)] {
        for file in read_dir_sorted(&root.join(sub))? {
            let source = format!("{sub}/{}", file.file_name().unwrap_or_default().to_string_lossy());
            match fs::read_to_string(&file) {
                Ok(text) => c.push(source, Some(text), Verdict::Keep(label)),
                Err(e) if e.kind() == std::io::ErrorKind::InvalidData => c.push(source, None, Verdict::Malformed),
                Err(e) => return Err(Error::io(&file, e)),
            }
        }
    }
    Ok(())
}

fn find_column(headers: &csv::StringRecord, names: &[&str]) -> Option<usize> {
    headers
        .iter()
        .position(|h| names.iter().any(|n| n.eq_ignore_ascii_case(h.trim())))
}

fn load_delimited(path: &Path, format: DatasetFormat, c: &mut Collector<'_>) -> Result<()> {
    let delimiter = match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") | Some("tab") => b'\t',
        _ => b',',
    };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Parse { path: path.into(), line: 1, message: format!("{other:?}") },
        })?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse { path: path.into(), line: 1, message: e.to_string() })?
        .clone();
    let label_fields: &[&str] = match format {
        DatasetFormat::ReviewCsv => &RATING_FIELDS,
        _ => &SENTIMENT_FIELDS,
    };
    let (Some(text_col), Some(label_col)) = (find_column(&headers, &TEXT_FIELDS), find_column(&headers, label_fields)) else {
        return Err(Error::Parse {
            path: path.into(),
            line: 1,
            message: format!("header must name a text column and one of {label_fields:?}"),
        });
    };
    for (row, record) in reader.records().enumerate() {
        let source = format!("row {}", row + 1);
        let Ok(record) = record else {
            c.push(source, None, Verdict::Malformed);
            continue;
        };
        let text = record.get(text_col).map(str::to_string);
        let verdict = match (format, record.get(label_col)) {
            (_, None) => Verdict::Malformed,
            (DatasetFormat::ReviewCsv, Some(r)) => r.trim().parse::<f64>().map_or(Verdict::Malformed, rating_verdict),
            (_, Some(s)) => sentiment_verdict(s),
        };
        c.push(source, text, verdict);
    }
    Ok(())
}

fn json_field<'v>(obj: &'v Value, names: &[&str]) -> Option<&'v Value> {
    names.iter().find_map(|n| obj.get(n))
}

fn load_jsonl(path: &Path, c: &mut Collector<'_>) -> Result<()> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    for (line_no, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let source = format!("line {}", line_no + 1);
        let Ok(obj) = serde_json::from_str::<Value>(line) else {
            c.push(source, None, Verdict::Malformed);
            continue;
        };
        let text = json_field(&obj, &TEXT_FIELDS).and_then(Value::as_str).map(str::to_string);
        let verdict = if let Some(rating) = json_field(&obj, &RATING_FIELDS) {
            match rating {
                Value::Number(n) => n.as_f64().map_or(Verdict::Malformed, rating_verdict),
                Value::String(s) => s.trim().parse::<f64>().map_or(Verdict::Malformed, rating_verdict),
                _ => Verdict::Malformed,
            }
        } else {
            json_field(&obj, &SENTIMENT_FIELDS)
                .and_then(Value::as_str)
                .map_or(Verdict::Malformed, sentiment_verdict)
        };
        c.push(source, text, verdict);
    }
    Ok(())
}

/// Load a labeled dataset. Review ratings map 4-5 stars to positive and
/// 1-2 stars to negative; 3-star reviews and neutral records are dropped.
/// Malformed records are skipped and counted in the report.
pub fn load_dataset(path: impl AsRef<Path>, format: DatasetFormat, options: &LoadOptions) -> Result<(Corpus, LoadReport)> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::io(path, std::io::Error::from(std::io::ErrorKind::NotFound)));
    }
    let mut collector = Collector { options, report: LoadReport::default(), documents: Vec::new() };
    match format {
        DatasetFormat::LabeledDirs => load_labeled_dirs(path, &mut collector)?,
        DatasetFormat::ReviewCsv | DatasetFormat::TweetCsv => load_delimited(path, format, &mut collector)?,
        DatasetFormat::Jsonl => load_jsonl(path, &mut collector)?,
    }
    if collector.documents.is_empty() {
        return Err(Error::EmptyCorpus(format!(
            " after loading {} ({} malformed, {} neutral, {} too short)",
            path.display(),
            collector.report.malformed,
            collector.report.neutral_dropped,
            collector.report.short_dropped
        )));
    }
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok((Corpus::new(name, collector.documents), collector.report))
}
