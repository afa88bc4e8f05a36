//! Plain-text model dump.
//!
//! ```text
//! lex2sent-model 1
//! vocab <V> docs <D> dim <q>
//! params <json>
//! <word>\t<count>\t<q values>      (V rows, vocabulary order)
//! <tag>\t<q values>                (D rows)
//! <q values>                       (V-1 inner-node rows)
//! ```
//!
//! Values use Rust's shortest round-trip float formatting, so a dump reads
//! back bit-identically. The Huffman tree is rebuilt from the counts.

use std::io::{BufRead, Write};

use super::model::{EmbeddingModel, Matrix};
use super::vocab::Vocabulary;
use super::TrainParams;
use crate::error::{Error, Result};

const MAGIC: &str = "lex2sent-model 1";

fn write_row(out: &mut impl Write, row: &[f64]) -> std::io::Result<()> {
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            out.write_all(b" ")?;
        }
        write!(out, "{v:?}")?;
    }
    out.write_all(b"\n")
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: "<model>".into(), line, message: message.into() }
}

fn parse_row(text: &str, dim: usize, line: usize) -> Result<Vec<f64>> {
    let row: Vec<f64> = text
        .split(' ')
        .map(|v| v.parse::<f64>().map_err(|e| parse_err(line, e.to_string())))
        .collect::<Result<_>>()?;
    if row.len() != dim {
        return Err(parse_err(line, format!("expected {dim} values, found {}", row.len())));
    }
    Ok(row)
}

impl EmbeddingModel {
    pub fn write_text(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{MAGIC}")?;
        writeln!(out, "vocab {} docs {} dim {}", self.vocab.len(), self.doc_tags().len(), self.dim())?;
        writeln!(out, "params {}", serde_json::to_string(&self.params).expect("params serialize"))?;
        for (i, word) in self.vocab.words().iter().enumerate() {
            write!(out, "{word}\t{}\t", self.vocab.counts()[i])?;
            write_row(out, self.word_vectors.row(i))?;
        }
        for (row, tag) in self.doc_tags().iter().enumerate() {
            write!(out, "{tag}\t")?;
            write_row(out, self.doc_vectors.row(row))?;
        }
        for row in 0..self.inner_vectors.rows() {
            write_row(out, self.inner_vectors.row(row))?;
        }
        Ok(())
    }

    pub fn read_text(input: impl BufRead) -> Result<EmbeddingModel> {
        let mut lines = input.lines().enumerate().map(|(i, l)| {
            l.map(|l| (i + 1, l)).map_err(|e| Error::io("<model>", e))
        });
        let mut next = |what: &str| -> Result<(usize, String)> {
            lines.next().unwrap_or_else(|| Err(parse_err(0, format!("unexpected end of input, expected {what}"))))
        };
        let (n, magic) = next("header")?;
        if magic != MAGIC {
            return Err(parse_err(n, "not a model dump"));
        }
        let (n, sizes) = next("sizes")?;
        let fields: Vec<&str> = sizes.split(' ').collect();
        let size = |i: usize| -> Result<usize> {
            fields.get(i).and_then(|v| v.parse().ok()).ok_or_else(|| parse_err(n, "bad size line"))
        };
        let (n_words, n_docs, dim) = (size(1)?, size(3)?, size(5)?);
        let (n, params_line) = next("params")?;
        let params: TrainParams = params_line
            .strip_prefix("params ")
            .and_then(|p| serde_json::from_str(p).ok())
            .ok_or_else(|| parse_err(n, "bad params line"))?;

        let mut counts = Vec::with_capacity(n_words);
        let mut words = Vec::with_capacity(n_words * dim);
        for _ in 0..n_words {
            let (n, line) = next("word row")?;
            let mut parts = line.splitn(3, '\t');
            let (Some(w), Some(c), Some(v)) = (parts.next(), parts.next(), parts.next()) else {
                return Err(parse_err(n, "bad word row"));
            };
            let c: u64 = c.parse().map_err(|_| parse_err(n, "bad count"))?;
            counts.push((w.to_string(), c));
            words.extend(parse_row(v, dim, n)?);
        }
        let mut tags = Vec::with_capacity(n_docs);
        let mut docs = Vec::with_capacity(n_docs * dim);
        for _ in 0..n_docs {
            let (n, line) = next("document row")?;
            let (t, v) = line.split_once('\t').ok_or_else(|| parse_err(n, "bad document row"))?;
            tags.push(t.parse().map_err(|_| parse_err(n, "bad tag"))?);
            docs.extend(parse_row(v, dim, n)?);
        }
        let mut inner = Vec::with_capacity(n_words.saturating_sub(1) * dim);
        for _ in 1..n_words {
            let (n, line) = next("inner row")?;
            inner.extend(parse_row(&line, dim, n)?);
        }

        let mut vocab = Vocabulary::from_counts(counts, params.min_count)?;
        vocab.build_huffman()?;
        vocab.set_subsampling(params.subsample);
        let vocab_len = vocab.len();
        EmbeddingModel::from_parts(
            params.clone(),
            vocab,
            Matrix::from_vec(vocab_len, dim, words)?,
            Matrix::from_vec(tags.len(), dim, docs)?,
            Matrix::from_vec(vocab_len - 1, dim, inner)?,
            tags,
        )
    }

    /// `word<TAB>count` rows in vocabulary order.
    pub fn write_vocab(&self, out: &mut impl Write) -> std::io::Result<()> {
        for (w, c) in self.vocab.words().iter().zip(self.vocab.counts()) {
            writeln!(out, "{w}\t{c}")?;
        }
        Ok(())
    }
}
