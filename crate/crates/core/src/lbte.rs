//! Lexicon-based text-embedding scores: how much closer a document
//! embedding is to the positive half than to the negative half.

use std::fs;
use std::path::Path;

use crate::doc2vec::EmbeddingModel;
use crate::error::{Error, Result};

/// Per-document `cos_dist(doc, negative half) - cos_dist(doc, positive half)`
/// for one trained model. Larger means more positive.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffVector {
    pub values: Vec<f64>,
    pub cell_id: usize,
    /// Number of distance evaluations that hit a zero-norm vector.
    pub degenerate: usize,
}

impl DiffVector {
    pub fn new(values: Vec<f64>, cell_id: usize) -> Self {
        DiffVector { values, cell_id, degenerate: 0 }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `doc_id<TAB>diff` rows with a header.
    pub fn write_rows(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut body = String::from("doc_id\tdiff\n");
        for (i, v) in self.values.iter().enumerate() {
            body.push_str(&format!("{i}\t{v:?}\n"));
        }
        fs::write(path, body).map_err(|e| Error::io(path, e))
    }
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `1 - <a,b> / (|a| |b|)`, in `[0, 2]`. `None` when either vector has zero norm.
pub fn try_cos_dist(a: &[f64], b: &[f64]) -> Option<f64> {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Some(1.0 - (dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Cosine distance; a zero-norm input counts as orthogonal (distance 1).
pub fn cos_dist(a: &[f64], b: &[f64]) -> f64 {
    try_cos_dist(a, b).unwrap_or(1.0)
}

/// Diff values for a sequence of document vectors against the two half vectors.
pub fn diff_from_vectors<'a>(
    docs: impl IntoIterator<Item = &'a [f64]>,
    positive: &[f64],
    negative: &[f64],
    cell_id: usize,
) -> DiffVector {
    let mut degenerate = 0;
    let mut dist = |a: &[f64], b: &[f64]| {
        try_cos_dist(a, b).unwrap_or_else(|| {
            degenerate += 1;
            1.0
        })
    };
    let values = docs
        .into_iter()
        .map(|d| {
            let neg = dist(d, negative);
            let pos = dist(d, positive);
            neg - pos
        })
        .collect();
    DiffVector { values, cell_id, degenerate }
}

/// Diff vector over documents `doc_tags` (output in that order), using the
/// trained pseudo-documents `positive_tag` and `negative_tag` as half embeddings.
pub fn diff_vector(
    model: &EmbeddingModel,
    doc_tags: &[usize],
    positive_tag: usize,
    negative_tag: usize,
    cell_id: usize,
) -> Result<DiffVector> {
    let positive = model.doc_vector(positive_tag)?;
    let negative = model.doc_vector(negative_tag)?;
    let docs = doc_tags.iter().map(|&t| model.doc_vector(t)).collect::<Result<Vec<_>>>()?;
    Ok(diff_from_vectors(docs, positive, negative, cell_id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc2vec::{build_vocab, TaggedDocument, TrainParams};
    use proptest::prelude::*;

    #[test]
    fn cos_dist_cases() {
        let a = [1.0, 2.0, -3.0];
        let neg: Vec<f64> = a.iter().map(|x| -x).collect();
        assert!(cos_dist(&a, &a).abs() < 1e-12);
        assert!((cos_dist(&a, &neg) - 2.0).abs() < 1e-12);
        assert!((cos_dist(&[1.0, 0.0], &[0.0, 5.0]) - 1.0).abs() < 1e-12);
        assert_eq!(cos_dist(&[0.0, 0.0], &[1.0, 0.0]), 1.0);
        assert_eq!(try_cos_dist(&[0.0, 0.0], &[1.0, 0.0]), None);
    }

    #[test]
    fn diff_cases() {
        let pos = [1.0, 0.0];
        let neg = [0.0, 1.0];
        let d = diff_from_vectors([&pos[..], &[1.0, 1.0][..], &[0.0, 0.0][..]], &pos, &neg, 0);
        assert!((d.values[0] - 1.0).abs() < 1e-12);
        assert!(d.values[1].abs() < 1e-12);
        assert_eq!(d.values[2], 0.0);
        assert_eq!(d.degenerate, 2);
    }

    /// Model with hand-set document vectors.
    fn hand_model(vectors: &[[f64; 3]]) -> EmbeddingModel {
        let docs = vec![TaggedDocument::new(0, "a b")];
        let mut v = build_vocab(docs.iter().map(|d| &d.words), 1).unwrap();
        v.build_huffman().unwrap();
        let params = TrainParams { dim: 3, min_count: 1, ..Default::default() };
        let mut model = EmbeddingModel::new(v, (0..vectors.len()).collect(), params).unwrap();
        for (i, vec) in vectors.iter().enumerate() {
            model.doc_vectors_mut().row_mut(i).copy_from_slice(vec);
        }
        model
    }

    #[test]
    fn three_document_toy_model() {
        // tags 0..3 documents, 3 positive half, 4 negative half
        let model = hand_model(&[[1.0, 2.0, 0.0], [0.0, -1.0, 1.0], [3.0, 0.0, 4.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let d = diff_vector(&model, &[0, 1, 2], 3, 4, 7).unwrap();
        // by hand: doc0 = (1,2,0), |doc0| = sqrt5; cos to pos = 1/sqrt5, cos to neg = 2/sqrt5
        let s5 = 5f64.sqrt();
        let s2 = 2f64.sqrt();
        let expected = [
            (1.0 - 2.0 / s5) - (1.0 - 1.0 / s5),
            (1.0 + 1.0 / s2) - 1.0,
            1.0 - (1.0 - 3.0 / 5.0),
        ];
        for (got, want) in d.values.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert_eq!(d.cell_id, 7);
        assert!(matches!(diff_vector(&model, &[0], 3, 9, 0), Err(Error::UnknownDocument(9))));
    }

    #[test]
    fn export_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cell.tsv");
        DiffVector::new(vec![0.5, -0.25], 0).write_rows(&p).unwrap();
        assert_eq!(fs::read_to_string(p).unwrap(), "doc_id\tdiff\n0\t0.5\n1\t-0.25\n");
    }

    fn vec3() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-10.0f64..10.0, 3).prop_filter("nonzero", |v| norm(v) > 1e-3)
    }

    proptest! {
        #[test]
        fn diff_properties(d in vec3(), p in vec3(), n in vec3(), c in 0.01f64..100.0) {
            let base = diff_from_vectors([&d[..]], &p, &n, 0).values[0];
            prop_assert!(base.abs() <= 2.0);
            let scaled: Vec<f64> = d.iter().map(|x| x * c).collect();
            let rescaled = diff_from_vectors([&scaled[..]], &p, &n, 0).values[0];
            prop_assert!((base - rescaled).abs() < 1e-12);
            let swapped = diff_from_vectors([&d[..]], &n, &p, 0).values[0];
            prop_assert_eq!(swapped, -base);
        }
    }
}
