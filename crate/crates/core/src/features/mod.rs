//! Vocabulary, bag-of-words counts and tf-idf weighting.
//!
//! tf is the term count divided by the document's total (in-vocabulary) token
//! count. idf is the smoothed `ln((1 + N) / (1 + df)) + 1`. Each weighted row
//! is scaled to unit Euclidean norm.

mod sparse;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use sparse::{CountMatrix, CsrMatrix, WeightMatrix};

/// Bijective token ↔ column map. Ids follow ascending code-point order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    token_to_id: HashMap<String, usize>,
    id_to_token: Vec<String>,
}

impl Vocabulary {
    /// Build from tokens that are already sorted and distinct.
    pub fn from_sorted(tokens: Vec<String>) -> Result<Self> {
        if tokens.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Range(
                "vocabulary tokens must be strictly ascending".into(),
            ));
        }
        let token_to_id = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Vocabulary {
            token_to_id,
            id_to_token: tokens,
        })
    }

    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_token.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.id_to_token.get(id).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.id_to_token
    }
}

impl Serialize for Vocabulary {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.id_to_token.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vocabulary {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let tokens = Vec::<String>::deserialize(d)?;
        Vocabulary::from_sorted(tokens).map_err(serde::de::Error::custom)
    }
}

/// Distinct tokens across all documents, ids in lexicographic order.
pub fn fit_vocabulary<S: AsRef<str>>(token_lists: &[Vec<S>]) -> Vocabulary {
    let distinct: BTreeSet<&str> = token_lists
        .iter()
        .flat_map(|doc| doc.iter().map(AsRef::as_ref))
        .collect();
    let tokens: Vec<String> = distinct.into_iter().map(str::to_owned).collect();
    Vocabulary::from_sorted(tokens).expect("BTreeSet iteration is sorted and distinct")
}

/// Count matrix over `vocab`. Tokens outside the vocabulary are dropped.
pub fn count_transform<S: AsRef<str>>(token_lists: &[Vec<S>], vocab: &Vocabulary) -> CountMatrix {
    let mut m = CsrMatrix::empty(vocab.len());
    let mut ids: Vec<usize> = Vec::new();
    for doc in token_lists {
        ids.clear();
        ids.extend(doc.iter().filter_map(|t| vocab.id(t.as_ref())));
        ids.sort_unstable();
        let mut row: Vec<(usize, u32)> = Vec::new();
        for &j in &ids {
            match row.last_mut() {
                Some((last, c)) if *last == j => *c += 1,
                _ => row.push((j, 1)),
            }
        }
        m.push_row(row);
    }
    m
}

/// Smoothed inverse document frequencies fitted on a count matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdfVector {
    pub idf: Vec<f64>,
    pub n_docs_fitted: usize,
}

impl IdfVector {
    pub fn len(&self) -> usize {
        self.idf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idf.is_empty()
    }
}

pub fn fit_idf(counts: &CountMatrix) -> Result<IdfVector> {
    let n = counts.n_rows();
    if n == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut df = vec![0usize; counts.n_cols()];
    for (idx, _) in counts.rows() {
        for &j in idx {
            df[j] += 1;
        }
    }
    let idf = df
        .iter()
        .map(|&d| ((1.0 + n as f64) / (1.0 + d as f64)).ln() + 1.0)
        .collect();
    Ok(IdfVector {
        idf,
        n_docs_fitted: n,
    })
}

/// tf · idf, then unit Euclidean norm per row. Empty rows stay empty.
pub fn tfidf_transform(counts: &CountMatrix, idf: &IdfVector) -> Result<WeightMatrix> {
    if counts.n_cols() != idf.len() {
        return Err(Error::DimensionMismatch {
            expected: idf.len(),
            found: counts.n_cols(),
        });
    }
    let mut out = CsrMatrix::empty(counts.n_cols());
    let mut row: Vec<(usize, f64)> = Vec::new();
    for (idx, vals) in counts.rows() {
        row.clear();
        let total: u64 = vals.iter().map(|&c| c as u64).sum();
        if total > 0 {
            let total = total as f64;
            row.extend(
                idx.iter()
                    .zip(vals)
                    .map(|(&j, &c)| (j, c as f64 / total * idf.idf[j])),
            );
            let norm = row.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
            for (_, w) in row.iter_mut() {
                *w /= norm;
            }
        }
        out.push_row(row.iter().copied());
    }
    Ok(out)
}
