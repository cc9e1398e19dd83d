use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::corpus::{Corpus, Document};
use super::vector::SparseVector;
use crate::error::Result;

/// Smoothed tf-idf vectorizer: `idf(t) = ln((1 + N) / (1 + df(t))) + 1`, L2-normalized output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfModel {
    vocabulary: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
    idf: Vec<f64>,
}

impl TfIdfModel {
    /// Fits on `corpus`. Vocabulary indices follow first occurrence in corpus order.
    pub fn fit(corpus: &Corpus) -> Result<Self> {
        corpus.require_non_empty()?;
        Ok(Self::fit_documents(corpus.documents()))
    }

    /// Fits on an arbitrary non-empty slice of documents.
    pub fn fit_documents(docs: &[Document]) -> Self {
        let mut vocabulary: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut df: Vec<usize> = Vec::new();
        for doc in docs {
            let mut seen_here: Vec<usize> = Vec::new();
            for tok in doc.tokens() {
                let id = *index.entry(tok.clone()).or_insert_with(|| {
                    vocabulary.push(tok.clone());
                    df.push(0);
                    vocabulary.len() - 1
                });
                if !seen_here.contains(&id) {
                    seen_here.push(id);
                    df[id] += 1;
                }
            }
        }
        let n = docs.len() as f64;
        let idf = df.iter().map(|&d| ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0).collect();
        Self { vocabulary, index, idf }
    }

    pub fn dim(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn idf(&self, token: &str) -> Option<f64> {
        self.index_of(token).map(|i| self.idf[i])
    }

    /// Raw-count tf times idf, L2-normalized. Out-of-vocabulary tokens are dropped.
    pub fn vectorize(&self, doc: &Document) -> SparseVector<f64> {
        self.vectorize_tokens(doc.tokens())
    }

    pub fn vectorize_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> SparseVector<f64> {
        let mut counts: HashMap<usize, f64> = HashMap::new();
        for t in tokens {
            if let Some(i) = self.index_of(t.as_ref()) {
                *counts.entry(i).or_insert(0.0) += 1.0;
            }
        }
        let pairs = counts.into_iter().map(|(i, tf)| (i, tf * self.idf[i]));
        SparseVector::from_pairs(self.dim(), pairs)
            .expect("indices come from the vocabulary")
            .normalized()
    }

    /// Restores the lookup index after deserialization.
    pub fn rebuild_index(&mut self) {
        self.index = self.vocabulary.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    }
}
