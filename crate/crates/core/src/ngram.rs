//! Document-count statistics over padded token sequences, giving the preceding/succeeding
//! conditional probabilities that drive the edition search.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{Corpus, PAD};

/// Counts, for every contiguous subsequence of length `1..=n+1` in the padded corpus texts,
/// how many documents contain it at least once.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextModel {
    n: usize,
    corpus_size: usize,
    epsilon: f64,
    counts: HashMap<String, usize>,
}

fn key<S: AsRef<str>>(tokens: &[S]) -> String {
    crate::text::detokenize(tokens)
}

/// `n` padding tokens on each side of `tokens`.
pub fn pad<S: AsRef<str>>(tokens: &[S], n: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len() + 2 * n);
    out.extend(std::iter::repeat_n(PAD.to_string(), n));
    out.extend(tokens.iter().map(|t| t.as_ref().to_string()));
    out.extend(std::iter::repeat_n(PAD.to_string(), n));
    out
}

impl ContextModel {
    pub fn build(corpus: &Corpus, n: usize) -> Result<Self> {
        corpus.require_non_empty()?;
        if n == 0 {
            return Err(Error::Config("context width n must be at least 1".into()));
        }
        let mut counts: HashMap<String, usize> = HashMap::new();
        for doc in corpus.iter() {
            let padded = pad(doc.tokens(), n);
            let mut seen: HashSet<String> = HashSet::new();
            for len in 1..=n + 1 {
                for window in padded.windows(len) {
                    seen.insert(key(window));
                }
            }
            for k in seen {
                *counts.entry(k).or_insert(0) += 1;
            }
        }
        Ok(Self::from_parts(n, corpus.len(), counts))
    }

    fn from_parts(n: usize, corpus_size: usize, counts: HashMap<String, usize>) -> Self {
        Self { n, corpus_size, epsilon: 1.0 / (corpus_size as f64 + 1.0), counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Number of corpus documents containing `subsequence`. The empty subsequence is contained in all.
    pub fn count<S: AsRef<str>>(&self, subsequence: &[S]) -> usize {
        if subsequence.is_empty() {
            return self.corpus_size;
        }
        self.counts.get(&key(subsequence)).copied().unwrap_or(0)
    }

    fn ratio(&self, numerator: usize, denominator: usize) -> f64 {
        if numerator == 0 || denominator == 0 {
            self.epsilon
        } else {
            numerator as f64 / denominator as f64
        }
    }

    /// `count(preceding ⧺ w) / count(preceding)`, floored at epsilon.
    pub fn p_pre<S: AsRef<str>>(&self, w: &str, preceding: &[S]) -> f64 {
        let mut joint: Vec<&str> = preceding.iter().map(AsRef::as_ref).collect();
        joint.push(w);
        self.ratio(self.count(&joint), self.count(preceding))
    }

    /// `count(w ⧺ succeeding) / count(succeeding)`, floored at epsilon.
    pub fn p_suc<S: AsRef<str>>(&self, w: &str, succeeding: &[S]) -> f64 {
        let mut joint: Vec<&str> = Vec::with_capacity(succeeding.len() + 1);
        joint.push(w);
        joint.extend(succeeding.iter().map(AsRef::as_ref));
        self.ratio(self.count(&joint), self.count(succeeding))
    }

    pub fn to_json(&self) -> Result<String> {
        let table = CountTable {
            n: self.n,
            corpus_size: self.corpus_size,
            counts: self.counts.iter().map(|(k, v)| (k.clone(), *v)).collect(),
        };
        Ok(serde_json::to_string(&table)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let table: CountTable = serde_json::from_str(s)?;
        Ok(Self::from_parts(table.n, table.corpus_size, table.counts.into_iter().collect()))
    }
}

/// Persisted form: keys are space-joined token tuples, sorted.
#[derive(Serialize, Deserialize)]
struct CountTable {
    n: usize,
    corpus_size: usize,
    counts: BTreeMap<String, usize>,
}
