use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Label;
use crate::text::{tokenize, LabeledCorpus};

/// Multinomial naive Bayes over bag-of-words counts with add-one smoothing.
/// Tokens unseen in training are ignored at prediction time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NaiveBayes {
    vocabulary: Vec<String>,
    /// Documents per class, indexed by label value.
    class_counts: [u64; 2],
    /// Token occurrences per class, parallel to `vocabulary`.
    token_counts: Vec<[u64; 2]>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl NaiveBayes {
    pub fn train(data: &LabeledCorpus) -> Self {
        let mut model = Self { vocabulary: Vec::new(), class_counts: [0; 2], token_counts: Vec::new(), index: HashMap::new() };
        for (doc, label) in data.iter() {
            let c = label.as_u8() as usize;
            model.class_counts[c] += 1;
            for tok in doc.tokens() {
                let id = match model.index.get(tok) {
                    Some(&id) => id,
                    None => {
                        model.vocabulary.push(tok.clone());
                        model.token_counts.push([0; 2]);
                        model.index.insert(tok.clone(), model.vocabulary.len() - 1);
                        model.vocabulary.len() - 1
                    }
                };
                model.token_counts[id][c] += 1;
            }
        }
        model
    }

    pub(super) fn rebuild_index(&mut self) {
        self.index = self.vocabulary.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    }

    fn log_joint(&self, tokens: &[String]) -> [f64; 2] {
        let v = self.vocabulary.len() as f64;
        let docs = (self.class_counts[0] + self.class_counts[1]) as f64;
        let totals = [0, 1].map(|c| self.token_counts.iter().map(|t| t[c]).sum::<u64>() as f64);
        let mut out = [0, 1].map(|c| (self.class_counts[c] as f64 / docs).ln());
        for tok in tokens {
            if let Some(&id) = self.index.get(tok) {
                for c in 0..2 {
                    out[c] += ((self.token_counts[id][c] as f64 + 1.0) / (totals[c] + v)).ln();
                }
            }
        }
        out
    }

    /// Posterior probability of the positive class.
    pub fn score(&self, text: &str) -> f64 {
        let [neg, pos] = self.log_joint(&tokenize(text));
        1.0 / (1.0 + (neg - pos).exp())
    }

    pub fn prior(&self, label: Label) -> f64 {
        self.class_counts[label.as_u8() as usize] as f64 / (self.class_counts[0] + self.class_counts[1]) as f64
    }
}
