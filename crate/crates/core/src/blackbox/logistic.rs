use serde::{Deserialize, Serialize};

use crate::text::{Document, LabeledCorpus, SparseVector, TfIdfModel};

const MAX_EPOCHS: usize = 500;
const TOLERANCE: f64 = 1e-6;
const LEARNING_RATE: f64 = 2.0;

/// Logistic-loss linear model over tf-idf features, trained by full-batch gradient descent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogisticModel {
    tfidf: TfIdfModel,
    weights: Vec<f64>,
    bias: f64,
    epochs: usize,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl LogisticModel {
    pub fn train(data: &LabeledCorpus) -> Self {
        let tfidf = TfIdfModel::fit_documents(data.corpus.documents());
        let features: Vec<SparseVector<f64>> = data.corpus.iter().map(|d| tfidf.vectorize(d)).collect();
        let targets: Vec<f64> = data.labels.iter().map(|l| l.as_u8() as f64).collect();
        let n = features.len() as f64;
        let mut weights = vec![0.0; tfidf.dim()];
        let mut bias = 0.0;
        let mut previous = f64::INFINITY;
        let mut epochs = 0;
        for _ in 0..MAX_EPOCHS {
            epochs += 1;
            let mut grad = vec![0.0; weights.len()];
            let mut grad_bias = 0.0;
            let mut loss = 0.0;
            for (x, &y) in features.iter().zip(&targets) {
                let z = bias + x.entries().iter().map(|&(i, v)| weights[i] * v).sum::<f64>();
                let p = sigmoid(z);
                // log(1 + e^z) - y z, computed stably
                loss += z.max(0.0) + (-z.abs()).exp().ln_1p() - y * z;
                let r = p - y;
                grad_bias += r;
                for &(i, v) in x.entries() {
                    grad[i] += r * v;
                }
            }
            loss /= n;
            for (w, g) in weights.iter_mut().zip(&grad) {
                *w -= LEARNING_RATE * g / n;
            }
            bias -= LEARNING_RATE * grad_bias / n;
            if (previous - loss).abs() < TOLERANCE {
                break;
            }
            previous = loss;
        }
        Self { tfidf, weights, bias, epochs }
    }

    pub(super) fn rebuild_index(&mut self) {
        self.tfidf.rebuild_index();
    }

    pub fn epochs(&self) -> usize {
        self.epochs
    }

    pub fn score(&self, text: &str) -> f64 {
        let x = self.tfidf.vectorize(&Document::new(text));
        sigmoid(self.bias + x.entries().iter().map(|&(i, v)| self.weights[i] * v).sum::<f64>())
    }
}
