//! The classifier under explanation: built-in models, an external-process adapter, and a prediction cache.

mod external;
mod logistic;
mod naive_bayes;

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::RwLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::text::LabeledCorpus;

pub use external::{serve_classifier, ExternalClassifier, PredictRequest, PredictResponse};
pub use logistic::LogisticModel;
pub use naive_bayes::NaiveBayes;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Negative = 0,
    Positive = 1,
}

impl Label {
    pub fn flip(self) -> Self {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Label::Negative),
            1 => Some(Label::Positive),
            _ => None,
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = u8::deserialize(d)?;
        Label::from_u8(v).ok_or_else(|| serde::de::Error::custom(format!("label must be 0 or 1, got {v}")))
    }
}

/// Black-box output for one text. `label` is positive iff `score_positive >= 0.5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub score_positive: f64,
    pub confidence: f64,
}

impl Prediction {
    pub fn from_score(score_positive: f64) -> Self {
        let p = if score_positive.is_nan() { 0.5 } else { score_positive.clamp(0.0, 1.0) };
        let label = if p >= 0.5 { Label::Positive } else { Label::Negative };
        Self { label, score_positive: p, confidence: p.max(1.0 - p) }
    }

    /// Probability the black box assigns to `label`.
    pub fn score_of(&self, label: Label) -> f64 {
        match label {
            Label::Positive => self.score_positive,
            Label::Negative => 1.0 - self.score_positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    BuiltinNb,
    BuiltinLinear,
    External,
}

/// Anything that maps texts to positive-class probabilities.
pub trait Classifier: Send + Sync {
    fn kind(&self) -> ModelKind;

    /// Predicts every text in order. Must be deterministic.
    fn predict_uncached(&self, texts: &[String]) -> Result<Vec<Prediction>>;
}

/// Built-in trainable classifiers, persisted as one self-describing JSON document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BuiltinModel {
    NaiveBayes(NaiveBayes),
    Linear(LogisticModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinKind {
    NaiveBayes,
    Linear,
}

impl std::str::FromStr for BuiltinKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nb" => Ok(BuiltinKind::NaiveBayes),
            "linear" => Ok(BuiltinKind::Linear),
            other => Err(Error::Config(format!("unknown classifier kind {other:?} (expected nb or linear)"))),
        }
    }
}

impl BuiltinModel {
    pub fn train(train: &LabeledCorpus, kind: BuiltinKind) -> Result<Self> {
        let positives = train.labels.iter().filter(|&&l| l == Label::Positive).count();
        if positives == 0 || positives == train.len() {
            return Err(Error::Config("training data must contain both labels".into()));
        }
        Ok(match kind {
            BuiltinKind::NaiveBayes => BuiltinModel::NaiveBayes(NaiveBayes::train(train)),
            BuiltinKind::Linear => BuiltinModel::Linear(LogisticModel::train(train)),
        })
    }

    pub fn score(&self, text: &str) -> f64 {
        match self {
            BuiltinModel::NaiveBayes(m) => m.score(text),
            BuiltinModel::Linear(m) => m.score(text),
        }
    }

    pub fn accuracy(&self, data: &LabeledCorpus) -> f64 {
        if data.is_empty() {
            return 0.0;
        }
        let correct = data
            .iter()
            .filter(|(doc, label)| Prediction::from_score(self.score(doc.raw())).label == *label)
            .count();
        correct as f64 / data.len() as f64
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let mut model: BuiltinModel = serde_json::from_str(s)?;
        if let BuiltinModel::Linear(m) = &mut model {
            m.rebuild_index();
        }
        if let BuiltinModel::NaiveBayes(m) = &mut model {
            m.rebuild_index();
        }
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

impl Classifier for BuiltinModel {
    fn kind(&self) -> ModelKind {
        match self {
            BuiltinModel::NaiveBayes(_) => ModelKind::BuiltinNb,
            BuiltinModel::Linear(_) => ModelKind::BuiltinLinear,
        }
    }

    fn predict_uncached(&self, texts: &[String]) -> Result<Vec<Prediction>> {
        Ok(texts.iter().map(|t| Prediction::from_score(self.score(t))).collect())
    }
}

/// Deterministic scoring function wrapped as a classifier; handy for planted test models.
pub struct FnClassifier<F>(pub F);

impl<F> Classifier for FnClassifier<F>
where
    F: Fn(&str) -> f64 + Send + Sync,
{
    fn kind(&self) -> ModelKind {
        ModelKind::External
    }

    fn predict_uncached(&self, texts: &[String]) -> Result<Vec<Prediction>> {
        Ok(texts.iter().map(|t| Prediction::from_score((self.0)(t))).collect())
    }
}

/// Memoizing handle around a classifier, keyed by the exact text string.
pub struct BlackBox {
    model: Box<dyn Classifier>,
    cache: RwLock<HashMap<String, Prediction>>,
    computed: AtomicUsize,
}

impl std::fmt::Debug for BlackBox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlackBox")
            .field("kind", &self.model.kind())
            .field("computed", &self.computed.load(Ordering::Relaxed))
            .finish()
    }
}

impl BlackBox {
    pub fn new(model: impl Classifier + 'static) -> Self {
        Self::from_boxed(Box::new(model))
    }

    pub fn from_boxed(model: Box<dyn Classifier>) -> Self {
        Self { model, cache: RwLock::new(HashMap::new()), computed: AtomicUsize::new(0) }
    }

    pub fn kind(&self) -> ModelKind {
        self.model.kind()
    }

    /// Number of texts the underlying model actually scored (cache misses).
    pub fn model_calls(&self) -> usize {
        self.computed.load(Ordering::Relaxed)
    }

    pub fn predict(&self, text: &str) -> Result<Prediction> {
        if let Some(p) = self.cache.read().expect("cache lock").get(text) {
            return Ok(*p);
        }
        Ok(self.predict_batch(&[text.to_string()])?[0])
    }

    /// Predicts `texts` in input order; only cache misses reach the model, in one batch.
    pub fn predict_batch(&self, texts: &[String]) -> Result<Vec<Prediction>> {
        let mut misses: Vec<String> = Vec::new();
        {
            let cache = self.cache.read().expect("cache lock");
            for t in texts {
                if !cache.contains_key(t) && !misses.contains(t) {
                    misses.push(t.clone());
                }
            }
        }
        if !misses.is_empty() {
            let fresh = self.model.predict_uncached(&misses)?;
            if fresh.len() != misses.len() {
                return Err(Error::Protocol(format!(
                    "classifier returned {} predictions for {} texts",
                    fresh.len(),
                    misses.len()
                )));
            }
            self.computed.fetch_add(misses.len(), Ordering::Relaxed);
            let mut cache = self.cache.write().expect("cache lock");
            for (t, p) in misses.into_iter().zip(fresh) {
                cache.entry(t).or_insert(p);
            }
        }
        let cache = self.cache.read().expect("cache lock");
        Ok(texts.iter().map(|t| cache[t]).collect())
    }

    pub fn is_counterfactual(&self, candidate: &str, anchor: &Prediction) -> Result<bool> {
        Ok(self.predict(candidate)?.label != anchor.label)
    }
}
