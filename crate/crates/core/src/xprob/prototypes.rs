use crate::blackbox::{BlackBox, Prediction};
use crate::error::{Error, Result};
use crate::text::{cosine_distance, Corpus, Document, TfIdfModel};

#[derive(Debug, Clone, PartialEq)]
pub struct Prototype {
    pub document: Document,
    pub prediction: Prediction,
    pub distance: f64,
}

/// Counterfactual corpus texts nearest the query, ascending by tf-idf cosine distance.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeSet {
    pub prototypes: Vec<Prototype>,
    /// Set when the corpus held fewer than k counterfactuals.
    pub shortage: bool,
}

/// The `k` counterfactuals in `corpus` closest to `query`. Equal distances keep corpus order.
pub fn select_prototypes(
    query: &Document,
    query_prediction: &Prediction,
    corpus: &Corpus,
    tfidf: &TfIdfModel,
    blackbox: &BlackBox,
    k: usize,
) -> Result<PrototypeSet> {
    if k == 0 {
        return Err(Error::Config("prototype count k must be at least 1".into()));
    }
    corpus.require_non_empty()?;
    let texts: Vec<String> = corpus.iter().map(Document::text).collect();
    let predictions = blackbox.predict_batch(&texts)?;
    let target = tfidf.vectorize(query);
    let mut prototypes = Vec::new();
    for (doc, prediction) in corpus.iter().zip(predictions) {
        if prediction.label == query_prediction.label {
            continue;
        }
        let distance = cosine_distance(&target, &tfidf.vectorize(doc))?;
        prototypes.push(Prototype { document: doc.clone(), prediction, distance });
    }
    if prototypes.is_empty() {
        return Err(Error::NoCounterfactuals { query: query.text() });
    }
    prototypes.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    let shortage = prototypes.len() < k;
    prototypes.truncate(k);
    Ok(PrototypeSet { prototypes, shortage })
}
