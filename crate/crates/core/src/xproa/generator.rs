use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::latent::LatentPoint;
use crate::error::{Error, Result};
use crate::text::{Corpus, Document, SparseVector, TfIdfModel};

/// Encoder/decoder pair the latent engine relies on. Encoding must be deterministic.
pub trait Generator: Send + Sync {
    fn dim(&self) -> usize;
    fn encode(&self, texts: &[String]) -> Result<Vec<LatentPoint<f64>>>;
    fn decode(&self, points: &[LatentPoint<f64>]) -> Result<Vec<String>>;
}

#[derive(Debug)]
struct Entry {
    text: String,
    vector: SparseVector<f64>,
}

#[derive(Debug)]
struct Base {
    tfidf: TfIdfModel,
    entries: Vec<Entry>,
    lookup: HashMap<String, usize>,
}

#[derive(Debug, Default)]
struct Memo {
    entries: Vec<Entry>,
    lookup: HashMap<String, usize>,
}

/// Deterministic stand-in generator: encodes as the L2-normalized tf-idf vector and decodes to the
/// nearest text among the corpus and everything encoded through this handle (first occurrence wins ties).
#[derive(Debug)]
pub struct ReferenceGenerator {
    base: Arc<Base>,
    memo: RwLock<Memo>,
}

impl ReferenceGenerator {
    pub fn new(corpus: &Corpus) -> Result<Self> {
        let tfidf = TfIdfModel::fit(corpus)?;
        let mut entries = Vec::with_capacity(corpus.len());
        let mut lookup = HashMap::new();
        for doc in corpus.iter() {
            let text = doc.text();
            lookup.entry(text.clone()).or_insert(entries.len());
            entries.push(Entry { vector: tfidf.vectorize(doc), text });
        }
        Ok(Self { base: Arc::new(Base { tfidf, entries, lookup }), memo: RwLock::new(Memo::default()) })
    }

    /// A handle sharing the corpus encodings but with an empty encode memo.
    pub fn fork(&self) -> Self {
        Self { base: Arc::clone(&self.base), memo: RwLock::new(Memo::default()) }
    }

    fn encode_one(&self, text: &str) -> SparseVector<f64> {
        let doc = Document::new(text);
        let key = doc.text();
        if let Some(&i) = self.base.lookup.get(&key) {
            return self.base.entries[i].vector.clone();
        }
        if let Some(&i) = self.memo.read().expect("memo lock").lookup.get(&key) {
            return self.memo.read().expect("memo lock").entries[i].vector.clone();
        }
        let vector = self.base.tfidf.vectorize(&doc);
        let mut memo = self.memo.write().expect("memo lock");
        if !memo.lookup.contains_key(&key) {
            let idx = memo.entries.len();
            memo.lookup.insert(key.clone(), idx);
            memo.entries.push(Entry { text: key, vector: vector.clone() });
        }
        vector
    }
}

/// Squared distance between a dense point and a sparse vector; exactly 0 when they coincide.
fn squared_distance(dense: &[f64], dense_sq_norm: f64, sparse: &SparseVector<f64>) -> f64 {
    let mut on_support = 0.0;
    let mut support_sq = 0.0;
    for &(i, v) in sparse.entries() {
        let d = dense[i] - v;
        on_support += d * d;
        support_sq += dense[i] * dense[i];
    }
    on_support + (dense_sq_norm - support_sq).max(0.0)
}

impl Generator for ReferenceGenerator {
    fn dim(&self) -> usize {
        self.base.tfidf.dim()
    }

    fn encode(&self, texts: &[String]) -> Result<Vec<LatentPoint<f64>>> {
        Ok(texts.iter().map(|t| LatentPoint(self.encode_one(t).to_dense())).collect())
    }

    fn decode(&self, points: &[LatentPoint<f64>]) -> Result<Vec<String>> {
        let memo = self.memo.read().expect("memo lock");
        points
            .iter()
            .map(|z| {
                if z.dim() != self.dim() {
                    return Err(Error::Contract(format!("expected dimension {}, got {}", self.dim(), z.dim())));
                }
                // Support entries sum the same terms in the same order as the full norm,
                // so an exact match yields distance 0.
                let sq: f64 = z.0.iter().map(|v| v * v).sum();
                let mut best: Option<(f64, &str)> = None;
                for e in self.base.entries.iter().chain(memo.entries.iter()) {
                    let d = squared_distance(&z.0, sq, &e.vector);
                    if best.is_none_or(|(b, _)| d < b) {
                        best = Some((d, &e.text));
                    }
                }
                Ok(best.map(|(_, t)| t.to_string()).unwrap_or_default())
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::CorpusRole;
    use crate::xproa::latent::{euclidean, interpolate};

    fn corpus(texts: &[&str]) -> Corpus {
        Corpus::from_texts(texts.iter().copied(), CorpusRole::Landmark)
    }

    #[test]
    fn reconstructs_corpus_and_new_texts() {
        let g = ReferenceGenerator::new(&corpus(&["the food was good", "the service was bad", "love it"])).unwrap();
        for t in ["the food was good", "love it", "the food was bad"] {
            let z = g.encode(&[t.to_string()]).unwrap();
            assert_eq!(g.decode(&z).unwrap()[0], t);
        }
    }

    #[test]
    fn duplicate_texts_tie_to_first() {
        let g = ReferenceGenerator::new(&corpus(&["a b", "c d", "a b"])).unwrap();
        let z = g.encode(&["a b".into()]).unwrap();
        assert_eq!(g.decode(&z).unwrap(), ["a b"]);
        assert_eq!(g.base.lookup["a b"], 0);
    }

    #[test]
    fn midpoint_decodes_near_both_poles() {
        let texts = ["great food here", "great food there", "awful food", "awful service there", "nice place"];
        let g = ReferenceGenerator::new(&corpus(&texts)).unwrap();
        let all = g.encode(&texts.iter().map(|s| s.to_string()).collect::<Vec<_>>()).unwrap();
        for a in 0..texts.len() {
            for b in 0..texts.len() {
                let mid = interpolate(&all[a], &all[b], 1).unwrap().pop().unwrap();
                let decoded = g.decode(std::slice::from_ref(&mid)).unwrap().pop().unwrap();
                let dz = g.encode(&[decoded]).unwrap().pop().unwrap();
                let gap = euclidean(&all[a], &all[b]).unwrap();
                // brute-force nearest neighbour over the corpus
                let nearest = all
                    .iter()
                    .map(|e| euclidean(&mid, e).unwrap())
                    .fold(f64::INFINITY, f64::min);
                assert!((euclidean(&mid, &dz).unwrap() - nearest).abs() < 1e-12);
                assert!(euclidean(&dz, &all[a]).unwrap() <= gap + 1e-12);
                assert!(euclidean(&dz, &all[b]).unwrap() <= gap + 1e-12);
            }
        }
    }

    #[test]
    fn forks_do_not_share_memo() {
        let g = ReferenceGenerator::new(&corpus(&["a b", "c d"])).unwrap();
        g.encode(&["a b e".into()]).unwrap();
        let f = g.fork();
        assert_eq!(f.memo.read().unwrap().entries.len(), 0);
        assert_eq!(g.memo.read().unwrap().entries.len(), 1);
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let g = ReferenceGenerator::new(&corpus(&["a b"])).unwrap();
        assert!(g.decode(&[LatentPoint(vec![0.0; 5])]).is_err());
    }
}
