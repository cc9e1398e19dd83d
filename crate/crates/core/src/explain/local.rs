use crate::error::Result;
use crate::neighborhood::Neighborhood;
use crate::text::{cosine_distance, Document, SparseVector, TfIdfModel};

/// Feature space of one explanation: the vocabulary of the query plus its neighborhood,
/// with binary bag-of-words rows and a tf-idf model fitted on the same texts.
#[derive(Debug, Clone)]
pub struct LocalSpace {
    tfidf: TfIdfModel,
    query_bag: SparseVector<f64>,
    query_tfidf: SparseVector<f64>,
    bags: Vec<SparseVector<f64>>,
    distances: Vec<f64>,
}

impl LocalSpace {
    pub fn new(neighborhood: &Neighborhood) -> Result<Self> {
        let docs: Vec<Document> = std::iter::once(neighborhood.query.clone())
            .chain(neighborhood.members.iter().map(|m| m.document.clone()))
            .collect();
        let tfidf = TfIdfModel::fit_documents(&docs);
        let query_bag = bag(&tfidf, &docs[0]);
        let query_tfidf = tfidf.vectorize(&docs[0]);
        let mut bags = Vec::with_capacity(docs.len() - 1);
        let mut distances = Vec::with_capacity(docs.len() - 1);
        for doc in &docs[1..] {
            bags.push(bag(&tfidf, doc));
            distances.push(cosine_distance(&tfidf.vectorize(doc), &query_tfidf)?);
        }
        Ok(Self { tfidf, query_bag, query_tfidf, bags, distances })
    }

    /// Local vocabulary in first-occurrence order, query tokens first.
    pub fn vocabulary(&self) -> &[String] {
        self.tfidf.vocabulary()
    }

    pub fn dim(&self) -> usize {
        self.tfidf.dim()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.tfidf.index_of(token)
    }

    /// Binary presence vectors of the members, in neighborhood order.
    pub fn bags(&self) -> &[SparseVector<f64>] {
        &self.bags
    }

    pub fn query_bag(&self) -> &SparseVector<f64> {
        &self.query_bag
    }

    /// tf-idf cosine distance of each member to the query.
    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn distance_to_query(&self, doc: &Document) -> Result<f64> {
        cosine_distance(&self.tfidf.vectorize(doc), &self.query_tfidf)
    }
}

fn bag(tfidf: &TfIdfModel, doc: &Document) -> SparseVector<f64> {
    let pairs = doc.tokens().iter().filter_map(|t| tfidf.index_of(t)).map(|i| (i, 1.0));
    let mut v = SparseVector::from_pairs(tfidf.dim(), pairs).expect("vocabulary indices");
    // from_pairs sums duplicates; presence features are 0/1
    v = SparseVector::from_pairs(v.dim(), v.entries().iter().map(|&(i, _)| (i, 1.0))).expect("same indices");
    v
}
