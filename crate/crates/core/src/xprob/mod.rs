//! Transparent neighborhood construction by probability-based editions of counterfactual prototypes.

mod edition;
mod prototypes;

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blackbox::BlackBox;
use crate::error::{Error, Result};
use crate::neighborhood::{raise, Flag, Member, Method, Neighborhood};
use crate::ngram::ContextModel;
use crate::text::{cosine_distance, Corpus, Document, TfIdfModel};

pub use edition::{apply_edition, best_edition, context_scores, edit_objective, EditOperation};
pub use prototypes::{select_prototypes, Prototype, PrototypeSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XprobConfig {
    /// Prototype set size.
    pub k: usize,
    /// Maximal neighborhood size.
    pub p: usize,
    /// n-gram context width.
    pub n: usize,
    pub max_rounds: usize,
    pub seed: u64,
}

impl Default for XprobConfig {
    fn default() -> Self {
        Self { k: 80, p: 400, n: 1, max_rounds: 50, seed: 0 }
    }
}

/// Everything derived once from the prototype corpus; shareable across concurrent queries.
#[derive(Debug, Clone)]
pub struct XprobEngine {
    corpus: Corpus,
    tfidf: TfIdfModel,
    context: ContextModel,
}

fn sorted_bag(doc: &Document) -> Vec<&str> {
    let mut bag: Vec<&str> = doc.tokens().iter().map(String::as_str).collect();
    bag.sort_unstable();
    bag
}

impl XprobEngine {
    pub fn new(corpus: Corpus, n: usize) -> Result<Self> {
        let tfidf = TfIdfModel::fit(&corpus)?;
        let context = ContextModel::build(&corpus, n)?;
        Ok(Self { corpus, tfidf, context })
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn tfidf(&self) -> &TfIdfModel {
        &self.tfidf
    }

    pub fn context(&self) -> &ContextModel {
        &self.context
    }

    /// Iterative edition: every round, each distinct query word is spliced into
    /// `⌈k/|query|⌉` randomly drawn pool prototypes; the fresh variants join the
    /// neighborhood and become the next pool. Surplus variants are kept and drawn
    /// in whenever the pool falls short of `k`.
    pub fn construct(&self, query: &Document, blackbox: &BlackBox, config: &XprobConfig) -> Result<Neighborhood> {
        if query.is_empty() {
            return Err(Error::Config("query has no tokens".into()));
        }
        if config.n != self.context.n() {
            return Err(Error::Config(format!(
                "engine built with context width {} but config asks for {}",
                self.context.n(),
                config.n
            )));
        }
        let query_prediction = blackbox.predict(&query.text())?;
        let prototypes = select_prototypes(query, &query_prediction, &self.corpus, &self.tfidf, blackbox, config.k)?;
        let mut flags = Vec::new();
        if prototypes.shortage {
            raise(&mut flags, Flag::CounterfactualShortage);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let query_bag = sorted_bag(query);
        let mut words: Vec<&str> = Vec::new();
        for t in query.tokens() {
            if !words.contains(&t.as_str()) {
                words.push(t);
            }
        }
        let per_word = config.k.div_ceil(query.len());

        let mut seen: HashSet<String> = HashSet::from([query.text()]);
        let mut members: Vec<Document> = Vec::new();
        let mut candidates: Vec<Document> = Vec::new();
        let mut candidate_texts: HashSet<String> = HashSet::new();
        let mut pool: Vec<Document> = prototypes.prototypes.into_iter().map(|p| p.document).collect();
        let mut rounds = 0;

        // Admits a fresh variant into the neighborhood; false for duplicates and query anagrams.
        let admit = |doc: &Document, seen: &mut HashSet<String>, members: &mut Vec<Document>| -> bool {
            if members.len() >= config.p || sorted_bag(doc) == query_bag || !seen.insert(doc.text()) {
                return false;
            }
            members.push(doc.clone());
            true
        };

        while members.len() < config.p {
            if rounds == config.max_rounds {
                raise(&mut flags, Flag::IterationCap);
                break;
            }
            if pool.is_empty() {
                raise(&mut flags, Flag::PoolExhausted);
                break;
            }
            rounds += 1;
            let mut variants: Vec<Document> = Vec::new();
            for &word in &words {
                let mut order: Vec<usize> = (0..pool.len()).collect();
                order.shuffle(&mut rng);
                for (rank, idx) in order.into_iter().enumerate() {
                    let proto = pool[idx].tokens();
                    let op = best_edition(proto, word, &self.context);
                    let variant = apply_edition(proto, &op, word)?;
                    if rank < per_word {
                        variants.push(variant);
                    } else if candidate_texts.insert(variant.text()) {
                        candidates.push(variant);
                    }
                }
            }
            let mut next_pool = Vec::new();
            for v in variants {
                if admit(&v, &mut seen, &mut members) {
                    next_pool.push(v);
                }
            }
            if next_pool.len() < config.k && members.len() < config.p {
                candidates.retain(|c| !seen.contains(&c.text()));
                candidates.shuffle(&mut rng);
                let mut drawn = 0;
                while next_pool.len() < config.k {
                    let Some(c) = candidates.pop() else { break };
                    if admit(&c, &mut seen, &mut members) {
                        next_pool.push(c);
                        drawn += 1;
                    }
                }
                if drawn > 0 {
                    raise(&mut flags, Flag::PoolRefilled);
                }
            }
            pool = next_pool;
        }

        let texts: Vec<String> = members.iter().map(Document::text).collect();
        let predictions = blackbox.predict_batch(&texts)?;
        let target = self.tfidf.vectorize(query);
        let members = members
            .into_iter()
            .zip(predictions)
            .map(|(document, prediction)| {
                let distance = cosine_distance(&target, &self.tfidf.vectorize(&document))?;
                Ok(Member { document, prediction, distance })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Neighborhood::new(query.clone(), query_prediction, members, Method::Xprob, flags))
    }
}
