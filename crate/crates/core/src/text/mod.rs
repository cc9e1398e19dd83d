//! Tokenization, corpora, tf-idf vectors and cosine distance.

mod corpus;
mod tfidf;
mod tokenize;
mod vector;

pub use corpus::{
    parse_corpus, parse_labeled, read_corpus, read_labeled, read_texts_lenient, Corpus, CorpusRole, Document,
    LabeledCorpus, Loaded,
};
pub use tfidf::TfIdfModel;
pub use tokenize::{detokenize, tokenize, PAD};
pub use vector::{cosine_distance, SparseVector};
