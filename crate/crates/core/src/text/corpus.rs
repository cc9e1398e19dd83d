use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::tokenize::{detokenize, tokenize};
use crate::blackbox::Label;
use crate::error::{Error, Result};

/// A text together with its token sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Document {
    raw: String,
    tokens: Vec<String>,
}

impl Document {
    pub fn new(raw: impl Into<String>) -> Self {
        let raw = raw.into();
        let tokens = tokenize(&raw);
        Self { raw, tokens }
    }

    /// Builds a document whose raw text is the single-space join of `tokens`.
    pub fn from_tokens(tokens: Vec<String>) -> Self {
        let raw = detokenize(&tokens);
        debug_assert_eq!(tokenize(&raw), tokens);
        Self { raw, tokens }
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Canonical text used for deduplication and black-box queries.
    pub fn text(&self) -> String {
        detokenize(&self.tokens)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusRole {
    GeneratorTraining,
    Landmark,
    Train,
    Valid,
    Test,
}

/// Immutable, ordered collection of documents.
#[derive(Debug, Clone)]
pub struct Corpus {
    documents: Arc<[Document]>,
    role: CorpusRole,
}

impl Corpus {
    pub fn new(documents: Vec<Document>, role: CorpusRole) -> Self {
        Self { documents: documents.into(), role }
    }

    pub fn from_texts<I, S>(texts: I, role: CorpusRole) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(texts.into_iter().map(Document::new).collect(), role)
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn role(&self) -> CorpusRole {
        self.role
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Document> {
        self.documents.iter()
    }

    pub fn require_non_empty(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::Config(format!("{:?} corpus is empty", self.role)));
        }
        Ok(())
    }
}

/// A corpus with one binary label per document.
#[derive(Debug, Clone)]
pub struct LabeledCorpus {
    pub corpus: Corpus,
    pub labels: Vec<Label>,
}

impl LabeledCorpus {
    pub fn new(records: Vec<(Document, Label)>, role: CorpusRole) -> Self {
        let (docs, labels) = records.into_iter().unzip();
        Self { corpus: Corpus::new(docs, role), labels }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Document, Label)> {
        self.corpus.iter().zip(self.labels.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Result of reading a corpus file; `skipped` counts blank lines.
#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub data: T,
    pub skipped: usize,
}

/// Parses one document per line. Lines empty after trimming are skipped.
pub fn parse_corpus(content: &str, role: CorpusRole) -> Loaded<Corpus> {
    let mut skipped = 0;
    let mut docs = Vec::new();
    for line in content.lines() {
        let line = line.trim();
        if line.is_empty() {
            skipped += 1;
            continue;
        }
        docs.push(Document::new(line));
    }
    Loaded { data: Corpus::new(docs, role), skipped }
}

/// Parses `label<TAB>text` records, label in {0, 1}.
pub fn parse_labeled(content: &str, role: CorpusRole) -> Result<Loaded<LabeledCorpus>> {
    let mut skipped = 0;
    let mut records = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            skipped += 1;
            continue;
        }
        let (label, text) = line
            .split_once('\t')
            .ok_or_else(|| Error::Config(format!("line {}: expected label<TAB>text", lineno + 1)))?;
        let label = match label.trim() {
            "0" => Label::Negative,
            "1" => Label::Positive,
            other => {
                return Err(Error::Config(format!("line {}: label must be 0 or 1, got {other:?}", lineno + 1)))
            }
        };
        records.push((Document::new(text.trim()), label));
    }
    Ok(Loaded { data: LabeledCorpus::new(records, role), skipped })
}

pub fn read_corpus(path: impl AsRef<Path>, role: CorpusRole) -> Result<Loaded<Corpus>> {
    Ok(parse_corpus(&fs::read_to_string(path)?, role))
}

pub fn read_labeled(path: impl AsRef<Path>, role: CorpusRole) -> Result<Loaded<LabeledCorpus>> {
    parse_labeled(&fs::read_to_string(path)?, role)
}

/// Reads texts from a file that is either plain (one per line) or labeled TSV; labels are dropped.
pub fn read_texts_lenient(path: impl AsRef<Path>) -> Result<Loaded<Vec<String>>> {
    let content = fs::read_to_string(path)?;
    let mut skipped = 0;
    let mut texts = Vec::new();
    for line in content.lines() {
        if line.trim().is_empty() {
            skipped += 1;
            continue;
        }
        let text = match line.split_once('\t') {
            Some((label, text)) if matches!(label.trim(), "0" | "1") => text,
            _ => line,
        };
        texts.push(text.trim().to_string());
    }
    Ok(Loaded { data: texts, skipped })
}
