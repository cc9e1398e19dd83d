use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ngram::{pad, ContextModel};
use crate::text::Document;

/// Splice of one word into a prototype: insertion at `start` when `start == end`,
/// otherwise replacement of tokens `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EditOperation {
    pub start: usize,
    pub end: usize,
    pub objective: f64,
}

impl EditOperation {
    pub fn span(&self) -> usize {
        self.end - self.start
    }

    pub fn is_insertion(&self) -> bool {
        self.start == self.end
    }
}

/// Length-penalized context score `e^{-span} · p_pre · p_suc`.
pub fn edit_objective(span: usize, p_pre: f64, p_suc: f64) -> f64 {
    (-(span as f64)).exp() * p_pre * p_suc
}

/// Context probabilities of `word` at every cut point of `prototype`:
/// `pre[i]` conditions on the n tokens before position i, `suc[j]` on the n tokens from position j.
pub fn context_scores<S: AsRef<str>>(prototype: &[S], word: &str, model: &ContextModel) -> (Vec<f64>, Vec<f64>) {
    let n = model.n();
    let padded = pad(prototype, n);
    let cuts = prototype.len() + 1;
    let pre = (0..cuts).map(|i| model.p_pre(word, &padded[i..i + n])).collect();
    let suc = (0..cuts).map(|j| model.p_suc(word, &padded[j + n..j + 2 * n])).collect();
    (pre, suc)
}

/// Exhaustive argmax over all `0 <= i <= j <= len`. Ties go to the smaller span, then the smaller start.
pub fn best_edition<S: AsRef<str>>(prototype: &[S], word: &str, model: &ContextModel) -> EditOperation {
    let (pre, suc) = context_scores(prototype, word, model);
    let len = prototype.len();
    let mut best = EditOperation { start: 0, end: 0, objective: f64::NEG_INFINITY };
    for span in 0..=len {
        for start in 0..=len - span {
            let objective = edit_objective(span, pre[start], suc[start + span]);
            if objective > best.objective {
                best = EditOperation { start, end: start + span, objective };
            }
        }
    }
    best
}

/// Applies `op` to `prototype`, placing `word` at `op.start`.
pub fn apply_edition<S: AsRef<str>>(prototype: &[S], op: &EditOperation, word: &str) -> Result<Document> {
    if op.start > op.end || op.end > prototype.len() {
        return Err(Error::Contract(format!(
            "edit ({}, {}) out of range for a prototype of {} tokens",
            op.start,
            op.end,
            prototype.len()
        )));
    }
    let mut tokens: Vec<String> = Vec::with_capacity(prototype.len() + 1);
    tokens.extend(prototype[..op.start].iter().map(|t| t.as_ref().to_string()));
    tokens.push(word.to_string());
    tokens.extend(prototype[op.end..].iter().map(|t| t.as_ref().to_string()));
    Ok(Document::from_tokens(tokens))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{tokenize, Corpus, CorpusRole};

    fn model(texts: &[&str]) -> ContextModel {
        ContextModel::build(&Corpus::from_texts(texts.iter().copied(), CorpusRole::Landmark), 1).unwrap()
    }

    fn op(start: usize, end: usize) -> EditOperation {
        EditOperation { start, end, objective: 0.0 }
    }

    #[test]
    fn worked_fixture() {
        let m = model(&["the food was good", "the food was bad"]);
        let proto = tokenize("the food was bad");
        let (pre, suc) = context_scores(&proto, "good", &m);
        assert_eq!(m.epsilon(), 1.0 / 3.0);
        assert_eq!(edit_objective(0, pre[3], suc[3]), 1.0 / 6.0);
        assert_eq!(edit_objective(0, pre[4], suc[4]), 1.0 / 6.0);
        assert!((edit_objective(1, pre[3], suc[4]) - (-1f64).exp() / 4.0).abs() < 1e-15);
        let best = best_edition(&proto, "good", &m);
        assert_eq!((best.start, best.end), (3, 3));
        assert_eq!(best.objective, 1.0 / 6.0);
        assert_eq!(apply_edition(&proto, &best, "good").unwrap().text(), "the food was good bad");
    }

    #[test]
    fn replacement_reproduces_prototype() {
        let m = model(&["a b", "a b"]);
        let best = best_edition(&tokenize("a b"), "a", &m);
        assert_eq!((best.start, best.end), (0, 1));
        assert_eq!(apply_edition(&["a", "b"], &best, "a").unwrap().text(), "a b");
    }

    #[test]
    fn unseen_contexts_prefer_insertion() {
        let m = model(&["x y", "y z"]);
        let best = best_edition(&["q"], "w", &m);
        assert!(best.is_insertion());
        let out = apply_edition(&["q"], &best, "w").unwrap();
        assert!(out.tokens().contains(&"q".to_string()) && out.tokens().contains(&"w".to_string()));
    }

    #[test]
    fn splice_semantics() {
        let proto = ["b", "c"];
        assert_eq!(apply_edition(&proto, &op(0, 0), "a").unwrap().text(), "a b c");
        assert_eq!(apply_edition(&proto, &op(0, 2), "a").unwrap().text(), "a");
        assert_eq!(apply_edition(&proto, &op(2, 2), "a").unwrap().text(), "b c a");
        assert!(matches!(apply_edition(&proto, &op(1, 3), "a"), Err(Error::Contract(_))));
        assert!(matches!(apply_edition(&proto, &op(2, 1), "a"), Err(Error::Contract(_))));
    }

    #[test]
    fn empty_prototype_still_has_padding() {
        let m = model(&["a"]);
        let best = best_edition::<&str>(&[], "a", &m);
        assert_eq!((best.start, best.end), (0, 0));
        assert_eq!(best.objective, 1.0);
    }

    #[test]
    fn penalty_is_strictly_decreasing() {
        for span in 0..10 {
            assert!(edit_objective(span + 1, 0.3, 0.7) < edit_objective(span, 0.3, 0.7));
        }
    }
}
