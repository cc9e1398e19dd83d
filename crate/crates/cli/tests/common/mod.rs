//! Deterministic planted-keyword fixtures shared by the integration suites.
#![allow(dead_code)]

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const POSITIVE: [&str; 5] = ["great", "delicious", "amazing", "excellent", "wonderful"];
pub const NEGATIVE: [&str; 5] = ["awful", "bland", "terrible", "horrible", "bad"];
pub const NOUNS: [&str; 5] = ["food", "soup", "pizza", "bread", "salad"];
pub const FILLERS: [&str; 14] =
    ["the", "was", "is", "a", "very", "this", "i", "it", "really", "we", "had", "here", "place", "service"];

/// Reviews built from random fillers, one noun and one adjective whose pole sets the label.
/// Texts with the same bag of words are skipped so every text is its own reconstruction.
pub fn planted_reviews(count: usize, seed: u64) -> Vec<(u8, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let label: u8 = rng.gen_range(0..2);
        let adjective = if label == 1 { POSITIVE.choose(&mut rng) } else { NEGATIVE.choose(&mut rng) };
        let fillers = rng.gen_range(1..=4);
        let mut words: Vec<&str> = FILLERS.choose_multiple(&mut rng, fillers).copied().collect();
        words.push(NOUNS.choose(&mut rng).unwrap());
        words.push(adjective.unwrap());
        words.shuffle(&mut rng);
        let mut bag = words.clone();
        bag.sort_unstable();
        if seen.insert(bag) {
            out.push((label, words.join(" ")));
        }
    }
    out
}

/// Scores with exact linear structure over planted keyword indicators.
pub fn planted_score(text: &str) -> f64 {
    let tokens = xpro::text::tokenize(text);
    let has = |w: &str| tokens.iter().any(|t| t == w);
    let pos = POSITIVE.iter().filter(|w| has(w)).count() as f64;
    let neg = NEGATIVE.iter().filter(|w| has(w)).count() as f64;
    (0.5 + 0.4 * pos.min(1.0) - 0.4 * neg.min(1.0) - 0.05).clamp(0.0, 1.0)
}

pub fn write_lines(path: &Path, lines: impl IntoIterator<Item = String>) {
    let mut s = String::new();
    for l in lines {
        s.push_str(&l);
        s.push('\n');
    }
    std::fs::write(path, s).unwrap();
}

/// Training data, landmark corpus, test texts and a trained naive-Bayes model in `dir`.
pub struct Workspace {
    pub dir: PathBuf,
    pub model: PathBuf,
    pub corpus: PathBuf,
    pub test: PathBuf,
}

pub fn xpro() -> Command {
    Command::new(env!("CARGO_BIN_EXE_xpro"))
}

pub fn run(args: &[&str]) -> Output {
    xpro().args(args).output().expect("spawn xpro")
}

pub fn workspace(dir: &Path) -> Workspace {
    let reviews = planted_reviews(400, 11);
    let train = dir.join("train.tsv");
    write_lines(&train, reviews.iter().map(|(l, t)| format!("{l}\t{t}")));
    let corpus = dir.join("xl.txt");
    write_lines(&corpus, reviews[..150].iter().map(|(_, t)| t.clone()));
    let test = dir.join("test.tsv");
    write_lines(&test, planted_reviews(10, 99).into_iter().map(|(l, t)| format!("{l}\t{t}")));
    let model = dir.join("model.json");
    let out = run(&["train", "--data", train.to_str().unwrap(), "--kind", "nb", "--out", model.to_str().unwrap()]);
    assert!(out.status.success(), "train failed: {}", String::from_utf8_lossy(&out.stderr));
    Workspace { dir: dir.to_path_buf(), model, corpus, test }
}
