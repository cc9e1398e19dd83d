use serde::{Deserialize, Serialize};

use super::report::{InstanceError, Summary};
use crate::blackbox::BlackBox;
use crate::error::{Error, Result};
use crate::explain::{ExplainConfig, Explainer, VERSION};
use crate::text::tokenize;

pub const TEMPLATES: [&str; 5] = [
    "<ADJ> <NOUN>",
    "Very <ADJ> <NOUN>",
    "The <NOUN> is <ADJ>",
    "A very <ADJ> <NOUN>",
    "This is a very <ADJ> <NOUN>",
];

pub const NEGATIVE_ADJECTIVES: [&str; 10] =
    ["horrible", "terrible", "wrong", "awful", "disappointed", "poor", "bland", "worst", "bad", "cheap"];
pub const POSITIVE_ADJECTIVES: [&str; 10] =
    ["delicious", "amazing", "excellent", "loved", "fantastic", "wonderful", "perfect", "fresh", "great", "best"];
pub const NOUNS: [&str; 10] = ["bread", "soup", "pizza", "food", "meal", "salad", "drink", "dessert", "fish", "steak"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordLists {
    pub adjectives: Vec<String>,
    pub nouns: Vec<String>,
}

impl Default for WordLists {
    fn default() -> Self {
        Self {
            adjectives: NEGATIVE_ADJECTIVES.iter().chain(&POSITIVE_ADJECTIVES).map(|s| s.to_string()).collect(),
            nouns: NOUNS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

pub fn instantiate(template: &str, adjective: &str, noun: &str) -> String {
    template.replace("<ADJ>", adjective).replace("<NOUN>", noun)
}

/// Scores every candidate word alone: the `per_class` most confident words of each class become
/// adjectives (negative first), the `nouns` words scoring nearest 0.5 become nouns.
/// Ties keep candidate order.
pub fn auto_select_words(blackbox: &BlackBox, candidates: &[String], per_class: usize, nouns: usize) -> Result<WordLists> {
    let words: Vec<&String> = candidates.iter().filter(|w| !w.is_empty() && w.chars().all(char::is_alphabetic)).collect();
    if words.len() < 2 * per_class + nouns {
        return Err(Error::Config(format!(
            "{} candidate words cannot supply {per_class} adjectives per class and {nouns} nouns",
            words.len()
        )));
    }
    let texts: Vec<String> = words.iter().map(|w| w.to_string()).collect();
    let scores: Vec<f64> = blackbox.predict_batch(&texts)?.iter().map(|p| p.score_positive).collect();
    let mut order: Vec<usize> = (0..words.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let negative: Vec<usize> = order[..per_class].to_vec();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let positive: Vec<usize> = order[..per_class].to_vec();
    let mut rest: Vec<usize> = (0..words.len()).filter(|i| !negative.contains(i) && !positive.contains(i)).collect();
    rest.sort_by(|&a, &b| (scores[a] - 0.5).abs().total_cmp(&(scores[b] - 0.5).abs()));
    Ok(WordLists {
        adjectives: negative.iter().chain(&positive).map(|&i| words[i].clone()).collect(),
        nouns: rest[..nouns].iter().map(|&i| words[i].clone()).collect(),
    })
}

/// Cosine similarity with 1 for identical vectors (including two zero vectors) and 0 when
/// exactly one vector is zero.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> f64 {
    if a == b {
        return 1.0;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// Mean cosine similarity over all unordered pairs; 1 below two vectors.
pub fn set_similarity(vectors: &[Vec<f64>]) -> f64 {
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            sum += cosine_similarity(&vectors[i], &vectors[j]);
            pairs += 1;
        }
    }
    if pairs == 0 {
        1.0
    } else {
        sum / pairs as f64
    }
}

fn population_std(values: &[f64]) -> f64 {
    Summary::of(values).map_or(0.0, |s| s.std)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCase {
    pub adjective: String,
    pub noun: String,
    pub variants: Vec<String>,
    pub scores: Vec<f64>,
    /// `⟨ξ_adj, ξ_noun⟩` per variant.
    pub attributions: Vec<[f64; 2]>,
    pub prediction_std: f64,
    pub adjective_mean: f64,
    pub adjective_std: f64,
    pub noun_mean: f64,
    pub noun_std: f64,
    pub set_similarity: f64,
}

pub fn stability_case(explainer: &Explainer, adjective: &str, noun: &str, templates: &[String]) -> Result<StabilityCase> {
    let adj = tokenize(adjective).join(" ");
    let nn = tokenize(noun).join(" ");
    let mut variants = Vec::with_capacity(templates.len());
    let mut scores = Vec::with_capacity(templates.len());
    let mut attributions = Vec::with_capacity(templates.len());
    for template in templates {
        let text = instantiate(template, adjective, noun);
        let e = explainer.explain(&text)?;
        let weight = |t: &str| e.intrinsic.iter().find(|a| a.token == t).map_or(0.0, |a| a.weight);
        attributions.push([weight(&adj), weight(&nn)]);
        scores.push(e.score);
        variants.push(e.query);
    }
    let adj_abs: Vec<f64> = attributions.iter().map(|v| v[0].abs()).collect();
    let noun_abs: Vec<f64> = attributions.iter().map(|v| v[1].abs()).collect();
    let vectors: Vec<Vec<f64>> = attributions.iter().map(|v| v.to_vec()).collect();
    Ok(StabilityCase {
        adjective: adjective.to_string(),
        noun: noun.to_string(),
        prediction_std: population_std(&scores),
        adjective_mean: adj_abs.iter().sum::<f64>() / adj_abs.len().max(1) as f64,
        adjective_std: population_std(&adj_abs),
        noun_mean: noun_abs.iter().sum::<f64>() / noun_abs.len().max(1) as f64,
        noun_std: population_std(&noun_abs),
        set_similarity: set_similarity(&vectors),
        variants,
        scores,
        attributions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseFailure {
    pub adjective: String,
    pub noun: String,
    pub error: InstanceError,
}

/// Means of the case statistics across successful cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySummary {
    pub cases: usize,
    pub failed: usize,
    pub prediction_std: f64,
    pub adjective_mean: f64,
    pub adjective_std: f64,
    pub noun_mean: f64,
    pub noun_std: f64,
    pub set_similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub version: String,
    pub seed: u64,
    pub config: ExplainConfig,
    pub templates: Vec<String>,
    pub words: WordLists,
    pub cases: Vec<StabilityCase>,
    pub failures: Vec<CaseFailure>,
    pub summary: StabilitySummary,
}

/// Adjective-major enumeration of all (adjective, noun) pairs.
pub fn case_pairs(words: &WordLists) -> Vec<(String, String)> {
    words.adjectives.iter().flat_map(|a| words.nouns.iter().map(move |n| (a.clone(), n.clone()))).collect()
}

impl StabilityReport {
    /// `results` must follow [`case_pairs`] order.
    pub fn new(
        config: &ExplainConfig,
        templates: &[String],
        words: &WordLists,
        results: Vec<((String, String), Result<StabilityCase>)>,
    ) -> Self {
        let mut cases = Vec::new();
        let mut failures = Vec::new();
        for ((adjective, noun), r) in results {
            match r {
                Ok(c) => cases.push(c),
                Err(e) => failures.push(CaseFailure { adjective, noun, error: InstanceError::from_error(&e) }),
            }
        }
        let mean = |f: fn(&StabilityCase) -> f64| {
            if cases.is_empty() {
                0.0
            } else {
                cases.iter().map(f).sum::<f64>() / cases.len() as f64
            }
        };
        let summary = StabilitySummary {
            cases: cases.len(),
            failed: failures.len(),
            prediction_std: mean(|c| c.prediction_std),
            adjective_mean: mean(|c| c.adjective_mean),
            adjective_std: mean(|c| c.adjective_std),
            noun_mean: mean(|c| c.noun_mean),
            noun_std: mean(|c| c.noun_std),
            set_similarity: mean(|c| c.set_similarity),
        };
        Self {
            version: VERSION.to_string(),
            seed: config.seed,
            config: config.clone(),
            templates: templates.to_vec(),
            words: words.clone(),
            cases,
            failures,
            summary,
        }
    }
}

pub fn stability_suite(explainer: &Explainer, words: &WordLists, templates: &[String]) -> StabilityReport {
    let results = case_pairs(words)
        .into_iter()
        .map(|(a, n)| {
            let r = stability_case(explainer, &a, &n, templates);
            ((a, n), r)
        })
        .collect();
    StabilityReport::new(explainer.config(), templates, words, results)
}
