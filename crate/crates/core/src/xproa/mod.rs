//! Latent-space neighborhood construction: landmarks from the corpus, two-stage
//! interpolation between landmarks and toward the pivot, progressive refinement.

mod external;
mod generator;
mod latent;

use std::collections::HashMap;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blackbox::{BlackBox, Label, Prediction};
use crate::error::{Error, Result};
use crate::neighborhood::{raise, Flag, Member, Method, Neighborhood};
use crate::text::{Corpus, Document};

pub use external::{serve_generator, ExternalGenerator, GeneratorRequest};
pub use generator::{Generator, ReferenceGenerator};
pub use latent::{euclidean, interpolate, interpolate_with, Direction, LatentPoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XproaConfig {
    /// Interpolation steps between two poles.
    pub s: usize,
    /// Landmark count, also the number of repeats per approximation round.
    pub k: usize,
    /// Members kept per class.
    pub n: usize,
    pub max_rounds: usize,
    /// Rounds without a strictly closer counterfactual before stopping.
    pub patience: usize,
    pub direction: Direction,
    pub seed: u64,
}

impl Default for XproaConfig {
    fn default() -> Self {
        Self { s: 10, k: 20, n: 200, max_rounds: 10, patience: 2, direction: Direction::TowardSecond, seed: 0 }
    }
}

/// Counterfactual anchor of the interpolation frontier.
#[derive(Debug, Clone, PartialEq)]
pub struct Landmark {
    pub point: LatentPoint<f64>,
    pub text: String,
    pub prediction: Prediction,
    /// Euclidean latent distance to the pivot.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSet {
    pub landmarks: Vec<Landmark>,
    pub shortage: bool,
}

/// A decoded text with the latent distance of the point that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub text: String,
    pub prediction: Prediction,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Approximation {
    pub candidates: Vec<Candidate>,
    pub landmarks: Vec<Landmark>,
    pub degenerate: bool,
    pub topped_up: bool,
}

/// Encodes the query and checks that decoding gives it back.
pub fn pivot_of(query: &Document, generator: &dyn Generator) -> Result<LatentPoint<f64>> {
    let pivot = generator.encode(&[query.text()])?.pop().ok_or_else(|| Error::Protocol("empty encode reply".into()))?;
    if pivot.dim() != generator.dim() || !pivot.is_finite() {
        return Err(Error::Protocol("pivot has wrong dimension or non-finite components".into()));
    }
    let reconstructed = generator.decode(std::slice::from_ref(&pivot))?.pop().unwrap_or_default();
    if Document::new(&reconstructed).tokens() != query.tokens() {
        return Err(Error::ReconstructionFailure { query: query.text(), reconstructed });
    }
    Ok(pivot)
}

/// The `k` counterfactual corpus texts nearest the pivot in latent space.
pub fn init_landmarks(
    query_prediction: &Prediction,
    pivot: &LatentPoint<f64>,
    query: &Document,
    corpus: &Corpus,
    generator: &dyn Generator,
    blackbox: &BlackBox,
    k: usize,
) -> Result<LandmarkSet> {
    if k == 0 {
        return Err(Error::Config("landmark count k must be at least 1".into()));
    }
    corpus.require_non_empty()?;
    let texts: Vec<String> = corpus.iter().map(Document::text).collect();
    let predictions = blackbox.predict_batch(&texts)?;
    let (cf_texts, cf_preds): (Vec<String>, Vec<Prediction>) = texts
        .into_iter()
        .zip(predictions)
        .filter(|(_, p)| p.label != query_prediction.label)
        .unzip();
    if cf_texts.is_empty() {
        return Err(Error::NoCounterfactuals { query: query.text() });
    }
    let points = generator.encode(&cf_texts)?;
    let mut landmarks = cf_texts
        .into_iter()
        .zip(cf_preds)
        .zip(points)
        .map(|((text, prediction), point)| {
            let distance = euclidean(&point, pivot)?;
            Ok(Landmark { point, text, prediction, distance })
        })
        .collect::<Result<Vec<_>>>()?;
    landmarks.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    let shortage = landmarks.len() < k;
    landmarks.truncate(k);
    Ok(LandmarkSet { landmarks, shortage })
}

/// One approximation round: `k` repeats of landmark-pair interpolation followed by
/// interpolation from every counterfactual interpolant toward the pivot.
pub fn approximate<R: Rng>(
    query_label: Label,
    pivot: &LatentPoint<f64>,
    landmarks: &[Landmark],
    generator: &dyn Generator,
    blackbox: &BlackBox,
    config: &XproaConfig,
    rng: &mut R,
) -> Result<Approximation> {
    if landmarks.is_empty() {
        return Err(Error::Contract("approximation needs at least one landmark".into()));
    }
    let degenerate = landmarks.len() < 2;
    let mut candidates = Vec::new();
    let mut fresh: Vec<Landmark> = Vec::new();
    for _ in 0..config.k {
        let (zp, zq) = if degenerate {
            let only = &landmarks[0].point;
            (only.clone(), only.midpoint(pivot)?)
        } else {
            let pair = index::sample(rng, landmarks.len(), 2);
            (landmarks[pair.index(0)].point.clone(), landmarks[pair.index(1)].point.clone())
        };
        let first = interpolate_with(&zp, &zq, config.s, config.direction)?;
        let first_texts = generator.decode(&first)?;
        let first_preds = blackbox.predict_batch(&first_texts)?;
        let mut second = Vec::new();
        for (z, pred) in first.iter().zip(&first_preds) {
            if pred.label != query_label {
                second.extend(interpolate_with(z, pivot, config.s, config.direction)?);
            }
        }
        if second.is_empty() {
            continue;
        }
        let texts = generator.decode(&second)?;
        let preds = blackbox.predict_batch(&texts)?;
        let mut closest: Option<Landmark> = None;
        for ((point, text), prediction) in second.into_iter().zip(texts).zip(preds) {
            let distance = euclidean(&point, pivot)?;
            if prediction.label != query_label && closest.as_ref().is_none_or(|c| distance < c.distance) {
                closest = Some(Landmark { point, text: text.clone(), prediction, distance });
            }
            candidates.push(Candidate { text, prediction, distance });
        }
        fresh.extend(closest);
    }

    // one entry per text, nearest first, then top up from the previous set to keep its size
    fresh.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    let mut updated: Vec<Landmark> = Vec::new();
    for l in fresh {
        if !updated.iter().any(|u| u.text == l.text) {
            updated.push(l);
        }
    }
    let mut topped_up = false;
    for old in landmarks {
        if updated.len() >= landmarks.len() {
            break;
        }
        if !updated.iter().any(|u| u.text == old.text) {
            updated.push(old.clone());
            topped_up = true;
        }
    }
    updated.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    Ok(Approximation { candidates, landmarks: updated, degenerate, topped_up })
}

/// Diagnostics of a latent construction beyond the neighborhood itself.
#[derive(Debug, Clone, PartialEq)]
pub struct XproaTrace {
    pub rounds: usize,
    pub initial_landmarks: Vec<Landmark>,
    pub pool_size: usize,
}

pub fn construct_neighborhood_xproa(
    query: &Document,
    corpus: &Corpus,
    generator: &dyn Generator,
    blackbox: &BlackBox,
    config: &XproaConfig,
) -> Result<Neighborhood> {
    construct_traced(query, corpus, generator, blackbox, config).map(|(n, _)| n)
}

/// Progressive construction: repeat approximation rounds until `patience` successive rounds find
/// no counterfactual strictly closer to the pivot (or `max_rounds`), then keep the `n` nearest
/// candidates of each class.
pub fn construct_traced(
    query: &Document,
    corpus: &Corpus,
    generator: &dyn Generator,
    blackbox: &BlackBox,
    config: &XproaConfig,
) -> Result<(Neighborhood, XproaTrace)> {
    if query.is_empty() {
        return Err(Error::Config("query has no tokens".into()));
    }
    let query_prediction = blackbox.predict(&query.text())?;
    let pivot = pivot_of(query, generator)?;
    let initial = init_landmarks(&query_prediction, &pivot, query, corpus, generator, blackbox, config.k)?;
    let mut flags = Vec::new();
    if initial.shortage {
        raise(&mut flags, Flag::CounterfactualShortage);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let query_text = query.text();
    let mut pool: Vec<Candidate> = Vec::new();
    let mut by_text: HashMap<String, usize> = HashMap::new();
    let mut incumbent = initial.landmarks[0].distance;
    let mut landmarks = initial.landmarks.clone();
    let mut stale = 0;
    let mut rounds = 0;
    loop {
        if rounds == config.max_rounds {
            raise(&mut flags, Flag::IterationCap);
            break;
        }
        rounds += 1;
        let round = approximate(query_prediction.label, &pivot, &landmarks, generator, blackbox, config, &mut rng)?;
        if round.degenerate {
            raise(&mut flags, Flag::DegenerateLandmarks);
        }
        if round.topped_up {
            raise(&mut flags, Flag::LandmarksToppedUp);
        }
        let mut best_new = f64::INFINITY;
        for c in round.candidates {
            if c.prediction.label != query_prediction.label {
                best_new = best_new.min(c.distance);
            }
            if Document::new(&c.text).text() == query_text {
                continue;
            }
            match by_text.get(&c.text) {
                Some(&i) => {
                    if c.distance < pool[i].distance {
                        pool[i].distance = c.distance;
                    }
                }
                None => {
                    by_text.insert(c.text.clone(), pool.len());
                    pool.push(c);
                }
            }
        }
        landmarks = round.landmarks;
        if best_new < incumbent {
            incumbent = best_new;
            stale = 0;
        } else {
            stale += 1;
        }
        if stale >= config.patience {
            break;
        }
    }

    let pool_size = pool.len();
    let mut factual: Vec<&Candidate> = pool.iter().filter(|c| c.prediction.label == query_prediction.label).collect();
    let mut counter: Vec<&Candidate> = pool.iter().filter(|c| c.prediction.label != query_prediction.label).collect();
    factual.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    counter.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    if factual.len() < config.n || counter.len() < config.n {
        raise(&mut flags, Flag::ClassShortage);
    }
    let members = factual
        .into_iter()
        .take(config.n)
        .chain(counter.into_iter().take(config.n))
        .map(|c| Member { document: Document::new(&c.text), prediction: c.prediction, distance: c.distance })
        .collect();
    let neighborhood = Neighborhood::new(query.clone(), query_prediction, members, Method::Xproa, flags);
    Ok((neighborhood, XproaTrace { rounds, initial_landmarks: initial.landmarks, pool_size }))
}
