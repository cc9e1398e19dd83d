use serde::{Deserialize, Serialize};

use super::local::LocalSpace;
use crate::blackbox::{Label, Prediction};
use crate::error::{Error, Result};
use crate::neighborhood::Neighborhood;
use crate::scalar::Scalar;
use crate::text::{cosine_distance, SparseVector};

/// Which side of the decision boundary an exemplar list is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExemplarClass {
    Factual,
    Counterfactual,
}

/// A neighborhood text chosen for display, with its black-box output and query distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exemplar {
    pub text: String,
    pub label: Label,
    pub score: f64,
    pub distance: f64,
}

impl Exemplar {
    pub fn prediction(&self) -> Prediction {
        Prediction::from_score(self.score)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExemplarSelection {
    pub exemplars: Vec<Exemplar>,
    pub shortage: bool,
}

/// Greedy trade-off between closeness and diversity.
///
/// `candidates` holds `(distance to query, Δ bag vector)` pairs. Each step picks the candidate
/// maximizing `λ(1−d) + (1−λ)·mean pairwise cosine distance` of the chosen Δ vectors plus itself;
/// the diversity term is 0 below two elements. Ties keep the earlier candidate, so presorting by
/// distance makes ties resolve toward the closer text. Returns indices in pick order.
pub fn select_diverse<T: Scalar>(candidates: &[(T, SparseVector<T>)], m: usize, lambda: T) -> Result<Vec<usize>> {
    if !(T::zero()..=T::one()).contains(&lambda) {
        return Err(Error::Config(format!("exemplar trade-off must lie in [0, 1], got {lambda:?}")));
    }
    if m == 0 {
        return Err(Error::Config("exemplar count must be at least 1".into()));
    }
    let mut chosen: Vec<usize> = Vec::new();
    let mut remaining = vec![true; candidates.len()];
    // pairwise distance sum within `chosen`
    let mut chosen_sum = T::zero();
    while chosen.len() < m.min(candidates.len()) {
        let pairs = T::from_usize_lossy((chosen.len() + 1) * chosen.len() / 2);
        let mut best: Option<(usize, T, T)> = None;
        for (i, (d, delta)) in candidates.iter().enumerate() {
            if !remaining[i] {
                continue;
            }
            let mut added = T::zero();
            for &p in &chosen {
                added = added + cosine_distance(&candidates[p].1, delta)?;
            }
            let diversity = if chosen.is_empty() { T::zero() } else { (chosen_sum + added) / pairs };
            let score = lambda * (T::one() - *d) + (T::one() - lambda) * diversity;
            if best.is_none_or(|(_, s, _)| score > s) {
                best = Some((i, score, added));
            }
        }
        let (i, _, added) = best.expect("a remaining candidate");
        remaining[i] = false;
        chosen.push(i);
        chosen_sum = chosen_sum + added;
    }
    Ok(chosen)
}

/// Selects up to `m` exemplars of the requested class from the neighborhood.
pub fn select_exemplars(
    neighborhood: &Neighborhood,
    local: &LocalSpace,
    class: ExemplarClass,
    m: usize,
    lambda: f64,
) -> Result<ExemplarSelection> {
    let query_label = neighborhood.query_prediction.label;
    let wanted = match class {
        ExemplarClass::Factual => query_label,
        ExemplarClass::Counterfactual => query_label.flip(),
    };
    let mut pool: Vec<usize> = (0..neighborhood.len())
        .filter(|&i| neighborhood.members[i].prediction.label == wanted)
        .collect();
    let distances = local.distances();
    // stable: equal distances keep neighborhood order
    pool.sort_by(|&a, &b| distances[a].total_cmp(&distances[b]));
    let candidates: Vec<(f64, SparseVector<f64>)> = pool
        .iter()
        .map(|&i| Ok((distances[i], local.bags()[i].sub(local.query_bag())?)))
        .collect::<Result<_>>()?;
    let picks = select_diverse(&candidates, m, lambda)?;
    let exemplars = picks
        .into_iter()
        .map(|j| {
            let member = &neighborhood.members[pool[j]];
            Exemplar {
                text: member.document.text(),
                label: member.prediction.label,
                score: member.prediction.score_positive,
                distance: distances[pool[j]],
            }
        })
        .collect::<Vec<_>>();
    Ok(ExemplarSelection { shortage: exemplars.len() < m, exemplars })
}
