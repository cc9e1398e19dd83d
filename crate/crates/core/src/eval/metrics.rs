use num_traits::Num;

use super::plan::{apply_step, ManipulationPlan};
use crate::blackbox::{BlackBox, Prediction};
use crate::error::Result;
use crate::explain::SurrogateDiagnostics;
use crate::neighborhood::Flag;
use crate::ngram::ContextModel;
use crate::text::{detokenize, tokenize};

/// Mean of the cumulative drops; `None` for an empty sequence.
pub fn aopc<T: Num + Copy>(drops: &[T]) -> Option<T> {
    if drops.is_empty() {
        return None;
    }
    let (sum, count) = drops.iter().fold((T::zero(), T::zero()), |(s, c), &d| (s + d, c + T::one()));
    Some(sum / count)
}

/// AOPC from the reference score and the score after each cumulative step.
pub fn aopc_from_scores<T: Num + Copy>(initial: T, step_scores: &[T]) -> Option<T> {
    aopc(&step_scores.iter().map(|&s| initial - s).collect::<Vec<_>>())
}

/// Average drop per manipulation; `None` when `steps` is 0.
pub fn dpm<T: Num + Copy>(initial: T, last: T, steps: usize) -> Option<T> {
    if steps == 0 {
        return None;
    }
    let l = (0..steps).fold(T::zero(), |acc, _| acc + T::one());
    Some((initial - last) / l)
}

pub fn correctness(diagnostics: &SurrogateDiagnostics) -> (f64, f64) {
    (diagnostics.r2, diagnostics.fidelity)
}

/// Scores of the originally predicted class before and after each cumulative plan step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub initial: f64,
    pub step_scores: Vec<f64>,
    pub texts: Vec<String>,
    pub flags: Vec<Flag>,
}

impl Trajectory {
    pub fn drops(&self) -> Vec<f64> {
        self.step_scores.iter().map(|s| self.initial - s).collect()
    }

    /// Drop after every step has been applied; 0 for an empty plan.
    pub fn completeness_drop(&self) -> f64 {
        self.step_scores.last().map_or(0.0, |s| self.initial - s)
    }

    pub fn aopc(&self) -> f64 {
        aopc(&self.drops()).unwrap_or(0.0)
    }

    pub fn dpm(&self) -> f64 {
        dpm(self.initial, *self.step_scores.last().unwrap_or(&self.initial), self.step_scores.len()).unwrap_or(0.0)
    }
}

/// Applies the plan step by step, querying the black box after each one. The reference class
/// stays the one predicted for the untouched query.
pub fn manipulation_trajectory(
    blackbox: &BlackBox,
    query: &str,
    query_prediction: &Prediction,
    plan: &ManipulationPlan,
    context: &ContextModel,
) -> Result<Trajectory> {
    let reference = query_prediction.label;
    let mut flags = plan.flags.clone();
    let mut tokens = tokenize(query);
    let mut texts = Vec::with_capacity(plan.len());
    for step in &plan.steps {
        tokens = apply_step(&tokens, step, context, &mut flags)?;
        texts.push(detokenize(&tokens));
    }
    let step_scores = blackbox.predict_batch(&texts)?.iter().map(|p| p.score_of(reference)).collect();
    Ok(Trajectory { initial: query_prediction.score_of(reference), step_scores, texts, flags })
}

pub fn completeness_drop(
    blackbox: &BlackBox,
    query: &str,
    query_prediction: &Prediction,
    plan: &ManipulationPlan,
    context: &ContextModel,
) -> Result<f64> {
    Ok(manipulation_trajectory(blackbox, query, query_prediction, plan, context)?.completeness_drop())
}
