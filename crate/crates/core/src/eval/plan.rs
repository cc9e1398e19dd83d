use serde::{Deserialize, Serialize};

use crate::blackbox::Label;
use crate::error::Result;
use crate::explain::Explanation;
use crate::neighborhood::{raise, Flag};
use crate::ngram::ContextModel;
use crate::xprob::{apply_edition, best_edition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Mask,
    Repeat,
    InsertExtrinsic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub token: String,
    pub action: Action,
    pub weight: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ManipulationPlan {
    pub steps: Vec<Step>,
    pub flags: Vec<Flag>,
}

impl ManipulationPlan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Keeps attributions with `|w| ≥ eta`. Intrinsic words pushing toward the predicted class are
/// masked, those pushing away are repeated, and extrinsic words are inserted. Steps are ordered
/// by |w| descending; equal magnitudes keep intrinsic-then-extrinsic order.
pub fn build_plan(explanation: &Explanation, eta: f64) -> ManipulationPlan {
    let toward = match explanation.label {
        Label::Positive => 1.0,
        Label::Negative => -1.0,
    };
    let mut steps: Vec<Step> = Vec::new();
    for a in explanation.intrinsic.iter().filter(|a| a.weight.abs() >= eta && a.weight != 0.0) {
        let action = if a.weight * toward > 0.0 { Action::Mask } else { Action::Repeat };
        steps.push(Step { token: a.token.clone(), action, weight: a.weight });
    }
    for a in explanation.extrinsic.iter().filter(|a| a.weight.abs() >= eta && a.weight != 0.0) {
        steps.push(Step { token: a.token.clone(), action: Action::InsertExtrinsic, weight: a.weight });
    }
    steps.sort_by(|a, b| b.weight.abs().total_cmp(&a.weight.abs()));

    let mut flags = Vec::new();
    let query = crate::text::tokenize(&explanation.query);
    let empties = |steps: &[Step]| {
        query.iter().all(|t| steps.iter().any(|s| s.action == Action::Mask && &s.token == t))
    };
    if !query.is_empty() && empties(&steps) {
        let last_mask = steps.iter().rposition(|s| s.action == Action::Mask).expect("masks cover the query");
        steps.remove(last_mask);
        raise(&mut flags, Flag::MaskDropped);
    }
    if steps.is_empty() {
        raise(&mut flags, Flag::EmptyPlan);
    }
    ManipulationPlan { steps, flags }
}

/// Applies one manipulation to a token sequence. Insertions splice the word in at the
/// best-scoring edition of the current text under `context`.
pub fn apply_step(tokens: &[String], step: &Step, context: &ContextModel, flags: &mut Vec<Flag>) -> Result<Vec<String>> {
    match step.action {
        Action::Mask => {
            if !tokens.contains(&step.token) {
                raise(flags, Flag::MaskAbsent);
                return Ok(tokens.to_vec());
            }
            Ok(tokens.iter().filter(|t| **t != step.token).cloned().collect())
        }
        Action::Repeat => {
            let mut out = Vec::with_capacity(tokens.len() + 1);
            for t in tokens {
                out.push(t.clone());
                if *t == step.token {
                    out.push(t.clone());
                }
            }
            Ok(out)
        }
        Action::InsertExtrinsic => {
            let op = best_edition(tokens, &step.token, context);
            Ok(apply_edition(tokens, &op, &step.token)?.tokens().to_vec())
        }
    }
}
