//! Correctness, completeness, compactness and stability measurements of explanations.

mod metrics;
mod plan;
mod report;
mod stability;

pub use metrics::{aopc, aopc_from_scores, completeness_drop, correctness, dpm, manipulation_trajectory, Trajectory};
pub use plan::{apply_step, build_plan, Action, ManipulationPlan, Step};
pub use report::{
    evaluate, evaluate_instance, parse_metrics, Aggregates, EvalRecord, EvalReport, InstanceError, Metric, Summary,
};
pub use stability::{
    auto_select_words, case_pairs, cosine_similarity, instantiate, set_similarity, stability_case, stability_suite,
    CaseFailure, StabilityCase, StabilityReport, StabilitySummary, WordLists, NEGATIVE_ADJECTIVES, NOUNS,
    POSITIVE_ADJECTIVES, TEMPLATES,
};
