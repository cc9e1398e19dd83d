use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::metrics::{correctness, manipulation_trajectory};
use super::plan::build_plan;
use crate::blackbox::Label;
use crate::error::{Error, Result};
use crate::explain::{ExplainConfig, Explainer, VERSION};
use crate::neighborhood::{raise, Flag};
use crate::text::Document;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    R2,
    Fidelity,
    ConfidenceDrop,
    Dpm,
    Aopc,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::R2, Metric::Fidelity, Metric::ConfidenceDrop, Metric::Dpm, Metric::Aopc];

    fn needs_manipulation(self) -> bool {
        matches!(self, Metric::ConfidenceDrop | Metric::Dpm | Metric::Aopc)
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "r2" => Ok(Metric::R2),
            "fidelity" => Ok(Metric::Fidelity),
            "confidence_drop" | "drop" | "completeness" => Ok(Metric::ConfidenceDrop),
            "dpm" => Ok(Metric::Dpm),
            "aopc" => Ok(Metric::Aopc),
            other => Err(Error::Config(format!(
                "unknown metric {other:?} (expected r2, fidelity, confidence_drop, dpm or aopc)"
            ))),
        }
    }
}

/// Parses a comma-separated metric list, keeping canonical order without repeats.
pub fn parse_metrics(list: &str) -> Result<Vec<Metric>> {
    let mut metrics: Vec<Metric> = list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<_>>()?;
    metrics.sort();
    metrics.dedup();
    if metrics.is_empty() {
        return Err(Error::Config("no metric selected".into()));
    }
    Ok(metrics)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceError {
    pub kind: String,
    pub message: String,
}

impl InstanceError {
    pub fn from_error(e: &Error) -> Self {
        let kind = match e {
            Error::Config(_) => "config",
            Error::Contract(_) => "contract",
            Error::NoCounterfactuals { .. } => "no_counterfactuals",
            Error::ReconstructionFailure { .. } => "reconstruction_failure",
            Error::DegenerateNeighborhood(_) => "degenerate_neighborhood",
            Error::Transport { .. } => "transport",
            Error::Protocol(_) => "protocol",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        };
        Self { kind: kind.into(), message: e.to_string() }
    }
}

/// Per-instance evaluation outcome. Metrics that were not requested stay `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub index: usize,
    pub query: String,
    pub label: Option<Label>,
    pub score: Option<f64>,
    pub r2: Option<f64>,
    pub fidelity: Option<f64>,
    pub confidence_drop: Option<f64>,
    pub dpm: Option<f64>,
    pub aopc: Option<f64>,
    pub plan_len: Option<usize>,
    pub flags: Vec<Flag>,
    pub runtime_ms: Option<f64>,
    pub error: Option<InstanceError>,
}

impl EvalRecord {
    pub fn value(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::R2 => self.r2,
            Metric::Fidelity => self.fidelity,
            Metric::ConfidenceDrop => self.confidence_drop,
            Metric::Dpm => self.dpm,
            Metric::Aopc => self.aopc,
        }
    }

    pub fn is_failure(&self) -> bool {
        self.error.is_some()
    }
}

fn run_instance(explainer: &Explainer, text: &str, metrics: &[Metric], eta: f64, record: &mut EvalRecord) -> Result<()> {
    let explanation = explainer.explain(text)?;
    let prediction = explanation.prediction();
    record.query = explanation.query.clone();
    record.label = Some(prediction.label);
    record.score = Some(prediction.score_positive);
    record.flags = explanation.diagnostics.flags.clone();
    let diag = crate::explain::SurrogateDiagnostics {
        r2: explanation.diagnostics.r2,
        fidelity: explanation.diagnostics.fidelity,
        flags: Vec::new(),
    };
    let (r2, fidelity) = correctness(&diag);
    if metrics.contains(&Metric::R2) {
        record.r2 = Some(r2);
    }
    if metrics.contains(&Metric::Fidelity) {
        record.fidelity = Some(fidelity);
    }
    if metrics.iter().any(|m| m.needs_manipulation()) {
        let plan = build_plan(&explanation, eta);
        let context = explainer.xprob_engine().context();
        let trajectory = manipulation_trajectory(explainer.blackbox(), &explanation.query, &prediction, &plan, context)?;
        record.plan_len = Some(plan.len());
        for &f in &trajectory.flags {
            raise(&mut record.flags, f);
        }
        if metrics.contains(&Metric::ConfidenceDrop) {
            record.confidence_drop = Some(trajectory.completeness_drop());
        }
        if metrics.contains(&Metric::Dpm) {
            record.dpm = Some(trajectory.dpm());
        }
        if metrics.contains(&Metric::Aopc) {
            record.aopc = Some(trajectory.aopc());
        }
    }
    Ok(())
}

/// Explains one text and computes the requested metrics. Failures are recorded, not raised.
pub fn evaluate_instance(
    explainer: &Explainer,
    index: usize,
    text: &str,
    metrics: &[Metric],
    eta: f64,
    timings: bool,
) -> EvalRecord {
    let start = Instant::now();
    let mut record = EvalRecord {
        index,
        query: Document::new(text).text(),
        label: None,
        score: None,
        r2: None,
        fidelity: None,
        confidence_drop: None,
        dpm: None,
        aopc: None,
        plan_len: None,
        flags: Vec::new(),
        runtime_ms: None,
        error: None,
    };
    if let Err(e) = run_instance(explainer, text, metrics, eta, &mut record) {
        record.error = Some(InstanceError::from_error(&e));
    }
    if timings {
        record.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    record
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(Self { mean, std: var.sqrt(), count: values.len() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub r2: Option<Summary>,
    pub fidelity: Option<Summary>,
    pub confidence_drop: Option<Summary>,
    pub dpm: Option<Summary>,
    pub aopc: Option<Summary>,
    pub runtime_ms: Option<Summary>,
}

impl Aggregates {
    pub fn from_records(records: &[EvalRecord]) -> Self {
        let of = |f: &dyn Fn(&EvalRecord) -> Option<f64>| {
            Summary::of(&records.iter().filter(|r| !r.is_failure()).filter_map(f).collect::<Vec<_>>())
        };
        Self {
            r2: of(&|r| r.r2),
            fidelity: of(&|r| r.fidelity),
            confidence_drop: of(&|r| r.confidence_drop),
            dpm: of(&|r| r.dpm),
            aopc: of(&|r| r.aopc),
            runtime_ms: of(&|r| r.runtime_ms),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub version: String,
    pub seed: u64,
    pub eta: f64,
    pub metrics: Vec<Metric>,
    pub config: ExplainConfig,
    pub records: Vec<EvalRecord>,
    pub failures: usize,
    pub aggregates: Aggregates,
}

impl EvalReport {
    /// Records are reordered by input index so the report does not depend on scheduling.
    pub fn new(config: &ExplainConfig, eta: f64, metrics: &[Metric], mut records: Vec<EvalRecord>) -> Self {
        records.sort_by_key(|r| r.index);
        Self {
            version: VERSION.to_string(),
            seed: config.seed,
            eta,
            metrics: metrics.to_vec(),
            config: config.clone(),
            failures: records.iter().filter(|r| r.is_failure()).count(),
            aggregates: Aggregates::from_records(&records),
            records,
        }
    }

    pub fn all_failed(&self) -> bool {
        !self.records.is_empty() && self.failures == self.records.len()
    }
}

/// Sequential evaluation of every text.
pub fn evaluate(explainer: &Explainer, texts: &[String], metrics: &[Metric], eta: f64) -> EvalReport {
    let records = texts.iter().enumerate().map(|(i, t)| evaluate_instance(explainer, i, t, metrics, eta, false)).collect();
    EvalReport::new(explainer.config(), eta, metrics, records)
}
