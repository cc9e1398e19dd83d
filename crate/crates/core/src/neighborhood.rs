use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::blackbox::{Label, Prediction};
use crate::text::Document;

/// Diagnostic markers attached to neighborhoods, explanations and evaluation records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// Fewer than k counterfactual prototypes/landmarks were available.
    CounterfactualShortage,
    /// The prototype pool was refilled from retained surplus variants.
    PoolRefilled,
    /// The pool ran dry before the neighborhood reached its target size.
    PoolExhausted,
    /// The round cap stopped construction.
    IterationCap,
    /// Fewer than two landmarks; interpolation used the pivot-midpoint fallback.
    DegenerateLandmarks,
    /// Updated landmark set was topped up from the previous one.
    LandmarksToppedUp,
    /// At least one class has fewer than the requested number of members.
    ClassShortage,
    /// Every neighborhood member carries the same black-box label.
    SingleClassNeighborhood,
    /// Regression targets have zero variance; R² reported as 1.
    ZeroVarianceTarget,
    /// Fewer exemplars than requested were available.
    ExemplarShortage,
    /// Manipulation plan has no step.
    EmptyPlan,
    /// A mask step was dropped so the text would not become empty.
    MaskDropped,
    /// A mask step targeted a token absent from the current text.
    MaskAbsent,
}

pub(crate) fn raise(flags: &mut Vec<Flag>, flag: Flag) {
    if !flags.contains(&flag) {
        flags.push(flag);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Xprob,
    Xproa,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Xprob => "xprob",
            Method::Xproa => "xproa",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "xprob" => Ok(Method::Xprob),
            "xproa" => Ok(Method::Xproa),
            other => Err(crate::Error::Config(format!("unknown engine {other:?} (expected xprob or xproa)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub negative: usize,
    pub positive: usize,
}

impl ClassCounts {
    pub fn from_labels(labels: impl IntoIterator<Item = Label>) -> Self {
        let mut counts = Self::default();
        for l in labels {
            match l {
                Label::Negative => counts.negative += 1,
                Label::Positive => counts.positive += 1,
            }
        }
        counts
    }

    pub fn total(&self) -> usize {
        self.negative + self.positive
    }

    pub fn is_single_class(&self) -> bool {
        self.negative == 0 || self.positive == 0
    }
}

/// A synthetic text labeled by the black box. `distance` is the engine's own proximity
/// measure to the query (tf-idf cosine for XPROB, latent Euclidean for XPROA).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub document: Document,
    pub prediction: Prediction,
    pub distance: f64,
}

/// Labeled synthetic dataset around a query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighborhood {
    pub query: Document,
    pub query_prediction: Prediction,
    pub members: Vec<Member>,
    pub method: Method,
    pub class_counts: ClassCounts,
    pub flags: Vec<Flag>,
}

impl Neighborhood {
    pub fn new(
        query: Document,
        query_prediction: Prediction,
        members: Vec<Member>,
        method: Method,
        mut flags: Vec<Flag>,
    ) -> Self {
        debug_assert_eq!(
            members.iter().map(|m| m.document.text()).collect::<HashSet<_>>().len(),
            members.len(),
            "duplicate members"
        );
        let class_counts = ClassCounts::from_labels(members.iter().map(|m| m.prediction.label));
        if !members.is_empty() && class_counts.is_single_class() {
            raise(&mut flags, Flag::SingleClassNeighborhood);
        }
        Self { query, query_prediction, members, method, class_counts, flags }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}
