//! Local explanations for binary text classifiers.
//!
//! A query is explained by building a realistic synthetic neighborhood around it, either by
//! probability-based editions of counterfactual prototypes ([`xprob`]) or by progressive
//! interpolation in a generator's latent space ([`xproa`]), labeling it with the black box,
//! and fitting a distance-weighted linear surrogate. The result splits word attributions into
//! intrinsic and extrinsic words and lists diverse factual and counterfactual exemplars.
//! [`eval`] measures correctness, completeness, compactness and stability of explanations.

pub mod blackbox;
pub mod error;
pub mod eval;
pub mod explain;
pub mod jsonl;
pub mod neighborhood;
pub mod ngram;
pub mod scalar;
pub mod text;
pub mod xproa;
pub mod xprob;

pub use blackbox::{BlackBox, BuiltinKind, BuiltinModel, Classifier, Label, Prediction};
pub use error::{Error, Result};
pub use explain::{ExplainConfig, Explainer, Explanation};
pub use neighborhood::{ClassCounts, Flag, Member, Method, Neighborhood};
pub use scalar::Scalar;
pub use text::{Corpus, CorpusRole, Document, LabeledCorpus, SparseVector, TfIdfModel};

/// Double-precision sparse vector, the default for text features.
pub type SparseVec = SparseVector<f64>;
/// Single-precision sparse vector.
pub type SparseVecF32 = SparseVector<f32>;
/// Double-precision latent point, the wire type of the generator protocol.
pub type Latent = xproa::LatentPoint<f64>;
/// Single-precision latent point.
pub type LatentF32 = xproa::LatentPoint<f32>;
