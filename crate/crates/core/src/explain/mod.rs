//! Surrogate fitting, attribution split, exemplar selection and the assembled [`Explanation`].

mod exemplars;
mod html;
mod local;
mod surrogate;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use exemplars::{select_diverse, select_exemplars, Exemplar, ExemplarClass, ExemplarSelection};
pub use html::render_html;
pub use local::LocalSpace;
pub use surrogate::{
    fidelity, fit_surrogate, fit_weighted_ridge, kernel_weight, neighborhood_weights, r_squared, LinearSurrogate,
    RidgeFit, SurrogateDiagnostics,
};

use crate::blackbox::{BlackBox, Label, Prediction};
use crate::error::{Error, Result};
use crate::neighborhood::{raise, ClassCounts, Flag, Method, Neighborhood};
use crate::text::{Corpus, Document};
use crate::xproa::{construct_neighborhood_xproa, Direction, Generator, ReferenceGenerator, XproaConfig};
use crate::xprob::{XprobConfig, XprobEngine};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    pub token: String,
    pub weight: f64,
}

/// Intrinsic words are the query's own tokens in query order; extrinsic words are the
/// `m_extrinsic` other local-vocabulary tokens with the largest |coefficient|.
pub fn split_attributions(
    surrogate: &LinearSurrogate,
    query: &Document,
    m_extrinsic: usize,
) -> (Vec<Attribution>, Vec<Attribution>) {
    let mut seen = std::collections::HashSet::new();
    let intrinsic: Vec<Attribution> = query
        .tokens()
        .iter()
        .filter(|t| seen.insert(t.as_str()))
        .filter_map(|t| surrogate.coefficient(t).map(|w| Attribution { token: t.clone(), weight: w }))
        .collect();
    let mut extrinsic: Vec<Attribution> = surrogate
        .vocabulary
        .iter()
        .zip(&surrogate.coefficients)
        .filter(|(t, _)| !seen.contains(t.as_str()))
        .map(|(t, &w)| Attribution { token: t.clone(), weight: w })
        .collect();
    extrinsic.sort_by(|a, b| b.weight.abs().total_cmp(&a.weight.abs()));
    extrinsic.truncate(m_extrinsic);
    (intrinsic, extrinsic)
}

/// All knobs of one explanation run. Flat so it serializes as a single config block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExplainConfig {
    pub engine: Method,
    pub seed: u64,
    /// XPROB prototype set size.
    pub xprob_k: usize,
    /// XPROB maximal neighborhood size.
    pub p: usize,
    /// n-gram context width.
    pub context_n: usize,
    pub xprob_max_rounds: usize,
    /// XPROA interpolation steps.
    pub s: usize,
    /// XPROA landmark count.
    pub xproa_k: usize,
    /// XPROA members per class.
    pub n: usize,
    pub xproa_max_rounds: usize,
    pub patience: usize,
    pub direction: Direction,
    /// Kernel width of the distance weights.
    pub sigma: f64,
    pub ridge: f64,
    /// Closeness/diversity trade-off of exemplar selection.
    pub lambda: f64,
    pub exemplar_count: usize,
    pub m_extrinsic: usize,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        let xprob = XprobConfig::default();
        let xproa = XproaConfig::default();
        Self {
            engine: Method::Xprob,
            seed: 0,
            xprob_k: xprob.k,
            p: xprob.p,
            context_n: xprob.n,
            xprob_max_rounds: xprob.max_rounds,
            s: xproa.s,
            xproa_k: xproa.k,
            n: xproa.n,
            xproa_max_rounds: xproa.max_rounds,
            patience: xproa.patience,
            direction: xproa.direction,
            sigma: 1.0,
            ridge: 1e-6,
            lambda: 0.5,
            exemplar_count: 5,
            m_extrinsic: 3,
        }
    }
}

impl ExplainConfig {
    pub fn xprob(&self) -> XprobConfig {
        XprobConfig { k: self.xprob_k, p: self.p, n: self.context_n, max_rounds: self.xprob_max_rounds, seed: self.seed }
    }

    pub fn xproa(&self) -> XproaConfig {
        XproaConfig {
            s: self.s,
            k: self.xproa_k,
            n: self.n,
            max_rounds: self.xproa_max_rounds,
            patience: self.patience,
            direction: self.direction,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("xprob_k", self.xprob_k),
            ("p", self.p),
            ("context_n", self.context_n),
            ("s", self.s),
            ("xproa_k", self.xproa_k),
            ("n", self.n),
            ("exemplar_count", self.exemplar_count),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be at least 1")));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::Config(format!("ridge must be non-negative, got {}", self.ridge)));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!("lambda must lie in [0, 1], got {}", self.lambda)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub r2: f64,
    pub fidelity: f64,
    pub neighborhood_size: usize,
    pub class_counts: ClassCounts,
    pub flags: Vec<Flag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub query: String,
    pub label: Label,
    pub score: f64,
    pub method: Method,
    pub seed: u64,
    pub intrinsic: Vec<Attribution>,
    pub extrinsic: Vec<Attribution>,
    pub factuals: Vec<Exemplar>,
    pub counterfactuals: Vec<Exemplar>,
    pub diagnostics: Diagnostics,
    pub config: ExplainConfig,
    pub version: String,
}

impl Explanation {
    pub fn prediction(&self) -> Prediction {
        Prediction::from_score(self.score)
    }

    /// Intrinsic attribution with the largest magnitude.
    pub fn top_intrinsic(&self) -> Option<&Attribution> {
        self.intrinsic.iter().fold(None, |best: Option<&Attribution>, a| match best {
            Some(b) if b.weight.abs() >= a.weight.abs() => Some(b),
            _ => Some(a),
        })
    }

    pub fn weight_of(&self, token: &str) -> Option<f64> {
        self.intrinsic.iter().chain(&self.extrinsic).find(|a| a.token == token).map(|a| a.weight)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Turns a neighborhood into an explanation.
pub fn explain_neighborhood(neighborhood: &Neighborhood, config: &ExplainConfig) -> Result<Explanation> {
    let local = LocalSpace::new(neighborhood)?;
    let surrogate = fit_surrogate(neighborhood, &local, config.sigma, config.ridge)?;
    let (intrinsic, extrinsic) = split_attributions(&surrogate, &neighborhood.query, config.m_extrinsic);
    let factuals = select_exemplars(neighborhood, &local, ExemplarClass::Factual, config.exemplar_count, config.lambda)?;
    let counterfactuals =
        select_exemplars(neighborhood, &local, ExemplarClass::Counterfactual, config.exemplar_count, config.lambda)?;
    let mut flags = neighborhood.flags.clone();
    for &f in &surrogate.diagnostics.flags {
        raise(&mut flags, f);
    }
    if factuals.shortage || counterfactuals.shortage {
        raise(&mut flags, Flag::ExemplarShortage);
    }
    Ok(Explanation {
        query: neighborhood.query.text(),
        label: neighborhood.query_prediction.label,
        score: neighborhood.query_prediction.score_positive,
        method: neighborhood.method,
        seed: config.seed,
        intrinsic,
        extrinsic,
        factuals: factuals.exemplars,
        counterfactuals: counterfactuals.exemplars,
        diagnostics: Diagnostics {
            r2: surrogate.diagnostics.r2,
            fidelity: surrogate.diagnostics.fidelity,
            neighborhood_size: neighborhood.len(),
            class_counts: neighborhood.class_counts,
            flags,
        },
        config: config.clone(),
        version: VERSION.to_string(),
    })
}

/// Builds one generator per explanation job so that stateful generators never leak
/// state between concurrent queries.
pub type GeneratorFactory = Arc<dyn Fn() -> Result<Box<dyn Generator>> + Send + Sync>;

/// Shared, immutable explanation resources. `explain` may be called from many threads.
pub struct Explainer {
    blackbox: Arc<BlackBox>,
    engine: XprobEngine,
    generator: Option<GeneratorFactory>,
    config: ExplainConfig,
}

impl std::fmt::Debug for Explainer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Explainer")
            .field("blackbox", &self.blackbox)
            .field("corpus_size", &self.engine.corpus().len())
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl Explainer {
    /// `corpus` is X_L: prototype source for XPROB and landmark source for XPROA.
    pub fn new(blackbox: Arc<BlackBox>, corpus: Corpus, config: ExplainConfig) -> Result<Self> {
        config.validate()?;
        corpus.require_non_empty()?;
        let engine = XprobEngine::new(corpus, config.context_n)?;
        Ok(Self { blackbox, engine, generator: None, config })
    }

    /// Uses the in-memory reference generator over the corpus, forked per job.
    pub fn with_reference_generator(mut self) -> Result<Self> {
        let base = ReferenceGenerator::new(self.engine.corpus())?;
        self.generator = Some(Arc::new(move || Ok(Box::new(base.fork()) as Box<dyn Generator>)));
        Ok(self)
    }

    pub fn with_generator(mut self, factory: GeneratorFactory) -> Self {
        self.generator = Some(factory);
        self
    }

    pub fn config(&self) -> &ExplainConfig {
        &self.config
    }

    pub fn blackbox(&self) -> &BlackBox {
        &self.blackbox
    }

    pub fn corpus(&self) -> &Corpus {
        self.engine.corpus()
    }

    pub fn xprob_engine(&self) -> &XprobEngine {
        &self.engine
    }

    pub fn neighborhood(&self, query: &Document) -> Result<Neighborhood> {
        match self.config.engine {
            Method::Xprob => self.engine.construct(query, &self.blackbox, &self.config.xprob()),
            Method::Xproa => {
                let factory = self
                    .generator
                    .as_ref()
                    .ok_or_else(|| Error::Config("the xproa engine needs a generator".into()))?;
                let generator = factory()?;
                construct_neighborhood_xproa(
                    query,
                    self.engine.corpus(),
                    generator.as_ref(),
                    &self.blackbox,
                    &self.config.xproa(),
                )
            }
        }
    }

    pub fn explain(&self, text: &str) -> Result<Explanation> {
        let query = Document::new(text);
        let neighborhood = self.neighborhood(&query)?;
        explain_neighborhood(&neighborhood, &self.config)
    }
}
