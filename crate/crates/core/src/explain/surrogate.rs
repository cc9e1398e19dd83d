use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::local::LocalSpace;
use crate::blackbox::Prediction;
use crate::error::{Error, Result};
use crate::neighborhood::{raise, Flag, Neighborhood};
use crate::scalar::Scalar;
use crate::text::SparseVector;

const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Exponential kernel `exp(−d²/σ²)` on query distances.
pub fn kernel_weight<T: Scalar>(distance: T, sigma: T) -> T {
    (-(distance * distance) / (sigma * sigma)).exp()
}

pub fn neighborhood_weights<T: Scalar>(distances: &[T], sigma: T) -> Result<Vec<T>> {
    if sigma <= T::zero() || !sigma.is_finite() {
        return Err(Error::Config(format!("kernel width must be positive, got {sigma:?}")));
    }
    Ok(distances.iter().map(|&d| kernel_weight(d, sigma)).collect())
}

/// Solution of a weighted ridge problem with an unpenalized intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeFit {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// Max-norm residual of the normal equations at the returned solution.
    pub residual: f64,
}

/// Minimizes `Σ wᵢ (yᵢ − b − xᵢ·β)² + ridge ‖β‖²` through the normal equations.
pub fn fit_weighted_ridge(
    rows: &[SparseVector<f64>],
    dim: usize,
    targets: &[f64],
    weights: &[f64],
    ridge: f64,
) -> Result<RidgeFit> {
    if rows.len() != targets.len() || rows.len() != weights.len() {
        return Err(Error::Contract("rows, targets and weights must have equal length".into()));
    }
    if let Some(r) = rows.iter().find(|r| r.dim() != dim) {
        return Err(Error::Contract(format!("row dimension {} != {dim}", r.dim())));
    }
    // column 0 is the intercept
    let size = dim + 1;
    let mut gram = DMatrix::<f64>::zeros(size, size);
    let mut rhs = DVector::<f64>::zeros(size);
    for ((row, &y), &w) in rows.iter().zip(targets).zip(weights) {
        let cols: Vec<(usize, f64)> =
            std::iter::once((0, 1.0)).chain(row.entries().iter().map(|&(i, v)| (i + 1, v))).collect();
        for &(a, va) in &cols {
            rhs[a] += w * va * y;
            for &(b, vb) in &cols {
                gram[(a, b)] += w * va * vb;
            }
        }
    }
    for i in 1..size {
        gram[(i, i)] += ridge;
    }
    let solve = |b: &DVector<f64>| -> Option<DVector<f64>> {
        if let Some(ch) = gram.clone().cholesky() {
            return Some(ch.solve(b));
        }
        gram.clone().lu().solve(b).or_else(|| gram.clone().svd(true, true).solve(b, 1e-14).ok())
    };
    let mut beta = solve(&rhs).ok_or_else(|| Error::DegenerateNeighborhood("normal equations are singular".into()))?;
    let scale = rhs.amax().max(1.0);
    let mut residual = (&rhs - &gram * &beta).amax();
    for _ in 0..3 {
        if residual <= RESIDUAL_TOLERANCE * scale {
            break;
        }
        let r = &rhs - &gram * &beta;
        match solve(&r) {
            Some(step) => beta += step,
            None => break,
        }
        residual = (&rhs - &gram * &beta).amax();
    }
    Ok(RidgeFit { coefficients: beta.iter().skip(1).copied().collect(), intercept: beta[0], residual })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateDiagnostics {
    pub r2: f64,
    pub fidelity: f64,
    pub flags: Vec<Flag>,
}

/// Distance-weighted linear model over binary bag-of-words features of the local vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSurrogate {
    pub vocabulary: Vec<String>,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub sigma: f64,
    pub ridge: f64,
    pub weights: Vec<f64>,
    pub diagnostics: SurrogateDiagnostics,
}

impl LinearSurrogate {
    pub fn predict(&self, bag: &SparseVector<f64>) -> f64 {
        self.intercept + bag.entries().iter().map(|&(i, v)| self.coefficients[i] * v).sum::<f64>()
    }

    pub fn coefficient(&self, token: &str) -> Option<f64> {
        self.vocabulary.iter().position(|t| t == token).map(|i| self.coefficients[i])
    }
}

/// R² of `predicted` against `targets`; `None` when the targets have zero variance.
pub fn r_squared(targets: &[f64], predicted: &[f64]) -> Option<f64> {
    let first = *targets.first()?;
    if targets.iter().all(|&y| y == first) {
        return None;
    }
    let mean = targets.iter().sum::<f64>() / targets.len() as f64;
    let ss_tot: f64 = targets.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = targets.iter().zip(predicted).map(|(y, p)| (y - p).powi(2)).sum();
    Some(1.0 - ss_res / ss_tot)
}

/// Fraction of members whose thresholded surrogate score agrees with the black-box label.
pub fn fidelity(predictions: &[Prediction], surrogate_scores: &[f64]) -> f64 {
    if predictions.is_empty() {
        return 0.0;
    }
    let agree = predictions
        .iter()
        .zip(surrogate_scores)
        .filter(|(p, &s)| Prediction::from_score(s).label == p.label)
        .count();
    agree as f64 / predictions.len() as f64
}

/// Fits the surrogate on black-box positive-class scores of the neighborhood.
pub fn fit_surrogate(neighborhood: &Neighborhood, local: &LocalSpace, sigma: f64, ridge: f64) -> Result<LinearSurrogate> {
    if neighborhood.len() < 2 {
        return Err(Error::DegenerateNeighborhood(format!(
            "{} member(s); a surrogate needs at least two",
            neighborhood.len()
        )));
    }
    let weights = neighborhood_weights(local.distances(), sigma)?;
    let targets: Vec<f64> = neighborhood.members.iter().map(|m| m.prediction.score_positive).collect();
    let fit = fit_weighted_ridge(local.bags(), local.dim(), &targets, &weights, ridge)?;
    let mut surrogate = LinearSurrogate {
        vocabulary: local.vocabulary().to_vec(),
        coefficients: fit.coefficients,
        intercept: fit.intercept,
        sigma,
        ridge,
        weights,
        diagnostics: SurrogateDiagnostics { r2: 0.0, fidelity: 0.0, flags: Vec::new() },
    };
    let fitted: Vec<f64> = local.bags().iter().map(|b| surrogate.predict(b)).collect();
    let mut flags = Vec::new();
    let r2 = r_squared(&targets, &fitted).unwrap_or_else(|| {
        raise(&mut flags, Flag::ZeroVarianceTarget);
        1.0
    });
    if neighborhood.class_counts.is_single_class() {
        raise(&mut flags, Flag::SingleClassNeighborhood);
    }
    let predictions: Vec<Prediction> = neighborhood.members.iter().map(|m| m.prediction).collect();
    surrogate.diagnostics = SurrogateDiagnostics { r2, fidelity: fidelity(&predictions, &fitted), flags };
    Ok(surrogate)
}
