use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense latent vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatentPoint<T>(pub Vec<T>);

impl<T: Scalar> LatentPoint<T> {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn components(&self) -> &[T] {
        &self.0
    }

    pub fn midpoint(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        let half = T::from_f64(0.5).expect("0.5 representable");
        Ok(Self(self.0.iter().zip(&other.0).map(|(&a, &b)| a + (b - a) * half).collect()))
    }
}

fn check_dims<T: Scalar>(a: &LatentPoint<T>, b: &LatentPoint<T>) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Contract(format!("latent dimension mismatch: {} vs {}", a.dim(), b.dim())));
    }
    Ok(())
}

pub fn euclidean<T: Scalar>(a: &LatentPoint<T>, b: &LatentPoint<T>) -> Result<T> {
    check_dims(a, b)?;
    Ok(a.0.iter().zip(&b.0).fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y)).sqrt())
}

/// Which way the interpolation step points.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `z_p + i (z_q − z_p)/(s+1)`: points march from `z_p` toward `z_q`.
    #[default]
    TowardSecond,
    /// `z_p + i (z_p − z_q)/(s+1)`: points extrapolate away from `z_q`.
    AwayFromSecond,
}

/// `s + 1` points `z_p + i (z_q − z_p)/(s+1)` for `i = 0..=s`.
pub fn interpolate<T: Scalar>(zp: &LatentPoint<T>, zq: &LatentPoint<T>, s: usize) -> Result<Vec<LatentPoint<T>>> {
    interpolate_with(zp, zq, s, Direction::TowardSecond)
}

pub fn interpolate_with<T: Scalar>(
    zp: &LatentPoint<T>,
    zq: &LatentPoint<T>,
    s: usize,
    direction: Direction,
) -> Result<Vec<LatentPoint<T>>> {
    check_dims(zp, zq)?;
    let steps = T::from_usize_lossy(s + 1);
    let delta: Vec<T> = match direction {
        Direction::TowardSecond => zp.0.iter().zip(&zq.0).map(|(&p, &q)| q - p).collect(),
        Direction::AwayFromSecond => zp.0.iter().zip(&zq.0).map(|(&p, &q)| p - q).collect(),
    };
    Ok((0..=s)
        .map(|i| {
            let i = T::from_usize_lossy(i);
            LatentPoint(zp.0.iter().zip(&delta).map(|(&p, &d)| p + i * d / steps).collect())
        })
        .collect())
}
