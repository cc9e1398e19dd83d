use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse vector over a fixed-size vocabulary. Entries are sorted by index and never zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector<T> {
    entries: Vec<(usize, T)>,
    dim: usize,
}

impl<T: Scalar> SparseVector<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { entries: Vec::new(), dim }
    }

    /// Builds a vector from unordered `(index, weight)` pairs; duplicate indices are summed.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (usize, T)>) -> Result<Self> {
        let mut entries: Vec<(usize, T)> = pairs.into_iter().collect();
        if let Some(&(i, _)) = entries.iter().find(|(i, _)| *i >= dim) {
            return Err(Error::Contract(format!("index {i} out of range for dimension {dim}")));
        }
        entries.sort_by_key(|(i, _)| *i);
        let mut merged: Vec<(usize, T)> = Vec::with_capacity(entries.len());
        for (i, w) in entries {
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc = *acc + w,
                _ => merged.push((i, w)),
            }
        }
        merged.retain(|(_, w)| !w.is_zero());
        Ok(Self { entries: merged, dim })
    }

    pub fn from_dense(values: &[T]) -> Self {
        let entries = values.iter().copied().enumerate().filter(|(_, w)| !w.is_zero()).collect();
        Self { entries, dim: values.len() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> T {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or_else(|_| T::zero())
    }

    pub fn to_dense(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        for &(i, w) in &self.entries {
            out[i] = w;
        }
        out
    }

    pub fn dot(&self, other: &Self) -> T {
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        let mut acc = T::zero();
        while let (Some(&&(i, x)), Some(&&(j, y))) = (a.peek(), b.peek()) {
            match i.cmp(&j) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    acc = acc + x * y;
                    a.next();
                    b.next();
                }
            }
        }
        acc
    }

    pub fn norm(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, &(_, w)| acc + w * w).sqrt()
    }

    /// Returns `self / ‖self‖`, or the zero vector unchanged.
    pub fn normalized(&self) -> Self {
        let norm = self.norm();
        if norm.is_zero() {
            return self.clone();
        }
        Self {
            entries: self.entries.iter().map(|&(i, w)| (i, w / norm)).collect(),
            dim: self.dim,
        }
    }

    /// `self - other`. Dimensions must agree.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        let negated = other.entries.iter().map(|&(i, w)| (i, -w));
        Self::from_pairs(self.dim, self.entries.iter().copied().chain(negated))
    }
}

fn check_dims<T>(a: &SparseVector<T>, b: &SparseVector<T>) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::Contract(format!("dimension mismatch: {} vs {}", a.dim, b.dim)));
    }
    Ok(())
}

/// `1 − a·b / (‖a‖‖b‖)`, clamped to `[0, 2]`. A zero vector on either side gives 1.
pub fn cosine_distance<T: Scalar>(a: &SparseVector<T>, b: &SparseVector<T>) -> Result<T> {
    check_dims(a, b)?;
    let (na, nb) = (a.norm(), b.norm());
    if na.is_zero() || nb.is_zero() {
        return Ok(T::one());
    }
    let two = T::one() + T::one();
    let d = T::one() - a.dot(b) / (na * nb);
    Ok(d.max(T::zero()).min(two))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(dim: usize, pairs: &[(usize, f64)]) -> SparseVector<f64> {
        SparseVector::from_pairs(dim, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn cosine_fixed_values() {
        let a = v(2, &[(0, 1.0)]);
        let b = v(2, &[(0, 1.0), (1, 1.0)]);
        assert_eq!(cosine_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(cosine_distance(&a, &v(2, &[(1, 3.0)])).unwrap(), 1.0);
        let d = cosine_distance(&a, &b).unwrap();
        assert!((d - (1.0 - 1.0 / 2f64.sqrt())).abs() < 1e-12);
        assert!((d - 0.2929).abs() < 1e-4);
    }

    #[test]
    fn zero_vector_is_indifferent() {
        let z = SparseVector::<f64>::zeros(3);
        assert_eq!(cosine_distance(&z, &v(3, &[(1, 2.0)])).unwrap(), 1.0);
        assert_eq!(cosine_distance(&z, &z).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch_is_a_contract_error() {
        let err = cosine_distance(&v(2, &[]), &v(3, &[])).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
        assert!(SparseVector::<f64>::from_pairs(2, [(2, 1.0)]).is_err());
    }

    #[test]
    fn explicit_zeros_are_dropped() {
        let a = v(4, &[(1, 1.0), (1, -1.0), (3, 0.0), (2, 0.5)]);
        assert_eq!(a.entries(), &[(2, 0.5)]);
        let d = a.sub(&a).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn works_in_single_precision() {
        let a = SparseVector::<f32>::from_dense(&[1.0, 0.0]);
        let b = SparseVector::<f32>::from_dense(&[1.0, 1.0]);
        let d = cosine_distance(&a, &b).unwrap();
        assert!((d - 0.29289).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn cosine_symmetric_and_reflexive(
            xs in proptest::collection::vec(-5.0f64..5.0, 6),
            ys in proptest::collection::vec(-5.0f64..5.0, 6),
        ) {
            let a = SparseVector::from_dense(&xs);
            let b = SparseVector::from_dense(&ys);
            let ab = cosine_distance(&a, &b).unwrap();
            let ba = cosine_distance(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=2.0).contains(&ab));
            if !a.is_zero() {
                prop_assert!(cosine_distance(&a, &a).unwrap().abs() < 1e-12);
            }
        }
    }
}
