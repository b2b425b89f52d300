//! Monotone norms on `Rᴺ`.

use crate::error::{Error, Result};
use crate::vector::PositiveVector;

/// A monotone norm: `0 ≤ x ≤ y ⇒ ‖x‖ ≤ ‖y‖`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum NormChoice {
    /// `maxᵢ |xᵢ|`
    #[default]
    Sup,
    /// `Σᵢ |xᵢ|`
    One,
    /// `‖x‖₂`
    Euclidean,
    /// `maxᵢ |xᵢ| / vᵢ`
    WeightedSup(PositiveVector),
}

impl NormChoice {
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            NormChoice::WeightedSup(v) if v.dim() != dim => Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.dim(),
            }),
            _ => Ok(()),
        }
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        match self {
            NormChoice::Sup => x.iter().fold(0.0, |m, v| f64::max(m, v.abs())),
            NormChoice::One => x.iter().map(|v| v.abs()).sum(),
            NormChoice::Euclidean => libm::sqrt(x.iter().map(|v| v * v).sum()),
            NormChoice::WeightedSup(w) => x
                .iter()
                .zip(w.iter())
                .fold(0.0, |m, (v, w)| f64::max(m, v.abs() / w)),
        }
    }

    /// `‖a − b‖` without allocating.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let diff = a.iter().zip(b).map(|(x, y)| x - y);
        match self {
            NormChoice::Sup => diff.fold(0.0, |m, v| f64::max(m, v.abs())),
            NormChoice::One => diff.map(f64::abs).sum(),
            NormChoice::Euclidean => libm::sqrt(diff.map(|v| v * v).sum()),
            NormChoice::WeightedSup(w) => diff
                .zip(w.iter())
                .fold(0.0, |m, (v, w)| f64::max(m, v.abs() / w)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NormChoice::Sup => "sup",
            NormChoice::One => "one",
            NormChoice::Euclidean => "l2",
            NormChoice::WeightedSup(_) => "weighted_sup",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn norms_of_small_vector() {
        let x = [3.0, -4.0];
        assert_eq!(NormChoice::Sup.norm(&x), 4.0);
        assert_eq!(NormChoice::One.norm(&x), 7.0);
        assert_eq!(NormChoice::Euclidean.norm(&x), 5.0);
        let w = NormChoice::WeightedSup(PositiveVector::new(vec![1.0, 8.0]).unwrap());
        assert_eq!(w.norm(&x), 3.0);
        assert_eq!(w.distance(&[3.0, 0.0], &[0.0, 4.0]), 3.0);
        assert!(w.check_dim(3).is_err());
    }
}
