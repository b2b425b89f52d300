//! Interference mappings `T: R₊ᴺ → R₊₊ᴺ`.
//!
//! [`InterferenceMapping`] is a closed set of families. Keeping the set closed
//! lets [`crate::asymptotic`] build `T∞` analytically for every shipped
//! variant. The [`Mapping`] trait is the evaluation surface shared by the
//! property verifiers and the solver.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::load::NetworkSnapshot;
use crate::matrix::Matrix;
use crate::vector::{NonnegVector, PositiveVector};

/// Something that can be evaluated on `R₊ᴺ`.
pub trait Mapping {
    fn dim(&self) -> usize;

    /// Writes `T(x)` into `out`. Both slices must have length [`Mapping::dim`];
    /// this is not re-checked on the hot path.
    fn eval_into(&self, x: &[f64], out: &mut [f64]);

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(x, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InterferenceMapping {
    /// `x ↦ A x + b`
    Affine {
        matrix: Matrix,
        offset: PositiveVector,
    },
    /// `x ↦ A x + diag(w) √x + b`, square root taken entry-wise.
    ConcaveComposite {
        matrix: Matrix,
        offset: PositiveVector,
        sqrt_weights: NonnegVector,
    },
    /// Resource-block load coupling of a cellular network.
    LoadCoupling(NetworkSnapshot),
    /// `x ↦ β T(x)`
    Scaled {
        inner: Box<InterferenceMapping>,
        beta: f64,
    },
}

fn check_square(matrix: &Matrix, n: usize) -> Result<()> {
    if matrix.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: matrix.dim(),
        });
    }
    if !matrix.is_nonnegative() {
        return Err(Error::InvalidArgument(
            "interference matrix must be entry-wise nonnegative",
        ));
    }
    Ok(())
}

impl InterferenceMapping {
    pub fn affine(matrix: Matrix, offset: PositiveVector) -> Result<Self> {
        check_square(&matrix, offset.dim())?;
        Ok(Self::Affine { matrix, offset })
    }

    pub fn concave_composite(
        matrix: Matrix,
        offset: PositiveVector,
        sqrt_weights: NonnegVector,
    ) -> Result<Self> {
        check_square(&matrix, offset.dim())?;
        if sqrt_weights.dim() != offset.dim() {
            return Err(Error::DimensionMismatch {
                expected: offset.dim(),
                actual: sqrt_weights.dim(),
            });
        }
        Ok(Self::ConcaveComposite {
            matrix,
            offset,
            sqrt_weights,
        })
    }

    pub fn load_coupling(snapshot: NetworkSnapshot) -> Result<Self> {
        snapshot.validate()?;
        Ok(Self::LoadCoupling(snapshot))
    }

    /// Evaluates `T(x)` after checking the dimension and that every entry of
    /// `x` is finite and nonnegative.
    pub fn apply(&self, x: &[f64]) -> Result<PositiveVector> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let x = NonnegVector::new(x.to_vec())?;
        PositiveVector::new(self.eval(&x))
    }

    /// True for mappings whose coordinate functions are all convex.
    pub fn is_convex(&self) -> bool {
        match self {
            Self::Affine { .. } => true,
            Self::ConcaveComposite { sqrt_weights, .. } => sqrt_weights.iter().all(|&w| w == 0.0),
            Self::LoadCoupling(_) => false,
            Self::Scaled { inner, .. } => inner.is_convex(),
        }
    }

    /// True for mappings whose coordinate functions are all concave.
    pub fn is_concave(&self) -> bool {
        match self {
            Self::Affine { .. } | Self::ConcaveComposite { .. } | Self::LoadCoupling(_) => true,
            Self::Scaled { inner, .. } => inner.is_concave(),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Affine { .. } => "affine",
            Self::ConcaveComposite { .. } => "concave_composite",
            Self::LoadCoupling(_) => "load_coupling",
            Self::Scaled { .. } => "scaled",
        }
    }
}

impl Mapping for InterferenceMapping {
    fn dim(&self) -> usize {
        match self {
            Self::Affine { offset, .. } | Self::ConcaveComposite { offset, .. } => offset.dim(),
            Self::LoadCoupling(s) => s.n_stations(),
            Self::Scaled { inner, .. } => inner.dim(),
        }
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Self::Affine { matrix, offset } => {
                matrix.mul_vec_into(x, out);
                out.iter_mut().zip(offset.iter()).for_each(|(o, b)| *o += b);
            }
            Self::ConcaveComposite {
                matrix,
                offset,
                sqrt_weights,
            } => {
                matrix.mul_vec_into(x, out);
                for i in 0..out.len() {
                    out[i] += sqrt_weights[i] * libm::sqrt(x[i]) + offset[i];
                }
            }
            Self::LoadCoupling(s) => s.load_into(x, out),
            Self::Scaled { inner, beta } => {
                inner.eval_into(x, out);
                out.iter_mut().for_each(|o| *o *= beta);
            }
        }
    }
}

/// `T′ = β T`. Fails unless `β` is finite and strictly positive.
pub fn scale_mapping(mapping: InterferenceMapping, beta: f64) -> Result<InterferenceMapping> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidArgument(
            "scaling factor must be finite and > 0",
        ));
    }
    Ok(InterferenceMapping::Scaled {
        inner: Box::new(mapping),
        beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap_half() -> InterferenceMapping {
        let a = Matrix::from_rows(&[vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap();
        InterferenceMapping::affine(a, PositiveVector::ones(2).unwrap()).unwrap()
    }

    #[test]
    fn affine_examples() {
        let t = swap_half();
        assert_eq!(t.apply(&[0.0, 0.0]).unwrap().as_slice(), &[1.0, 1.0]);
        // (I - A)^-1 b = [2, 2] is a fixed point
        assert_eq!(t.apply(&[2.0, 2.0]).unwrap().as_slice(), &[2.0, 2.0]);
    }

    #[test]
    fn concave_composite_example() {
        let t = InterferenceMapping::concave_composite(
            Matrix::zeros(1),
            PositiveVector::ones(1).unwrap(),
            NonnegVector::new(vec![1.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(t.apply(&[4.0]).unwrap().as_slice(), &[3.0]);
    }

    #[test]
    fn apply_errors() {
        let t = swap_half();
        assert_eq!(
            t.apply(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                actual: 1
            })
        );
        assert!(matches!(
            t.apply(&[f64::NAN, 1.0]),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(t.apply(&[-1.0, 1.0]), Err(Error::Negative { .. })));
    }

    #[test]
    fn constructors_validate() {
        let neg = Matrix::from_rows(&[vec![0.0, -0.1], vec![0.0, 0.0]]).unwrap();
        assert!(InterferenceMapping::affine(neg, PositiveVector::ones(2).unwrap()).is_err());
        assert!(
            InterferenceMapping::affine(Matrix::zeros(3), PositiveVector::ones(2).unwrap())
                .is_err()
        );
        assert!(InterferenceMapping::concave_composite(
            Matrix::zeros(2),
            PositiveVector::ones(2).unwrap(),
            NonnegVector::zeros(3).unwrap()
        )
        .is_err());
    }

    #[test]
    fn scaling() {
        assert!(scale_mapping(swap_half(), 0.0).is_err());
        assert!(scale_mapping(swap_half(), -1.0).is_err());
        assert!(scale_mapping(swap_half(), f64::NAN).is_err());
        let s = scale_mapping(swap_half(), 2.0).unwrap();
        assert_eq!(s.apply(&[0.0, 0.0]).unwrap().as_slice(), &[2.0, 2.0]);
        let id = scale_mapping(swap_half(), 1.0).unwrap();
        for x in [[0.3, 7.0], [1e3, 1e-3], [0.0, 5.0]] {
            assert_eq!(id.eval(&x), swap_half().eval(&x));
        }
        assert!(s.is_convex() && s.is_concave());
        assert_eq!(s.family(), "scaled");
    }
}
