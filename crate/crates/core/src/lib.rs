//! Fixed-point iteration toolkit for standard and contractive interference
//! mappings.
//!
//! The crate covers four layers:
//!
//! * [`mapping`]: the closed family of interference mappings `T: R₊ᴺ → R₊₊ᴺ`
//!   (affine, concave composite, load coupling, scaled) and sampled checkers
//!   for monotonicity, scalability and contractivity ([`property`]).
//! * [`asymptotic`]: the asymptotic mapping `T∞(x) = lim (1/t) T(tx)`, built
//!   analytically where possible and by a numeric scaling limit otherwise.
//! * [`spectral`]: spectral radius and eigenvector of `T∞` through the
//!   normalized (Krause) power iteration and the ε-perturbed estimator, plus
//!   existence and contraction verdicts derived from them.
//! * [`solver`]: the plain iteration `x_{n+1} = T(x_n)`, its traces, geometric
//!   upper bounds and the concave lower bound `ρⁿ ε ‖v‖`.
//!
//! [`load`] applies all of it to resource-block load coupling in cellular
//! networks.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `!(a <= b)` is how NaN is rejected throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod asymptotic;
pub mod error;
pub mod load;
pub mod mapping;
pub mod matrix;
pub mod norm;
pub mod property;
mod sampling;
pub mod solver;
pub mod spectral;
pub mod vector;

pub use asymptotic::{build_asymptotic, AsymptoticMapping, NumericLimit};
pub use error::{Error, Result};
pub use load::{NetworkSnapshot, SnapshotConfig, Station, User};
pub use mapping::{scale_mapping, InterferenceMapping, Mapping};
pub use matrix::Matrix;
pub use norm::NormChoice;
pub use property::{PropertyReport, Violation};
pub use solver::{IterationTrace, Outcome, RateBound, RateFit, StopRule};
pub use spectral::{ContractionVerdict, SpectralMethod, SpectralResult};
pub use vector::{NonnegVector, PositiveVector};
