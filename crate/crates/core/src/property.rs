//! Sampled verifiers for monotonicity, scalability and contractivity.
//!
//! None of these prove anything; they search for counterexamples over a
//! seeded sample and report every one they find.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mapping::Mapping;
use crate::sampling::PointSampler;

/// Upper bound on how many violations a report keeps in full.
pub const MAX_RECORDED_VIOLATIONS: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// The input point(s) of the failing sample, e.g. `[x, y]` for a pair.
    pub inputs: Vec<Vec<f64>>,
    /// Coordinate where the inequality failed.
    pub coordinate: usize,
    /// Left- and right-hand side of the failed inequality `lhs ≤ rhs`.
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub property: String,
    pub samples_tested: usize,
    /// First [`MAX_RECORDED_VIOLATIONS`] violations.
    pub violations: Vec<Violation>,
    /// Total number of violating samples, including unrecorded ones.
    pub violation_count: usize,
}

impl PropertyReport {
    pub fn new(property: &str) -> Self {
        Self {
            property: property.to_string(),
            samples_tested: 0,
            violations: Vec::new(),
            violation_count: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn record(&mut self, violation: Violation) {
        self.violation_count += 1;
        if self.violations.len() < MAX_RECORDED_VIOLATIONS {
            self.violations.push(violation);
        }
    }

    /// Checks `lhs[i] ≤ rhs[i] + slack` for every coordinate and records the
    /// first failing coordinate, if any. Returns whether the sample passed.
    pub(crate) fn check_le(
        &mut self,
        lhs: &[f64],
        rhs: &[f64],
        slack: f64,
        inputs: impl FnOnce() -> Vec<Vec<f64>>,
    ) -> bool {
        let failing = lhs.iter().zip(rhs).position(|(l, r)| !(*l <= *r + slack));
        if let Some(i) = failing {
            self.record(Violation {
                inputs: inputs(),
                coordinate: i,
                lhs: lhs[i],
                rhs: rhs[i],
            });
            return false;
        }
        true
    }

    /// Folds another report's samples and violations into this one.
    pub fn merge(&mut self, other: PropertyReport) {
        self.samples_tested += other.samples_tested;
        self.violation_count += other.violation_count;
        for v in other.violations {
            if self.violations.len() < MAX_RECORDED_VIOLATIONS {
                self.violations.push(v);
            }
        }
    }
}

pub(crate) fn sup(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
}

fn require_samples(n_samples: usize) -> Result<()> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1"));
    }
    Ok(())
}

/// Samples pairs `x ≥ y` and checks `T(x) ≥ T(y)` coordinate-wise, allowing
/// a rounding slack of `1e-12 · (1 + |T(x)ᵢ|)`.
pub fn check_monotonicity<M: Mapping + ?Sized>(
    mapping: &M,
    n_samples: usize,
    seed: u64,
) -> Result<PropertyReport> {
    require_samples(n_samples)?;
    let n = mapping.dim();
    let mut sampler = PointSampler::new(n, seed);
    let mut report = PropertyReport::new("monotonicity");
    let (mut tx, mut ty) = (vec![0.0; n], vec![0.0; n]);
    for _ in 0..n_samples {
        let y = sampler.next_point();
        let d = sampler.next_direction();
        let x: Vec<f64> = y.iter().zip(&d).map(|(a, b)| a + b).collect();
        mapping.eval_into(&x, &mut tx);
        mapping.eval_into(&y, &mut ty);
        let slack = 1e-12 * (1.0 + sup(&tx));
        report.check_le(&ty, &tx, slack, || vec![x.clone(), y.clone()]);
        report.samples_tested += 1;
    }
    Ok(report)
}

/// Samples `x` and `α ∈ ]1, 10]` and checks `α T(x) > T(αx)` strictly, with
/// no slack: a floating-point tie counts as a violation.
pub fn check_scalability<M: Mapping + ?Sized>(
    mapping: &M,
    n_samples: usize,
    seed: u64,
) -> Result<PropertyReport> {
    require_samples(n_samples)?;
    let n = mapping.dim();
    let mut sampler = PointSampler::new(n, seed);
    let mut report = PropertyReport::new("scalability");
    let (mut tx, mut tax) = (vec![0.0; n], vec![0.0; n]);
    for _ in 0..n_samples {
        let x = sampler.next_point();
        let alpha = sampler.uniform_open_closed(1.0, 10.0);
        let ax: Vec<f64> = x.iter().map(|v| alpha * v).collect();
        mapping.eval_into(&x, &mut tx);
        mapping.eval_into(&ax, &mut tax);
        if let Some(i) = (0..n).find(|&i| !(alpha * tx[i] > tax[i])) {
            report.record(Violation {
                inputs: vec![x.clone(), vec![alpha]],
                coordinate: i,
                lhs: tax[i],
                rhs: alpha * tx[i],
            });
        }
        report.samples_tested += 1;
    }
    Ok(report)
}

/// Samples `x` and `ε ∈ ]0, 100]` and checks `T(x + εv) ≤ T(x) + cεv`
/// coordinate-wise within `1e-10 · (1 + ‖T(x)‖∞)`.
pub fn check_contractivity<M: Mapping + ?Sized>(
    mapping: &M,
    v: &[f64],
    c: f64,
    n_samples: usize,
    seed: u64,
) -> Result<PropertyReport> {
    require_samples(n_samples)?;
    let n = mapping.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: v.len(),
        });
    }
    if v.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidArgument(
            "contraction direction v must be strictly positive",
        ));
    }
    if !(0.0..1.0).contains(&c) {
        return Err(Error::InvalidArgument(
            "modulus of contraction must lie in [0, 1[",
        ));
    }
    let mut sampler = PointSampler::new(n, seed);
    let mut report = PropertyReport::new("contractivity");
    let (mut tx, mut txe) = (vec![0.0; n], vec![0.0; n]);
    for _ in 0..n_samples {
        let x = sampler.next_point();
        let eps = sampler.uniform_open_closed(0.0, 100.0);
        let xe: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + eps * b).collect();
        mapping.eval_into(&x, &mut tx);
        mapping.eval_into(&xe, &mut txe);
        let bound: Vec<f64> = tx.iter().zip(v).map(|(t, b)| t + c * eps * b).collect();
        let slack = 1e-10 * (1.0 + sup(&tx));
        report.check_le(&txe, &bound, slack, || vec![x.clone(), vec![eps]]);
        report.samples_tested += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::{scale_mapping, InterferenceMapping};
    use crate::matrix::Matrix;
    use crate::vector::{NonnegVector, PositiveVector};

    fn circulant() -> Matrix {
        Matrix::from_rows(&[vec![0.2, 0.5], vec![0.5, 0.2]]).unwrap()
    }

    fn affine() -> InterferenceMapping {
        InterferenceMapping::affine(circulant(), PositiveVector::ones(2).unwrap()).unwrap()
    }

    fn concave() -> InterferenceMapping {
        InterferenceMapping::concave_composite(
            circulant(),
            PositiveVector::ones(2).unwrap(),
            NonnegVector::new(vec![1.0, 1.0]).unwrap(),
        )
        .unwrap()
    }

    /// Affine map with a negative coupling entry; not an interference mapping.
    struct Signed;

    impl Mapping for Signed {
        fn dim(&self) -> usize {
            2
        }
        fn eval_into(&self, x: &[f64], out: &mut [f64]) {
            out[0] = 1e4 + 0.5 * x[0] - 0.5 * x[1];
            out[1] = 1e4 + 0.5 * x[0];
        }
    }

    #[test]
    fn monotonicity() {
        assert!(check_monotonicity(&affine(), 100, 1).unwrap().passed());
        assert!(check_monotonicity(&concave(), 100, 2).unwrap().passed());
        let r = check_monotonicity(&Signed, 100, 3).unwrap();
        assert!(!r.passed());
        // the reported pair is a genuine counterexample
        let v = &r.violations[0];
        let (x, y) = (&v.inputs[0], &v.inputs[1]);
        assert!(x.iter().zip(y.iter()).all(|(a, b)| a >= b));
        assert!(Signed.eval(x)[v.coordinate] < Signed.eval(y)[v.coordinate]);
        assert!(check_monotonicity(&affine(), 0, 1).is_err());
    }

    #[test]
    fn scalability() {
        assert!(check_scalability(&affine(), 100, 4).unwrap().passed());
        assert!(check_scalability(&concave(), 100, 5).unwrap().passed());
        let scaled = scale_mapping(affine(), 3.0).unwrap();
        assert!(check_scalability(&scaled, 100, 6).unwrap().passed());
    }

    #[test]
    fn scalability_rejects_linear_map() {
        // A x with no offset is homogeneous: α T(x) = T(αx) exactly on most
        // samples, and a tie is a violation.
        struct Linear;
        impl Mapping for Linear {
            fn dim(&self) -> usize {
                1
            }
            fn eval_into(&self, x: &[f64], out: &mut [f64]) {
                out[0] = 0.5 * x[0];
            }
        }
        assert!(!check_scalability(&Linear, 50, 7).unwrap().passed());
    }

    #[test]
    fn contractivity() {
        let v = [1.0, 1.0];
        // A v = 0.7 v
        assert!(check_contractivity(&affine(), &v, 0.7, 200, 8)
            .unwrap()
            .passed());
        assert!(!check_contractivity(&affine(), &v, 0.69, 200, 8)
            .unwrap()
            .passed());
        // at x = 0, ε = 1 the square-root increment alone is 1 > 0
        let r = check_contractivity(&concave(), &v, 0.7, 200, 9).unwrap();
        assert!(!r.passed());
        assert!(r.violation_count >= 1);
    }

    #[test]
    fn contractivity_argument_checks() {
        assert!(check_contractivity(&affine(), &[1.0], 0.5, 10, 0).is_err());
        assert!(check_contractivity(&affine(), &[1.0, 0.0], 0.5, 10, 0).is_err());
        assert!(check_contractivity(&affine(), &[1.0, 1.0], 1.0, 10, 0).is_err());
        assert!(check_contractivity(&affine(), &[1.0, 1.0], -0.1, 10, 0).is_err());
    }

    #[test]
    fn merge_keeps_counts() {
        let mut a = check_monotonicity(&Signed, 40, 3).unwrap();
        let b = check_monotonicity(&Signed, 40, 4).unwrap();
        let total = a.violation_count + b.violation_count;
        a.merge(b);
        assert_eq!(a.samples_tested, 80);
        assert_eq!(a.violation_count, total);
        assert!(a.violations.len() <= MAX_RECORDED_VIOLATIONS);
    }
}
