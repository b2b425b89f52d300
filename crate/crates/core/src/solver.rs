//! The standard fixed-point iteration `x_{n+1} = T(x_n)` and bounds on its
//! estimation error.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mapping::{InterferenceMapping, Mapping};
use crate::norm::NormChoice;
use crate::property::{sup, PropertyReport};
use crate::vector::PositiveVector;

/// Residual growth streak and iterate size that flag divergence.
pub const DIVERGENCE_STREAK: usize = 50;
pub const DIVERGENCE_NORM: f64 = 1e12;
/// Tolerance of the reference runs that stand in for an unknown `x*`.
pub const REFERENCE_TOL: f64 = 1e-13;
pub const REFERENCE_MAX_ITER: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    tol: f64,
    max_iter: usize,
}

impl StopRule {
    /// `tol` bounds the distance between successive iterates in the norm of
    /// the run.
    pub fn new(tol: f64, max_iter: usize) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) || max_iter == 0 {
            return Err(Error::InvalidArgument(
                "stop rule needs tol > 0 and max_iter ≥ 1",
            ));
        }
        Ok(Self { tol, max_iter })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    /// Residuals grew for [`DIVERGENCE_STREAK`] steps and an iterate left the
    /// ball of radius [`DIVERGENCE_NORM`], or an iterate became non-finite.
    Diverged,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    /// `x₁ … x_n`
    pub iterates: Vec<Vec<f64>>,
    /// `‖x_{k+1} − x_k‖`, one shorter than `iterates`.
    pub residuals: Vec<f64>,
    /// `‖x_k − x*‖` for every iterate, when a reference `x*` was supplied.
    pub errors: Option<Vec<f64>>,
    pub reference: Option<Vec<f64>>,
    pub outcome: Outcome,
    pub norm: NormChoice,
}

impl IterationTrace {
    pub fn converged(&self) -> bool {
        self.outcome == Outcome::Converged
    }

    pub fn diverged(&self) -> bool {
        self.outcome == Outcome::Diverged
    }

    /// Number of applications of `T`.
    pub fn iterations(&self) -> usize {
        self.residuals.len()
    }

    pub fn last(&self) -> &[f64] {
        self.iterates.last().expect("a trace holds at least x₁")
    }
}

/// Runs `x_{k+1} = T(x_k)` from `x1` until `‖x_{k+1} − x_k‖ < tol`, the
/// iteration budget runs out, or the run diverges.
pub fn fixed_point_iterate<M: Mapping + ?Sized>(
    mapping: &M,
    x1: &[f64],
    stop: StopRule,
    norm: &NormChoice,
    x_star: Option<&[f64]>,
) -> Result<IterationTrace> {
    let n = mapping.dim();
    if x1.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: x1.len(),
        });
    }
    crate::vector::NonnegVector::new(x1.to_vec())?;
    if let Some(r) = x_star {
        if r.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: r.len(),
            });
        }
    }
    norm.check_dim(n)?;

    let mut iterates = vec![x1.to_vec()];
    let mut residuals = Vec::new();
    let mut outcome = Outcome::MaxIterations;
    let mut streak = 0;
    let mut y = vec![0.0; n];
    for _ in 0..stop.max_iter {
        let x = iterates.last().expect("nonempty");
        mapping.eval_into(x, &mut y);
        let r = norm.distance(&y, x);
        if let Some(&prev) = residuals.last() {
            streak = if r > prev { streak + 1 } else { 0 };
        }
        residuals.push(r);
        iterates.push(y.clone());
        if !r.is_finite() || y.iter().any(|v| !v.is_finite()) {
            outcome = Outcome::Diverged;
            break;
        }
        if r < stop.tol {
            outcome = Outcome::Converged;
            break;
        }
        if streak >= DIVERGENCE_STREAK && sup(&y) > DIVERGENCE_NORM {
            outcome = Outcome::Diverged;
            break;
        }
    }
    let errors = x_star.map(|r| iterates.iter().map(|x| norm.distance(x, r)).collect());
    Ok(IterationTrace {
        iterates,
        residuals,
        errors,
        reference: x_star.map(<[f64]>::to_vec),
        outcome,
        norm: norm.clone(),
    })
}

/// `x*` of an affine mapping `β(Ax + b)` by a dense linear solve.
fn affine_fixed_point(mapping: &InterferenceMapping) -> Option<Result<Vec<f64>>> {
    let mut beta = 1.0;
    let mut m = mapping;
    while let InterferenceMapping::Scaled { inner, beta: b } = m {
        beta *= b;
        m = inner;
    }
    let InterferenceMapping::Affine { matrix, offset } = m else {
        return None;
    };
    let n = matrix.dim();
    let mut system = matrix.scaled(-beta);
    for i in 0..n {
        system.set(i, i, 1.0 + system.get(i, i));
    }
    let rhs: Vec<f64> = offset.iter().map(|b| beta * b).collect();
    Some(system.solve(&rhs))
}

/// Reference fixed point for error curves: a linear solve for (scaled) affine
/// mappings, otherwise the iteration from `0` run to [`REFERENCE_TOL`] in the
/// sup norm.
pub fn reference_fixed_point(mapping: &InterferenceMapping) -> Result<Vec<f64>> {
    if let Some(x) = affine_fixed_point(mapping) {
        let x = x?;
        if x.iter().all(|&v| v > 0.0 && v.is_finite()) {
            return Ok(x);
        }
        return Err(Error::Precondition(
            "affine mapping has no nonnegative fixed point",
        ));
    }
    let n = mapping.dim();
    let stop = StopRule::new(REFERENCE_TOL, REFERENCE_MAX_ITER)?;
    let trace = fixed_point_iterate(mapping, &vec![0.0; n], stop, &NormChoice::Sup, None)?;
    match trace.outcome {
        Outcome::Converged => Ok(trace.last().to_vec()),
        _ => Err(Error::Precondition("reference iteration did not converge")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundKind {
    /// `c^{n−1} B ‖x₁ − x*‖`
    Upper { c: f64, b: f64 },
    /// `ρⁿ ε ‖v‖`
    Lower { rho: f64, epsilon: f64, v_norm: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateBound {
    pub kind: BoundKind,
    /// `values[k]` is the bound at iteration `n = k + 1`.
    pub values: Vec<f64>,
}

impl RateBound {
    pub fn at(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|k| self.values.get(k).copied())
    }
}

/// Geometric upper bound `c^{n−1} B dist0` for `n = 1..=n_max`.
pub fn upper_bound_curve(c: f64, b: f64, dist0: f64, n_max: usize) -> Result<RateBound> {
    if !(0.0..1.0).contains(&c) {
        return Err(Error::InvalidArgument(
            "modulus of contraction must lie in [0, 1[",
        ));
    }
    if !(b > 0.0 && b.is_finite()) || !(dist0 >= 0.0 && dist0.is_finite()) {
        return Err(Error::InvalidArgument(
            "B must be > 0 and the initial distance ≥ 0",
        ));
    }
    let values = (0..n_max)
        .map(|k| libm::pow(c, k as f64) * b * dist0)
        .collect();
    Ok(RateBound {
        kind: BoundKind::Upper { c, b },
        values,
    })
}

/// Norm-equivalence constant `B` that turns contraction along `v` into the
/// geometric bound `‖xₙ − x*‖ ≤ c^{n−1} B ‖x₁ − x*‖`.
///
/// With `‖x‖ᵥ = maxᵢ |xᵢ| / vᵢ` we have `‖x‖ ≤ ‖v‖ ‖x‖ᵥ` for any monotone norm
/// and `‖x‖ᵥ ≤ κ ‖x‖`, so `B = ‖v‖ κ`. This is exactly `1` in the `v`-weighted
/// sup norm and `max vᵢ / min vᵢ` in the sup norm. Sufficient, not tight.
pub fn contraction_bound_constant(norm: &NormChoice, v: &PositiveVector) -> f64 {
    let kappa = match norm {
        NormChoice::WeightedSup(w) => w
            .iter()
            .zip(v.iter())
            .map(|(w, v)| w / v)
            .fold(0.0, f64::max),
        _ => 1.0 / v.iter().fold(f64::INFINITY, |m: f64, &e| m.min(e)),
    };
    norm.norm(v) * kappa
}

/// Largest `ε` with `x* − εv ≥ 0`, i.e. `min_{vᵢ > 0} x*ᵢ / vᵢ`.
pub fn max_epsilon(x_star: &PositiveVector, v: &[f64]) -> Result<f64> {
    if v.len() != x_star.dim() {
        return Err(Error::DimensionMismatch {
            expected: x_star.dim(),
            actual: v.len(),
        });
    }
    crate::vector::NonnegVector::new(v.to_vec())?;
    x_star
        .iter()
        .zip(v)
        .filter(|(_, &vi)| vi > 0.0)
        .map(|(x, vi)| x / vi)
        .reduce(f64::min)
        .ok_or(Error::InvalidArgument("direction v must be nonzero"))
}

/// Largest `ε` with `x₁ ≤ x* − εv` or `x₁ ≥ x* + εv`, the starts for which
/// the concave lower bound applies. `None` when `x₁` is not bracketed away
/// from `x*` along `v`. For `x₁ = 0` this is [`max_epsilon`].
pub fn start_epsilon(x1: &[f64], x_star: &[f64], v: &[f64]) -> Option<f64> {
    if x1.len() != x_star.len() || v.len() != x_star.len() || v.iter().all(|&e| e <= 0.0) {
        return None;
    }
    let side = |sign: f64| {
        let mut eps = f64::INFINITY;
        for ((&a, &b), &d) in x1.iter().zip(x_star).zip(v) {
            let gap = sign * (b - a);
            if d > 0.0 {
                eps = eps.min(gap / d);
            } else if gap < 0.0 {
                return None;
            }
        }
        Some(eps).filter(|&e| e > 0.0 && e.is_finite())
    };
    side(1.0).or_else(|| side(-1.0))
}

/// Lower bound `ρⁿ ε ‖v‖` on `‖Tⁿ(x₁) − x*‖` for concave mappings, for
/// `n = 1..=n_max`.
pub fn concave_lower_bound(
    rho: f64,
    epsilon: f64,
    v: &[f64],
    norm: &NormChoice,
    n_max: usize,
) -> Result<RateBound> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidArgument("spectral radius must lie in [0, 1["));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument("epsilon must be finite and > 0"));
    }
    norm.check_dim(v.len())?;
    let v_norm = norm.norm(v);
    let values = (1..=n_max)
        .map(|n| libm::pow(rho, n as f64) * epsilon * v_norm)
        .collect();
    Ok(RateBound {
        kind: BoundKind::Lower {
            rho,
            epsilon,
            v_norm,
        },
        values,
    })
}

/// Checks the two-sided sandwich of a concave mapping around its fixed point
/// for `n = 0..=n_max`:
///
/// * `Tⁿ(x* + εv) ≥ x* + ρⁿ εv`
/// * `Tⁿ(x* − εv) ≤ x* − ρⁿ εv`, which needs `x* ≥ εv`
///
/// with slack `1e-9 · (1 + ‖x*‖∞)`.
pub fn verify_sandwich(
    mapping: &InterferenceMapping,
    x_star: &PositiveVector,
    v: &[f64],
    rho: f64,
    epsilon: f64,
    n_max: usize,
) -> Result<PropertyReport> {
    if !mapping.is_concave() {
        return Err(Error::RequiresConcave);
    }
    let n = mapping.dim();
    if x_star.dim() != n || v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: if x_star.dim() != n {
                x_star.dim()
            } else {
                v.len()
            },
        });
    }
    crate::vector::NonnegVector::new(v.to_vec())?;
    if !(epsilon > 0.0) || !(rho >= 0.0) {
        return Err(Error::InvalidArgument("epsilon must be > 0 and rho ≥ 0"));
    }
    let slack_scale = 1e-9 * (1.0 + sup(x_star));
    let mut lower: Vec<f64> = x_star.iter().zip(v).map(|(x, d)| x - epsilon * d).collect();
    if lower.iter().any(|&e| e < -slack_scale) {
        return Err(Error::Precondition(
            "x* ≥ εv is required for the lower sandwich",
        ));
    }
    lower.iter_mut().for_each(|e| *e = e.max(0.0));
    let mut upper: Vec<f64> = x_star.iter().zip(v).map(|(x, d)| x + epsilon * d).collect();

    let mut report = PropertyReport::new("sandwich");
    let mut buf = vec![0.0; n];
    let mut rho_n = 1.0;
    for step in 0..=n_max {
        let above: Vec<f64> = x_star
            .iter()
            .zip(v)
            .map(|(x, d)| x + rho_n * epsilon * d)
            .collect();
        let below: Vec<f64> = x_star
            .iter()
            .zip(v)
            .map(|(x, d)| x - rho_n * epsilon * d)
            .collect();
        let tag = || vec![vec![step as f64]];
        report.check_le(&above, &upper, slack_scale, tag);
        report.check_le(&lower, &below, slack_scale, tag);
        report.samples_tested += 1;
        mapping.eval_into(&upper, &mut buf);
        core::mem::swap(&mut upper, &mut buf);
        mapping.eval_into(&lower, &mut buf);
        core::mem::swap(&mut lower, &mut buf);
        rho_n *= rho;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// `exp(slope)` of the least-squares line through `(n, ln errorₙ)`.
    pub rate: f64,
    pub r_squared: f64,
    /// Number of points used in the fit.
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 5;

/// Fits a geometric rate to the error curve of a trace. Only the leading run of
/// errors above the rounding floor `1e-12 · (1 + ‖x*‖)` is used, and of that
/// run only the tail half, where the dominant mode has taken over.
pub fn fit_geometric_rate(trace: &IterationTrace) -> Result<RateFit> {
    let (Some(errors), Some(reference)) = (&trace.errors, &trace.reference) else {
        return Err(Error::InsufficientData {
            usable: 0,
            required: MIN_FIT_POINTS,
        });
    };
    let floor = 1e-12 * (1.0 + trace.norm.norm(reference));
    let usable = errors.iter().take_while(|&&e| e > floor).count();
    if usable < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            usable,
            required: MIN_FIT_POINTS,
        });
    }
    let start = usable / 2;
    let points: Vec<(f64, f64)> = (start..usable)
        .map(|k| (k as f64, libm::log(errors[k])))
        .collect();
    let (slope, r_squared) = least_squares(&points);
    Ok(RateFit {
        rate: libm::exp(slope),
        r_squared,
        points: points.len(),
    })
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    (slope, r_squared)
}
