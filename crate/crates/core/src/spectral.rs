//! Spectral radius `ρ(T∞)` of monotone, positively homogeneous mappings.
//!
//! Two estimators are provided:
//!
//! * [`krause_iteration`]: the normalized power iteration
//!   `x ← T∞(x) / ‖T∞(x)‖`. Converges to the eigenpair attaining `ρ` when
//!   `T∞` is concave and primitive; cycles on periodic maps.
//! * [`epsilon_power_method`]: for `T_ε(x) = T∞(x) + ε·1` and each radius `p`
//!   of a schedule, iterates `x ← p T_ε(x) / ‖T_ε(x)‖` to its fixed point
//!   `x_p` on the sphere of radius `p`. Every estimate `‖T_ε(x_p)‖ / p` is an
//!   upper bound on `ρ(T∞)`, and the estimates tend to `ρ(T∞)` as `p → ∞`.
//!   Needs only monotonicity and continuity.
//!
//! [`spectral_radius`] tries the first and falls back to the second.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::asymptotic::{build_asymptotic, AsymptoticMapping};
use crate::error::{Error, Result};
use crate::mapping::{InterferenceMapping, Mapping};
use crate::norm::NormChoice;
use crate::property::PropertyReport;
use crate::vector::PositiveVector;

pub const KRAUSE_TOL: f64 = 1e-13;
pub const KRAUSE_MAX_ITER: usize = 100_000;
pub const EPSILON_TOL: f64 = 1e-13;
pub const EPSILON_MAX_ITER: usize = 1_000_000;
/// Consecutive period-2 observations before the Krause iteration gives up.
const OSCILLATION_STREAK: usize = 5;
/// Minimum `min vᵢ / max vᵢ` for an eigenvector to count as strictly positive.
pub const POSITIVITY_RATIO: f64 = 1e-9;

/// `p ∈ {10², 10³, 10⁴, 10⁵}`
pub const DEFAULT_P_SCHEDULE: [f64; 4] = [1e2, 1e3, 1e4, 1e5];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralMethod {
    Krause,
    Epsilon,
}

impl SpectralMethod {
    pub fn name(self) -> &'static str {
        match self {
            SpectralMethod::Krause => "krause",
            SpectralMethod::Epsilon => "epsilon",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub rho: f64,
    /// Unit vector in the norm the method ran with.
    pub eigenvector: Vec<f64>,
    pub iterations: usize,
    /// `‖T∞(v) − ρ v‖`
    pub residual: f64,
    pub method: SpectralMethod,
    /// Set when `rho` is a guaranteed upper bound on `ρ(T∞)`.
    pub upper_bound_certified: bool,
    /// `(p, ‖T_ε(x_p)‖ / p)` for every radius of the ε-method; empty for Krause.
    pub estimates: Vec<(f64, f64)>,
}

impl SpectralResult {
    /// Flat `key=value` fields, in a fixed order, for embedding in text or CSV
    /// output. Floats use 17 significant digits.
    pub fn key_values(&self) -> Vec<(&'static str, String)> {
        let vector: Vec<String> = self
            .eigenvector
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect();
        vec![
            ("method", String::from(self.method.name())),
            ("rho", format!("{:.16e}", self.rho)),
            ("residual", format!("{:.16e}", self.residual)),
            ("iterations", format!("{}", self.iterations)),
            (
                "upper_bound_certified",
                format!("{}", self.upper_bound_certified),
            ),
            ("eigenvector", vector.join(";")),
        ]
    }
}

fn check_start(am: &AsymptoticMapping, x1: &[f64]) -> Result<()> {
    if x1.len() != am.dim() {
        return Err(Error::DimensionMismatch {
            expected: am.dim(),
            actual: x1.len(),
        });
    }
    crate::vector::NonnegVector::new(x1.to_vec())?;
    if x1.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidArgument("start vector must be nonzero"));
    }
    Ok(())
}

fn check_iteration_args(tol: f64, max_iter: usize) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) || max_iter == 0 {
        return Err(Error::InvalidArgument(
            "tolerance must be > 0 and max_iter ≥ 1",
        ));
    }
    Ok(())
}

fn residual(am: &AsymptoticMapping, v: &[f64], rho: f64, norm: &NormChoice) -> Result<f64> {
    let mut tv = vec![0.0; v.len()];
    am.eval_into(v, &mut tv)?;
    tv.iter_mut().zip(v).for_each(|(t, x)| *t -= rho * x);
    Ok(norm.norm(&tv))
}

/// Normalized power iteration from `x1`. Stops once `‖x_{n+1} − x_n‖ < tol`
/// and returns `ρ = ‖T∞(x*)‖` with eigenvector `x*`.
///
/// Fails with [`Error::KrauseNotConverged`] after `max_iter` steps, or early
/// when the iterates alternate: `‖x_{n+2} − x_n‖ < tol` while
/// `‖x_{n+1} − x_n‖ ≥ 10 tol` for five consecutive steps.
pub fn krause_iteration(
    am: &AsymptoticMapping,
    x1: &[f64],
    norm: &NormChoice,
    tol: f64,
    max_iter: usize,
) -> Result<SpectralResult> {
    check_start(am, x1)?;
    check_iteration_args(tol, max_iter)?;
    norm.check_dim(am.dim())?;
    let n = am.dim();
    let start_norm = norm.norm(x1);
    let mut x: Vec<f64> = x1.iter().map(|v| v / start_norm).collect();
    let mut prev: Option<Vec<f64>> = None;
    let mut y = vec![0.0; n];
    let mut streak = 0;
    for iteration in 1..=max_iter {
        am.eval_into(&x, &mut y)?;
        let s = norm.norm(&y);
        if s == 0.0 {
            // T∞ vanishes at a strictly positive point only if it vanishes on
            // all of R₊ᴺ (monotone and homogeneous), so ρ = 0
            if x.iter().all(|&v| v > 0.0) {
                return Ok(SpectralResult {
                    rho: 0.0,
                    eigenvector: x,
                    iterations: iteration,
                    residual: 0.0,
                    method: SpectralMethod::Krause,
                    upper_bound_certified: false,
                    estimates: Vec::new(),
                });
            }
            return Err(Error::ZeroImage);
        }
        y.iter_mut().for_each(|v| *v /= s);
        let step = norm.distance(&y, &x);
        if let Some(p) = &prev {
            if norm.distance(&y, p) < tol && step >= 10.0 * tol {
                streak += 1;
                if streak >= OSCILLATION_STREAK {
                    return Err(Error::KrauseNotConverged {
                        iterations: iteration,
                        oscillating: true,
                    });
                }
            } else {
                streak = 0;
            }
        }
        prev = Some(core::mem::replace(&mut x, y.clone()));
        if step < tol {
            am.eval_into(&x, &mut y)?;
            let rho = norm.norm(&y);
            return Ok(SpectralResult {
                rho,
                residual: residual(am, &x, rho, norm)?,
                eigenvector: x,
                iterations: iteration,
                method: SpectralMethod::Krause,
                upper_bound_certified: false,
                estimates: Vec::new(),
            });
        }
    }
    Err(Error::KrauseNotConverged {
        iterations: max_iter,
        oscillating: false,
    })
}

/// `1e-3 · (1 + ‖T∞(1)‖∞)`
pub fn default_epsilon(am: &AsymptoticMapping) -> Result<f64> {
    let ones = vec![1.0; am.dim()];
    let mut y = vec![0.0; am.dim()];
    am.eval_into(&ones, &mut y)?;
    Ok(1e-3 * (1.0 + NormChoice::Sup.norm(&y)))
}

/// ε-perturbed power method over an increasing schedule of radii.
///
/// For each `p` the iteration `x ← p T_ε(x) / ‖T_ε(x)‖` runs until
/// `‖x_{n+1} − x_n‖ < tol · p`, warm-started from the previous radius. The
/// returned `rho` is the estimate for the largest `p`, flagged as a certified
/// upper bound; the eigenvector is `x_p / p` for that radius.
pub fn epsilon_power_method(
    am: &AsymptoticMapping,
    epsilon: f64,
    p_schedule: &[f64],
    norm: &NormChoice,
    tol: f64,
    max_iter: usize,
) -> Result<SpectralResult> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument("epsilon must be finite and > 0"));
    }
    if p_schedule.is_empty() {
        return Err(Error::InvalidArgument("p schedule must not be empty"));
    }
    if !p_schedule.iter().all(|&p| p > 0.0 && p.is_finite())
        || p_schedule.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidArgument(
            "p schedule must be positive and strictly increasing",
        ));
    }
    check_iteration_args(tol, max_iter)?;
    let n = am.dim();
    norm.check_dim(n)?;

    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    let mut iterations = 0;
    let mut estimates = Vec::with_capacity(p_schedule.len());
    for &p in p_schedule {
        let r = norm.norm(&x);
        x.iter_mut().for_each(|v| *v *= p / r);
        let mut converged = false;
        for _ in 0..max_iter {
            iterations += 1;
            am.eval_into(&x, &mut y)?;
            y.iter_mut().for_each(|v| *v += epsilon);
            let s = norm.norm(&y);
            y.iter_mut().for_each(|v| *v *= p / s);
            let step = norm.distance(&y, &x);
            core::mem::swap(&mut x, &mut y);
            if step < tol * p {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::EpsilonNotConverged { p, iterations });
        }
        am.eval_into(&x, &mut y)?;
        y.iter_mut().for_each(|v| *v += epsilon);
        estimates.push((p, norm.norm(&y) / p));
    }

    let rho = estimates.last().expect("schedule is nonempty").1;
    let radius = norm.norm(&x);
    let eigenvector: Vec<f64> = x.iter().map(|v| v / radius).collect();
    Ok(SpectralResult {
        rho,
        residual: residual(am, &eigenvector, rho, norm)?,
        eigenvector,
        iterations,
        method: SpectralMethod::Epsilon,
        upper_bound_certified: true,
        estimates,
    })
}

/// Krause iteration from the all-ones vector, falling back to the ε-method
/// with default parameters when it does not converge.
pub fn spectral_radius(am: &AsymptoticMapping, norm: &NormChoice) -> Result<SpectralResult> {
    let ones = vec![1.0; am.dim()];
    spectral_radius_from(am, &ones, norm)
}

/// [`spectral_radius`] with an explicit Krause start vector.
pub fn spectral_radius_from(
    am: &AsymptoticMapping,
    x1: &[f64],
    norm: &NormChoice,
) -> Result<SpectralResult> {
    match krause_iteration(am, x1, norm, KRAUSE_TOL, KRAUSE_MAX_ITER) {
        Ok(r) => Ok(r),
        Err(Error::KrauseNotConverged { .. } | Error::ZeroImage) => epsilon_power_method(
            am,
            default_epsilon(am)?,
            &DEFAULT_P_SCHEDULE,
            norm,
            EPSILON_TOL,
            EPSILON_MAX_ITER,
        ),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceVerdict {
    pub exists: bool,
    pub rho: f64,
    pub method: SpectralMethod,
}

/// A standard interference mapping has a fixed point iff `ρ(T∞) < 1`.
pub fn fixed_point_exists(
    mapping: &InterferenceMapping,
    norm: &NormChoice,
) -> Result<ExistenceVerdict> {
    let r = spectral_radius(&build_asymptotic(mapping), norm)?;
    Ok(ExistenceVerdict {
        exists: r.rho < 1.0,
        rho: r.rho,
        method: r.method,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContractionVerdict {
    /// `T` is `c`-contractive along `v`, with `c = ρ(T∞)`.
    Contractive { c: f64, v: PositiveVector },
    /// `ρ(T∞) ≥ 1`: no modulus of contraction exists.
    NotContractive { rho: f64 },
}

impl ContractionVerdict {
    pub fn is_contractive(&self) -> bool {
        matches!(self, ContractionVerdict::Contractive { .. })
    }
}

/// Modulus of contraction of a convex monotone mapping from the Perron pair of
/// its asymptotic mapping. The eigenvector must be strictly positive
/// (`min vᵢ > 1e-9 · max vᵢ`); otherwise no modulus is claimed.
pub fn contraction_modulus(
    mapping: &InterferenceMapping,
    norm: &NormChoice,
) -> Result<ContractionVerdict> {
    if !mapping.is_convex() {
        return Err(Error::RequiresConvex);
    }
    let r = spectral_radius(&build_asymptotic(mapping), norm)?;
    if r.rho >= 1.0 {
        return Ok(ContractionVerdict::NotContractive { rho: r.rho });
    }
    let max = r.eigenvector.iter().fold(0.0, |m: f64, &v| m.max(v));
    let min = r
        .eigenvector
        .iter()
        .fold(f64::INFINITY, |m: f64, &v| m.min(v));
    if !(max > 0.0) || min <= POSITIVITY_RATIO * max {
        return Err(Error::EigenvectorNotPositive {
            min_ratio: if max > 0.0 { min / max } else { 0.0 },
        });
    }
    Ok(ContractionVerdict::Contractive {
        c: r.rho,
        v: PositiveVector::new(r.eigenvector)?,
    })
}

/// Given a contraction certificate `(v, c)`, checks `ρ(T∞) ≤ c + 1e-9`.
/// A failure on a valid certificate means the spectral computation is wrong.
pub fn verify_rho_lower_bounds_modulus(
    mapping: &InterferenceMapping,
    v: &PositiveVector,
    c: f64,
    norm: &NormChoice,
) -> Result<PropertyReport> {
    if !mapping.is_convex() {
        return Err(Error::RequiresConvex);
    }
    if v.dim() != mapping.dim() {
        return Err(Error::DimensionMismatch {
            expected: mapping.dim(),
            actual: v.dim(),
        });
    }
    let r = spectral_radius(&build_asymptotic(mapping), norm)?;
    let mut report = PropertyReport::new("rho_le_modulus");
    report.check_le(&[r.rho], &[c], 1e-9, || vec![v.to_vec(), vec![c]]);
    report.samples_tested = 1;
    Ok(report)
}
