use std::path::{Path, PathBuf};

use ifp_core::solver::{
    concave_lower_bound, contraction_bound_constant, fit_geometric_rate, fixed_point_iterate,
    reference_fixed_point, start_epsilon, upper_bound_curve,
};
use ifp_core::spectral::contraction_modulus;
use ifp_core::Mapping as _;
use ifp_core::{
    build_asymptotic, ContractionVerdict, IterationTrace, NormChoice, Outcome, RateBound, RateFit,
};
use serde::Serialize;

use super::{compute_spectral, write_summary};
use crate::config::ExperimentConfig;
use crate::csvio::{opt_float, Table};
use crate::error::{CliError, Result};

pub const TRACE_COLUMNS: [&str; 5] = ["n", "residual", "error", "lower_bound", "upper_bound"];

/// Row `n` describes `xₙ`: `residual = ‖xₙ₊₁ − xₙ‖`, `error = ‖xₙ − x*‖`.
pub fn trace_table(
    trace: &IterationTrace,
    lower: Option<&RateBound>,
    upper: Option<&RateBound>,
) -> Table {
    let mut t = Table::new(&TRACE_COLUMNS);
    for n in 1..=trace.iterates.len() {
        t.push(vec![
            n.to_string(),
            opt_float(trace.residuals.get(n - 1).copied()),
            opt_float(trace.errors.as_ref().map(|e| e[n - 1])),
            opt_float(lower.and_then(|b| b.at(n))),
            opt_float(upper.and_then(|b| b.at(n))),
        ]);
    }
    t
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub trace: IterationTrace,
    pub reference: Option<Vec<f64>>,
    pub fit: Option<RateFit>,
    pub lower: Option<RateBound>,
    pub upper: Option<RateBound>,
    pub trace_path: PathBuf,
    pub summary_path: PathBuf,
}

impl SolveReport {
    pub fn status(&self) -> Result<()> {
        match self.trace.outcome {
            Outcome::Converged => Ok(()),
            Outcome::Diverged => Err(CliError::Diverged(format!(
                "after {} iterations, see {}",
                self.trace.iterations(),
                self.trace_path.display()
            ))),
            Outcome::MaxIterations => Err(CliError::NotConverged(format!(
                "iteration budget of {} exhausted, last residual {:e}",
                self.trace.iterations(),
                self.trace.residuals.last().copied().unwrap_or(f64::NAN)
            ))),
        }
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    outcome: &'a str,
    iterations: usize,
    norm: &'a str,
    x_star: &'a [f64],
    last_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fitted_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    modulus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_constant: Option<f64>,
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Converged => "converged",
        Outcome::Diverged => "diverged",
        Outcome::MaxIterations => "max_iterations",
    }
}

/// A rate bound with the scalar it was built from (ε or c).
type Bound = (RateBound, f64);

/// Lower bound `ρⁿ ε ‖v‖` when `x₁` is bracketed away from `x*` along the
/// Perron vector, upper bound `c^{n−1} B ‖x₁ − x*‖` for contractive convex
/// mappings.
fn bounds(
    cfg: &ExperimentConfig,
    mapping: &ifp_core::InterferenceMapping,
    norm: &NormChoice,
    x1: &[f64],
    x_star: &[f64],
    n_max: usize,
) -> (Option<Bound>, Option<Bound>, Option<f64>) {
    let mut lower = None;
    let mut rho = None;
    match compute_spectral(&cfg.spectral, &build_asymptotic(mapping), norm) {
        Ok(sr) if sr.rho < 1.0 && mapping.is_concave() => {
            rho = Some(sr.rho);
            match start_epsilon(x1, x_star, &sr.eigenvector) {
                Some(eps) => {
                    lower = concave_lower_bound(sr.rho, eps, &sr.eigenvector, norm, n_max)
                        .ok()
                        .map(|b| (b, eps))
                }
                None => log::info!("start is not bracketed away from x*; no lower bound"),
            }
        }
        Ok(sr) => rho = Some(sr.rho),
        Err(e) => log::info!("spectral radius unavailable: {e}"),
    }
    let mut upper = None;
    if mapping.is_convex() {
        match contraction_modulus(mapping, norm) {
            Ok(ContractionVerdict::Contractive { c, v }) => {
                let b = contraction_bound_constant(norm, &v);
                upper = upper_bound_curve(c, b, norm.distance(x1, x_star), n_max)
                    .ok()
                    .map(|u| (u, b));
            }
            Ok(ContractionVerdict::NotContractive { .. }) => {}
            Err(e) => log::info!("no contraction certificate: {e}"),
        }
    }
    (lower, upper, rho)
}

pub fn run_solve(cfg: &ExperimentConfig, out: &Path) -> Result<SolveReport> {
    let mapping = cfg.mapping(cfg.seed)?;
    let n = mapping.dim();
    let norm = cfg.norm(n)?;
    let x1 = cfg.start(n)?;
    let stop = cfg.stop_rule()?;
    let reference = match reference_fixed_point(&mapping) {
        Ok(x) => Some(x),
        Err(e) => {
            log::info!("no reference fixed point: {e}");
            None
        }
    };
    log::info!("solving {} mapping of dimension {n}", mapping.family());
    let trace = fixed_point_iterate(&mapping, &x1, stop, &norm, reference.as_deref())?;
    log::info!(
        "{} after {} iterations",
        outcome_name(trace.outcome),
        trace.iterations()
    );

    let (lower, upper, rho) = match &reference {
        Some(x_star) => bounds(cfg, &mapping, &norm, &x1, x_star, trace.iterates.len()),
        None => (None, None, None),
    };
    let fit = fit_geometric_rate(&trace).ok();

    let trace_path = out.join("trace.csv");
    let summary_path = out.join("summary.txt");
    trace_table(
        &trace,
        lower.as_ref().map(|b| &b.0),
        upper.as_ref().map(|b| &b.0),
    )
    .write(&trace_path)?;
    let modulus = upper.as_ref().and_then(|(b, _)| match b.kind {
        ifp_core::solver::BoundKind::Upper { c, .. } => Some(c),
        _ => None,
    });
    write_summary(
        &summary_path,
        &Summary {
            outcome: outcome_name(trace.outcome),
            iterations: trace.iterations(),
            norm: norm.name(),
            x_star: trace.last(),
            last_residual: trace.residuals.last().copied().unwrap_or(f64::NAN),
            reference: reference.as_deref(),
            fitted_rate: fit.map(|f| f.rate),
            r_squared: fit.map(|f| f.r_squared),
            rho,
            epsilon: lower.as_ref().map(|b| b.1),
            modulus,
            bound_constant: upper.as_ref().map(|b| b.1),
        },
    )?;
    Ok(SolveReport {
        trace,
        reference,
        fit,
        lower: lower.map(|b| b.0),
        upper: upper.map(|b| b.0),
        trace_path,
        summary_path,
    })
}
