//! Error curves of the load iteration for several traffic levels, with the
//! concave lower bound `ρⁿ ε ‖v‖₂`.

use std::path::{Path, PathBuf};
use std::thread;

use ifp_core::load::{calibrate_beta, load_spectral_radius};
use ifp_core::solver::{
    concave_lower_bound, fixed_point_iterate, max_epsilon, reference_fixed_point,
};
use ifp_core::Mapping as _;
use ifp_core::{
    build_asymptotic, scale_mapping, InterferenceMapping, NetworkSnapshot, NormChoice,
    PositiveVector,
};
use serde::Serialize;

use super::{compute_spectral, write_summary};
use crate::config::ExperimentConfig;
use crate::csvio::{float, opt_float, Table};
use crate::documents::{write_snapshot, write_text};
use crate::error::{CliError, Result};

/// Error level at which iteration counts are compared.
pub const FIG1_ERROR_TARGET: f64 = 1e-6;
pub const DEFAULT_HIGH_TARGET: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Leg {
    pub target_rho: f64,
    pub beta: f64,
    /// Spectral radius recomputed on the scaled mapping.
    pub rho: f64,
    pub epsilon: f64,
    pub x_star: Vec<f64>,
    pub eigenvector: Vec<f64>,
    /// `‖xₙ − x*‖₂` for `n = 1, 2, …`
    pub errors: Vec<f64>,
    /// `ρⁿ ε ‖v‖₂`, left out where the error has reached the rounding floor.
    pub lower_bounds: Vec<Option<f64>>,
    /// Iterations until the error first drops to [`FIG1_ERROR_TARGET`].
    pub iterations_to_target: Option<usize>,
    pub path: PathBuf,
}

impl Fig1Leg {
    /// Rows whose lower bound exceeds the error.
    pub fn bound_violations(&self) -> Vec<usize> {
        self.errors
            .iter()
            .zip(&self.lower_bounds)
            .enumerate()
            .filter(|(_, (e, b))| b.is_some_and(|b| b > **e))
            .map(|(k, _)| k + 1)
            .collect()
    }

    fn table(&self) -> Table {
        let mut t = Table::new(&["n", "error_l2", "lower_bound"]);
        for (k, (e, b)) in self.errors.iter().zip(&self.lower_bounds).enumerate() {
            t.push(vec![(k + 1).to_string(), float(*e), opt_float(*b)]);
        }
        t
    }
}

#[derive(Debug, Clone)]
pub struct Fig1Report {
    pub base_rho: f64,
    pub legs: Vec<Fig1Leg>,
    /// Iterations of the last leg over those of the first.
    pub iteration_ratio: Option<f64>,
    /// `ln ρ_first / ln ρ_last`
    pub predicted_ratio: f64,
    pub plot_data: PathBuf,
    pub script: PathBuf,
    pub summary: PathBuf,
}

impl Fig1Report {
    pub fn status(&self) -> Result<()> {
        for leg in &self.legs {
            let bad = leg.bound_violations();
            if let Some(n) = bad.first() {
                return Err(CliError::Verification(format!(
                    "ρ = {}: lower bound exceeds the error at {} rows, first n = {n}",
                    leg.target_rho,
                    bad.len()
                )));
            }
            if leg.iterations_to_target.is_none() {
                return Err(CliError::NotConverged(format!(
                    "ρ = {}: error never reached {FIG1_ERROR_TARGET:e}",
                    leg.target_rho
                )));
            }
        }
        Ok(())
    }
}

fn leg_file_name(target: f64) -> String {
    format!("fig1_rho_{target}.csv")
}

fn run_leg(
    cfg: &ExperimentConfig,
    base: &InterferenceMapping,
    base_snapshot: &NetworkSnapshot,
    target: f64,
    out: &Path,
) -> Result<Fig1Leg> {
    let beta = calibrate_beta(base_snapshot, target)?;
    let mapping = scale_mapping(base.clone(), beta)?;
    let n = mapping.dim();
    let x_star = reference_fixed_point(&mapping)?;
    let sr = compute_spectral(&cfg.spectral, &build_asymptotic(&mapping), &NormChoice::Sup)?;
    let epsilon = max_epsilon(&PositiveVector::new(x_star.clone())?, &sr.eigenvector)?;
    let l2 = NormChoice::Euclidean;
    let trace = fixed_point_iterate(
        &mapping,
        &vec![0.0; n],
        cfg.stop_rule()?,
        &l2,
        Some(&x_star),
    )?;
    let errors = trace.errors.expect("reference supplied");
    let floor = 1e-12 * (1.0 + l2.norm(&x_star));
    let bound = concave_lower_bound(sr.rho, epsilon, &sr.eigenvector, &l2, errors.len())?;
    let lower_bounds = errors
        .iter()
        .zip(&bound.values)
        .map(|(&e, &b)| (e > floor).then_some(b))
        .collect();
    let iterations_to_target = errors.iter().position(|&e| e <= FIG1_ERROR_TARGET);
    log::info!(
        "ρ = {target}: β = {beta:.6}, ε = {epsilon:.6e}, {} iterations to {FIG1_ERROR_TARGET:e}",
        iterations_to_target.map_or_else(|| "no".to_string(), |k| k.to_string())
    );
    let leg = Fig1Leg {
        target_rho: target,
        beta,
        rho: sr.rho,
        epsilon,
        x_star,
        eigenvector: sr.eigenvector,
        errors,
        lower_bounds,
        iterations_to_target,
        path: out.join(leg_file_name(target)),
    };
    leg.table().write(&leg.path)?;
    Ok(leg)
}

#[derive(Serialize)]
struct LegSummary<'a> {
    target_rho: f64,
    beta: f64,
    rho: f64,
    epsilon: f64,
    iterations_to_target: Option<usize>,
    file: String,
    x_star: &'a [f64],
    eigenvector: &'a [f64],
}

#[derive(Serialize)]
struct Summary<'a> {
    seed: u64,
    n_stations: usize,
    n_users: usize,
    base_rho: f64,
    error_target: f64,
    predicted_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    iteration_ratio: Option<f64>,
    legs: Vec<LegSummary<'a>>,
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plot error_l2 and the lower bound per target spectral radius.

usage: plot_fig1.py [fig1_plot_data.csv] [output.png]
"""
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

src = sys.argv[1] if len(sys.argv) > 1 else "fig1_plot_data.csv"
dst = sys.argv[2] if len(sys.argv) > 2 else "fig1.png"

curves = defaultdict(lambda: ([], [], [], []))
with open(src, newline="") as f:
    for row in csv.DictReader(f):
        n, err, nb, lb = curves[row["target_rho"]]
        n.append(int(row["n"]))
        err.append(float(row["error_l2"]))
        if row["lower_bound"]:
            nb.append(int(row["n"]))
            lb.append(float(row["lower_bound"]))

fig, ax = plt.subplots(figsize=(6, 4))
for rho, (n, err, nb, lb) in sorted(curves.items(), key=lambda kv: float(kv[0])):
    line, = ax.semilogy(n, err, label=f"FPI, rho = {float(rho):.3g}")
    ax.semilogy(nb, lb, "--", color=line.get_color(), label=f"lower bound, rho = {float(rho):.3g}")
ax.set_xlabel("iteration n")
ax.set_ylabel("||x_n - x*||_2")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(dst, dpi=150)
"#;

/// Runs one leg per target spectral radius on a common snapshot (legs run on
/// separate threads) and writes per-leg CSVs, `fig1_plot_data.csv`,
/// `plot_fig1.py` and `fig1_summary.txt`. The default targets are the
/// snapshot's own radius and 0.99.
pub fn run_fig1(cfg: &ExperimentConfig, seed: u64, out: &Path) -> Result<Fig1Report> {
    let snapshot = cfg.network(seed)?;
    let base_rho = load_spectral_radius(&snapshot)?;
    let targets = cfg
        .target_rho
        .clone()
        .unwrap_or_else(|| vec![base_rho, DEFAULT_HIGH_TARGET]);
    if targets.is_empty() {
        return Err(CliError::Config("target_rho must not be empty".into()));
    }
    if let Some(t) = targets.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
        return Err(CliError::Config(format!(
            "target_rho {t} is infeasible: targets must lie in ]0, 1["
        )));
    }
    let base = InterferenceMapping::load_coupling(snapshot.clone())?;
    write_snapshot(&out.join("snapshot.toml"), &snapshot)?;

    let legs: Vec<Fig1Leg> = thread::scope(|s| {
        let handles: Vec<_> = targets
            .iter()
            .map(|&t| {
                let (base, snapshot) = (&base, &snapshot);
                s.spawn(move || run_leg(cfg, base, snapshot, t, out))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("fig1 leg panicked"))
            .collect::<Result<_>>()
    })?;

    let mut plot = Table::new(&["target_rho", "n", "error_l2", "lower_bound"]);
    for leg in &legs {
        for row in leg.table().rows {
            plot.push([vec![leg.target_rho.to_string()], row].concat());
        }
    }
    let plot_data = out.join("fig1_plot_data.csv");
    plot.write(&plot_data)?;
    let script = out.join("plot_fig1.py");
    write_text(&script, PLOT_SCRIPT)?;

    let (first, last) = (&legs[0], &legs[legs.len() - 1]);
    let predicted_ratio = first.target_rho.ln() / last.target_rho.ln();
    let iteration_ratio = match (first.iterations_to_target, last.iterations_to_target) {
        (Some(a), Some(b)) if a > 0 => Some(b as f64 / a as f64),
        _ => None,
    };
    let summary = out.join("fig1_summary.txt");
    write_summary(
        &summary,
        &Summary {
            seed,
            n_stations: snapshot.n_stations(),
            n_users: snapshot.users.len(),
            base_rho,
            error_target: FIG1_ERROR_TARGET,
            predicted_ratio,
            iteration_ratio,
            legs: legs
                .iter()
                .map(|l| LegSummary {
                    target_rho: l.target_rho,
                    beta: l.beta,
                    rho: l.rho,
                    epsilon: l.epsilon,
                    iterations_to_target: l.iterations_to_target,
                    file: leg_file_name(l.target_rho),
                    x_star: &l.x_star,
                    eigenvector: &l.eigenvector,
                })
                .collect(),
        },
    )?;
    Ok(Fig1Report {
        base_rho,
        legs,
        iteration_ratio,
        predicted_ratio,
        plot_data,
        script,
        summary,
    })
}
