use std::path::{Path, PathBuf};

use ifp_core::load::{calibrate_beta, load_spectral_radius};
use ifp_core::solver::{fixed_point_iterate, reference_fixed_point};
use ifp_core::Mapping as _;
use ifp_core::{InterferenceMapping, IterationTrace, NetworkSnapshot, Outcome};

use super::{trace_table, KeyValues};
use crate::config::ExperimentConfig;
use crate::documents::write_snapshot;
use crate::error::{CliError, Result};

#[derive(Debug, Clone)]
pub struct LoadsimReport {
    pub snapshot: NetworkSnapshot,
    pub rho: f64,
    pub beta: f64,
    pub trace: IterationTrace,
    pub dir: PathBuf,
}

impl LoadsimReport {
    pub fn status(&self) -> Result<()> {
        match self.trace.outcome {
            Outcome::Converged => Ok(()),
            Outcome::Diverged => Err(CliError::Diverged(format!(
                "load iteration with ρ = {:.6}",
                self.beta * self.rho
            ))),
            Outcome::MaxIterations => Err(CliError::NotConverged(
                "load iteration budget exhausted".into(),
            )),
        }
    }
}

/// Generates (or reads) a network, optionally rescales demands to the first
/// `target_rho`, and estimates the loads from `x₁ = 0`. Writes `snapshot.toml`,
/// `loadsim.csv` and `trace.csv`.
pub fn run_loadsim(cfg: &ExperimentConfig, seed: u64, out: &Path) -> Result<LoadsimReport> {
    let snapshot = cfg.network(seed)?;
    let rho = load_spectral_radius(&snapshot)?;
    let beta = match cfg.target_rho.as_deref() {
        Some([target, ..]) => calibrate_beta(&snapshot, *target)?,
        Some([]) | None => 1.0,
    };
    let snapshot = if beta == 1.0 {
        snapshot
    } else {
        snapshot.with_scaled_demands(beta)?
    };
    let mapping = InterferenceMapping::load_coupling(snapshot.clone())?;
    let n = mapping.dim();
    let norm = cfg.norm(n)?;
    let reference = reference_fixed_point(&mapping).ok();
    let trace = fixed_point_iterate(
        &mapping,
        &cfg.start(n)?,
        cfg.stop_rule()?,
        &norm,
        reference.as_deref(),
    )?;
    log::info!(
        "{} stations, ρ = {rho:.6}, β = {beta:.6}, {} iterations",
        n,
        trace.iterations()
    );

    write_snapshot(&out.join("snapshot.toml"), &snapshot)?;
    let mut kv = KeyValues::new();
    kv.text("n_stations", "", n);
    kv.text("n_users", "", snapshot.users.len());
    kv.float("rho_base", "", rho);
    kv.float("beta", "", beta);
    kv.float("rho", "", beta * rho);
    kv.text("iterations", "", trace.iterations());
    kv.text("converged", "", trace.converged());
    kv.vector("load", trace.last());
    for (i, row) in snapshot.coupling_matrix().to_rows().iter().enumerate() {
        for (k, m) in row.iter().enumerate() {
            kv.float("coupling", &format!("{i}:{k}"), *m);
        }
    }
    kv.write(&out.join("loadsim.csv"))?;
    trace_table(&trace, None, None).write(&out.join("trace.csv"))?;
    Ok(LoadsimReport {
        snapshot,
        rho,
        beta,
        trace,
        dir: out.to_path_buf(),
    })
}
