//! Subcommand drivers. Each `run_*` writes its files and returns a report;
//! [`execute`] maps reports to the process outcome.

mod contraction;
mod fig1;
mod loadsim;
mod solve;
mod spectral;

use std::path::Path;

use ifp_core::spectral::{
    default_epsilon, epsilon_power_method, krause_iteration, DEFAULT_P_SCHEDULE, EPSILON_MAX_ITER,
    EPSILON_TOL, KRAUSE_MAX_ITER, KRAUSE_TOL,
};
use ifp_core::{AsymptoticMapping, Error as CoreError, NormChoice, SpectralResult};
use serde::Serialize;

use crate::config::{ExperimentConfig, MethodName, SpectralDoc};
use crate::csvio::{float, Table};
use crate::documents::write_text;
use crate::error::{CliError, Result};

pub use contraction::{run_contraction, ContractionReport};
pub use fig1::{run_fig1, Fig1Leg, Fig1Report, FIG1_ERROR_TARGET};
pub use loadsim::{run_loadsim, LoadsimReport};
pub use solve::{run_solve, trace_table, SolveReport};
pub use spectral::{run_spectral, SpectralReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Spectral,
    Contraction,
    Loadsim,
    Fig1,
}

/// Runs `command` and turns a completed run into success or the error that
/// carries its exit code.
pub fn execute(command: Command, cfg: &ExperimentConfig, seed: u64, out: &Path) -> Result<()> {
    match command {
        Command::Solve => run_solve(cfg, out)?.status(),
        Command::Spectral => run_spectral(cfg, out)?.status(),
        Command::Contraction => run_contraction(cfg, seed, out)?.status(),
        Command::Loadsim => run_loadsim(cfg, seed, out)?.status(),
        Command::Fig1 => run_fig1(cfg, seed, out)?.status(),
    }
}

/// Spectral radius of `am` as configured by the `[spectral]` section.
pub fn compute_spectral(
    doc: &SpectralDoc,
    am: &AsymptoticMapping,
    norm: &NormChoice,
) -> ifp_core::Result<SpectralResult> {
    let n = am.dim();
    let start = doc.start.clone().unwrap_or_else(|| vec![1.0; n]);
    let tol = doc.tol.unwrap_or(KRAUSE_TOL);
    let krause = || {
        krause_iteration(
            am,
            &start,
            norm,
            tol,
            doc.max_iter.unwrap_or(KRAUSE_MAX_ITER),
        )
    };
    let epsilon = || {
        let eps = match doc.epsilon {
            Some(e) => e,
            None => default_epsilon(am)?,
        };
        let schedule = doc
            .p_schedule
            .clone()
            .unwrap_or_else(|| DEFAULT_P_SCHEDULE.to_vec());
        epsilon_power_method(
            am,
            eps,
            &schedule,
            norm,
            doc.tol.unwrap_or(EPSILON_TOL),
            doc.max_iter.unwrap_or(EPSILON_MAX_ITER),
        )
    };
    match doc.method {
        MethodName::Krause => krause(),
        MethodName::Epsilon => epsilon(),
        MethodName::Auto => match krause() {
            Err(e @ (CoreError::KrauseNotConverged { .. } | CoreError::ZeroImage)) => {
                log::info!("krause iteration failed ({e}), falling back to the epsilon method");
                epsilon()
            }
            other => other,
        },
    }
}

/// Three-column `quantity,key,value` table used for scalar results.
pub(crate) struct KeyValues(Table);

impl KeyValues {
    pub(crate) fn new() -> Self {
        KeyValues(Table::new(&["quantity", "key", "value"]))
    }

    pub(crate) fn text(&mut self, quantity: &str, key: &str, value: impl ToString) {
        self.0
            .push(vec![quantity.into(), key.into(), value.to_string()]);
    }

    pub(crate) fn float(&mut self, quantity: &str, key: &str, value: f64) {
        self.text(quantity, key, float(value));
    }

    pub(crate) fn vector(&mut self, quantity: &str, values: &[f64]) {
        for (i, v) in values.iter().enumerate() {
            self.float(quantity, &i.to_string(), *v);
        }
    }

    pub(crate) fn spectral(&mut self, r: &SpectralResult) {
        self.text("method", "", r.method.name());
        self.float("rho", "", r.rho);
        self.float("residual", "", r.residual);
        self.text("iterations", "", r.iterations);
        self.text("upper_bound_certified", "", r.upper_bound_certified);
        for (p, e) in &r.estimates {
            self.float("estimate", &float(*p), *e);
        }
        self.vector("eigenvector", &r.eigenvector);
    }

    pub(crate) fn error(&mut self, e: &CoreError) {
        let kind = format!("{e:?}");
        let kind = kind
            .split([' ', '{', '('])
            .next()
            .unwrap_or_default()
            .to_string();
        self.text("error", &kind, e);
    }

    pub(crate) fn write(&self, path: &Path) -> Result<()> {
        self.0.write(path)
    }

    pub(crate) fn table(&self) -> &Table {
        &self.0
    }
}

pub(crate) fn write_summary<T: Serialize>(path: &Path, summary: &T) -> Result<()> {
    let text = toml::to_string(summary).map_err(|e| CliError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    write_text(path, &text)
}
