use std::path::{Path, PathBuf};

use ifp_core::Mapping as _;
use ifp_core::{build_asymptotic, Error as CoreError, SpectralResult};

use super::{compute_spectral, KeyValues};
use crate::config::ExperimentConfig;
use crate::csvio::Table;
use crate::error::{CliError, Result};

#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub result: std::result::Result<SpectralResult, CoreError>,
    pub fixed_point_exists: Option<bool>,
    pub table: Table,
    pub path: PathBuf,
}

impl SpectralReport {
    pub fn status(&self) -> Result<()> {
        match &self.result {
            Ok(_) => Ok(()),
            Err(e) => Err(CliError::Core(e.clone())),
        }
    }
}

/// Writes `spectral.csv`. A failed computation is recorded as an `error` row
/// and surfaces through [`SpectralReport::status`].
pub fn run_spectral(cfg: &ExperimentConfig, out: &Path) -> Result<SpectralReport> {
    let mapping = cfg.mapping(cfg.seed)?;
    let norm = cfg.norm(mapping.dim())?;
    let am = build_asymptotic(&mapping);
    let result = compute_spectral(&cfg.spectral, &am, &norm);
    let mut kv = KeyValues::new();
    kv.text("family", "", mapping.family());
    kv.text("norm", "", norm.name());
    let fixed_point_exists = match &result {
        Ok(r) => {
            kv.spectral(r);
            let exists = r.rho < 1.0;
            kv.text("fixed_point_exists", "", exists);
            Some(exists)
        }
        Err(e) => {
            log::error!("spectral computation failed: {e}");
            kv.error(e);
            None
        }
    };
    let path = out.join("spectral.csv");
    kv.write(&path)?;
    Ok(SpectralReport {
        result,
        fixed_point_exists,
        table: kv.table().clone(),
        path,
    })
}
