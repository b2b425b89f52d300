use std::path::{Path, PathBuf};

use ifp_core::property::check_contractivity;
use ifp_core::spectral::{contraction_modulus, verify_rho_lower_bounds_modulus};
use ifp_core::Mapping as _;
use ifp_core::{ContractionVerdict, PropertyReport};

use super::KeyValues;
use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

#[derive(Debug, Clone)]
pub struct ContractionReport {
    pub verdict: ContractionVerdict,
    /// Sampled contractivity check of the certificate, when one exists.
    pub contractivity: Option<PropertyReport>,
    pub rho_bound: Option<PropertyReport>,
    pub path: PathBuf,
}

impl ContractionReport {
    pub fn status(&self) -> Result<()> {
        for r in self.contractivity.iter().chain(&self.rho_bound) {
            if !r.passed() {
                return Err(CliError::Verification(format!(
                    "{}: {} of {} samples violated",
                    r.property, r.violation_count, r.samples_tested
                )));
            }
        }
        Ok(())
    }
}

fn record(kv: &mut KeyValues, r: &PropertyReport) {
    kv.text(&r.property, "samples", r.samples_tested);
    kv.text(&r.property, "violations", r.violation_count);
    kv.text(&r.property, "passed", r.passed());
}

/// Modulus of contraction of a convex mapping, checked by sampling. Writes
/// `contraction.csv`.
pub fn run_contraction(cfg: &ExperimentConfig, seed: u64, out: &Path) -> Result<ContractionReport> {
    let mapping = cfg.mapping(seed)?;
    let norm = cfg.norm(mapping.dim())?;
    let verdict = contraction_modulus(&mapping, &norm)?;
    let mut kv = KeyValues::new();
    kv.text("family", "", mapping.family());
    kv.text("contractive", "", verdict.is_contractive());
    let (contractivity, rho_bound) = match &verdict {
        ContractionVerdict::Contractive { c, v } => {
            kv.float("modulus", "", *c);
            kv.vector("direction", v);
            let sampled = check_contractivity(&mapping, v, *c, cfg.samples(), seed)?;
            let bound = verify_rho_lower_bounds_modulus(&mapping, v, *c, &norm)?;
            record(&mut kv, &sampled);
            record(&mut kv, &bound);
            (Some(sampled), Some(bound))
        }
        ContractionVerdict::NotContractive { rho } => {
            kv.float("rho", "", *rho);
            (None, None)
        }
    };
    let path = out.join("contraction.csv");
    kv.write(&path)?;
    Ok(ContractionReport {
        verdict,
        contractivity,
        rho_bound,
        path,
    })
}
