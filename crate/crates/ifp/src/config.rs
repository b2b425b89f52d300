//! Experiment configuration files.
//!
//! Relative paths inside a config (mapping, snapshot, output directory) are
//! resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use ifp_core::load::{generate_snapshot, SnapshotConfig};
use ifp_core::{InterferenceMapping, NetworkSnapshot, NormChoice, PositiveVector, StopRule};
use serde::Deserialize;

use crate::documents::{read_mapping, read_snapshot, read_toml, MappingDoc};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormName {
    #[default]
    Sup,
    One,
    L2,
    WeightedSup,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopDoc {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_tol() -> f64 {
    1e-12
}

fn default_max_iter() -> usize {
    1_000_000
}

impl Default for StopDoc {
    fn default() -> Self {
        StopDoc {
            tol: default_tol(),
            max_iter: default_max_iter(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    /// Krause first, ε-method on failure.
    #[default]
    Auto,
    Krause,
    Epsilon,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralDoc {
    #[serde(default)]
    pub method: MethodName,
    /// Krause start vector; all ones by default.
    pub start: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub p_schedule: Option<Vec<f64>>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
}

/// Generator parameters; every field falls back to [`SnapshotConfig::default`].
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub n_stations: Option<usize>,
    pub users_per_station: Option<usize>,
    pub demand_bps: Option<f64>,
    pub area_m: Option<f64>,
    pub pathloss_exponent: Option<f64>,
    pub k_blocks: Option<u32>,
    pub block_bandwidth_hz: Option<f64>,
    pub power_w: Option<f64>,
    pub noise_w: Option<f64>,
}

impl GeneratorDoc {
    pub fn to_config(&self) -> SnapshotConfig {
        let d = SnapshotConfig::default();
        SnapshotConfig {
            n_stations: self.n_stations.unwrap_or(d.n_stations),
            users_per_station: self.users_per_station.unwrap_or(d.users_per_station),
            demand_bps: self.demand_bps.unwrap_or(d.demand_bps),
            area_m: self.area_m.unwrap_or(d.area_m),
            pathloss_exponent: self.pathloss_exponent.unwrap_or(d.pathloss_exponent),
            k_blocks: self.k_blocks.unwrap_or(d.k_blocks),
            block_bandwidth_hz: self.block_bandwidth_hz.unwrap_or(d.block_bandwidth_hz),
            power_w: self.power_w.unwrap_or(d.power_w),
            noise_w: self.noise_w.unwrap_or(d.noise_w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub norm: NormName,
    pub norm_weights: Option<Vec<f64>>,
    /// `x₁`; the zero vector by default.
    pub start: Option<Vec<f64>>,
    #[serde(default)]
    pub stop: StopDoc,
    pub mapping: Option<MappingDoc>,
    pub mapping_path: Option<PathBuf>,
    pub snapshot: Option<GeneratorDoc>,
    pub snapshot_path: Option<PathBuf>,
    pub target_rho: Option<Vec<f64>>,
    #[serde(default)]
    pub spectral: SpectralDoc,
    /// Sample count of the sampled property checks.
    pub samples: Option<usize>,
    /// Directory that relative paths resolve against; set by [`Self::load`].
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: ExperimentConfig = read_toml(path)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        cfg.check_references()?;
        Ok(cfg)
    }

    /// Every file the config points at must exist.
    pub fn check_references(&self) -> Result<()> {
        for (key, path) in [
            ("mapping_path", &self.mapping_path),
            ("snapshot_path", &self.snapshot_path),
        ] {
            if let Some(path) = path {
                let resolved = self.resolve(path);
                if !resolved.is_file() {
                    return Err(CliError::Config(format!(
                        "{key} `{}` does not exist",
                        resolved.display()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.base_dir = base_dir.map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        match &self.base_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }

    /// Output directory: `--out` wins, then `output_dir`, then `./out`.
    pub fn output_dir(&self, cli_out: Option<&Path>) -> PathBuf {
        match (cli_out, &self.output_dir) {
            (Some(out), _) => out.to_path_buf(),
            (None, Some(dir)) => self.resolve(dir),
            (None, None) => PathBuf::from("out"),
        }
    }

    pub fn norm(&self, dim: usize) -> Result<NormChoice> {
        let norm = match self.norm {
            NormName::Sup => NormChoice::Sup,
            NormName::One => NormChoice::One,
            NormName::L2 => NormChoice::Euclidean,
            NormName::WeightedSup => {
                let w = self.norm_weights.clone().ok_or_else(|| {
                    CliError::Config("norm `weighted_sup` needs `norm_weights`".into())
                })?;
                NormChoice::WeightedSup(PositiveVector::new(w)?)
            }
        };
        norm.check_dim(dim)?;
        Ok(norm)
    }

    pub fn stop_rule(&self) -> Result<StopRule> {
        Ok(StopRule::new(self.stop.tol, self.stop.max_iter)?)
    }

    pub fn start(&self, dim: usize) -> Result<Vec<f64>> {
        match &self.start {
            None => Ok(vec![0.0; dim]),
            Some(x) if x.len() == dim => Ok(x.clone()),
            Some(x) => Err(CliError::Config(format!(
                "start has {} entries, mapping has dimension {dim}",
                x.len()
            ))),
        }
    }

    /// Snapshot from `snapshot_path`, else generated from `[snapshot]` (or the
    /// generator defaults) with `seed`.
    pub fn network(&self, seed: u64) -> Result<NetworkSnapshot> {
        match &self.snapshot_path {
            Some(p) => read_snapshot(&self.resolve(p)),
            None => {
                let cfg = self.snapshot.clone().unwrap_or_default().to_config();
                Ok(generate_snapshot(&cfg, seed)?)
            }
        }
    }

    /// The mapping under study: inline `[mapping]`, then `mapping_path`, then a
    /// load-coupling mapping over [`Self::network`].
    pub fn mapping(&self, seed: u64) -> Result<InterferenceMapping> {
        match (&self.mapping, &self.mapping_path) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "give either `mapping` or `mapping_path`, not both".into(),
            )),
            (Some(doc), None) => doc.build(self.base_dir.as_deref()),
            (None, Some(p)) => read_mapping(&self.resolve(p)),
            (None, None) if self.snapshot.is_some() || self.snapshot_path.is_some() => {
                Ok(InterferenceMapping::load_coupling(self.network(seed)?)?)
            }
            (None, None) => Err(CliError::Config(
                "no mapping: set `mapping`, `mapping_path` or `snapshot`".into(),
            )),
        }
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(500)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ifp_core::Mapping as _;

    #[test]
    fn minimal_inline_config() {
        let cfg = ExperimentConfig::parse(
            "[mapping]\nvariant = \"affine\"\nmatrix = [[0.0, 0.5], [0.5, 0.0]]\noffset = [1.0, 1.0]\n",
            None,
        )
        .unwrap();
        assert_eq!(cfg.stop, StopDoc::default());
        assert_eq!(cfg.norm(2).unwrap(), NormChoice::Sup);
        assert_eq!(cfg.start(2).unwrap(), vec![0.0, 0.0]);
        assert_eq!(cfg.mapping(0).unwrap().dim(), 2);
        assert_eq!(cfg.output_dir(None), PathBuf::from("out"));
    }

    #[test]
    fn paths_resolve_against_config_dir() {
        let cfg =
            ExperimentConfig::parse("output_dir = \"res\"\n", Some(Path::new("/a/b"))).unwrap();
        assert_eq!(cfg.output_dir(None), PathBuf::from("/a/b/res"));
        assert_eq!(cfg.output_dir(Some(Path::new("x"))), PathBuf::from("x"));
    }

    #[test]
    fn missing_reference_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg =
            ExperimentConfig::parse("mapping_path = \"nope.toml\"", Some(dir.path())).unwrap();
        assert!(matches!(cfg.check_references(), Err(CliError::Config(_))));
        std::fs::write(dir.path().join("nope.toml"), "").unwrap();
        assert!(cfg.check_references().is_ok());
    }

    #[test]
    fn config_errors() {
        assert!(ExperimentConfig::parse("bogus = 1\n", None).is_err());
        let cfg =
            ExperimentConfig::parse("norm = \"weighted_sup\"\nstart = [1.0]\n", None).unwrap();
        assert!(cfg.norm(2).is_err());
        assert!(cfg.start(2).is_err());
        assert!(cfg.mapping(0).is_err());
        let cfg = ExperimentConfig::parse("[stop]\ntol = 0.0\n", None).unwrap();
        assert!(cfg.stop_rule().is_err());
    }

    #[test]
    fn generated_network_mapping() {
        let cfg =
            ExperimentConfig::parse("[snapshot]\nn_stations = 4\nusers_per_station = 2\n", None)
                .unwrap();
        let t = cfg.mapping(3).unwrap();
        assert_eq!(t.family(), "load_coupling");
        assert_eq!(t, cfg.mapping(3).unwrap());
    }
}
