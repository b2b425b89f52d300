//! TOML documents for mappings and network snapshots.

use std::fs;
use std::path::{Path, PathBuf};

use ifp_core::{
    InterferenceMapping, Matrix, NetworkSnapshot, NonnegVector, PositiveVector, Station, User,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Affine,
    ConcaveComposite,
    LoadCoupling,
}

/// A mapping as written on disk. `beta`, when present, wraps the base variant
/// in a scaled mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingDoc {
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sqrt_weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_path: Option<PathBuf>,
}

fn missing(field: &str, variant: &str) -> CliError {
    CliError::Config(format!("mapping variant `{variant}` needs `{field}`"))
}

fn resolve(base: Option<&Path>, path: &Path) -> PathBuf {
    match base {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

impl MappingDoc {
    /// Builds the mapping. Relative snapshot paths resolve against `base`.
    pub fn build(&self, base: Option<&Path>) -> Result<InterferenceMapping> {
        let mapping = match self.variant {
            Variant::Affine => {
                let matrix = Matrix::from_rows(
                    self.matrix
                        .as_ref()
                        .ok_or_else(|| missing("matrix", "affine"))?,
                )?;
                let offset = PositiveVector::new(
                    self.offset
                        .clone()
                        .ok_or_else(|| missing("offset", "affine"))?,
                )?;
                InterferenceMapping::affine(matrix, offset)?
            }
            Variant::ConcaveComposite => {
                let name = "concave_composite";
                let matrix = Matrix::from_rows(
                    self.matrix
                        .as_ref()
                        .ok_or_else(|| missing("matrix", name))?,
                )?;
                let offset = PositiveVector::new(
                    self.offset.clone().ok_or_else(|| missing("offset", name))?,
                )?;
                let weights = NonnegVector::new(
                    self.sqrt_weights
                        .clone()
                        .ok_or_else(|| missing("sqrt_weights", name))?,
                )?;
                InterferenceMapping::concave_composite(matrix, offset, weights)?
            }
            Variant::LoadCoupling => {
                let path = self
                    .snapshot_path
                    .as_ref()
                    .ok_or_else(|| missing("snapshot_path", "load_coupling"))?;
                InterferenceMapping::load_coupling(read_snapshot(&resolve(base, path))?)?
            }
        };
        match self.beta {
            Some(beta) => Ok(ifp_core::scale_mapping(mapping, beta)?),
            None => Ok(mapping),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationDoc {
    pub id: usize,
    pub x_m: f64,
    pub y_m: f64,
    pub power_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserDoc {
    pub id: usize,
    pub x_m: f64,
    pub y_m: f64,
    pub demand_bps: f64,
    pub serving_station: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioDoc {
    pub k_blocks: u32,
    pub block_bandwidth_hz: f64,
    pub noise_w: f64,
}

/// Dense gain matrix, one row per station, one column per user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsDoc {
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotDoc {
    pub radio: RadioDoc,
    pub stations: Vec<StationDoc>,
    pub users: Vec<UserDoc>,
    pub gains: GainsDoc,
}

impl From<&NetworkSnapshot> for SnapshotDoc {
    fn from(s: &NetworkSnapshot) -> Self {
        SnapshotDoc {
            radio: RadioDoc {
                k_blocks: s.k_blocks,
                block_bandwidth_hz: s.block_bandwidth_hz,
                noise_w: s.noise_w,
            },
            stations: s
                .stations
                .iter()
                .enumerate()
                .map(|(id, st)| StationDoc {
                    id,
                    x_m: st.position[0],
                    y_m: st.position[1],
                    power_w: st.power_w,
                })
                .collect(),
            users: s
                .users
                .iter()
                .enumerate()
                .map(|(id, u)| UserDoc {
                    id,
                    x_m: u.position[0],
                    y_m: u.position[1],
                    demand_bps: u.demand_bps,
                    serving_station: u.serving_station,
                })
                .collect(),
            gains: GainsDoc {
                rows: (0..s.stations.len())
                    .map(|i| s.users.iter().map(|u| u.gains[i]).collect())
                    .collect(),
            },
        }
    }
}

impl TryFrom<SnapshotDoc> for NetworkSnapshot {
    type Error = CliError;

    fn try_from(doc: SnapshotDoc) -> Result<Self> {
        let bad = |m: String| CliError::Config(format!("snapshot: {m}"));
        for (k, s) in doc.stations.iter().enumerate() {
            if s.id != k {
                return Err(bad(format!(
                    "station ids must be 0..N in order, found {} at position {k}",
                    s.id
                )));
            }
        }
        for (k, u) in doc.users.iter().enumerate() {
            if u.id != k {
                return Err(bad(format!(
                    "user ids must be 0..U in order, found {} at position {k}",
                    u.id
                )));
            }
        }
        let n = doc.stations.len();
        if doc.gains.rows.len() != n {
            return Err(bad(format!(
                "gains has {} rows for {n} stations",
                doc.gains.rows.len()
            )));
        }
        if let Some(r) = doc
            .gains
            .rows
            .iter()
            .position(|row| row.len() != doc.users.len())
        {
            return Err(bad(format!(
                "gains row {r} does not have one entry per user"
            )));
        }
        let snapshot = NetworkSnapshot {
            stations: doc
                .stations
                .iter()
                .map(|s| Station {
                    position: [s.x_m, s.y_m],
                    power_w: s.power_w,
                })
                .collect(),
            users: doc
                .users
                .iter()
                .enumerate()
                .map(|(j, u)| User {
                    position: [u.x_m, u.y_m],
                    demand_bps: u.demand_bps,
                    gains: doc.gains.rows.iter().map(|row| row[j]).collect(),
                    serving_station: u.serving_station,
                })
                .collect(),
            noise_w: doc.radio.noise_w,
            k_blocks: doc.radio.k_blocks,
            block_bandwidth_hz: doc.radio.block_bandwidth_hz,
        };
        snapshot.validate()?;
        Ok(snapshot)
    }
}

pub(crate) fn read_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<NetworkSnapshot> {
    read_toml::<SnapshotDoc>(path)?.try_into()
}

pub fn write_snapshot(path: &Path, snapshot: &NetworkSnapshot) -> Result<()> {
    let text = toml::to_string(&SnapshotDoc::from(snapshot)).map_err(|e| CliError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    write_text(path, &text)
}

pub fn read_mapping(path: &Path) -> Result<InterferenceMapping> {
    read_toml::<MappingDoc>(path)?.build(path.parent())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ifp_core::load::{generate_snapshot, SnapshotConfig};

    #[test]
    fn affine_document() {
        let doc: MappingDoc = toml::from_str(
            "variant = \"affine\"\nmatrix = [[0.0, 0.5], [0.5, 0.0]]\noffset = [1.0, 1.0]\nbeta = 2.0\n",
        )
        .unwrap();
        let t = doc.build(None).unwrap();
        assert_eq!(t.family(), "scaled");
        assert_eq!(t.apply(&[0.0, 0.0]).unwrap().to_vec(), vec![2.0, 2.0]);
    }

    #[test]
    fn missing_and_unknown_fields() {
        let doc: MappingDoc = toml::from_str("variant = \"affine\"\nmatrix = [[0.5]]\n").unwrap();
        assert!(matches!(doc.build(None), Err(CliError::Config(_))));
        assert!(toml::from_str::<MappingDoc>("variant = \"affine\"\nmatrx = [[0.5]]\n").is_err());
        assert!(toml::from_str::<MappingDoc>("variant = \"cubic\"\n").is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        let cfg = SnapshotConfig {
            n_stations: 4,
            users_per_station: 3,
            ..SnapshotConfig::default()
        };
        let s = generate_snapshot(&cfg, 9).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.toml");
        write_snapshot(&path, &s).unwrap();
        assert_eq!(read_snapshot(&path).unwrap(), s);

        let mapping = dir.path().join("load.toml");
        write_text(
            &mapping,
            "variant = \"load_coupling\"\nsnapshot_path = \"net.toml\"\n",
        )
        .unwrap();
        assert_eq!(
            read_mapping(&mapping).unwrap(),
            InterferenceMapping::load_coupling(s).unwrap()
        );
    }

    #[test]
    fn snapshot_shape_is_checked() {
        let cfg = SnapshotConfig {
            n_stations: 2,
            users_per_station: 1,
            ..SnapshotConfig::default()
        };
        let mut doc = SnapshotDoc::from(&generate_snapshot(&cfg, 1).unwrap());
        doc.gains.rows[1].pop();
        assert!(NetworkSnapshot::try_from(doc.clone()).is_err());
        doc.gains.rows.pop();
        assert!(NetworkSnapshot::try_from(doc).is_err());
    }
}
