//! Load coupling in cellular networks.
//!
//! Station `i` needs the fraction
//!
//! ```text
//! tᵢ(x) = Σ_{j ∈ Nᵢ} d_j / (K B log₂(1 + pᵢ g_{i,j} / (Σ_{k ≠ i} x_k p_k g_{k,j} + σ²)))
//! ```
//!
//! of the `K` resource blocks to serve the demands `d_j` of its users `Nᵢ`,
//! given the loads `x` of the other stations. The asymptotic mapping is linear,
//! `x ↦ diag(p)⁻¹ M diag(p) x` with
//! `M_{i,k} = Σ_{j ∈ Nᵢ} ln 2 · d_j g_{k,j} / (K B g_{i,j})` off the diagonal.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asymptotic::AsymptoticMapping;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::norm::NormChoice;
use crate::spectral;

#[derive(Debug, Clone, PartialEq)]
pub struct Station {
    /// Position in metres.
    pub position: [f64; 2],
    /// Transmit power per resource block in watts.
    pub power_w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct User {
    pub position: [f64; 2],
    pub demand_bps: f64,
    /// Linear gain from every station to this user, indexed by station.
    pub gains: Vec<f64>,
    pub serving_station: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSnapshot {
    pub stations: Vec<Station>,
    pub users: Vec<User>,
    /// Noise power per resource block in watts.
    pub noise_w: f64,
    pub k_blocks: u32,
    pub block_bandwidth_hz: f64,
}

fn positive(value: f64) -> bool {
    value.is_finite() && value > 0.0
}

impl NetworkSnapshot {
    pub fn n_stations(&self) -> usize {
        self.stations.len()
    }

    pub fn powers(&self) -> Vec<f64> {
        self.stations.iter().map(|s| s.power_w).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_stations();
        if n == 0 {
            return Err(Error::InvalidSnapshot("no stations".into()));
        }
        if !positive(self.noise_w) || !positive(self.block_bandwidth_hz) || self.k_blocks == 0 {
            return Err(Error::InvalidSnapshot(
                "noise power, block bandwidth and block count must be positive".into(),
            ));
        }
        if let Some(i) = self.stations.iter().position(|s| !positive(s.power_w)) {
            return Err(Error::InvalidSnapshot(format!(
                "station {i} has non-positive power"
            )));
        }
        let mut served = vec![0usize; n];
        for (j, u) in self.users.iter().enumerate() {
            if u.gains.len() != n {
                return Err(Error::InvalidSnapshot(format!(
                    "user {j} has {} gains, expected {n}",
                    u.gains.len()
                )));
            }
            if !positive(u.demand_bps) || !u.gains.iter().all(|&g| positive(g)) {
                return Err(Error::InvalidSnapshot(format!(
                    "user {j} has a non-positive demand or gain"
                )));
            }
            if u.serving_station >= n {
                return Err(Error::InvalidSnapshot(format!(
                    "user {j} is served by unknown station {}",
                    u.serving_station
                )));
            }
            served[u.serving_station] += 1;
        }
        if let Some(i) = served.iter().position(|&c| c == 0) {
            return Err(Error::InvalidSnapshot(format!(
                "station {i} serves no users"
            )));
        }
        Ok(())
    }

    /// `K · B`, the bandwidth of all resource blocks together.
    fn total_bandwidth(&self) -> f64 {
        f64::from(self.k_blocks) * self.block_bandwidth_hz
    }

    /// Evaluates the load mapping into `out`. Users are summed in index order,
    /// so results are reproducible bit for bit.
    pub(crate) fn load_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let kb = self.total_bandwidth();
        for u in &self.users {
            let i = u.serving_station;
            let interference: f64 = self
                .stations
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(k, s)| x[k] * s.power_w * u.gains[k])
                .sum::<f64>()
                + self.noise_w;
            let sinr = self.stations[i].power_w * u.gains[i] / interference;
            // log₂(1 + s) through log1p keeps precision when s is tiny
            let spectral_efficiency = libm::log1p(sinr) / LN_2;
            out[i] += u.demand_bps / (kb * spectral_efficiency);
        }
    }

    /// The load mapping evaluated at `x`, with dimension and sign checks.
    pub fn load_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_stations() {
            return Err(Error::DimensionMismatch {
                expected: self.n_stations(),
                actual: x.len(),
            });
        }
        crate::vector::NonnegVector::new(x.to_vec())?;
        let mut out = vec![0.0; self.n_stations()];
        self.load_into(x, &mut out);
        Ok(out)
    }

    /// The coupling matrix `M`, with an exactly zero diagonal.
    pub fn coupling_matrix(&self) -> Matrix {
        let n = self.n_stations();
        let kb = self.total_bandwidth();
        let mut m = Matrix::zeros(n);
        for u in &self.users {
            let i = u.serving_station;
            for k in (0..n).filter(|&k| k != i) {
                let term = LN_2 * u.demand_bps * u.gains[k] / (kb * u.gains[i]);
                m.set(i, k, m.get(i, k) + term);
            }
        }
        m
    }

    /// `diag(p)⁻¹ M diag(p)` as an analytic linear asymptotic mapping.
    pub fn asymptotic(&self) -> AsymptoticMapping {
        let n = self.n_stations();
        let p = self.powers();
        let mut m = self.coupling_matrix();
        for i in 0..n {
            for k in 0..n {
                m.set(i, k, m.get(i, k) * p[k] / p[i]);
            }
        }
        AsymptoticMapping::AnalyticLinear(m)
    }

    /// Copy with every demand multiplied by `beta`.
    pub fn with_scaled_demands(&self, beta: f64) -> Result<Self> {
        if !positive(beta) {
            return Err(Error::InvalidArgument(
                "demand scaling must be finite and > 0",
            ));
        }
        let mut s = self.clone();
        s.users.iter_mut().for_each(|u| u.demand_bps *= beta);
        Ok(s)
    }
}

/// Parameters of the synthetic snapshot generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotConfig {
    pub n_stations: usize,
    pub users_per_station: usize,
    pub demand_bps: f64,
    /// Side of the square deployment area in metres.
    pub area_m: f64,
    pub pathloss_exponent: f64,
    pub k_blocks: u32,
    pub block_bandwidth_hz: f64,
    pub power_w: f64,
    pub noise_w: f64,
}

impl Default for SnapshotConfig {
    /// Nine stations on a 3×3 grid with 500 m spacing, 300 kbit/s per user,
    /// 100 blocks of 180 kHz, 0.4 W per block and thermal noise over 180 kHz
    /// with a 9 dB noise figure.
    fn default() -> Self {
        Self {
            n_stations: 9,
            users_per_station: 8,
            demand_bps: 300e3,
            area_m: 1500.0,
            pathloss_exponent: 3.7,
            k_blocks: 100,
            block_bandwidth_hz: 180e3,
            power_w: 0.4,
            noise_w: 5.7e-15,
        }
    }
}

pub const MAX_PLACEMENT_ATTEMPTS: usize = 100;

/// Gain of a link of length `distance_m` under the log-distance model with a
/// 1 m distance floor.
pub fn pathloss_gain(distance_m: f64, exponent: f64) -> f64 {
    libm::pow(f64::max(distance_m, 1.0), -exponent)
}

/// Places stations on a regular grid over the square area and users uniformly
/// at random; every user attaches to its highest-gain station. User positions
/// are redrawn when a station ends up without users.
pub fn generate_snapshot(cfg: &SnapshotConfig, seed: u64) -> Result<NetworkSnapshot> {
    if cfg.n_stations == 0 || cfg.users_per_station == 0 || cfg.k_blocks == 0 {
        return Err(Error::InvalidArgument(
            "station, user and block counts must be positive",
        ));
    }
    if ![
        cfg.demand_bps,
        cfg.area_m,
        cfg.pathloss_exponent,
        cfg.block_bandwidth_hz,
        cfg.power_w,
        cfg.noise_w,
    ]
    .iter()
    .all(|&v| positive(v))
    {
        return Err(Error::InvalidArgument(
            "snapshot parameters must be finite and > 0",
        ));
    }
    let n = cfg.n_stations;
    let side = libm::ceil(libm::sqrt(n as f64)) as usize;
    let cell = cfg.area_m / side as f64;
    let stations: Vec<Station> = (0..n)
        .map(|i| Station {
            position: [
                ((i % side) as f64 + 0.5) * cell,
                ((i / side) as f64 + 0.5) * cell,
            ],
            power_w: cfg.power_w,
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_users = n * cfg.users_per_station;
    let mut empty = 0;
    for _ in 0..MAX_PLACEMENT_ATTEMPTS {
        let users: Vec<User> = (0..n_users)
            .map(|_| {
                let position = [
                    rng.gen_range(0.0..cfg.area_m),
                    rng.gen_range(0.0..cfg.area_m),
                ];
                let gains: Vec<f64> = stations
                    .iter()
                    .map(|s| {
                        let d =
                            libm::hypot(position[0] - s.position[0], position[1] - s.position[1]);
                        pathloss_gain(d, cfg.pathloss_exponent)
                    })
                    .collect();
                let serving_station = (0..n)
                    .max_by(|&a, &b| gains[a].total_cmp(&gains[b]).then(b.cmp(&a)))
                    .unwrap_or(0);
                User {
                    position,
                    demand_bps: cfg.demand_bps,
                    gains,
                    serving_station,
                }
            })
            .collect();
        let mut served = vec![false; n];
        users.iter().for_each(|u| served[u.serving_station] = true);
        match served.iter().position(|&s| !s) {
            None => {
                let snapshot = NetworkSnapshot {
                    stations,
                    users,
                    noise_w: cfg.noise_w,
                    k_blocks: cfg.k_blocks,
                    block_bandwidth_hz: cfg.block_bandwidth_hz,
                };
                snapshot.validate()?;
                return Ok(snapshot);
            }
            Some(i) => empty = i,
        }
    }
    Err(Error::EmptyStation {
        station: empty,
        attempts: MAX_PLACEMENT_ATTEMPTS,
    })
}

/// Spectral radius of the load asymptotic mapping.
pub fn load_spectral_radius(snapshot: &NetworkSnapshot) -> Result<f64> {
    Ok(spectral::spectral_radius(&snapshot.asymptotic(), &NormChoice::Sup)?.rho)
}

/// The factor `β` such that `β T` has asymptotic spectral radius `target_rho`.
pub fn calibrate_beta(snapshot: &NetworkSnapshot, target_rho: f64) -> Result<f64> {
    if !(target_rho > 0.0 && target_rho < 1.0) {
        return Err(Error::InvalidArgument(
            "target spectral radius must lie in ]0, 1[",
        ));
    }
    let rho = load_spectral_radius(snapshot)?;
    if rho == 0.0 {
        return Err(Error::ZeroSpectralRadius);
    }
    Ok(target_rho / rho)
}
