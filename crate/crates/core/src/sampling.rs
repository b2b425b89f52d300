// Seeded sampling of test points for the property verifiers.
//
// Points are drawn log-uniform on [1e-3, 1e3] per entry. The first points of
// every stream are the zero vector and axis-aligned points, where concave
// terms such as √x have their steepest increments.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) const LOG_LO: f64 = -3.0;
pub(crate) const LOG_HI: f64 = 3.0;

pub(crate) struct PointSampler {
    rng: ChaCha8Rng,
    dim: usize,
    emitted: usize,
}

impl PointSampler {
    pub(crate) fn new(dim: usize, seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dim,
            emitted: 0,
        }
    }

    pub(crate) fn log_uniform(&mut self) -> f64 {
        libm::pow(10.0, self.rng.gen_range(LOG_LO..=LOG_HI))
    }

    /// Uniform on `]lo, hi]`.
    pub(crate) fn uniform_open_closed(&mut self, lo: f64, hi: f64) -> f64 {
        // gen::<f64>() is in [0, 1); 1 - u is in ]0, 1]
        let u: f64 = self.rng.gen();
        lo + (hi - lo) * (1.0 - u)
    }

    pub(crate) fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    /// Next base point: zero vector, then one axis point per coordinate, then
    /// fully random points.
    pub(crate) fn next_point(&mut self) -> Vec<f64> {
        let k = self.emitted;
        self.emitted += 1;
        if k == 0 {
            return vec![0.0; self.dim];
        }
        if k <= self.dim {
            let mut x = vec![0.0; self.dim];
            x[k - 1] = self.log_uniform();
            return x;
        }
        (0..self.dim).map(|_| self.log_uniform()).collect()
    }

    /// A nonnegative direction with roughly half of its entries set to zero,
    /// never the zero vector.
    pub(crate) fn next_direction(&mut self) -> Vec<f64> {
        let mut d: Vec<f64> = (0..self.dim)
            .map(|_| if self.coin() { self.log_uniform() } else { 0.0 })
            .collect();
        if d.iter().all(|&v| v == 0.0) {
            let i = self.rng.gen_range(0..self.dim);
            d[i] = self.log_uniform();
        }
        d
    }
}
