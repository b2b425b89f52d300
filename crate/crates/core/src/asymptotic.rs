//! Asymptotic mappings `T∞(x) = lim_{t→∞} (1/t) T(tx)`.
//!
//! Every shipped mapping family has a linear asymptotic mapping, so
//! [`build_asymptotic`] always returns [`AsymptoticMapping::AnalyticLinear`].
//! [`NumericLimit`] evaluates the scaling limit directly and serves as an
//! independent cross-check of the analytic matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mapping::{InterferenceMapping, Mapping};
use crate::matrix::Matrix;
use crate::property::{sup, PropertyReport};
use crate::sampling::PointSampler;

pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// `t = 4ᵏ` for `k = 1..=45`.
pub fn default_t_schedule() -> Vec<f64> {
    (1..=45).map(|k| libm::pow(4.0, k as f64)).collect()
}

/// Scaling-limit evaluation of `T∞` over an increasing `t` schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericLimit {
    source: InterferenceMapping,
    t_schedule: Vec<f64>,
    rel_tol: f64,
}

impl NumericLimit {
    pub fn new(source: InterferenceMapping) -> Self {
        Self {
            source,
            t_schedule: default_t_schedule(),
            rel_tol: DEFAULT_REL_TOL,
        }
    }

    pub fn with_schedule(
        source: InterferenceMapping,
        t_schedule: Vec<f64>,
        rel_tol: f64,
    ) -> Result<Self> {
        if t_schedule.len() < 2 {
            return Err(Error::InvalidArgument(
                "t schedule needs at least two points",
            ));
        }
        if !t_schedule.iter().all(|&t| t.is_finite() && t > 0.0)
            || t_schedule.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidArgument(
                "t schedule must be positive and strictly increasing",
            ));
        }
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::InvalidArgument("relative tolerance must be > 0"));
        }
        Ok(Self {
            source,
            t_schedule,
            rel_tol,
        })
    }

    pub fn source(&self) -> &InterferenceMapping {
        &self.source
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if x.iter().all(|&v| v == 0.0) {
            out.iter_mut().for_each(|o| *o = 0.0);
            return Ok(());
        }
        let n = x.len();
        let scale = sup(x);
        let mut tx = vec![0.0; n];
        let mut prev: Option<Vec<f64>> = None;
        let mut last_change = f64::INFINITY;
        for &t in &self.t_schedule {
            tx.iter_mut().zip(x).for_each(|(a, b)| *a = t * b);
            self.source.eval_into(&tx, out);
            out.iter_mut().for_each(|o| *o /= t);
            if let Some(p) = &prev {
                let change = out
                    .iter()
                    .zip(p)
                    .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()));
                // relative to max(‖y‖∞, ‖x‖∞): T∞ is homogeneous, so ‖x‖ sets the scale
                last_change = change / f64::max(sup(out), scale);
                if last_change < self.rel_tol {
                    return Ok(());
                }
            }
            prev = Some(out.to_vec());
        }
        Err(Error::LimitNotConverged { last_change })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AsymptoticMapping {
    /// `T∞(x) = M x` with `M ≥ 0`.
    AnalyticLinear(Matrix),
    NumericLimit(NumericLimit),
}

impl AsymptoticMapping {
    pub fn dim(&self) -> usize {
        match self {
            Self::AnalyticLinear(m) => m.dim(),
            Self::NumericLimit(l) => l.source.dim(),
        }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self, Self::AnalyticLinear(_))
    }

    /// Writes `T∞(x)` into `out` without validating `x`.
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            Self::AnalyticLinear(m) => {
                m.mul_vec_into(x, out);
                Ok(())
            }
            Self::NumericLimit(l) => l.eval_into(x, out),
        }
    }

    /// `T∞(x)` for a finite nonnegative `x` of matching dimension.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        crate::vector::NonnegVector::new(x.to_vec())?;
        let mut out = vec![0.0; x.len()];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }

    /// The matrix of a linear backend multiplied by `beta`; numeric backends
    /// wrap a scaled source.
    pub fn scaled(&self, beta: f64) -> Result<Self> {
        match self {
            Self::AnalyticLinear(m) => Ok(Self::AnalyticLinear(m.scaled(beta))),
            Self::NumericLimit(l) => Ok(Self::NumericLimit(NumericLimit {
                source: crate::mapping::scale_mapping(l.source.clone(), beta)?,
                t_schedule: l.t_schedule.clone(),
                rel_tol: l.rel_tol,
            })),
        }
    }
}

/// Builds `T∞` for a shipped mapping. Offsets and square-root terms grow
/// sublinearly and vanish in the limit; scaling commutes with it.
pub fn build_asymptotic(mapping: &InterferenceMapping) -> AsymptoticMapping {
    match mapping {
        InterferenceMapping::Affine { matrix, .. }
        | InterferenceMapping::ConcaveComposite { matrix, .. } => {
            AsymptoticMapping::AnalyticLinear(matrix.clone())
        }
        InterferenceMapping::LoadCoupling(snapshot) => snapshot.asymptotic(),
        InterferenceMapping::Scaled { inner, beta } => match build_asymptotic(inner) {
            AsymptoticMapping::AnalyticLinear(m) => {
                AsymptoticMapping::AnalyticLinear(m.scaled(*beta))
            }
            AsymptoticMapping::NumericLimit(_) => {
                AsymptoticMapping::NumericLimit(NumericLimit::new(mapping.clone()))
            }
        },
    }
}

fn sample_pair(sampler: &mut PointSampler) -> (Vec<f64>, Vec<f64>) {
    let x = sampler.next_point();
    let d = sampler.next_direction();
    (x, d)
}

/// Checks `T(x + d) − T(x) ≤ T∞(d)` on sampled `(x, d)`, the sup
/// characterization of asymptotic functions of convex mappings.
pub fn verify_convex_sup(
    mapping: &InterferenceMapping,
    am: &AsymptoticMapping,
    n_samples: usize,
    seed: u64,
) -> Result<PropertyReport> {
    if !mapping.is_convex() {
        return Err(Error::RequiresConvex);
    }
    let n = mapping.dim();
    check_dims(n, am)?;
    let mut sampler = PointSampler::new(n, seed);
    let mut report = PropertyReport::new("convex_sup");
    let (mut tx, mut txd, mut td) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for _ in 0..n_samples {
        let (x, d) = sample_pair(&mut sampler);
        let xd: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
        mapping.eval_into(&x, &mut tx);
        mapping.eval_into(&xd, &mut txd);
        am.eval_into(&d, &mut td)?;
        let diff: Vec<f64> = txd.iter().zip(&tx).map(|(a, b)| a - b).collect();
        let slack = 1e-10 * (1.0 + sup(&txd));
        report.check_le(&diff, &td, slack, || vec![x.clone(), d.clone()]);
        report.samples_tested += 1;
    }
    Ok(report)
}

/// Point where [`verify_concave_inf`] checks that the infimum is approached.
pub const FAR_POINT: f64 = 1e6;
/// Allowed gap `T(x + d) − T(x) − T∞(d)` at `x = FAR_POINT · 1`, relative to
/// `1 + |T∞(d)ᵢ|`.
pub const FAR_GAP_TOL: f64 = 1e-3;

/// Checks `T(x + d) − T(x) ≥ T∞(d)` on sampled `(x, d)`, the inf
/// characterization for nonnegative concave mappings, and that the gap closes
/// far out: at `x = 1e6 · 1` and `d = 1` the difference exceeds `T∞(d)` by at
/// most `1e-3 · (1 + |T∞(d)ᵢ|)`.
pub fn verify_concave_inf(
    mapping: &InterferenceMapping,
    am: &AsymptoticMapping,
    n_samples: usize,
    seed: u64,
) -> Result<PropertyReport> {
    if !mapping.is_concave() {
        return Err(Error::RequiresConcave);
    }
    let n = mapping.dim();
    check_dims(n, am)?;
    let mut sampler = PointSampler::new(n, seed);
    let mut report = PropertyReport::new("concave_inf");
    let (mut tx, mut txd, mut td) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for _ in 0..n_samples {
        let (x, d) = sample_pair(&mut sampler);
        let xd: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
        mapping.eval_into(&x, &mut tx);
        mapping.eval_into(&xd, &mut txd);
        am.eval_into(&d, &mut td)?;
        let diff: Vec<f64> = txd.iter().zip(&tx).map(|(a, b)| a - b).collect();
        let slack = 1e-10 * (1.0 + sup(&txd));
        report.check_le(&td, &diff, slack, || vec![x.clone(), d.clone()]);
        report.samples_tested += 1;
    }

    let x = vec![FAR_POINT; n];
    let d = vec![1.0; n];
    let xd: Vec<f64> = x.iter().map(|v| v + 1.0).collect();
    mapping.eval_into(&x, &mut tx);
    mapping.eval_into(&xd, &mut txd);
    am.eval_into(&d, &mut td)?;
    let gap: Vec<f64> = (0..n).map(|i| txd[i] - tx[i] - td[i]).collect();
    let allowed: Vec<f64> = td.iter().map(|v| FAR_GAP_TOL * (1.0 + v.abs())).collect();
    report.check_le(&gap, &allowed, 0.0, || vec![x.clone(), d.clone()]);
    report.samples_tested += 1;
    Ok(report)
}

fn check_dims(n: usize, am: &AsymptoticMapping) -> Result<()> {
    if am.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: am.dim(),
        });
    }
    Ok(())
}

/// Checks `T∞(αx) = α T∞(x)` for sampled `x` and `α ∈ ]0, 10]`. Analytic
/// backends are held to `1e-9` relative to the sup norm of the image; numeric
/// backends to ten times their limit tolerance.
pub fn check_homogeneity(
    am: &AsymptoticMapping,
    n_samples: usize,
    seed: u64,
) -> Result<PropertyReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1"));
    }
    let tol = match am {
        AsymptoticMapping::AnalyticLinear(_) => 1e-9,
        AsymptoticMapping::NumericLimit(l) => f64::max(1e-9, 10.0 * l.rel_tol),
    };
    let n = am.dim();
    let mut sampler = PointSampler::new(n, seed);
    let mut report = PropertyReport::new("homogeneity");
    let (mut tx, mut tax) = (vec![0.0; n], vec![0.0; n]);
    for _ in 0..n_samples {
        let x = sampler.next_point();
        let alpha = sampler.uniform_open_closed(0.0, 10.0);
        let ax: Vec<f64> = x.iter().map(|v| alpha * v).collect();
        am.eval_into(&x, &mut tx)?;
        am.eval_into(&ax, &mut tax)?;
        let scaled: Vec<f64> = tx.iter().map(|v| alpha * v).collect();
        let slack = tol * f64::max(sup(&scaled), sup(&tax));
        let gap: Vec<f64> = tax
            .iter()
            .zip(&scaled)
            .map(|(a, b)| (a - b).abs())
            .collect();
        report.check_le(&gap, &vec![0.0; n], slack, || vec![x.clone(), vec![alpha]]);
        report.samples_tested += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::scale_mapping;
    use crate::vector::{NonnegVector, PositiveVector};

    fn circulant() -> Matrix {
        Matrix::from_rows(&[vec![0.2, 0.5], vec![0.5, 0.2]]).unwrap()
    }

    fn concave() -> InterferenceMapping {
        InterferenceMapping::concave_composite(
            circulant(),
            PositiveVector::new(vec![1.0, 2.0]).unwrap(),
            NonnegVector::new(vec![1.0, 3.0]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn affine_offset_vanishes() {
        let a = Matrix::from_rows(&[vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap();
        let t =
            InterferenceMapping::affine(a.clone(), PositiveVector::new(vec![7.0, 9.0]).unwrap())
                .unwrap();
        assert_eq!(
            build_asymptotic(&t),
            AsymptoticMapping::AnalyticLinear(a.clone())
        );
        let s = scale_mapping(t, 2.0).unwrap();
        assert_eq!(
            build_asymptotic(&s),
            AsymptoticMapping::AnalyticLinear(a.scaled(2.0))
        );
    }

    #[test]
    fn concave_composite_limit_is_linear_part() {
        let t = concave();
        assert_eq!(
            build_asymptotic(&t),
            AsymptoticMapping::AnalyticLinear(circulant())
        );
        // (1/t) T(t x) at t = 1e12 is within 1e-5 of A x
        let x = [1.0, 1.0];
        let big: Vec<f64> = t.eval(&[1e12, 1e12]).iter().map(|v| v / 1e12).collect();
        let ax = circulant().mul_vec(&x);
        assert!(big.iter().zip(&ax).all(|(a, b)| (a - b).abs() < 1e-5));
    }

    #[test]
    fn analytic_apply() {
        let am = AsymptoticMapping::AnalyticLinear(circulant());
        let y = am.apply(&[1.0, 1.0]).unwrap();
        assert!((y[0] - 0.7).abs() < 1e-15 && (y[1] - 0.7).abs() < 1e-15);
        assert_eq!(am.apply(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert!(am.apply(&[1.0]).is_err());
    }

    #[test]
    fn numeric_limit_matches_analytic() {
        let numeric = AsymptoticMapping::NumericLimit(NumericLimit::new(concave()));
        let analytic = build_asymptotic(&concave());
        for x in [[1.0, 1.0], [3.0, 0.0], [1e-3, 1e3]] {
            let a = analytic.apply(&x).unwrap();
            let b = numeric.apply(&x).unwrap();
            for i in 0..2 {
                assert!(
                    (a[i] - b[i]).abs() <= 1e-6 * f64::max(1.0, a[i].abs()),
                    "{x:?}"
                );
            }
        }
        assert_eq!(numeric.apply(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn numeric_limit_reports_short_schedule() {
        let nl = NumericLimit::with_schedule(concave(), vec![1.0, 2.0, 4.0], 1e-8).unwrap();
        let am = AsymptoticMapping::NumericLimit(nl);
        assert!(matches!(
            am.apply(&[1.0, 1.0]),
            Err(Error::LimitNotConverged { .. })
        ));
        assert!(NumericLimit::with_schedule(concave(), vec![2.0, 1.0], 1e-8).is_err());
        assert!(NumericLimit::with_schedule(concave(), vec![1.0], 1e-8).is_err());
    }

    #[test]
    fn characterizations() {
        let t = concave();
        let am = build_asymptotic(&t);
        assert!(verify_concave_inf(&t, &am, 200, 1).unwrap().passed());
        assert_eq!(
            verify_convex_sup(&t, &am, 10, 1),
            Err(Error::RequiresConvex)
        );

        let affine =
            InterferenceMapping::affine(circulant(), PositiveVector::ones(2).unwrap()).unwrap();
        let am = build_asymptotic(&affine);
        assert!(verify_convex_sup(&affine, &am, 200, 2).unwrap().passed());
        assert!(verify_concave_inf(&affine, &am, 200, 3).unwrap().passed());
        let scaled = scale_mapping(affine, 4.0).unwrap();
        assert!(
            verify_convex_sup(&scaled, &build_asymptotic(&scaled), 200, 4)
                .unwrap()
                .passed()
        );
    }

    #[test]
    fn far_gap_of_concave_composite() {
        let t = concave();
        let am = build_asymptotic(&t);
        let x = [1e6, 1e6];
        let xd = [1e6 + 1.0, 1e6 + 1.0];
        let td = am.apply(&[1.0, 1.0]).unwrap();
        let (a, b) = (t.eval(&xd), t.eval(&x));
        for i in 0..2 {
            assert!(a[i] - b[i] - td[i] < 1e-3 * 3.0);
        }
    }

    #[test]
    fn concave_inf_catches_wrong_asymptote() {
        let t = concave();
        let wrong = AsymptoticMapping::AnalyticLinear(circulant().scaled(1.5));
        assert!(!verify_concave_inf(&t, &wrong, 100, 5).unwrap().passed());
        let small = AsymptoticMapping::AnalyticLinear(circulant().scaled(0.5));
        // a too-small asymptote satisfies the inequality but not the far gap
        let r = verify_concave_inf(&t, &small, 100, 5).unwrap();
        assert_eq!(r.violation_count, 1);
    }

    #[test]
    fn homogeneity() {
        let am = AsymptoticMapping::AnalyticLinear(circulant());
        assert!(check_homogeneity(&am, 200, 1).unwrap().passed());
        let numeric = AsymptoticMapping::NumericLimit(NumericLimit::new(concave()));
        assert!(check_homogeneity(&numeric, 100, 2).unwrap().passed());
    }
}
