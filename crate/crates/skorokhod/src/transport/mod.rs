//! Empirical optimal transport and path-space metrics.
//!
//! One-dimensional Wasserstein distances use the sorted (comonotone)
//! coupling; general dimension goes through the exact assignment solver in
//! [`assignment`]. Entropy never comes from samples here — the measure-change
//! couplings provide it exactly — so the module stays purely geometric.

mod assignment;
mod stats;

pub use assignment::solve_assignment;
pub use stats::{
    bootstrap_se_two_sample, ci_mean, mean_se, median, normal_quantile, variance_se, wilson_lower,
    CiEstimate, IndexSampler,
};

use crate::error::{Error, Result};
use crate::simulate::Path;

/// Hard cap on the assignment size; the solver is cubic in `n`.
pub const ASSIGNMENT_CAP: usize = 4096;

/// A sampled measure on `R^d`: `n` rows of dimension `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    samples: Vec<f64>,
    n: usize,
    dim: usize,
}

impl EmpiricalMeasure {
    pub fn new(samples: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || samples.is_empty() || samples.len() % dim != 0 {
            return Err(Error::config("empirical measure needs n >= 1 rows of fixed dimension"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("empirical measure samples must be finite"));
        }
        let n = samples.len() / dim;
        Ok(EmpiricalMeasure { samples, n, dim })
    }

    pub fn from_scalars(values: Vec<f64>) -> Result<Self> {
        EmpiricalMeasure::new(values, 1)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.samples[i * self.dim..(i + 1) * self.dim]
    }

    pub fn scalars(&self) -> Result<&[f64]> {
        if self.dim != 1 {
            return Err(Error::config("scalar view requires dimension one"));
        }
        Ok(&self.samples)
    }
}

/// Order-p Wasserstein distance between one-dimensional samples via the
/// sorted coupling. Unequal sizes are resampled to the larger count by
/// quantile matching at levels `k/(n+1)`, which is deterministic and
/// monotone.
pub fn wasserstein_1d(a: &EmpiricalMeasure, b: &EmpiricalMeasure, p: f64) -> Result<f64> {
    if a.dim() != 1 || b.dim() != 1 {
        return Err(Error::config("the sorted coupling applies to one-dimensional samples"));
    }
    if !(p >= 1.0) {
        return Err(Error::config(format!("Wasserstein order must satisfy p >= 1, got {p}")));
    }
    let mut xs = a.scalars()?.to_vec();
    let mut ys = b.scalars()?.to_vec();
    xs.sort_by(|u, v| u.partial_cmp(v).unwrap());
    ys.sort_by(|u, v| u.partial_cmp(v).unwrap());
    if xs.len() != ys.len() {
        let n = xs.len().max(ys.len());
        xs = quantile_resample(&xs, n);
        ys = quantile_resample(&ys, n);
    }
    let n = xs.len() as f64;
    let mean: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - y).abs().powf(p))
        .sum::<f64>()
        / n;
    Ok(mean.powf(1.0 / p))
}

/// Empirical quantiles of a sorted sample at levels `k/(n+1)`, `k = 1..=n`,
/// with linear interpolation between order statistics.
fn quantile_resample(sorted: &[f64], n: usize) -> Vec<f64> {
    let m = sorted.len();
    (1..=n)
        .map(|k| {
            let level = k as f64 / (n as f64 + 1.0);
            let pos = level * (m as f64 + 1.0);
            if pos <= 1.0 {
                sorted[0]
            } else if pos >= m as f64 {
                sorted[m - 1]
            } else {
                let lo = pos.floor() as usize - 1;
                let frac = pos - pos.floor();
                sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
            }
        })
        .collect()
}

/// Order-p Wasserstein distance in any dimension by solving the `n x n`
/// assignment problem on costs `|a_i - b_j|^p` exactly.
pub fn wasserstein_exact(a: &EmpiricalMeasure, b: &EmpiricalMeasure, p: f64) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::config("sample dimensions differ"));
    }
    if a.len() != b.len() {
        return Err(Error::config(format!(
            "exact transport needs equal sample counts, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() > ASSIGNMENT_CAP {
        return Err(Error::config(format!(
            "exact transport is capped at n = {ASSIGNMENT_CAP} (cubic solver), got {}",
            a.len()
        )));
    }
    if !(p >= 1.0) {
        return Err(Error::config(format!("Wasserstein order must satisfy p >= 1, got {p}")));
    }
    let n = a.len();
    let d = a.dim();
    let mut cost = vec![0.0; n * n];
    for i in 0..n {
        let ai = a.point(i);
        for j in 0..n {
            let bj = b.point(j);
            let mut dist2 = 0.0;
            for k in 0..d {
                dist2 += (ai[k] - bj[k]) * (ai[k] - bj[k]);
            }
            cost[i * n + j] = dist2.sqrt().powf(p);
        }
    }
    let (_, total) = solve_assignment(&cost, n);
    Ok((total / n as f64).powf(1.0 / p))
}

fn check_same_grid(a: &Path, b: &Path) -> Result<()> {
    if a.dim != b.dim || a.n_steps() != b.n_steps() || a.dt != b.dt {
        return Err(Error::config("paths live on different grids"));
    }
    Ok(())
}

/// Discrete L2 path distance `sqrt(sum_k |a_k - b_k|^2 dt)` over the left
/// endpoints.
pub fn path_d2(a: &Path, b: &Path) -> Result<f64> {
    check_same_grid(a, b)?;
    let n = a.n_steps();
    let mut acc = 0.0;
    for k in 0..n {
        let (xa, xb) = (a.state(k), b.state(k));
        let mut step = 0.0;
        for i in 0..a.dim {
            step += (xa[i] - xb[i]) * (xa[i] - xb[i]);
        }
        acc += step;
    }
    Ok((acc * a.dt).sqrt())
}

/// Uniform path distance `max_k |a_k - b_k|` over all grid points.
pub fn path_dinf(a: &Path, b: &Path) -> Result<f64> {
    check_same_grid(a, b)?;
    let mut worst = 0.0_f64;
    for k in 0..=a.n_steps() {
        let (xa, xb) = (a.state(k), b.state(k));
        let mut step = 0.0;
        for i in 0..a.dim {
            step += (xa[i] - xb[i]) * (xa[i] - xb[i]);
        }
        worst = worst.max(step.sqrt());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::standard_normal;

    fn scalars(values: &[f64]) -> EmpiricalMeasure {
        EmpiricalMeasure::from_scalars(values.to_vec()).unwrap()
    }

    #[test]
    fn identical_samples_have_zero_distance() {
        let a = scalars(&[1.0, -2.0, 0.5]);
        assert_eq!(wasserstein_1d(&a, &a, 1.0).unwrap(), 0.0);
        assert_eq!(wasserstein_exact(&a, &a, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn translation_moves_every_order_by_the_shift() {
        let a = scalars(&[0.0, 1.0, 5.0, -3.0]);
        let shift = 0.75;
        let b = scalars(&a.scalars().unwrap().iter().map(|v| v + shift).collect::<Vec<_>>());
        for p in [1.0, 2.0, 3.5] {
            let w = wasserstein_1d(&a, &b, p).unwrap();
            assert!((w - shift).abs() < 1e-12, "p = {p}: {w}");
        }
    }

    #[test]
    fn two_point_instance_matches_brute_force() {
        // a = {0, 1}, b = {0.5, 0.5}, p = 2: both pairings cost sqrt(0.25)
        let a = scalars(&[0.0, 1.0]);
        let b = scalars(&[0.5, 0.5]);
        assert!((wasserstein_1d(&a, &b, 2.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn planar_two_point_instance() {
        let a = EmpiricalMeasure::new(vec![0.0, 0.0, 1.0, 0.0], 2).unwrap();
        let b = EmpiricalMeasure::new(vec![0.0, 1.0, 1.0, 1.0], 2).unwrap();
        let w = wasserstein_exact(&a, &b, 2.0).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn permuted_cloud_has_zero_exact_distance() {
        let a = EmpiricalMeasure::new(vec![0.0, 0.0, 1.0, 2.0, -1.0, 0.5], 2).unwrap();
        let b = EmpiricalMeasure::new(vec![-1.0, 0.5, 0.0, 0.0, 1.0, 2.0], 2).unwrap();
        assert_eq!(wasserstein_exact(&a, &b, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn exact_agrees_with_sorted_coupling_in_one_dimension() {
        let n = 64;
        let a = scalars(&(0..n).map(|i| standard_normal(3, i, 0, 0, 1)).collect::<Vec<_>>());
        let b = scalars(
            &(0..n).map(|i| 0.4 + 0.9 * standard_normal(4, i, 0, 0, 1)).collect::<Vec<_>>(),
        );
        for p in [1.0, 2.0] {
            let w_sorted = wasserstein_1d(&a, &b, p).unwrap();
            let w_exact = wasserstein_exact(&a, &b, p).unwrap();
            assert!((w_sorted - w_exact).abs() < 1e-10, "p = {p}: {w_sorted} vs {w_exact}");
        }
    }

    #[test]
    fn unequal_sizes_resample_deterministically() {
        let a = scalars(&(0..40).map(|i| i as f64 * 0.1).collect::<Vec<_>>());
        let b = scalars(&(0..25).map(|i| i as f64 * 0.16).collect::<Vec<_>>());
        let w1 = wasserstein_1d(&a, &b, 2.0).unwrap();
        let w2 = wasserstein_1d(&a, &b, 2.0).unwrap();
        assert_eq!(w1, w2);
        assert!(w1.is_finite());
    }

    #[test]
    fn invalid_order_is_a_config_error() {
        let a = scalars(&[0.0, 1.0]);
        assert!(wasserstein_1d(&a, &a, 0.5).is_err());
        assert!(wasserstein_exact(&a, &a, 0.99).is_err());
    }

    #[test]
    fn path_metrics_on_constant_offset() {
        let mut a = Path::with_capacity(1, 0.1, 10);
        let mut b = Path::with_capacity(1, 0.1, 10);
        for k in 0..=10 {
            a.push_state(&[k as f64]);
            b.push_state(&[k as f64 + 2.0]);
        }
        // offset c over [0, T]: d2 = c sqrt(T), dinf = c
        let d2 = path_d2(&a, &b).unwrap();
        assert!((d2 - 2.0 * 1.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(path_dinf(&a, &b).unwrap(), 2.0);
        assert_eq!(path_d2(&a, &a).unwrap(), 0.0);
        assert_eq!(path_dinf(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn linear_ramp_d2_approaches_the_integral() {
        // a(t) = t, b = 0 on [0,1]: d2 -> 1/sqrt(3); left-endpoint rule is
        // within dt of the limit
        let n = 10_000;
        let dt = 1.0 / n as f64;
        let mut a = Path::with_capacity(1, dt, n);
        let mut b = Path::with_capacity(1, dt, n);
        for k in 0..=n {
            a.push_state(&[k as f64 * dt]);
            b.push_state(&[0.0]);
        }
        let d2 = path_d2(&a, &b).unwrap();
        assert!((d2 - 1.0 / 3.0_f64.sqrt()).abs() < dt * 1.0);
    }

    #[test]
    fn single_spike_controls_the_sup_metric() {
        let mut a = Path::with_capacity(1, 0.5, 4);
        let mut b = Path::with_capacity(1, 0.5, 4);
        for k in 0..=4 {
            a.push_state(&[0.0]);
            b.push_state(&[if k == 2 { 3.5 } else { 0.0 }]);
        }
        assert_eq!(path_dinf(&a, &b).unwrap(), 3.5);
    }

    #[test]
    fn grid_mismatch_is_a_config_error() {
        let mut a = Path::with_capacity(1, 0.1, 2);
        let mut b = Path::with_capacity(1, 0.2, 2);
        for k in 0..=2 {
            a.push_state(&[k as f64]);
            b.push_state(&[k as f64]);
        }
        assert!(path_d2(&a, &b).is_err());
        assert!(path_dinf(&a, &b).is_err());
    }
}
