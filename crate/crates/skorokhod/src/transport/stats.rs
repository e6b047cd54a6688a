//! Monte Carlo statistics: mean estimates with standard errors, Wilson score
//! intervals for exceedance frequencies, and a deterministic bootstrap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean estimate with its standard error and the confidence level the
/// interval half-width refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
    pub level: f64,
}

impl CiEstimate {
    /// Interval half-width at the stored confidence level (normal quantile).
    pub fn half_width(&self) -> f64 {
        normal_quantile(0.5 + self.level / 2.0) * self.std_error
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width()
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width()
    }
}

/// Sample mean, standard error `s / sqrt(n)`, and a normal-quantile CI.
pub fn ci_mean(values: &[f64], level: f64) -> Result<CiEstimate> {
    if values.len() < 2 {
        return Err(Error::stats(format!(
            "mean confidence interval needs at least two samples, got {}",
            values.len()
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::stats(format!("confidence level must lie in (0,1), got {level}")));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let std_error = (ss / (n - 1.0)).sqrt() / n.sqrt();
    Ok(CiEstimate { mean, std_error, n: values.len(), level })
}

/// Mean and standard error without a stored level (z-rule checks).
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    if values.len() == 1 {
        return (values[0], 0.0);
    }
    let est = ci_mean(values, 0.95).expect("len >= 2");
    (est.mean, est.std_error)
}

/// Standard error of the sample variance via the fourth central moment.
pub fn variance_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2: f64 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4: f64 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let var = m2 * n / (n - 1.0);
    let se = ((m4 - m2 * m2).max(0.0) / n).sqrt();
    (var, se)
}

/// Lower Wilson score bound for a binomial proportion at `z` standard
/// deviations.
pub fn wilson_lower(p_hat: f64, n: usize, z: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let z2 = z * z;
    let center = p_hat + z2 / (2.0 * n);
    let spread = z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - spread) / (1.0 + z2 / n)).max(0.0)
}

/// Median of a sample (average of the middle pair for even sizes).
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Inverse standard normal CDF (Acklam's rational approximation, relative
/// error below 1.15e-9 over (0, 1)).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "normal quantile needs p in (0,1), got {p}");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Deterministic index stream for bootstrap resampling, driven by the same
/// counter hash as the noise source.
pub struct IndexSampler {
    key: u64,
    counter: u64,
}

impl IndexSampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        IndexSampler { key: crate::simulate::mix_seed(seed, stream), counter: 0 }
    }

    /// Uniform index in `0..n`.
    pub fn next_index(&mut self, n: usize) -> usize {
        let bits = crate::simulate::mix_seed(self.key, self.counter);
        self.counter += 1;
        // multiply-shift rejection-free mapping; bias is O(n / 2^64)
        ((bits as u128 * n as u128) >> 64) as usize
    }
}

/// Bootstrap standard error of a statistic of two independent samples.
pub fn bootstrap_se_two_sample(
    a: &[f64],
    b: &[f64],
    reps: usize,
    seed: u64,
    statistic: impl Fn(&[f64], &[f64]) -> f64,
) -> f64 {
    let mut sampler = IndexSampler::new(seed, 0x0b07);
    let mut values = Vec::with_capacity(reps);
    let mut ra = vec![0.0; a.len()];
    let mut rb = vec![0.0; b.len()];
    for _ in 0..reps {
        for slot in ra.iter_mut() {
            *slot = a[sampler.next_index(a.len())];
        }
        for slot in rb.iter_mut() {
            *slot = b[sampler.next_index(b.len())];
        }
        values.push(statistic(&ra, &rb));
    }
    let (_, se_of_mean) = mean_se(&values);
    se_of_mean * (reps as f64).sqrt() // std of the replicates
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_list_has_zero_standard_error() {
        let est = ci_mean(&[2.5, 2.5, 2.5], 0.95).unwrap();
        assert_eq!(est.mean, 2.5);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn two_point_sample_hand_computation() {
        // {0, 1}: mean 0.5, sample std = sqrt(0.5), SE = 0.5
        let est = ci_mean(&[0.0, 1.0], 0.95).unwrap();
        assert_eq!(est.mean, 0.5);
        assert!((est.std_error - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_sample_is_a_stats_error() {
        assert!(matches!(ci_mean(&[1.0], 0.95), Err(Error::Stats(_))));
    }

    #[test]
    fn large_standard_normal_sample_mean_is_near_zero() {
        let n = 100_000;
        let values: Vec<f64> = (0..n)
            .map(|i| crate::simulate::standard_normal(7, i as u64, 0, 0, 1))
            .collect();
        let est = ci_mean(&values, 0.95).unwrap();
        assert!(est.mean.abs() <= 4.0 / (n as f64).sqrt(), "mean {}", est.mean);
    }

    #[test]
    fn normal_quantile_reference_values() {
        assert!((normal_quantile(0.5)).abs() < 1e-9);
        assert!((normal_quantile(0.975) - 1.959963984540054).abs() < 1e-7);
        assert!((normal_quantile(0.025) + 1.959963984540054).abs() < 1e-7);
        assert!((normal_quantile(0.9986501019683699) - 3.0).abs() < 1e-6);
    }

    #[test]
    fn wilson_lower_is_conservative_and_monotone_in_n() {
        let lo_small = wilson_lower(0.3, 10, 3.0);
        let lo_big = wilson_lower(0.3, 10_000, 3.0);
        assert!(lo_small < lo_big);
        assert!(lo_big < 0.3);
        assert_eq!(wilson_lower(0.0, 100, 3.0), 0.0);
    }

    #[test]
    fn median_of_odd_and_even_samples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn variance_se_matches_normal_theory_roughly() {
        let n = 200_000;
        let values: Vec<f64> = (0..n)
            .map(|i| crate::simulate::standard_normal(13, i as u64, 0, 0, 1))
            .collect();
        let (var, se) = variance_se(&values);
        assert!((var - 1.0).abs() < 4.0 * se, "var {var} se {se}");
        // for a normal sample the variance SE is sqrt(2/n)
        assert!((se - (2.0 / n as f64).sqrt()).abs() < 0.3 * se);
    }

    #[test]
    fn bootstrap_is_deterministic() {
        let a: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..50).map(|i| (i * i) as f64 * 0.01).collect();
        let stat = |x: &[f64], y: &[f64]| {
            x.iter().sum::<f64>() / x.len() as f64 - y.iter().sum::<f64>() / y.len() as f64
        };
        let s1 = bootstrap_se_two_sample(&a, &b, 100, 9, stat);
        let s2 = bootstrap_se_two_sample(&a, &b, 100, 9, stat);
        assert_eq!(s1, s2);
        assert!(s1 > 0.0);
    }
}
