//! Bounded signed measures on the line and the density-like function they
//! induce on scale space.
//!
//! A measure is an atomic part (locations with weights of modulus `< 1`) plus
//! a continuous part given by its piecewise-linear cumulative function. The
//! derived function
//!
//! ```text
//! f(x) = exp(-2 * cdf_c(x)) * prod_{a <= x} (1 - w_a) / (1 + w_a)
//! ```
//!
//! is right-continuous, bounded between positive constants `m` and `M`, and
//! piecewise exponential-of-affine, so its primitive integrates in closed
//! form. That exactness is what makes the scale transform in
//! [`super::transform`] analytically invertible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bounded signed measure: atoms plus a continuous part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SignedMeasure {
    /// `(location, weight)` pairs with strictly increasing locations and
    /// `|weight| < 1`.
    #[serde(default)]
    pub atoms: Vec<(f64, f64)>,
    /// Breakpoints `(x, value)` of the piecewise-linear map
    /// `x -> continuous_part((-inf, x])`. Constant before the first and after
    /// the last breakpoint; empty means no continuous part.
    #[serde(default)]
    pub cdf_breakpoints: Vec<(f64, f64)>,
}

impl SignedMeasure {
    pub fn validated(self) -> Result<Self> {
        for &(a, w) in &self.atoms {
            if !a.is_finite() || !w.is_finite() {
                return Err(Error::model("atom locations and weights must be finite"));
            }
            if w.abs() >= 1.0 {
                return Err(Error::model(format!(
                    "atom weight at {a} must satisfy |w| < 1, got {w}"
                )));
            }
        }
        for w in self.atoms.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::model("atom locations must be strictly increasing"));
            }
        }
        for &(x, v) in &self.cdf_breakpoints {
            if !x.is_finite() || !v.is_finite() {
                return Err(Error::model("cdf breakpoints must be finite"));
            }
        }
        for w in self.cdf_breakpoints.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::model("cdf breakpoint abscissas must be strictly increasing"));
            }
        }
        Ok(self)
    }

    /// Dirac measure `weight * delta_location`.
    pub fn dirac(location: f64, weight: f64) -> Result<Self> {
        SignedMeasure { atoms: vec![(location, weight)], cdf_breakpoints: Vec::new() }.validated()
    }

    /// The zero measure.
    pub fn zero() -> Self {
        SignedMeasure::default()
    }

    /// Cumulative function of the continuous part, `x -> nu_c((-inf, x])`.
    pub fn continuous_cdf(&self, x: f64) -> f64 {
        let bp = &self.cdf_breakpoints;
        if bp.is_empty() {
            return 0.0;
        }
        if x <= bp[0].0 {
            return bp[0].1;
        }
        if x >= bp[bp.len() - 1].0 {
            return bp[bp.len() - 1].1;
        }
        let idx = bp.partition_point(|&(bx, _)| bx <= x);
        let (x0, y0) = bp[idx - 1];
        let (x1, y1) = bp[idx];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Slope of the continuous cdf on the open interval containing `x`
    /// (zero on the tails).
    fn cdf_slope_right_of(&self, x: f64) -> f64 {
        let bp = &self.cdf_breakpoints;
        if bp.len() < 2 || x < bp[0].0 || x >= bp[bp.len() - 1].0 {
            return 0.0;
        }
        let idx = bp.partition_point(|&(bx, _)| bx <= x);
        let (x0, y0) = bp[idx - 1];
        let (x1, y1) = bp[idx];
        (y1 - y0) / (x1 - x0)
    }

    /// Right-continuous evaluation of the induced density-like function.
    /// The atom product runs over atoms with location `<= x`.
    pub fn f_nu(&self, x: f64) -> f64 {
        let mut product = 1.0;
        for &(a, w) in &self.atoms {
            if a <= x {
                product *= (1.0 - w) / (1.0 + w);
            } else {
                break;
            }
        }
        (-2.0 * self.continuous_cdf(x)).exp() * product
    }

    /// Total variation of the measure (atoms plus continuous part).
    pub fn total_variation(&self) -> f64 {
        let atom_tv: f64 = self.atoms.iter().map(|&(_, w)| w.abs()).sum();
        let cont_tv: f64 = self
            .cdf_breakpoints
            .windows(2)
            .map(|w| (w[1].1 - w[0].1).abs())
            .sum();
        atom_tv + cont_tv
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.total_variation() == 0.0
    }

    /// Segment decomposition used by the transform: sorted critical points
    /// (atom locations and cdf breakpoints) and, for each of the
    /// `critical.len() + 1` open intervals, the parameters `(scale, rate)` of
    /// `f(x) = scale * exp(rate * x)` on that interval.
    pub(crate) fn segments(&self) -> (Vec<f64>, Vec<(f64, f64)>) {
        let mut critical: Vec<f64> = self
            .atoms
            .iter()
            .map(|&(a, _)| a)
            .chain(self.cdf_breakpoints.iter().map(|&(x, _)| x))
            .collect();
        critical.sort_by(|a, b| a.partial_cmp(b).unwrap());
        critical.dedup();

        let mut params = Vec::with_capacity(critical.len() + 1);
        for i in 0..=critical.len() {
            // pick a representative point inside interval i: for interval
            // [c_{i-1}, c_i) the left endpoint itself is representative
            // because f is right-continuous.
            let (rep, slope) = if i == 0 {
                let rep = critical.first().map_or(0.0, |c| c - 1.0);
                (rep, 0.0)
            } else {
                let lo = critical[i - 1];
                (lo, self.cdf_slope_right_of(lo))
            };
            // f(x) = P * exp(-2 (a + s x)) with cdf(x) = a + s x locally:
            // rate = -2 s, scale = f(rep) * exp(-rate * rep)
            let rate = -2.0 * slope;
            let scale = self.f_nu(rep) * (-rate * rep).exp();
            params.push((scale, rate));
        }
        (critical, params)
    }
}
