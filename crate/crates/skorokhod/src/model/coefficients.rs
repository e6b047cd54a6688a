//! Parametric drift and diffusion families with user-declared analytic
//! constants.
//!
//! The closed families (affine, scalar piecewise-affine, constant matrix)
//! cover every model used by the check suite; the callback escape hatch
//! exists so transformed one-dimensional coefficients that leave the closed
//! families stay usable.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::linalg;
use super::piecewise::PiecewiseAffine;
use crate::error::{Error, Result};

pub type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Drift field `b : R^d -> R^d`.
#[derive(Clone)]
pub enum Drift {
    /// `b(x) = A x + c`, row-major `A`.
    Affine { matrix: Vec<f64>, offset: Vec<f64> },
    /// One-dimensional piecewise-affine drift.
    ScalarPiecewise(PiecewiseAffine),
    /// One-dimensional callback, identified by a stable id for report echoes.
    Custom { id: String, func: Arc<ScalarFn> },
}

impl fmt::Debug for Drift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Drift::Affine { matrix, offset } => {
                f.debug_struct("Affine").field("matrix", matrix).field("offset", offset).finish()
            }
            Drift::ScalarPiecewise(p) => f.debug_tuple("ScalarPiecewise").field(p).finish(),
            Drift::Custom { id, .. } => f.debug_struct("Custom").field("id", id).finish(),
        }
    }
}

impl Drift {
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Drift::Affine { matrix, offset } => {
                let d = x.len();
                for i in 0..d {
                    let mut acc = offset[i];
                    for j in 0..d {
                        acc += matrix[i * d + j] * x[j];
                    }
                    out[i] = acc;
                }
            }
            Drift::ScalarPiecewise(p) => out[0] = p.eval(x[0]),
            Drift::Custom { func, .. } => out[0] = func(x[0]),
        }
    }

    /// Scalar evaluation; only valid in dimension one.
    pub fn eval1(&self, x: f64) -> f64 {
        let mut out = [0.0];
        self.eval_into(&[x], &mut out);
        out[0]
    }
}

/// Diffusion field `sigma : R^d -> R^{d x d}` (scalar in dimension one).
#[derive(Clone)]
pub enum Diffusion {
    /// Constant matrix, row-major.
    Constant { matrix: Vec<f64> },
    /// One-dimensional piecewise-affine diffusion coefficient.
    ScalarPiecewise(PiecewiseAffine),
    /// One-dimensional callback.
    Custom { id: String, func: Arc<ScalarFn> },
}

impl fmt::Debug for Diffusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diffusion::Constant { matrix } => {
                f.debug_struct("Constant").field("matrix", matrix).finish()
            }
            Diffusion::ScalarPiecewise(p) => f.debug_tuple("ScalarPiecewise").field(p).finish(),
            Diffusion::Custom { id, .. } => f.debug_struct("Custom").field("id", id).finish(),
        }
    }
}

impl Diffusion {
    /// `out = sigma(x) v`.
    pub fn apply_into(&self, x: &[f64], v: &[f64], out: &mut [f64]) {
        match self {
            Diffusion::Constant { matrix } => {
                let d = v.len();
                for i in 0..d {
                    let mut acc = 0.0;
                    for j in 0..d {
                        acc += matrix[i * d + j] * v[j];
                    }
                    out[i] = acc;
                }
            }
            Diffusion::ScalarPiecewise(p) => out[0] = p.eval(x[0]) * v[0],
            Diffusion::Custom { func, .. } => out[0] = func(x[0]) * v[0],
        }
    }

    /// `out = sigma(x)^{-1} v`; fails on a singular coefficient.
    pub fn solve_into(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            Diffusion::Constant { matrix } => linalg::solve(matrix, v, out),
            Diffusion::ScalarPiecewise(_) | Diffusion::Custom { .. } => {
                let s = self.eval1(x[0]);
                if s.abs() < 1e-300 {
                    return Err(Error::model(format!(
                        "diffusion coefficient vanishes at x = {}",
                        x[0]
                    )));
                }
                out[0] = v[0] / s;
                Ok(())
            }
        }
    }

    /// Scalar evaluation; only valid in dimension one.
    pub fn eval1(&self, x: f64) -> f64 {
        match self {
            Diffusion::Constant { matrix } => matrix[0],
            Diffusion::ScalarPiecewise(p) => p.eval(x),
            Diffusion::Custom { func, .. } => func(x),
        }
    }
}

/// User-declared analytic constants of a coefficient pair. The simulator and
/// checks take these at face value and validate them on grids rather than
/// inferring them; black-box coefficients make global inference impossible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredConstants {
    /// Exponential contraction rate of the pair (units 1/time).
    pub dissipativity: f64,
    /// Sup norm of the diffusion coefficient.
    pub diffusion_sup: f64,
    /// Global Lipschitz constant of the diffusion coefficient.
    #[serde(default)]
    pub diffusion_lip: f64,
    /// Ellipticity floor: `sigma^t sigma >= ellipticity * I`.
    #[serde(default)]
    pub ellipticity: f64,
    /// Lipschitz-type constant controlling the diffusion along coupling
    /// directions (enters the power-Harnack constants).
    #[serde(default)]
    pub coupling_lip: f64,
}

impl DeclaredConstants {
    pub fn validated(self) -> Result<Self> {
        let fields = [
            ("dissipativity", self.dissipativity),
            ("diffusion_sup", self.diffusion_sup),
            ("diffusion_lip", self.diffusion_lip),
            ("ellipticity", self.ellipticity),
            ("coupling_lip", self.coupling_lip),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::config(format!(
                    "declared constant {name} must be a nonnegative finite real, got {v}"
                )));
            }
        }
        Ok(self)
    }
}

/// A drift/diffusion pair with its declared constants.
#[derive(Debug, Clone)]
pub struct CoefficientSpec {
    pub dim: usize,
    pub drift: Drift,
    pub diffusion: Diffusion,
    pub constants: DeclaredConstants,
}

impl CoefficientSpec {
    pub fn validated(self) -> Result<Self> {
        if self.dim == 0 {
            return Err(Error::config("state dimension must be at least one"));
        }
        let scalar_only = |what: &str| {
            Err(Error::config(format!(
                "{what} coefficients are one-dimensional but the declared dimension is {}",
                self.dim
            )))
        };
        match &self.drift {
            Drift::Affine { matrix, offset } => {
                if matrix.len() != self.dim * self.dim || offset.len() != self.dim {
                    return Err(Error::config(
                        "affine drift matrix/offset shape does not match the dimension",
                    ));
                }
            }
            Drift::ScalarPiecewise(_) | Drift::Custom { .. } if self.dim != 1 => {
                return scalar_only("scalar drift");
            }
            _ => {}
        }
        match &self.diffusion {
            Diffusion::Constant { matrix } => {
                if matrix.len() != self.dim * self.dim {
                    return Err(Error::config(
                        "constant diffusion matrix shape does not match the dimension",
                    ));
                }
            }
            Diffusion::ScalarPiecewise(_) | Diffusion::Custom { .. } if self.dim != 1 => {
                return scalar_only("scalar diffusion");
            }
            _ => {}
        }
        let constants = self.constants.validated()?;
        Ok(CoefficientSpec { constants, ..self })
    }
}

/// Grid report for the dissipativity condition
/// `||sigma(x)-sigma(y)||_HS^2 + 2<x-y, b(x)-b(y)> <= -2 delta |x-y|^2`.
#[derive(Debug, Clone, Serialize)]
pub struct DissipativityReport {
    /// Maximum over the grid of the left side plus `2 delta |x-y|^2`
    /// (nonpositive iff the condition holds on the grid).
    pub max_margin: f64,
    /// For affine drift with constant diffusion: the exact worst case
    /// `lambda_max(A + A^t) + 2 delta` per unit `|x-y|^2`.
    pub analytic_margin: Option<f64>,
    pub pass: bool,
    pub pairs_checked: usize,
}

/// Evaluates the dissipativity margin on every pair and, where the closed
/// families allow it, analytically.
pub fn validate_dissipativity(
    spec: &CoefficientSpec,
    pair_grid: &[(Vec<f64>, Vec<f64>)],
) -> Result<DissipativityReport> {
    let delta = spec.constants.dissipativity;
    let d = spec.dim;
    let mut max_margin = f64::NEG_INFINITY;
    let mut bx = vec![0.0; d];
    let mut by = vec![0.0; d];
    for (x, y) in pair_grid {
        if x.len() != d || y.len() != d {
            return Err(Error::config("pair grid dimension mismatch"));
        }
        spec.drift.eval_into(x, &mut bx);
        spec.drift.eval_into(y, &mut by);
        let mut drift_term = 0.0;
        let mut dist2 = 0.0;
        for i in 0..d {
            drift_term += (x[i] - y[i]) * (bx[i] - by[i]);
            dist2 += (x[i] - y[i]) * (x[i] - y[i]);
        }
        let hs2 = diffusion_difference_hs2(&spec.diffusion, x, y);
        let margin = hs2 + 2.0 * drift_term + 2.0 * delta * dist2;
        if margin > max_margin {
            max_margin = margin;
        }
    }
    if pair_grid.is_empty() {
        max_margin = 0.0;
    }

    let analytic_margin = match (&spec.drift, &spec.diffusion) {
        (Drift::Affine { matrix, .. }, Diffusion::Constant { .. }) => {
            let mut sym = vec![0.0; d * d];
            for i in 0..d {
                for j in 0..d {
                    sym[i * d + j] = matrix[i * d + j] + matrix[j * d + i];
                }
            }
            Some(linalg::max_symmetric_eigenvalue(&sym, d) + 2.0 * delta)
        }
        _ => None,
    };

    let pass = max_margin <= 0.0 && analytic_margin.map_or(true, |m| m <= 1e-12);
    Ok(DissipativityReport { max_margin, analytic_margin, pass, pairs_checked: pair_grid.len() })
}

fn diffusion_difference_hs2(diffusion: &Diffusion, x: &[f64], y: &[f64]) -> f64 {
    match diffusion {
        Diffusion::Constant { .. } => 0.0,
        Diffusion::ScalarPiecewise(p) => {
            let diff = p.eval(x[0]) - p.eval(y[0]);
            diff * diff
        }
        Diffusion::Custom { func, .. } => {
            let diff = func(x[0]) - func(y[0]);
            diff * diff
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs_1d() -> Vec<(Vec<f64>, Vec<f64>)> {
        let mut out = Vec::new();
        for i in -5..=5 {
            for j in -5..=5 {
                if i != j {
                    out.push((vec![i as f64 * 0.4], vec![j as f64 * 0.4]));
                }
            }
        }
        out
    }

    fn ou(dissipativity: f64, drift_slope: f64) -> CoefficientSpec {
        CoefficientSpec {
            dim: 1,
            drift: Drift::Affine { matrix: vec![drift_slope], offset: vec![0.0] },
            diffusion: Diffusion::Constant { matrix: vec![1.0] },
            constants: DeclaredConstants {
                dissipativity,
                diffusion_sup: 1.0,
                diffusion_lip: 0.0,
                ellipticity: 1.0,
                coupling_lip: 0.0,
            },
        }
        .validated()
        .unwrap()
    }

    #[test]
    fn linear_pull_with_matching_rate_is_tight() {
        let report = validate_dissipativity(&ou(1.0, -1.0), &pairs_1d()).unwrap();
        assert!(report.max_margin.abs() < 1e-12, "margin {}", report.max_margin);
        assert_eq!(report.analytic_margin, Some(0.0));
        assert!(report.pass);
    }

    #[test]
    fn stronger_pull_has_strictly_negative_margin() {
        let report = validate_dissipativity(&ou(1.0, -2.0), &pairs_1d()).unwrap();
        // margin is -2|x-y|^2, worst over the grid at the closest pair
        assert!(report.max_margin < 0.0);
        assert_eq!(report.analytic_margin, Some(-2.0));
        assert!(report.pass);
    }

    #[test]
    fn expanding_drift_fails_with_positive_margin() {
        let report = validate_dissipativity(&ou(1.0, 1.0), &pairs_1d()).unwrap();
        assert!(report.max_margin > 0.0);
        assert_eq!(report.analytic_margin, Some(4.0));
        assert!(!report.pass);
    }

    #[test]
    fn declared_constants_must_be_nonnegative() {
        let c = DeclaredConstants {
            dissipativity: -1.0,
            diffusion_sup: 1.0,
            diffusion_lip: 0.0,
            ellipticity: 0.0,
            coupling_lip: 0.0,
        };
        assert!(c.validated().is_err());
    }

    #[test]
    fn shape_validation() {
        let bad = CoefficientSpec {
            dim: 2,
            drift: Drift::Affine { matrix: vec![1.0], offset: vec![0.0] },
            diffusion: Diffusion::Constant { matrix: vec![1.0, 0.0, 0.0, 1.0] },
            constants: DeclaredConstants {
                dissipativity: 1.0,
                diffusion_sup: 1.0,
                diffusion_lip: 0.0,
                ellipticity: 0.0,
                coupling_lip: 0.0,
            },
        };
        assert!(bad.validated().is_err());
    }
}
