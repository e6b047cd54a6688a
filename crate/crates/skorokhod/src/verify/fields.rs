//! Catalog of scalar test functions with analytic gradients, Lipschitz
//! constants, and closed-form range bounds on the supported domains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ConvexDomain;

/// A scalar function on state space from the closed catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarField {
    /// `g(x) = x[index]`.
    Coordinate { index: usize },
    /// `g(x) = <weights, x> + offset`.
    Affine { weights: Vec<f64>, offset: f64 },
    /// `g(x) = offset + amplitude * exp(-|x - center|^2 / (2 width^2))`.
    GaussianBump { center: Vec<f64>, width: f64, amplitude: f64, offset: f64 },
    /// `g(x) = value`.
    Constant { value: f64 },
}

impl ScalarField {
    pub fn validated(self, dim: usize) -> Result<Self> {
        match &self {
            ScalarField::Coordinate { index } => {
                if *index >= dim {
                    return Err(Error::config(format!(
                        "coordinate index {index} out of range for dimension {dim}"
                    )));
                }
            }
            ScalarField::Affine { weights, .. } => {
                if weights.len() != dim {
                    return Err(Error::config("affine field weights must match the dimension"));
                }
            }
            ScalarField::GaussianBump { center, width, .. } => {
                if center.len() != dim {
                    return Err(Error::config("bump center must match the dimension"));
                }
                if !(*width > 0.0) {
                    return Err(Error::config("bump width must be positive"));
                }
            }
            ScalarField::Constant { .. } => {}
        }
        Ok(self)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ScalarField::Coordinate { index } => x[*index],
            ScalarField::Affine { weights, offset } => {
                offset + weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
            }
            ScalarField::GaussianBump { center, width, amplitude, offset } => {
                let d2: f64 = x.iter().zip(center).map(|(v, c)| (v - c) * (v - c)).sum();
                offset + amplitude * (-d2 / (2.0 * width * width)).exp()
            }
            ScalarField::Constant { value } => *value,
        }
    }

    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        match self {
            ScalarField::Coordinate { index } => out[*index] = 1.0,
            ScalarField::Affine { weights, .. } => out.copy_from_slice(weights),
            ScalarField::GaussianBump { center, width, amplitude, .. } => {
                let w2 = width * width;
                let d2: f64 = x.iter().zip(center).map(|(v, c)| (v - c) * (v - c)).sum();
                let factor = amplitude * (-d2 / (2.0 * w2)).exp() / w2;
                for i in 0..x.len() {
                    out[i] = -factor * (x[i] - center[i]);
                }
            }
            ScalarField::Constant { .. } => {}
        }
    }

    /// Global Lipschitz constant (exact for every catalog entry).
    pub fn lipschitz(&self) -> f64 {
        match self {
            ScalarField::Coordinate { .. } => 1.0,
            ScalarField::Affine { weights, .. } => {
                weights.iter().map(|w| w * w).sum::<f64>().sqrt()
            }
            ScalarField::GaussianBump { width, amplitude, .. } => {
                // max |grad| = |a| u/w^2 exp(-u^2/2w^2) at u = w
                amplitude.abs() / (width * (1.0_f64).exp().sqrt())
            }
            ScalarField::Constant { .. } => 0.0,
        }
    }

    /// A valid lower bound of the field on the closure of `domain`
    /// (`-inf` when unbounded below there).
    pub fn lower_bound_on(&self, domain: &ConvexDomain) -> f64 {
        match self {
            ScalarField::Constant { value } => *value,
            ScalarField::GaussianBump { amplitude, offset, .. } => {
                if *amplitude >= 0.0 {
                    *offset
                } else {
                    offset + amplitude
                }
            }
            ScalarField::Coordinate { index } => match domain {
                ConvexDomain::Ball { center, radius } => center[*index] - radius,
                ConvexDomain::Box { lower, .. } => lower[*index],
                _ => f64::NEG_INFINITY,
            },
            ScalarField::Affine { weights, offset } => {
                let norm: f64 = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return *offset;
                }
                match domain {
                    ConvexDomain::Ball { center, radius } => {
                        let at_center: f64 =
                            offset + weights.iter().zip(center).map(|(w, c)| w * c).sum::<f64>();
                        at_center - norm * radius
                    }
                    ConvexDomain::Box { lower, upper } => {
                        offset
                            + weights
                                .iter()
                                .zip(lower.iter().zip(upper))
                                .map(|(w, (lo, hi))| if *w >= 0.0 { w * lo } else { w * hi })
                                .sum::<f64>()
                    }
                    _ => f64::NEG_INFINITY,
                }
            }
        }
    }

    /// A valid upper bound of the field on the closure of `domain`.
    pub fn upper_bound_on(&self, domain: &ConvexDomain) -> f64 {
        // reuse the lower bound of the negated field
        let negated = match self.clone() {
            ScalarField::Coordinate { index } => {
                // -x_i is affine
                let dim = match domain {
                    ConvexDomain::Ball { center, .. } => center.len(),
                    ConvexDomain::Box { lower, .. } => lower.len(),
                    ConvexDomain::Halfspace { normal, .. } => normal.len(),
                    ConvexDomain::WholeSpace { dimension } => *dimension,
                };
                let mut weights = vec![0.0; dim];
                weights[index] = -1.0;
                ScalarField::Affine { weights, offset: 0.0 }
            }
            ScalarField::Affine { weights, offset } => ScalarField::Affine {
                weights: weights.iter().map(|w| -w).collect(),
                offset: -offset,
            },
            ScalarField::GaussianBump { center, width, amplitude, offset } => {
                ScalarField::GaussianBump { center, width, amplitude: -amplitude, offset: -offset }
            }
            ScalarField::Constant { value } => ScalarField::Constant { value: -value },
        };
        -negated.lower_bound_on(domain)
    }
}
