//! Convex domains with closed-form Euclidean projection.
//!
//! Projection is exact per variant, so the reflection increments produced by
//! the projected scheme carry no inner-loop optimization error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const UNIT_NORMAL_TOL: f64 = 1e-12;

/// A convex region of `R^d` whose nearest-point projection has a closed form.
///
/// The half-space is the inward-normal convention: it contains the points `x`
/// with `<normal, x> >= offset`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConvexDomain {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Halfspace { normal: Vec<f64>, offset: f64 },
    WholeSpace { dimension: usize },
}

impl ConvexDomain {
    /// Validates the geometric invariants (positive radius, ordered box
    /// corners, unit normal) and returns the domain.
    pub fn validated(self) -> Result<Self> {
        match &self {
            ConvexDomain::Ball { center, radius } => {
                if center.is_empty() {
                    return Err(Error::config("ball domain needs a nonempty center"));
                }
                if !(*radius > 0.0) {
                    return Err(Error::config(format!(
                        "ball radius must be positive, got {radius}"
                    )));
                }
            }
            ConvexDomain::Box { lower, upper } => {
                if lower.is_empty() || lower.len() != upper.len() {
                    return Err(Error::config("box corners must be nonempty and equal-length"));
                }
                for (i, (lo, hi)) in lower.iter().zip(upper).enumerate() {
                    if !(lo < hi) {
                        return Err(Error::config(format!(
                            "box requires lower[{i}] < upper[{i}], got {lo} >= {hi}"
                        )));
                    }
                }
            }
            ConvexDomain::Halfspace { normal, offset } => {
                if normal.is_empty() {
                    return Err(Error::config("halfspace normal must be nonempty"));
                }
                if !offset.is_finite() {
                    return Err(Error::config("halfspace offset must be finite"));
                }
                let norm = l2_norm(normal);
                if (norm - 1.0).abs() > UNIT_NORMAL_TOL {
                    return Err(Error::config(format!(
                        "halfspace normal must be unit length within {UNIT_NORMAL_TOL}, |n| = {norm}"
                    )));
                }
            }
            ConvexDomain::WholeSpace { dimension } => {
                if *dimension == 0 {
                    return Err(Error::config("whole_space dimension must be positive"));
                }
            }
        }
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        match self {
            ConvexDomain::Ball { center, .. } => center.len(),
            ConvexDomain::Box { lower, .. } => lower.len(),
            ConvexDomain::Halfspace { normal, .. } => normal.len(),
            ConvexDomain::WholeSpace { dimension } => *dimension,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::config(format!(
                "point dimension {} does not match domain dimension {}",
                x.len(),
                self.dimension()
            )));
        }
        Ok(())
    }

    /// True iff `x` lies in the closure of the domain.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ConvexDomain::Ball { center, radius } => {
                let d2: f64 = x
                    .iter()
                    .zip(center)
                    .map(|(xi, ci)| (xi - ci) * (xi - ci))
                    .sum();
                d2.sqrt() <= *radius
            }
            ConvexDomain::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(xi, (lo, hi))| *lo <= *xi && *xi <= *hi),
            ConvexDomain::Halfspace { normal, offset } => dot(normal, x) >= *offset,
            ConvexDomain::WholeSpace { .. } => true,
        }
    }

    /// Euclidean-nearest point of the closure, written into `out`.
    pub fn project_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_dim(x)?;
        debug_assert_eq!(out.len(), x.len());
        match self {
            ConvexDomain::Ball { center, radius } => {
                let d2: f64 = x
                    .iter()
                    .zip(center)
                    .map(|(xi, ci)| (xi - ci) * (xi - ci))
                    .sum();
                let dist = d2.sqrt();
                if dist <= *radius {
                    out.copy_from_slice(x);
                } else {
                    let scale = radius / dist;
                    for ((o, xi), ci) in out.iter_mut().zip(x).zip(center) {
                        *o = ci + scale * (xi - ci);
                    }
                }
            }
            ConvexDomain::Box { lower, upper } => {
                for ((o, xi), (lo, hi)) in out.iter_mut().zip(x).zip(lower.iter().zip(upper)) {
                    *o = xi.clamp(*lo, *hi);
                }
            }
            ConvexDomain::Halfspace { normal, offset } => {
                let gap = offset - dot(normal, x);
                if gap <= 0.0 {
                    out.copy_from_slice(x);
                } else {
                    for (o, (xi, ni)) in out.iter_mut().zip(x.iter().zip(normal)) {
                        *o = xi + gap * ni;
                    }
                }
            }
            ConvexDomain::WholeSpace { .. } => out.copy_from_slice(x),
        }
        Ok(())
    }

    /// Euclidean-nearest point of the closure.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; x.len()];
        self.project_into(x, &mut out)?;
        Ok(out)
    }

    /// Penalty vector `x - project(x)`; zero exactly on the closure.
    pub fn penalty(&self, x: &[f64]) -> Result<Vec<f64>> {
        let p = self.project(x)?;
        Ok(x.iter().zip(&p).map(|(xi, pi)| xi - pi).collect())
    }

    /// Diameter of the closure, if bounded.
    pub fn diameter(&self) -> Option<f64> {
        match self {
            ConvexDomain::Ball { radius, .. } => Some(2.0 * radius),
            ConvexDomain::Box { lower, upper } => Some(l2_norm(
                &lower
                    .iter()
                    .zip(upper)
                    .map(|(lo, hi)| hi - lo)
                    .collect::<Vec<_>>(),
            )),
            _ => None,
        }
    }
}

/// Worst-case report for the inward-cone condition
/// `<x - anchor, penalty(x)> >= c * |penalty(x)|` over a point grid.
#[derive(Debug, Clone, Serialize)]
pub struct ConeReport {
    /// Minimum of `<x - anchor, penalty(x)> - c|penalty(x)|` over the grid.
    pub worst_margin: f64,
    /// Grid point achieving the worst margin.
    pub worst_point: Vec<f64>,
    pub satisfied: bool,
    pub points_checked: usize,
}

/// Evaluates the inward-cone condition on every grid point and reports the
/// worst margin. Points inside the closure contribute margin zero (the
/// penalty vanishes there).
pub fn check_cone_condition(
    domain: &ConvexDomain,
    anchor: &[f64],
    c: f64,
    grid: &[Vec<f64>],
) -> Result<ConeReport> {
    if grid.is_empty() {
        return Err(Error::config("cone condition check needs a nonempty grid"));
    }
    if !(c > 0.0) {
        return Err(Error::config(format!("cone constant must be positive, got {c}")));
    }
    let mut worst_margin = f64::INFINITY;
    let mut worst_point = grid[0].clone();
    for x in grid {
        let beta = domain.penalty(x)?;
        let beta_norm = l2_norm(&beta);
        let shifted: Vec<f64> = x.iter().zip(anchor).map(|(xi, ai)| xi - ai).collect();
        let margin = dot(&shifted, &beta) - c * beta_norm;
        if margin < worst_margin {
            worst_margin = margin;
            worst_point = x.clone();
        }
    }
    Ok(ConeReport {
        worst_margin,
        worst_point,
        satisfied: worst_margin >= 0.0,
        points_checked: grid.len(),
    })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}
