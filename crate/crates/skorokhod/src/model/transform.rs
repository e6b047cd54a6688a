//! Scale transform removing local-time terms from one-dimensional SDEs.
//!
//! For a valid [`SignedMeasure`] the induced function `f` is piecewise
//! `scale * exp(rate * x)`, so its primitive `F(x) = int_0^x f(u) du` is
//! assembled in closed form piece by piece. `F` is strictly increasing with
//! `F(0) = 0`, globally Lipschitz with constant `sup f`, and its inverse is
//! Lipschitz with constant `1 / inf f`. Inversion is analytic per piece with
//! a monotone bisection fallback.
//!
//! Pushing a one-dimensional equation with coefficients `(b, sigma)` and
//! measure `nu` through `F` yields an ordinary SDE with coefficients
//! `(b f) o F^{-1}` and `(sigma f) o F^{-1}`; when the inputs are
//! piecewise-affine and the measure is purely atomic the transformed
//! coefficients stay exactly piecewise-affine.

use std::sync::Arc;

use super::coefficients::{CoefficientSpec, Diffusion, Drift};
use super::measure::SignedMeasure;
use super::piecewise::PiecewiseAffine;
use crate::error::{Error, Result};

/// Absolute tolerance of the bisection fallback for the inverse map. The
/// positive lower bound on `f` gives a uniform slope floor, so bisection
/// converges in at most ~60 iterations.
pub const INVERSE_BISECTION_TOL: f64 = 1e-12;

/// The monotone change of variable built from a signed measure.
#[derive(Debug, Clone)]
pub struct ScaleTransform {
    measure: SignedMeasure,
    /// Exact infimum of `f` over the line.
    f_min: f64,
    /// Exact supremum of `f` over the line.
    f_max: f64,
    /// Sorted critical points (atom locations and cdf breakpoints).
    knots: Vec<f64>,
    /// `(scale, rate)` of `f(x) = scale * exp(rate * x)` on each of the
    /// `knots.len() + 1` intervals; tail intervals always have rate zero.
    params: Vec<(f64, f64)>,
    /// Primitive values `F(knot)` for each knot.
    primitive_at_knots: Vec<f64>,
}

/// Builds the transform from a measure: closed-form primitive, analytic
/// inverse, and exact bounds on `f`.
pub fn build_transform(measure: &SignedMeasure) -> Result<ScaleTransform> {
    let measure = measure.clone().validated()?;
    let (knots, params) = measure.segments();

    // extrema of f: on each interval f is monotone, so endpoint values
    // (and one-sided limits) are the only candidates.
    let mut candidates: Vec<f64> = Vec::with_capacity(2 * params.len());
    for (i, &(scale, rate)) in params.iter().enumerate() {
        if i == 0 {
            candidates.push(scale); // rate = 0 on the left tail
        } else {
            candidates.push(scale * (rate * knots[i - 1]).exp());
        }
        if i < knots.len() {
            candidates.push(scale * (rate * knots[i]).exp()); // limit from the left
        } else {
            candidates.push(scale); // rate = 0 on the right tail
        }
    }
    let f_min = candidates.iter().cloned().fold(f64::INFINITY, f64::min);
    let f_max = candidates.iter().cloned().fold(0.0_f64, f64::max);
    if !(f_min > 0.0) || !f_max.is_finite() {
        return Err(Error::model(format!(
            "induced density must be bounded between positive constants, got [{f_min}, {f_max}]"
        )));
    }

    // primitive at the knots, anchored at F(0) = 0
    let mut primitive_at_knots = vec![0.0; knots.len()];
    if !knots.is_empty() {
        let anchor = interval_of(&knots, 0.0);
        if anchor < knots.len() {
            primitive_at_knots[anchor] = segment_integral(params[anchor], 0.0, knots[anchor]);
            for j in anchor + 1..knots.len() {
                primitive_at_knots[j] =
                    primitive_at_knots[j - 1] + segment_integral(params[j], knots[j - 1], knots[j]);
            }
        }
        if anchor > 0 {
            primitive_at_knots[anchor - 1] = -segment_integral(params[anchor], knots[anchor - 1], 0.0);
            for j in (0..anchor - 1).rev() {
                primitive_at_knots[j] =
                    primitive_at_knots[j + 1] - segment_integral(params[j + 1], knots[j], knots[j + 1]);
            }
        }
    }

    Ok(ScaleTransform { measure, f_min, f_max, knots, params, primitive_at_knots })
}

impl ScaleTransform {
    pub fn measure(&self) -> &SignedMeasure {
        &self.measure
    }

    /// Exact infimum of `f` (the inverse map is `1/f_min`-Lipschitz).
    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    /// Exact supremum of `f` (the forward map is `f_max`-Lipschitz).
    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    /// Pointwise value of `f` (right-continuous).
    pub fn density(&self, x: f64) -> f64 {
        self.measure.f_nu(x)
    }

    /// The strictly increasing primitive `F(x) = int_0^x f`.
    pub fn forward(&self, x: f64) -> f64 {
        if self.knots.is_empty() {
            return segment_integral(self.params[0], 0.0, x);
        }
        let i = interval_of(&self.knots, x);
        if i == 0 {
            self.primitive_at_knots[0] - segment_integral(self.params[0], x, self.knots[0])
        } else {
            self.primitive_at_knots[i - 1]
                + segment_integral(self.params[i], self.knots[i - 1], x)
        }
    }

    /// Inverse of the primitive: analytic per piece, bisection fallback.
    pub fn inverse(&self, y: f64) -> f64 {
        if self.knots.is_empty() {
            // f constant everywhere
            return y / self.params[0].0;
        }
        let i = self.primitive_at_knots.partition_point(|&v| v <= y);
        let (scale, rate) = self.params[i];
        let x = if i == 0 {
            // anchored at the right end of the left tail (rate = 0 there)
            self.knots[0] - (self.primitive_at_knots[0] - y) / scale
        } else {
            let x0 = self.knots[i - 1];
            let dy = y - self.primitive_at_knots[i - 1];
            if rate == 0.0 {
                x0 + dy / scale
            } else {
                let arg = (rate * x0).exp() + rate * dy / scale;
                if arg > 0.0 {
                    arg.ln() / rate
                } else {
                    return self.inverse_bisect(y);
                }
            }
        };
        if x.is_finite() {
            x
        } else {
            self.inverse_bisect(y)
        }
    }

    /// Monotone bisection solve of `forward(x) = y` to within
    /// [`INVERSE_BISECTION_TOL`].
    pub fn inverse_bisect(&self, y: f64) -> f64 {
        // bracket by doubling; f >= f_min > 0 makes forward unbounded both ways
        let mut lo = -1.0;
        let mut hi = 1.0;
        while self.forward(lo) > y {
            lo *= 2.0;
        }
        while self.forward(hi) < y {
            hi *= 2.0;
        }
        while hi - lo > INVERSE_BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if self.forward(mid) <= y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Interval index for `x`: interval `i` spans `[knots[i-1], knots[i])`.
fn interval_of(knots: &[f64], x: f64) -> usize {
    knots.partition_point(|&k| k <= x)
}

/// Integral of `scale * exp(rate * u)` over `[a, b]`.
fn segment_integral((scale, rate): (f64, f64), a: f64, b: f64) -> f64 {
    if rate == 0.0 {
        scale * (b - a)
    } else {
        scale * ((rate * b).exp() - (rate * a).exp()) / rate
    }
}

/// Pushes a one-dimensional coefficient pair through the transform:
/// the result drives the ordinary SDE satisfied by `F(X)`.
///
/// Piecewise-affine inputs with a purely atomic measure transform exactly to
/// piecewise-affine outputs; anything else produces composed callbacks.
pub fn transform_coefficients(
    spec: &CoefficientSpec,
    transform: &ScaleTransform,
) -> Result<CoefficientSpec> {
    if spec.dim != 1 {
        return Err(Error::config(
            "the local-time machinery is one-dimensional; got a multidimensional model",
        ));
    }
    let piecewise_constant_density = transform
        .params
        .iter()
        .all(|&(_, rate)| rate == 0.0);

    let drift = if piecewise_constant_density {
        match drift_as_piecewise(&spec.drift) {
            Some(b) => Drift::ScalarPiecewise(compose_piecewise(&b, transform)?),
            None => custom_drift(spec, transform),
        }
    } else {
        custom_drift(spec, transform)
    };
    let diffusion = if piecewise_constant_density {
        match diffusion_as_piecewise(&spec.diffusion) {
            Some(s) => Diffusion::ScalarPiecewise(compose_piecewise(&s, transform)?),
            None => custom_diffusion(spec, transform),
        }
    } else {
        custom_diffusion(spec, transform)
    };

    CoefficientSpec { dim: 1, drift, diffusion, constants: spec.constants }.validated()
}

fn drift_as_piecewise(drift: &Drift) -> Option<PiecewiseAffine> {
    match drift {
        Drift::Affine { matrix, offset } => Some(PiecewiseAffine::affine(matrix[0], offset[0])),
        Drift::ScalarPiecewise(p) => Some(p.clone()),
        Drift::Custom { .. } => None,
    }
}

fn diffusion_as_piecewise(diffusion: &Diffusion) -> Option<PiecewiseAffine> {
    match diffusion {
        Diffusion::Constant { matrix } => Some(PiecewiseAffine::constant(matrix[0])),
        Diffusion::ScalarPiecewise(p) => Some(p.clone()),
        Diffusion::Custom { .. } => None,
    }
}

fn custom_drift(spec: &CoefficientSpec, transform: &ScaleTransform) -> Drift {
    let t = transform.clone();
    let b = spec.drift.clone();
    Drift::Custom {
        id: "transformed_drift".to_string(),
        func: Arc::new(move |y| {
            let x = t.inverse(y);
            b.eval1(x) * t.density(x)
        }),
    }
}

fn custom_diffusion(spec: &CoefficientSpec, transform: &ScaleTransform) -> Diffusion {
    let t = transform.clone();
    let s = spec.diffusion.clone();
    Diffusion::Custom {
        id: "transformed_diffusion".to_string(),
        func: Arc::new(move |y| {
            let x = t.inverse(y);
            s.eval1(x) * t.density(x)
        }),
    }
}

/// Exact composition `(g f) o F^{-1}` for piecewise-affine `g` when `f` is a
/// step function: on each piece `F` is affine with slope `f_i`, so the
/// composite stays affine in the transformed variable with the same slope
/// and a shifted intercept.
fn compose_piecewise(g: &PiecewiseAffine, transform: &ScaleTransform) -> Result<PiecewiseAffine> {
    let mut cuts: Vec<f64> = transform
        .knots
        .iter()
        .cloned()
        .chain(g.thresholds())
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let mut pieces: Vec<(f64, f64, f64)> = Vec::with_capacity(cuts.len() + 1);
    // representative points: one in each interval of the combined cut set
    let starts_x: Vec<f64> = std::iter::once(f64::NEG_INFINITY).chain(cuts.iter().cloned()).collect();
    for (idx, &x_start) in starts_x.iter().enumerate() {
        let rep = if x_start.is_finite() {
            x_start
        } else if cuts.is_empty() {
            0.0
        } else {
            cuts[0] - 1.0
        };
        let f_val = transform.density(rep);
        let piece = g.piece_at(rep);
        // x(y) = rep + (y - F(rep)) / f_val on this piece, hence
        // (g f)(x(y)) = slope * y + [slope * (f_val * rep - F(rep)) + intercept * f_val]
        let big_f = transform.forward(rep);
        let slope = piece.slope;
        let intercept = piece.slope * (f_val * rep - big_f) + piece.intercept * f_val;
        let y_start = if idx == 0 { f64::NEG_INFINITY } else { transform.forward(x_start) };
        pieces.push((y_start, slope, intercept));
    }
    PiecewiseAffine::new(pieces)
}
