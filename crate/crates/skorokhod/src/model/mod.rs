//! Model layer: coefficients, domains, measures, and the scale transform.
//!
//! Every object here is immutable after construction and safe to share across
//! worker threads; evaluation is pure.

mod coefficients;
mod domain;
mod linalg;
mod measure;
mod piecewise;
mod transform;

pub use coefficients::{
    validate_dissipativity, CoefficientSpec, DeclaredConstants, Diffusion, DissipativityReport,
    Drift, ScalarFn,
};
pub use domain::{check_cone_condition, ConeReport, ConvexDomain};
pub use measure::SignedMeasure;
pub use piecewise::{AffinePiece, PiecewiseAffine};
pub use transform::{
    build_transform, transform_coefficients, ScaleTransform, INVERSE_BISECTION_TOL,
};

/// A complete model: coefficients, the reflecting domain, and (for local-time
/// equations) the driving measure.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub coefficients: CoefficientSpec,
    pub domain: ConvexDomain,
    pub measure: Option<SignedMeasure>,
}

impl ModelSpec {
    pub fn validated(self) -> crate::Result<Self> {
        let coefficients = self.coefficients.validated()?;
        let domain = self.domain.validated()?;
        if domain.dimension() != coefficients.dim {
            return Err(crate::Error::config(format!(
                "domain dimension {} does not match coefficient dimension {}",
                domain.dimension(),
                coefficients.dim
            )));
        }
        let measure = match self.measure {
            Some(m) => {
                if coefficients.dim != 1 {
                    return Err(crate::Error::config(
                        "a driving measure requires a one-dimensional model",
                    ));
                }
                Some(m.validated()?)
            }
            None => None,
        };
        Ok(ModelSpec { coefficients, domain, measure })
    }

    pub fn dim(&self) -> usize {
        self.coefficients.dim
    }
}
