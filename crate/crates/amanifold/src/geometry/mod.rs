//! Chart-based tensor calculus.
//!
//! Everything here works on a single dense coordinate chart: a metric is a
//! map from a [`ChartPoint`] to a symmetric positive-definite matrix together
//! with its exact derivatives (see [`MetricField`]), and the curvature
//! operations build Christoffel symbols, the Riemann and Ricci tensors and
//! `∇ρ` from those derivatives. All values are pointwise; there is no atlas.

mod curvature;
mod exterior;
mod field;
mod point;
mod tensor;

pub use curvature::{
    christoffel, cov_deriv_ricci, cyclic_sum_nabla_ricci, ricci, ricci_endomorphism, riemann,
    CurvatureData,
};
pub use exterior::{
    codifferential_two_form, codifferential_two_form_with_frame, exterior_derivative_one_form,
    exterior_derivative_two_form, lie_derivative_metric, orthonormal_frame,
};
pub use field::{MetricField, OneFormField, TwoFormField, VectorField};
pub use point::ChartPoint;
pub use tensor::{IndexRole, TensorValue};

use thiserror::Error;

/// Maximum admissible condition number of the metric value matrix; chart
/// boundary points beyond this are rejected rather than computed.
pub const MAX_METRIC_CONDITION: f64 = 1e8;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("non-finite coordinate at slot {0}")]
    NonFiniteCoordinate(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degenerate metric at point (condition number {cond:.3e})")]
    DegenerateMetric { cond: f64 },
    #[error("metric not positive definite at point (smallest eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("metric not symmetric at point (asymmetry {asym:.3e})")]
    NotSymmetric { asym: f64 },
    #[error("field values not antisymmetric at point (defect {defect:.3e})")]
    NotAntisymmetric { defect: f64 },
    #[error("derivative order unavailable: requested {requested}, field provided {provided}")]
    DerivativeOrderUnavailable { requested: usize, provided: usize },
    #[error("frame vectors degenerate under the metric at this point")]
    DegenerateFrame,
}

pub type GeoResult<T> = Result<T, GeometryError>;
