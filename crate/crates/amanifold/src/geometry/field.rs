use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{ChartPoint, GeoResult, GeometryError, MAX_METRIC_CONDITION};
use crate::jet::Jet;

type JetFn = Arc<dyn Fn(&ChartPoint, usize) -> GeoResult<Vec<Jet>> + Send + Sync>;

fn validate_common(
    dim: usize,
    expected_len: usize,
    order: usize,
    jets: &[Jet],
) -> GeoResult<()> {
    if jets.len() != expected_len {
        return Err(GeometryError::DimensionMismatch { expected: expected_len, got: jets.len() });
    }
    for j in jets {
        if j.dim() != dim {
            return Err(GeometryError::DimensionMismatch { expected: dim, got: j.dim() });
        }
        if j.order() < order {
            return Err(GeometryError::DerivativeOrderUnavailable {
                requested: order,
                provided: j.order(),
            });
        }
    }
    Ok(())
}

fn value_matrix(dim: usize, jets: &[Jet]) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| jets[i * dim + j].value())
}

/// A metric as a field over the chart: evaluating at a point yields the
/// symmetric positive-definite matrix of components together with exact
/// partial derivatives up to any requested order.
///
/// The backing closure receives `(point, order)` and may seed its own
/// higher-order jets internally (metrics derived from a potential need two
/// extra orders of the potential).
#[derive(Clone)]
pub struct MetricField {
    dim: usize,
    f: JetFn,
}

impl MetricField {
    pub fn new(
        dim: usize,
        f: impl Fn(&ChartPoint, usize) -> GeoResult<Vec<Jet>> + Send + Sync + 'static,
    ) -> Self {
        MetricField { dim, f: Arc::new(f) }
    }

    /// Build from a closure on seeded coordinate jets. The entries must form a
    /// symmetric `dim × dim` matrix in row-major order.
    pub fn from_entry_fn(
        dim: usize,
        f: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> Self {
        MetricField::new(dim, move |p, order| {
            let vars = Jet::variables(dim, order, p.as_slice());
            Ok(f(&vars))
        })
    }

    pub fn constant(matrix: DMatrix<f64>) -> Self {
        let dim = matrix.nrows();
        MetricField::new(dim, move |_, order| {
            Ok((0..dim * dim)
                .map(|k| Jet::constant(dim, order, matrix[(k / dim, k % dim)]))
                .collect())
        })
    }

    pub fn euclidean(dim: usize) -> Self {
        MetricField::constant(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Evaluate the component jets at `p`, validated: shape, derivative
    /// order, symmetry of the value matrix, positive definiteness, and the
    /// condition-number bound.
    pub fn jets(&self, p: &ChartPoint, order: usize) -> GeoResult<Vec<Jet>> {
        if p.dim() != self.dim {
            return Err(GeometryError::DimensionMismatch { expected: self.dim, got: p.dim() });
        }
        let raw = (self.f)(p, order)?;
        validate_common(self.dim, self.dim * self.dim, order, &raw)?;
        let jets: Vec<Jet> = raw.into_iter().map(|j| j.truncated(order)).collect();

        let g = value_matrix(self.dim, &jets);
        let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let asym = (0..self.dim)
            .flat_map(|i| (0..self.dim).map(move |j| (i, j)))
            .fold(0.0f64, |m, (i, j)| m.max((g[(i, j)] - g[(j, i)]).abs()));
        if asym > 1e-14 * scale {
            return Err(GeometryError::NotSymmetric { asym });
        }
        let eigs = g.symmetric_eigenvalues();
        let min_eig = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_eig = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if min_eig <= 0.0 {
            return Err(GeometryError::NotPositiveDefinite { min_eig });
        }
        let cond = max_eig / min_eig;
        if cond > MAX_METRIC_CONDITION {
            return Err(GeometryError::DegenerateMetric { cond });
        }
        Ok(jets)
    }

    /// The component matrix at `p`.
    pub fn evaluate(&self, p: &ChartPoint) -> GeoResult<DMatrix<f64>> {
        let jets = self.jets(p, 0)?;
        Ok(value_matrix(self.dim, &jets))
    }
}

/// A vector field given by its chart components.
#[derive(Clone)]
pub struct VectorField {
    dim: usize,
    f: JetFn,
}

/// A one-form field given by its chart components.
#[derive(Clone)]
pub struct OneFormField {
    dim: usize,
    f: JetFn,
}

/// A two-form field; values are antisymmetric matrices.
#[derive(Clone)]
pub struct TwoFormField {
    dim: usize,
    f: JetFn,
}

macro_rules! component_field {
    ($name:ident, $len:expr) => {
        impl $name {
            pub fn new(
                dim: usize,
                f: impl Fn(&ChartPoint, usize) -> GeoResult<Vec<Jet>> + Send + Sync + 'static,
            ) -> Self {
                $name { dim, f: Arc::new(f) }
            }

            /// Build from a closure on seeded coordinate jets.
            pub fn from_component_fn(
                dim: usize,
                f: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
            ) -> Self {
                $name::new(dim, move |p, order| {
                    let vars = Jet::variables(dim, order, p.as_slice());
                    Ok(f(&vars))
                })
            }

            pub fn dim(&self) -> usize {
                self.dim
            }

            pub fn jets(&self, p: &ChartPoint, order: usize) -> GeoResult<Vec<Jet>> {
                if p.dim() != self.dim {
                    return Err(GeometryError::DimensionMismatch {
                        expected: self.dim,
                        got: p.dim(),
                    });
                }
                let raw = (self.f)(p, order)?;
                let len = $len(self.dim);
                validate_common(self.dim, len, order, &raw)?;
                Ok(raw.into_iter().map(|j| j.truncated(order)).collect())
            }
        }
    };
}

component_field!(VectorField, |d: usize| d);
component_field!(OneFormField, |d: usize| d);
component_field!(TwoFormField, |d: usize| d * d);

impl VectorField {
    pub fn constant(components: DVector<f64>) -> Self {
        let dim = components.len();
        VectorField::new(dim, move |_, order| {
            Ok(components.iter().map(|&v| Jet::constant(dim, order, v)).collect())
        })
    }

    pub fn evaluate(&self, p: &ChartPoint) -> GeoResult<DVector<f64>> {
        let jets = self.jets(p, 0)?;
        Ok(DVector::from_iterator(self.dim, jets.iter().map(|j| j.value())))
    }
}

impl OneFormField {
    pub fn evaluate(&self, p: &ChartPoint) -> GeoResult<DVector<f64>> {
        let jets = self.jets(p, 0)?;
        Ok(DVector::from_iterator(self.dim, jets.iter().map(|j| j.value())))
    }
}

impl TwoFormField {
    /// Validated evaluation: the value matrix must be antisymmetric.
    pub fn evaluate(&self, p: &ChartPoint) -> GeoResult<DMatrix<f64>> {
        let jets = self.jets(p, 0)?;
        let m = value_matrix(self.dim, &jets);
        let scale = m.iter().fold(0.0f64, |mx, v| mx.max(v.abs())).max(1.0);
        let defect = (&m + m.transpose()).iter().fold(0.0f64, |mx, v| mx.max(v.abs()));
        if defect > 1e-14 * scale {
            return Err(GeometryError::NotAntisymmetric { defect });
        }
        Ok(m)
    }
}
