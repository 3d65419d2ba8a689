use nalgebra::DVector;

use super::{GeoResult, GeometryError};

/// A point of a coordinate chart: a finite real vector whose length is the
/// dimension declared by the owning manifold description.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    coords: DVector<f64>,
}

impl ChartPoint {
    pub fn new(coords: impl Into<Vec<f64>>) -> GeoResult<Self> {
        let coords = coords.into();
        for (i, c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(GeometryError::NonFiniteCoordinate(i));
            }
        }
        Ok(ChartPoint { coords: DVector::from_vec(coords) })
    }

    pub fn origin(dim: usize) -> Self {
        ChartPoint { coords: DVector::zeros(dim) }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn get(&self, i: usize) -> f64 {
        self.coords[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }
}
