use serde::{Deserialize, Serialize};

/// Whether a tensor slot is contravariant or covariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexRole {
    Upper,
    Lower,
}

/// A pointwise multi-index array with index-role metadata. All slots range
/// over the same chart dimension.
#[derive(Clone, Debug)]
pub struct TensorValue {
    dim: usize,
    roles: Vec<IndexRole>,
    data: Vec<f64>,
}

impl TensorValue {
    pub fn zeros(dim: usize, roles: &[IndexRole]) -> Self {
        let len = dim.pow(roles.len() as u32);
        TensorValue { dim, roles: roles.to_vec(), data: vec![0.0; len] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.roles.len()
    }

    pub fn roles(&self) -> &[IndexRole] {
        &self.roles
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.roles.len(), "tensor rank mismatch");
        let mut off = 0;
        for &i in idx {
            debug_assert!(i < self.dim);
            off = off * self.dim + i;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let off = self.offset(idx);
        self.data[off] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}
