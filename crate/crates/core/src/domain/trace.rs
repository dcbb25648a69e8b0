use serde::{Deserialize, Serialize};

use super::mesh::{Mesh2D, Point};
use crate::{Error, Result};

/// Dirichlet data: one value per boundary vertex, in the order of
/// [`Mesh2D::boundary_vertices`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundaryTrace {
    values: Vec<f64>,
}

impl BoundaryTrace {
    pub fn new(mesh: &Mesh2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.boundary_vertices().len() {
            return Err(Error::InvalidArgument(format!(
                "trace has {} values, boundary has {} vertices",
                values.len(),
                mesh.boundary_vertices().len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("trace contains non-finite values".into()));
        }
        Ok(Self { values })
    }

    pub fn from_fn(mesh: &Mesh2D, mut f: impl FnMut(Point) -> f64) -> Result<Self> {
        let values = mesh
            .boundary_vertices()
            .iter()
            .map(|&v| f(mesh.vertices()[v]))
            .collect();
        Self::new(mesh, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self { values: self.values.iter().map(|v| t * v).collect() }
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self { values: self.values.iter().map(|v| v + c).collect() }
    }

    /// max - min of the values.
    pub fn oscillation(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi - lo
    }

    pub fn is_constant(&self) -> bool {
        self.oscillation() == 0.0
    }
}
