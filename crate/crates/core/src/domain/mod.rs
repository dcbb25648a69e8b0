//! Shared geometric and field types.

mod config;
mod field;
mod mesh;
mod trace;

pub use config::{Exponent, SolverConfig};
pub use field::{validate_field, Conductivity, ConductivityField, ValidationReport, Violation};
pub use mesh::{build_rect_mesh, build_rect_mesh_at, triangle_geometry, Mesh2D, Point, TriangleGeometry};
pub use trace::BoundaryTrace;

use serde::{Deserialize, Serialize};

/// Mesh and conductivity bundled as one JSON document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDocument {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub conductivity: ConductivityField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<f64>>,
}

impl FieldDocument {
    pub fn new(mesh: &Mesh2D, sigma: &ConductivityField) -> Self {
        Self {
            vertices: mesh.vertices().to_vec(),
            triangles: mesh.triangles().to_vec(),
            conductivity: sigma.clone(),
            potential: None,
        }
    }

    pub fn into_parts(self) -> crate::Result<(Mesh2D, ConductivityField)> {
        let mesh = Mesh2D::new(self.vertices, self.triangles)?;
        if self.conductivity.len() != mesh.num_triangles() {
            return Err(crate::Error::InvalidField(format!(
                "{} conductivity values for {} triangles",
                self.conductivity.len(),
                mesh.num_triangles()
            )));
        }
        Ok((mesh, self.conductivity))
    }
}
