use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Point = [f64; 2];

/// Per-triangle geometry cached at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleGeometry {
    pub area: f64,
    /// Gradients of the three barycentric hat functions (constant on the triangle).
    pub grad_basis: [[f64; 2]; 3],
    pub centroid: Point,
}

/// Triangulation of a simply connected polygonal domain.
///
/// Triangles are stored counterclockwise and the boundary is a single closed
/// loop, also counterclockwise. `boundary_normals[k]` is the outward unit normal
/// of the edge `boundary_vertices[k] -> boundary_vertices[k + 1]` (cyclic).
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_vertices: Vec<usize>,
    boundary_normals: Vec<Point>,
    geometry: Vec<TriangleGeometry>,
    on_boundary: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct MeshDocument {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boundary_vertices: Option<Vec<usize>>,
}

impl Mesh2D {
    /// Builds a mesh from raw vertex and triangle lists, extracting the
    /// boundary loop. Fails unless every triangle has positive area and the
    /// boundary edges form one simple closed loop.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }
        let mut geometry = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::InvalidMesh(format!("triangle {t} references a missing vertex")));
            }
            let g = triangle_geometry([vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]]);
            if g.area.is_nan() || g.area <= 0.0 {
                return Err(Error::InvalidMesh(format!("triangle {t} has non-positive signed area")));
            }
            geometry.push(g);
        }
        let boundary_vertices = extract_boundary_loop(vertices.len(), &triangles)?;
        let n = boundary_vertices.len();
        let boundary_normals = (0..n)
            .map(|k| {
                let a = vertices[boundary_vertices[k]];
                let b = vertices[boundary_vertices[(k + 1) % n]];
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let len = dx.hypot(dy);
                [dy / len, -dx / len]
            })
            .collect();
        let mut on_boundary = vec![false; vertices.len()];
        for &v in &boundary_vertices {
            on_boundary[v] = true;
        }
        Ok(Self {
            vertices,
            triangles,
            boundary_vertices,
            boundary_normals,
            geometry,
            on_boundary,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary_vertices
    }

    pub fn boundary_normals(&self) -> &[Point] {
        &self.boundary_normals
    }

    pub fn geometry(&self) -> &[TriangleGeometry] {
        &self.geometry
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.on_boundary[v]
    }

    /// Boundary edges as (start vertex, end vertex, outward normal), counterclockwise.
    pub fn boundary_edges(&self) -> impl Iterator<Item = (usize, usize, Point)> + '_ {
        let n = self.boundary_vertices.len();
        (0..n).map(move |k| {
            (
                self.boundary_vertices[k],
                self.boundary_vertices[(k + 1) % n],
                self.boundary_normals[k],
            )
        })
    }

    pub fn total_area(&self) -> f64 {
        self.geometry.iter().map(|g| g.area).sum()
    }

    /// Longest edge over all triangles.
    pub fn max_edge_length(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| {
                (0..3).map(move |k| {
                    let a = self.vertices[t[k]];
                    let b = self.vertices[t[(k + 1) % 3]];
                    (b[0] - a[0]).hypot(b[1] - a[1])
                })
            })
            .fold(0.0, f64::max)
    }

    /// Axis-aligned bounding box as (min, max).
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (hi[0] - lo[0]).hypot(hi[1] - lo[1])
    }

    pub fn translated(&self, offset: Point) -> Self {
        let vertices = self
            .vertices
            .iter()
            .map(|v| [v[0] + offset[0], v[1] + offset[1]])
            .collect();
        let geometry = self
            .geometry
            .iter()
            .map(|g| TriangleGeometry {
                centroid: [g.centroid[0] + offset[0], g.centroid[1] + offset[1]],
                ..*g
            })
            .collect();
        Self {
            vertices,
            geometry,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = MeshDocument {
            vertices: self.vertices.clone(),
            triangles: self.triangles.clone(),
            boundary_vertices: Some(self.boundary_vertices.clone()),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MeshDocument = serde_json::from_str(text)?;
        let mesh = Self::new(doc.vertices, doc.triangles)?;
        if let Some(bv) = doc.boundary_vertices {
            if bv != mesh.boundary_vertices {
                return Err(Error::InvalidMesh(
                    "stored boundary loop does not match the triangulation".into(),
                ));
            }
        }
        Ok(mesh)
    }
}

impl Serialize for Mesh2D {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeshDocument {
            vertices: self.vertices.clone(),
            triangles: self.triangles.clone(),
            boundary_vertices: Some(self.boundary_vertices.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mesh2D {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = MeshDocument::deserialize(d)?;
        Mesh2D::new(doc.vertices, doc.triangles).map_err(serde::de::Error::custom)
    }
}

pub fn triangle_geometry(p: [Point; 3]) -> TriangleGeometry {
    let [a, b, c] = p;
    let twice_area = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let inv = 1.0 / twice_area;
    let grad_basis = [
        [(b[1] - c[1]) * inv, (c[0] - b[0]) * inv],
        [(c[1] - a[1]) * inv, (a[0] - c[0]) * inv],
        [(a[1] - b[1]) * inv, (b[0] - a[0]) * inv],
    ];
    TriangleGeometry {
        area: 0.5 * twice_area,
        grad_basis,
        centroid: [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0],
    }
}

fn extract_boundary_loop(num_vertices: usize, triangles: &[[usize; 3]]) -> Result<Vec<usize>> {
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for tri in triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            *count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    if let Some((e, _)) = count.iter().find(|(_, &c)| c > 2) {
        return Err(Error::InvalidMesh(format!("edge {e:?} shared by more than two triangles")));
    }
    // Oriented boundary edges, keyed by start vertex.
    let mut next = vec![usize::MAX; num_vertices];
    let mut num_edges = 0;
    for tri in triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            if count[&(a.min(b), a.max(b))] == 1 {
                if next[a] != usize::MAX {
                    return Err(Error::InvalidMesh(format!("boundary is not simple at vertex {a}")));
                }
                next[a] = b;
                num_edges += 1;
            }
        }
    }
    let start = (0..num_vertices)
        .find(|&v| next[v] != usize::MAX)
        .ok_or_else(|| Error::InvalidMesh("mesh has no boundary".into()))?;
    let mut boundary = vec![start];
    let mut v = next[start];
    while v != start {
        if v == usize::MAX || boundary.len() > num_edges {
            return Err(Error::InvalidMesh("boundary edges do not close into a loop".into()));
        }
        boundary.push(v);
        v = next[v];
    }
    if boundary.len() != num_edges {
        return Err(Error::InvalidMesh(
            "boundary consists of more than one loop (domain is not simply connected)".into(),
        ));
    }
    Ok(boundary)
}

/// Structured mesh of `[0, width] x [0, height]` with `nx * ny` cells, each
/// split into two triangles along the diagonal from lower-left to upper-right.
/// Every interior vertex sees the same point-symmetric patch, which keeps
/// the nonlinear stencil second-order consistent.
pub fn build_rect_mesh(nx: usize, ny: usize, width: f64, height: f64) -> Result<Mesh2D> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidArgument(format!(
            "rectangular mesh needs at least 2 cells per side, got {nx} x {ny}"
        )));
    }
    if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
        return Err(Error::InvalidArgument("rectangle sides must be positive".into()));
    }
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([width * i as f64 / nx as f64, height * j as f64 / ny as f64]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    Mesh2D::new(vertices, triangles)
}

/// [`build_rect_mesh`] translated so its lower-left corner sits at `origin`.
pub fn build_rect_mesh_at(
    origin: Point,
    nx: usize,
    ny: usize,
    width: f64,
    height: f64,
) -> Result<Mesh2D> {
    Ok(build_rect_mesh(nx, ny, width, height)?.translated(origin))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_grid_counts() {
        let m = build_rect_mesh(2, 2, 1.0, 1.0).unwrap();
        assert_eq!(m.num_vertices(), 9);
        assert_eq!(m.num_triangles(), 8);
        assert_eq!(m.boundary_vertices().len(), 8);
    }

    #[test]
    fn rejects_too_few_cells() {
        assert!(build_rect_mesh(1, 4, 1.0, 1.0).is_err());
        assert!(build_rect_mesh(4, 1, 1.0, 1.0).is_err());
    }

    #[test]
    fn areas_partition_rectangle() {
        for &(nx, ny, w, h) in &[(2, 2, 1.0, 1.0), (7, 3, 2.5, 0.3), (16, 16, 1.0, 1.0)] {
            let m = build_rect_mesh(nx, ny, w, h).unwrap();
            assert!((m.total_area() - w * h).abs() < 1e-12);
            assert!(m.geometry().iter().all(|g| g.area > 0.0));
        }
    }

    #[test]
    fn refinement_preserves_area() {
        for n in [4, 8, 16, 32] {
            let coarse = build_rect_mesh(n, n, 1.3, 0.7).unwrap();
            let fine = build_rect_mesh(2 * n, 2 * n, 1.3, 0.7).unwrap();
            assert!((coarse.total_area() - fine.total_area()).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_normals_axis_aligned() {
        let m = build_rect_mesh(33, 33, 1.0, 1.0).unwrap();
        for n in m.boundary_normals() {
            assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-12);
            assert!(n[0].abs() < 1e-12 || n[1].abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_is_counterclockwise() {
        let m = build_rect_mesh(5, 3, 2.0, 1.0).unwrap();
        let bv = m.boundary_vertices();
        let n = bv.len();
        let shoelace: f64 = (0..n)
            .map(|k| {
                let a = m.vertices()[bv[k]];
                let b = m.vertices()[bv[(k + 1) % n]];
                a[0] * b[1] - b[0] * a[1]
            })
            .sum();
        assert!((0.5 * shoelace - 2.0).abs() < 1e-12);
        assert_eq!(n, 2 * (5 + 3));
    }

    #[test]
    fn rejects_inverted_triangle() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(Mesh2D::new(v, vec![[0, 2, 1]]).is_err());
    }

    #[test]
    fn rejects_two_boundary_loops() {
        let v = vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [5.0, 0.0],
            [6.0, 0.0],
            [5.0, 1.0],
        ];
        assert!(Mesh2D::new(v, vec![[0, 1, 2], [3, 4, 5]]).is_err());
    }

    #[test]
    fn basis_gradients_sum_to_zero() {
        let m = build_rect_mesh(3, 4, 1.0, 2.0).unwrap();
        for g in m.geometry() {
            for d in 0..2 {
                let s: f64 = g.grad_basis.iter().map(|gb| gb[d]).sum();
                assert!(s.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let m = build_rect_mesh(3, 2, 1.0, 1.0).unwrap();
        let back = Mesh2D::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(m, back);
    }
}
