use nalgebra_sparse::pattern::SparsityPattern;
use rayon::prelude::*;

use super::dofs::{DofMap, VertexRole};
use crate::domain::{Conductivity, ConductivityField, Mesh2D, Point};

/// A triangle that carries energy: finite, positive conductivity.
#[derive(Debug, Clone)]
pub(crate) struct Element {
    pub weight: f64,
    pub grad_basis: [Point; 3],
    pub roles: [VertexRole; 3],
    /// Position in the Hessian value array for each free-free local pair.
    pub hess_slots: [[usize; 3]; 3],
}

pub(crate) const NO_SLOT: usize = usize::MAX;

/// Finite triangles of the mesh together with the symmetric sparsity
/// pattern of the free-free coupling.
#[derive(Debug, Clone)]
pub(crate) struct Assembly {
    pub elements: Vec<Element>,
    pub pattern: SparsityPattern,
    pub num_free: usize,
}

/// Gradient of the linear interpolant from vertex values, written with
/// differences so that equal values give an exactly zero gradient.
pub fn p1_gradient(grad_basis: &[Point; 3], vals: [f64; 3]) -> Point {
    let d1 = vals[1] - vals[0];
    let d2 = vals[2] - vals[0];
    [
        d1 * grad_basis[1][0] + d2 * grad_basis[2][0],
        d1 * grad_basis[1][1] + d2 * grad_basis[2][1],
    ]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

impl Assembly {
    pub fn new(mesh: &Mesh2D, sigma: &ConductivityField, dofs: &DofMap) -> Self {
        let n = dofs.num_free();
        let mut raw = Vec::new();
        for ((tri, geo), c) in mesh.triangles().iter().zip(mesh.geometry()).zip(sigma.values()) {
            if let Conductivity::Finite(s) = *c {
                let roles = [dofs.role(tri[0]), dofs.role(tri[1]), dofs.role(tri[2])];
                raw.push((s * geo.area, geo.grad_basis, roles));
            }
        }

        let mut columns: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (_, _, roles) in &raw {
            for ra in roles {
                if let VertexRole::Free(i) = *ra {
                    for rb in roles {
                        if let VertexRole::Free(j) = *rb {
                            columns[j].push(i);
                        }
                    }
                }
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        offsets.push(0);
        for col in &mut columns {
            col.sort_unstable();
            col.dedup();
            indices.extend_from_slice(col);
            offsets.push(indices.len());
        }
        let pattern = SparsityPattern::try_from_offsets_and_indices(n, n, offsets.clone(), indices.clone())
            .expect("sorted, deduplicated pattern");

        let slot = |row: usize, col: usize| -> usize {
            let lane = &indices[offsets[col]..offsets[col + 1]];
            offsets[col] + lane.binary_search(&row).expect("entry in pattern")
        };
        let elements = raw
            .into_iter()
            .map(|(weight, grad_basis, roles)| {
                let mut hess_slots = [[NO_SLOT; 3]; 3];
                for a in 0..3 {
                    for b in 0..3 {
                        if let (VertexRole::Free(i), VertexRole::Free(j)) = (roles[a], roles[b]) {
                            hess_slots[a][b] = slot(i, j);
                        }
                    }
                }
                Element { weight, grad_basis, roles, hess_slots }
            })
            .collect();
        Self { elements, pattern, num_free: n }
    }

    pub fn local_values(e: &Element, free: &[f64], boundary: &[f64]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, r) in e.roles.iter().enumerate() {
            out[k] = match *r {
                VertexRole::Free(i) => free[i],
                VertexRole::Boundary(b) => boundary[b],
                VertexRole::Dead => 0.0,
            };
        }
        out
    }

    /// Regularised energy `Σ A σ (|∇u|² + ε²)^{p/2}`.
    pub fn energy(&self, p: f64, eps: f64, free: &[f64], boundary: &[f64]) -> f64 {
        let parts: Vec<f64> = self
            .elements
            .par_iter()
            .map(|e| {
                let g = p1_gradient(&e.grad_basis, Self::local_values(e, free, boundary));
                e.weight * (dot(g, g) + eps * eps).powf(0.5 * p)
            })
            .collect();
        parts.iter().sum()
    }

    /// Rows `Σ_T A σ (|∇u|² + ε²)^{(p-2)/2} ∇u·∇φ_i` over the unknowns, i.e.
    /// the energy gradient divided by `p`.
    pub fn flux_rows(&self, p: f64, eps: f64, free: &[f64], boundary: &[f64]) -> Vec<f64> {
        let locals: Vec<[f64; 3]> = self
            .elements
            .par_iter()
            .map(|e| {
                let g = p1_gradient(&e.grad_basis, Self::local_values(e, free, boundary));
                let s = dot(g, g) + eps * eps;
                let coef = if s > 0.0 { e.weight * s.powf(0.5 * p - 1.0) } else { 0.0 };
                [0, 1, 2].map(|a| coef * dot(g, e.grad_basis[a]))
            })
            .collect();
        let mut rows = vec![0.0; self.num_free];
        for (e, loc) in self.elements.iter().zip(&locals) {
            for a in 0..3 {
                if let VertexRole::Free(i) = e.roles[a] {
                    rows[i] += loc[a];
                }
            }
        }
        rows
    }

    /// Energy gradient and Hessian values (in pattern order) of the
    /// regularised energy.
    pub fn gradient_hessian(&self, p: f64, eps: f64, free: &[f64], boundary: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let locals: Vec<([f64; 3], [[f64; 3]; 3])> = self
            .elements
            .par_iter()
            .map(|e| {
                let g = p1_gradient(&e.grad_basis, Self::local_values(e, free, boundary));
                let s = (dot(g, g) + eps * eps).max(1e-300);
                let c1 = e.weight * p * s.powf(0.5 * p - 1.0);
                let c2 = e.weight * p * (p - 2.0) * s.powf(0.5 * p - 2.0);
                let gd = [0, 1, 2].map(|a| dot(g, e.grad_basis[a]));
                let grad = gd.map(|x| c1 * x);
                let mut hess = [[0.0; 3]; 3];
                for a in 0..3 {
                    for b in 0..3 {
                        hess[a][b] = c1 * dot(e.grad_basis[a], e.grad_basis[b]) + c2 * gd[a] * gd[b];
                    }
                }
                (grad, hess)
            })
            .collect();
        let mut grad = vec![0.0; self.num_free];
        let mut hess = vec![0.0; self.pattern.nnz()];
        for (e, (lg, lh)) in self.elements.iter().zip(&locals) {
            for a in 0..3 {
                if let VertexRole::Free(i) = e.roles[a] {
                    grad[i] += lg[a];
                    for b in 0..3 {
                        let slot = e.hess_slots[a][b];
                        if slot != NO_SLOT {
                            hess[slot] += lh[a][b];
                        }
                    }
                }
            }
        }
        (grad, hess)
    }
}
