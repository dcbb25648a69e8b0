use crate::domain::{Conductivity, ConductivityField, Mesh2D};

/// How a mesh vertex enters the discrete problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexRole {
    /// Unknown with the given index. All vertices of one D∞ component share
    /// a single index.
    Free(usize),
    /// Prescribed by the boundary trace entry with this index.
    Boundary(usize),
    /// Touches only D0 triangles; carries no information and is set to 0.
    Dead,
}

/// Map from mesh vertices to unknowns.
#[derive(Debug, Clone)]
pub struct DofMap {
    roles: Vec<VertexRole>,
    num_free: usize,
    /// Vertices of each D∞ component, sorted.
    components: Vec<Vec<usize>>,
    /// Unknown index of each component.
    component_dofs: Vec<usize>,
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

impl DofMap {
    /// Free vertices keep their natural order; D∞ components are numbered
    /// last so the dense coupling rows they create do not cause fill-in.
    pub fn new(mesh: &Mesh2D, sigma: &ConductivityField) -> Self {
        let nv = mesh.num_vertices();
        let mut parent: Vec<usize> = (0..nv).collect();
        let mut in_dinf = vec![false; nv];
        let mut touches_active = vec![false; nv];
        for (tri, value) in mesh.triangles().iter().zip(sigma.values()) {
            match value {
                Conductivity::Zero => {}
                Conductivity::Infinite => {
                    for &v in tri {
                        in_dinf[v] = true;
                        touches_active[v] = true;
                    }
                    let r0 = find(&mut parent, tri[0]);
                    for &v in &tri[1..] {
                        let r = find(&mut parent, v);
                        parent[r] = r0;
                    }
                }
                Conductivity::Finite(_) => {
                    for &v in tri {
                        touches_active[v] = true;
                    }
                }
            }
        }

        let mut boundary_index = vec![usize::MAX; nv];
        for (k, &v) in mesh.boundary_vertices().iter().enumerate() {
            boundary_index[v] = k;
        }

        let mut roles = vec![VertexRole::Dead; nv];
        let mut num_free = 0;
        for v in 0..nv {
            if boundary_index[v] != usize::MAX {
                roles[v] = VertexRole::Boundary(boundary_index[v]);
            } else if touches_active[v] && !in_dinf[v] {
                roles[v] = VertexRole::Free(num_free);
                num_free += 1;
            }
        }

        let mut root_to_component = vec![usize::MAX; nv];
        let mut components: Vec<Vec<usize>> = Vec::new();
        for v in 0..nv {
            if !in_dinf[v] || boundary_index[v] != usize::MAX {
                continue;
            }
            let r = find(&mut parent, v);
            if root_to_component[r] == usize::MAX {
                root_to_component[r] = components.len();
                components.push(Vec::new());
            }
            components[root_to_component[r]].push(v);
        }
        let mut component_dofs = Vec::with_capacity(components.len());
        for comp in &components {
            let dof = num_free;
            num_free += 1;
            component_dofs.push(dof);
            for &v in comp {
                roles[v] = VertexRole::Free(dof);
            }
        }
        Self { roles, num_free, components, component_dofs }
    }

    pub fn role(&self, v: usize) -> VertexRole {
        self.roles[v]
    }

    pub fn roles(&self) -> &[VertexRole] {
        &self.roles
    }

    pub fn num_free(&self) -> usize {
        self.num_free
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_dofs(&self) -> &[usize] {
        &self.component_dofs
    }

    pub fn is_dead(&self, v: usize) -> bool {
        self.roles[v] == VertexRole::Dead
    }

    /// Vertex values from unknowns and boundary data.
    pub fn expand(&self, free: &[f64], boundary: &[f64]) -> Vec<f64> {
        self.roles
            .iter()
            .map(|r| match *r {
                VertexRole::Free(i) => free[i],
                VertexRole::Boundary(k) => boundary[k],
                VertexRole::Dead => 0.0,
            })
            .collect()
    }

    /// Unknowns from vertex values. A D∞ component takes the mean of its
    /// vertex values.
    pub fn restrict(&self, vertex_values: &[f64]) -> Vec<f64> {
        let mut free = vec![0.0; self.num_free];
        for (v, r) in self.roles.iter().enumerate() {
            if let VertexRole::Free(i) = *r {
                free[i] = vertex_values[v];
            }
        }
        for (comp, &dof) in self.components.iter().zip(&self.component_dofs) {
            free[dof] = comp.iter().map(|&v| vertex_values[v]).sum::<f64>() / comp.len() as f64;
        }
        free
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_rect_mesh;

    fn block(lo: f64, hi: f64) -> impl Fn([f64; 2]) -> bool {
        move |c| c[0] > lo && c[0] < hi && c[1] > lo && c[1] < hi
    }

    #[test]
    fn plain_field() {
        let mesh = build_rect_mesh(4, 4, 1.0, 1.0).unwrap();
        let sigma = ConductivityField::uniform(&mesh, 1.0).unwrap();
        let dofs = DofMap::new(&mesh, &sigma);
        assert_eq!(dofs.num_free(), 9);
        assert!(dofs.components().is_empty());
    }

    #[test]
    fn dinf_block_merges_to_one_unknown() {
        let mesh = build_rect_mesh(8, 8, 1.0, 1.0).unwrap();
        let sigma = ConductivityField::uniform(&mesh, 1.0)
            .unwrap()
            .with_region(&mesh, block(0.25, 0.75), Conductivity::Infinite)
            .unwrap();
        let dofs = DofMap::new(&mesh, &sigma);
        assert_eq!(dofs.components().len(), 1);
        // 5 x 5 block vertices collapse to one unknown.
        assert_eq!(dofs.components()[0].len(), 25);
        assert_eq!(dofs.num_free(), 49 - 25 + 1);
        assert_eq!(dofs.component_dofs(), &[dofs.num_free() - 1]);
    }

    #[test]
    fn d0_interior_vertices_are_dead() {
        let mesh = build_rect_mesh(8, 8, 1.0, 1.0).unwrap();
        let sigma = ConductivityField::uniform(&mesh, 1.0)
            .unwrap()
            .with_region(&mesh, block(0.25, 0.75), Conductivity::Zero)
            .unwrap();
        let dofs = DofMap::new(&mesh, &sigma);
        let dead = (0..mesh.num_vertices()).filter(|&v| dofs.is_dead(v)).count();
        assert_eq!(dead, 9);
        assert_eq!(dofs.num_free(), 49 - 9);
    }

    #[test]
    fn expand_restrict_round_trip() {
        let mesh = build_rect_mesh(6, 6, 1.0, 1.0).unwrap();
        let sigma = ConductivityField::uniform(&mesh, 1.0)
            .unwrap()
            .with_region(&mesh, block(0.3, 0.7), Conductivity::Infinite)
            .unwrap();
        let dofs = DofMap::new(&mesh, &sigma);
        let free: Vec<f64> = (0..dofs.num_free()).map(|i| i as f64).collect();
        let bnd = vec![-1.0; mesh.boundary_vertices().len()];
        let u = dofs.expand(&free, &bnd);
        assert_eq!(dofs.restrict(&u), free);
    }
}
