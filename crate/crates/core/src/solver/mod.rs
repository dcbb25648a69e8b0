//! P1 variational solver for `div(σ |∇u|^{p-2} ∇u) = 0` with Dirichlet data.
//!
//! The discrete energy `Σ_T area · σ_T · |∇u_T|^p` is minimised by damped
//! Newton on a regularised density with continuation in the regularisation.
//! Zero-conductivity triangles are dropped and every connected
//! infinite-conductivity region becomes one unknown.

mod assembly;
mod dofs;
mod problem;

use serde::{Deserialize, Serialize};

pub use assembly::p1_gradient;
pub use dofs::{DofMap, VertexRole};
pub use problem::ForwardProblem;

use crate::domain::{BoundaryTrace, Conductivity, ConductivityField, Mesh2D, SolverConfig};
use crate::Result;

/// Discrete potential with per-triangle gradients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialField {
    pub vertex_values: Vec<f64>,
    pub gradients: Vec<[f64; 2]>,
    pub energy: f64,
}

impl PotentialField {
    pub fn from_vertex_values(mesh: &Mesh2D, sigma: &ConductivityField, p: f64, vertex_values: Vec<f64>) -> Self {
        let gradients = problem::gradients(mesh, &vertex_values);
        let energy = energy_of_gradients(mesh, sigma, p, &gradients);
        Self { vertex_values, gradients, energy }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_energy: f64,
    /// Weak residual at exit (of the regularised problem when `p != 2`).
    pub residual: f64,
    /// Value taken on each infinite-conductivity component.
    pub dinf_component_values: Vec<f64>,
}

fn energy_of_gradients(mesh: &Mesh2D, sigma: &ConductivityField, p: f64, gradients: &[[f64; 2]]) -> f64 {
    let mut total = 0.0;
    for ((geo, c), g) in mesh.geometry().iter().zip(sigma.values()).zip(gradients) {
        let norm = g[0].hypot(g[1]);
        match *c {
            Conductivity::Zero => {}
            Conductivity::Infinite => {
                if norm != 0.0 {
                    return f64::INFINITY;
                }
            }
            Conductivity::Finite(s) => total += geo.area * s * norm.powf(p),
        }
    }
    total
}

/// `Σ_T area · σ_T · |∇u_T|^p`: D0 triangles contribute nothing and D∞
/// triangles give `+∞` unless the gradient vanishes there.
pub fn energy(mesh: &Mesh2D, sigma: &ConductivityField, p: f64, vertex_values: &[f64]) -> f64 {
    energy_of_gradients(mesh, sigma, p, &problem::gradients(mesh, vertex_values))
}

pub fn solve(
    mesh: &Mesh2D,
    sigma: &ConductivityField,
    f: &BoundaryTrace,
    cfg: &SolverConfig,
) -> Result<(PotentialField, SolveReport)> {
    ForwardProblem::new(mesh, sigma, *cfg)?.solve(f)
}

/// Norm of the weak Euler–Lagrange rows on the unknowns (D∞ rows summed),
/// multiplied by `osc(u|∂Ω) / E(u)` to make it dimensionless.
pub fn weak_residual(mesh: &Mesh2D, sigma: &ConductivityField, p: f64, vertex_values: &[f64]) -> Result<f64> {
    let cfg = SolverConfig::new(p)?;
    Ok(ForwardProblem::new(mesh, sigma, cfg)?.weak_residual(vertex_values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_rect_mesh;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit(n: usize) -> Mesh2D {
        build_rect_mesh(n, n, 1.0, 1.0).unwrap()
    }

    fn block(lo: f64, hi: f64) -> impl Fn([f64; 2]) -> bool {
        move |c| c[0] > lo && c[0] < hi && c[1] > lo && c[1] < hi
    }

    #[test]
    fn energy_examples() {
        let mesh = unit(8);
        let sigma = ConductivityField::uniform(&mesh, 1.0).unwrap();
        let c = vec![3.0; mesh.num_vertices()];
        assert_eq!(energy(&mesh, &sigma, 2.5, &c), 0.0);
        let x: Vec<f64> = mesh.vertices().iter().map(|v| v[0]).collect();
        assert!((energy(&mesh, &sigma, 2.0, &x) - 1.0).abs() < 1e-12);
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert!((energy(&mesh, &sigma, 3.0, &x2) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn energy_on_degenerate_regions() {
        let mesh = unit(8);
        let x: Vec<f64> = mesh.vertices().iter().map(|v| v[0]).collect();
        let s0 = ConductivityField::uniform(&mesh, 1.0).unwrap().with_region(&mesh, block(0.25, 0.75), Conductivity::Zero).unwrap();
        assert!((energy(&mesh, &s0, 2.0, &x) - 0.75).abs() < 1e-12);
        let sinf = ConductivityField::uniform(&mesh, 1.0)
            .unwrap()
            .with_region(&mesh, block(0.25, 0.75), Conductivity::Infinite)
            .unwrap();
        assert_eq!(energy(&mesh, &sinf, 2.0, &x), f64::INFINITY);
    }

    #[test]
    fn affine_data_is_reproduced() {
        let mesh = unit(8);
        let sigma = ConductivityField::uniform(&mesh, 1.0).unwrap();
        for p in [1.5, 2.0, 3.0, 4.0] {
            let f = BoundaryTrace::from_fn(&mesh, |x| 0.3 + x[0] - 0.5 * x[1]).unwrap();
            let (u, rep) = solve(&mesh, &sigma, &f, &SolverConfig::new(p).unwrap()).unwrap();
            for (v, x) in u.vertex_values.iter().zip(mesh.vertices()) {
                assert!((v - (0.3 + x[0] - 0.5 * x[1])).abs() < 1e-10, "p = {p}");
            }
            assert!(rep.residual <= 1e-9);
        }
    }

    #[test]
    fn constant_data_short_circuits() {
        let mesh = unit(4);
        let sigma = ConductivityField::uniform(&mesh, 2.0).unwrap();
        let f = BoundaryTrace::from_fn(&mesh, |_| 1.5).unwrap();
        let (u, rep) = solve(&mesh, &sigma, &f, &SolverConfig::new(3.0).unwrap()).unwrap();
        assert_eq!(rep.iterations, 0);
        assert_eq!(u.energy, 0.0);
        assert!(u.vertex_values.iter().all(|&v| v == 1.5));
    }

    #[test]
    fn boundary_values_exact() {
        let mesh = unit(10);
        let sigma = ConductivityField::uniform(&mesh, 1.0).unwrap();
        let f = BoundaryTrace::from_fn(&mesh, |x| (3.0 * x[0]).sin() + x[1] * x[1]).unwrap();
        let (u, _) = solve(&mesh, &sigma, &f, &SolverConfig::new(3.0).unwrap()).unwrap();
        for (k, &v) in mesh.boundary_vertices().iter().enumerate() {
            assert_eq!(u.vertex_values[v], f.values()[k]);
        }
    }

    #[test]
    fn residual_grows_with_perturbation() {
        let mesh = unit(12);
        let sigma = ConductivityField::uniform(&mesh, 1.0).unwrap();
        let p = 3.0;
        let f = BoundaryTrace::from_fn(&mesh, |x| x[0] * x[1] + x[0]).unwrap();
        let (u, _) = solve(&mesh, &sigma, &f, &SolverConfig::new(p).unwrap()).unwrap();
        let base = weak_residual(&mesh, &sigma, p, &u.vertex_values).unwrap();
        assert!(base < 1e-9);
        let mut last = base;
        for delta in [1e-3, 1e-2, 1e-1] {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let noisy: Vec<f64> = u
                .vertex_values
                .iter()
                .enumerate()
                .map(|(v, &x)| if mesh.is_boundary_vertex(v) { x } else { x + delta * rng.random_range(-1.0..1.0) })
                .collect();
            let r = weak_residual(&mesh, &sigma, p, &noisy).unwrap();
            assert!(r > last, "{r} <= {last}");
            last = r;
        }
    }

    #[test]
    fn dinf_block_is_constant() {
        let mesh = unit(16);
        let sigma = ConductivityField::uniform(&mesh, 1.0)
            .unwrap()
            .with_region(&mesh, block(0.3, 0.7), Conductivity::Infinite)
            .unwrap();
        let f = BoundaryTrace::from_fn(&mesh, |x| x[0]).unwrap();
        let problem = ForwardProblem::new(&mesh, &sigma, SolverConfig::new(2.0).unwrap()).unwrap();
        let (u, rep) = problem.solve(&f).unwrap();
        assert_eq!(rep.dinf_component_values.len(), 1);
        assert!((rep.dinf_component_values[0] - 0.5).abs() < 1e-10);
        let flux = problem.dinf_fluxes(&u.vertex_values);
        assert!(flux[0].abs() < 1e-9);
        assert!(u.energy.is_finite());
    }
}
