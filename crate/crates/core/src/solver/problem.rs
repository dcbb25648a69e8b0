use std::sync::OnceLock;

use log::{debug, trace};
use nalgebra::DMatrix;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::CscMatrix;

use super::assembly::{p1_gradient, Assembly};
use super::dofs::DofMap;
use super::{PotentialField, SolveReport};
use crate::domain::{validate_field, BoundaryTrace, ConductivityField, Mesh2D, SolverConfig};
use crate::{Error, Result};

const ARMIJO: f64 = 1e-4;

/// A mesh, conductivity and solver configuration prepared for repeated
/// solves with different boundary data.
pub struct ForwardProblem<'a> {
    mesh: &'a Mesh2D,
    sigma: ConductivityField,
    cfg: SolverConfig,
    dofs: DofMap,
    assembly: Assembly,
    /// Factorisation of the (constant) p = 2 Hessian.
    linear: OnceLock<std::result::Result<CscCholesky<f64>, String>>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl<'a> ForwardProblem<'a> {
    pub fn new(mesh: &'a Mesh2D, sigma: &ConductivityField, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        validate_field(mesh, sigma).into_result()?;
        let dofs = DofMap::new(mesh, sigma);
        let assembly = Assembly::new(mesh, sigma, &dofs);
        let sigma = sigma.clone();
        Ok(Self { mesh, sigma, cfg, dofs, assembly, linear: OnceLock::new() })
    }

    pub fn mesh(&self) -> &Mesh2D {
        self.mesh
    }

    pub fn sigma(&self) -> &ConductivityField {
        &self.sigma
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    fn p(&self) -> f64 {
        self.cfg.p.get()
    }

    fn linear_factor(&self) -> Result<&CscCholesky<f64>> {
        let cached = self.linear.get_or_init(|| {
            let zeros_free = vec![0.0; self.dofs.num_free()];
            let zeros_bnd = vec![0.0; self.mesh.boundary_vertices().len()];
            let (_, values) = self.assembly.gradient_hessian(2.0, 0.0, &zeros_free, &zeros_bnd);
            factor(&self.assembly, values).map_err(|e| e.to_string())
        });
        cached.as_ref().map_err(|e| Error::Solver(format!("p = 2 system is singular: {e}")))
    }

    /// Unknowns of the discrete p = 2 problem with the given data.
    fn linear_solution(&self, boundary: &[f64]) -> Result<Vec<f64>> {
        let n = self.dofs.num_free();
        if n == 0 {
            return Ok(Vec::new());
        }
        let zeros = vec![0.0; n];
        let rows = self.assembly.flux_rows(2.0, 0.0, &zeros, boundary);
        let chol = self.linear_factor()?;
        // Energy gradient at zero is 2 * rows; the Hessian is the assembled 2K.
        let rhs = DMatrix::from_iterator(n, 1, rows.iter().map(|r| -2.0 * r));
        Ok(chol.solve(&rhs).as_slice().to_vec())
    }

    /// Unregularised residual vector and the scale that makes it relative.
    fn residual_parts(&self, eps: f64, free: &[f64], boundary: &[f64], data_osc: f64) -> (Vec<f64>, f64) {
        let rows = self.assembly.flux_rows(self.p(), eps, free, boundary);
        let energy = self.assembly.energy(self.p(), 0.0, free, boundary);
        let scale = if energy > 0.0 { data_osc / energy } else { 1.0 };
        (rows, scale)
    }

    pub fn solve(&self, f: &BoundaryTrace) -> Result<(PotentialField, SolveReport)> {
        self.solve_from(f, None)
    }

    /// Solves starting from the given vertex values (boundary entries are
    /// overwritten by the data). Without a start the p = 2 solution is used.
    pub fn solve_from(&self, f: &BoundaryTrace, start: Option<&[f64]>) -> Result<(PotentialField, SolveReport)> {
        let boundary = f.values();
        if boundary.len() != self.mesh.boundary_vertices().len() {
            return Err(Error::InvalidArgument("boundary trace does not match the mesh".into()));
        }
        let n = self.dofs.num_free();
        let p = self.p();
        let osc = f.oscillation();

        if f.is_constant() {
            let c = boundary.first().copied().unwrap_or(0.0);
            let free = vec![c; n];
            return Ok(self.finish(free, boundary, 0, 0.0));
        }

        let mut free = match start {
            Some(u) => {
                if u.len() != self.mesh.num_vertices() {
                    return Err(Error::InvalidArgument("start vector has the wrong length".into()));
                }
                self.dofs.restrict(u)
            }
            None => self.linear_solution(boundary)?,
        };
        if p == 2.0 && start.is_none() {
            let (rows, scale) = self.residual_parts(0.0, &free, boundary, osc);
            let residual = norm(&rows) * scale;
            return Ok(self.finish(free, boundary, 1, residual));
        }

        let grad_scale = osc / self.mesh.diameter();
        let mut levels = Vec::new();
        let mut rel = 1e-2_f64;
        let target = self.cfg.epsilon_reg;
        while rel > target * (1.0 + 1e-12) && p != 2.0 {
            levels.push(rel);
            rel *= 0.1;
        }
        levels.push(target);

        let mut iterations = 0;
        let mut residual = f64::INFINITY;
        for (li, &rel_eps) in levels.iter().enumerate() {
            let last = li + 1 == levels.len();
            let eps = rel_eps * grad_scale;
            let (its, res) = self.newton(&mut free, boundary, eps, osc, last)?;
            iterations += its;
            residual = res;
            debug!("continuation level eps = {eps:.3e}: {its} iterations, residual {res:.3e}");
        }
        Ok(self.finish(free, boundary, iterations, residual))
    }

    /// Damped Newton on one regularisation level. Returns iterations and
    /// the residual at exit.
    fn newton(&self, free: &mut Vec<f64>, boundary: &[f64], eps: f64, osc: f64, last: bool) -> Result<(usize, f64)> {
        let p = self.p();
        let n = free.len();
        if n == 0 {
            return Ok((0, 0.0));
        }
        let tol_res = if last { self.cfg.tol_residual } else { self.cfg.tol_residual.sqrt() };
        let tol_energy = self.cfg.tol_energy;
        let mut chol: Option<CscCholesky<f64>> = None;
        let mut energy = self.assembly.energy(p, eps, free, boundary);
        let mut last_decrease = f64::INFINITY;

        for it in 0..self.cfg.max_iters {
            let (grad, hess) = self.assembly.gradient_hessian(p, eps, free, boundary);
            let true_energy = self.assembly.energy(p, 0.0, free, boundary);
            let scale = if true_energy > 0.0 { osc / true_energy } else { 1.0 };
            let residual = norm(&grad) / p * scale;

            let mut direction = match newton_direction(&self.assembly, &mut chol, hess, &grad) {
                Some(d) if dot(&d, &grad) < 0.0 => d,
                _ => {
                    debug!("Newton direction unavailable, falling back to steepest descent");
                    grad.iter().map(|g| -g).collect()
                }
            };
            let slope = dot(&direction, &grad);
            let decrement = -slope / energy.abs().max(f64::MIN_POSITIVE);
            trace!("iter {it}: energy {energy:.15e} residual {residual:.3e} decrement {decrement:.3e}");
            if residual < tol_res && (last_decrease < tol_energy || decrement < tol_energy) {
                return Ok((it, residual));
            }

            if decrement < 1e-10 {
                // Energy differences are now at round-off level and Armijo
                // cannot be evaluated reliably; the full step is safe here.
                for (x, d) in free.iter_mut().zip(&direction) {
                    *x += d;
                }
                let new_energy = self.assembly.energy(p, eps, free, boundary);
                last_decrease = ((energy - new_energy) / energy.abs()).abs();
                energy = new_energy;
                continue;
            }

            let mut alpha = 1.0;
            let mut trial = vec![0.0; n];
            let mut accepted = false;
            for attempt in 0..2 {
                alpha = 1.0;
                for _ in 0..60 {
                    for ((t, x), d) in trial.iter_mut().zip(free.iter()).zip(&direction) {
                        *t = x + alpha * d;
                    }
                    let e = self.assembly.energy(p, eps, &trial, boundary);
                    if e <= energy + ARMIJO * alpha * slope {
                        last_decrease = (energy - e) / energy.abs().max(f64::MIN_POSITIVE);
                        energy = e;
                        accepted = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                if accepted || attempt == 1 {
                    break;
                }
                direction = grad.iter().map(|g| -g).collect();
            }
            if !accepted {
                if residual < tol_res {
                    return Ok((it, residual));
                }
                return Err(Error::Solver(format!(
                    "line search failed (energy {energy:.6e}, residual {residual:.3e})"
                )));
            }
            trace!("step length {alpha}");
            std::mem::swap(free, &mut trial);
        }
        Err(Error::NotConverged(format!(
            "Newton did not converge within {} iterations at eps = {eps:.3e}",
            self.cfg.max_iters
        )))
    }

    fn finish(&self, free: Vec<f64>, boundary: &[f64], iterations: usize, residual: f64) -> (PotentialField, SolveReport) {
        let vertex_values = self.dofs.expand(&free, boundary);
        let field = PotentialField::from_vertex_values(self.mesh, &self.sigma, self.p(), vertex_values);
        let dinf_component_values = self.dofs.component_dofs().iter().map(|&d| free[d]).collect();
        let report = SolveReport { iterations, final_energy: field.energy, residual, dinf_component_values };
        (field, report)
    }

    /// Unregularised weak residual of arbitrary vertex values (boundary
    /// entries must match the data).
    pub fn weak_residual(&self, vertex_values: &[f64]) -> f64 {
        let (free, boundary, osc) = self.split(vertex_values);
        let (rows, scale) = self.residual_parts(0.0, &free, &boundary, osc);
        norm(&rows) * scale
    }

    /// Net flux out of each D∞ component, relative like the weak residual.
    pub fn dinf_fluxes(&self, vertex_values: &[f64]) -> Vec<f64> {
        let (free, boundary, osc) = self.split(vertex_values);
        let (rows, scale) = self.residual_parts(0.0, &free, &boundary, osc);
        self.dofs.component_dofs().iter().map(|&d| rows[d] * scale).collect()
    }

    fn split(&self, vertex_values: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let free = self.dofs.restrict(vertex_values);
        let boundary: Vec<f64> = self.mesh.boundary_vertices().iter().map(|&v| vertex_values[v]).collect();
        let (lo, hi) = boundary
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        (free, boundary, hi - lo)
    }

    /// Per-triangle gradients of vertex values.
    pub fn gradients(&self, vertex_values: &[f64]) -> Vec<[f64; 2]> {
        gradients(self.mesh, vertex_values)
    }
}

pub(crate) fn gradients(mesh: &Mesh2D, vertex_values: &[f64]) -> Vec<[f64; 2]> {
    mesh.triangles()
        .iter()
        .zip(mesh.geometry())
        .map(|(t, g)| p1_gradient(&g.grad_basis, [vertex_values[t[0]], vertex_values[t[1]], vertex_values[t[2]]]))
        .collect()
}

fn factor(assembly: &Assembly, values: Vec<f64>) -> std::result::Result<CscCholesky<f64>, nalgebra_sparse::factorization::CholeskyError> {
    let matrix = CscMatrix::try_from_pattern_and_values(assembly.pattern.clone(), values).expect("values match pattern");
    CscCholesky::factor(&matrix)
}

fn newton_direction(
    assembly: &Assembly,
    chol: &mut Option<CscCholesky<f64>>,
    hess: Vec<f64>,
    grad: &[f64],
) -> Option<Vec<f64>> {
    let ok = match chol {
        Some(c) => c.refactor(&hess).is_ok(),
        None => match factor(assembly, hess) {
            Ok(c) => {
                *chol = Some(c);
                true
            }
            Err(_) => false,
        },
    };
    if !ok {
        *chol = None;
        return None;
    }
    let c = chol.as_ref()?;
    let rhs = DMatrix::from_iterator(grad.len(), 1, grad.iter().map(|g| -g));
    let d = c.solve(&rhs);
    let d = d.as_slice().to_vec();
    d.iter().all(|x| x.is_finite()).then_some(d)
}
