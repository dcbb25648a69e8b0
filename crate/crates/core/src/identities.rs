//! Discrete checks of the Rellich identity and the monotonicity inequality.

use serde::Serialize;

use crate::dnmap::DnEvaluator;
use crate::domain::{BoundaryTrace, Conductivity, ConductivityField, Mesh2D, Point, SolverConfig};
use crate::solver::{p1_gradient, ForwardProblem};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct RellichReport {
    /// `∫ (α·∇σ) |∇u|^p`.
    pub lhs: f64,
    /// `∫_∂Ω (α·ν) σ |∇u|^p`.
    pub rhs_normal_term: f64,
    /// `p ∫_∂Ω (α·∇u) σ |∇u|^{p-2} ∂_ν u`.
    pub rhs_flux_term: f64,
    /// `|lhs − rhs_normal_term + rhs_flux_term|`.
    pub residual: f64,
    pub alpha: Point,
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Per-triangle conductivity from vertex values (exact triangle means of
/// the linear interpolant).
pub fn triangle_means(mesh: &Mesh2D, vertex_sigma: &[f64]) -> Result<ConductivityField> {
    if vertex_sigma.len() != mesh.num_vertices() {
        return Err(Error::InvalidField("one conductivity value per vertex expected".into()));
    }
    if vertex_sigma.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidField("vertex conductivity must be finite and positive".into()));
    }
    ConductivityField::new(
        mesh.triangles()
            .iter()
            .map(|t| Conductivity::Finite((vertex_sigma[t[0]] + vertex_sigma[t[1]] + vertex_sigma[t[2]]) / 3.0))
            .collect(),
    )
}

/// Solves with the P1 conductivity `vertex_sigma` and evaluates all three
/// terms of the Rellich identity for the vector `alpha`.
pub fn rellich_check(
    mesh: &Mesh2D,
    vertex_sigma: &[f64],
    f: &BoundaryTrace,
    alpha: Point,
    cfg: &SolverConfig,
) -> Result<RellichReport> {
    let sigma = triangle_means(mesh, vertex_sigma)?;
    let (u, _) = ForwardProblem::new(mesh, &sigma, *cfg)?.solve(f)?;
    Ok(rellich_terms(mesh, vertex_sigma, cfg.p.get(), &u.vertex_values, alpha))
}

/// Normal derivative `d` solving `σ (t² + d²)^{(p-2)/2} d = q` for a
/// given tangential derivative `t` and flux density `q`.
fn normal_derivative(p: f64, sigma: f64, t: f64, q: f64) -> f64 {
    if q == 0.0 {
        return 0.0;
    }
    let target = q / sigma;
    if p == 2.0 {
        return target;
    }
    let flux = |d: f64| (t * t + d * d).powf(0.5 * (p - 2.0)) * d;
    let (mut lo, mut hi) = (0.0_f64, target.abs().powf(1.0 / (p - 1.0)).max(f64::MIN_POSITIVE));
    while flux(hi) < target.abs() {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if flux(mid) < target.abs() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).copysign(target)
}

/// Evaluates the three terms for a discrete solution `u`.
///
/// The boundary gradient is rebuilt from the trace (tangential part) and
/// from the boundary rows of the weak form (flux density), both of which
/// are second-order accurate on smooth boundary pieces. At corners both are
/// extrapolated linearly along each edge.
pub fn rellich_terms(mesh: &Mesh2D, vertex_sigma: &[f64], p: f64, u: &[f64], alpha: Point) -> RellichReport {
    let tri_sigma: Vec<f64> = mesh
        .triangles()
        .iter()
        .map(|t| (vertex_sigma[t[0]] + vertex_sigma[t[1]] + vertex_sigma[t[2]]) / 3.0)
        .collect();
    let mut lhs = 0.0;
    let mut rows = vec![0.0; mesh.num_vertices()];
    for ((tri, geo), s) in mesh.triangles().iter().zip(mesh.geometry()).zip(&tri_sigma) {
        let g = p1_gradient(&geo.grad_basis, [u[tri[0]], u[tri[1]], u[tri[2]]]);
        let n = dot(g, g).sqrt();
        let grad_sigma = p1_gradient(&geo.grad_basis, [vertex_sigma[tri[0]], vertex_sigma[tri[1]], vertex_sigma[tri[2]]]);
        lhs += geo.area * dot(alpha, grad_sigma) * n.powf(p);
        if n > 0.0 {
            let c = geo.area * s * n.powf(p - 2.0);
            for (k, &v) in tri.iter().enumerate() {
                rows[v] += c * dot(g, geo.grad_basis[k]);
            }
        }
    }

    let bv = mesh.boundary_vertices();
    let nb = bv.len();
    let pts = mesh.vertices();
    let normals = mesh.boundary_normals();
    // Edge k joins bv[k] and bv[k + 1].
    let len: Vec<f64> = (0..nb)
        .map(|k| {
            let (a, b) = (pts[bv[k]], pts[bv[(k + 1) % nb]]);
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .collect();
    let prev = |k: usize| (k + nb - 1) % nb;
    let is_corner: Vec<bool> = (0..nb).map(|k| dot(normals[prev(k)], normals[k]) < 1.0 - 1e-9).collect();
    // Flux density and tangential derivative at smooth boundary vertices.
    let q: Vec<f64> = (0..nb).map(|k| rows[bv[k]] / (0.5 * (len[prev(k)] + len[k]))).collect();
    let ut: Vec<f64> = (0..nb)
        .map(|k| (u[bv[(k + 1) % nb]] - u[bv[prev(k)]]) / (len[prev(k)] + len[k]))
        .collect();

    // Value of `field` at vertex k as seen from the edge leaving in direction
    // `step` (+1 forward, -1 backward), extrapolating at corners.
    let on_edge = |field: &[f64], k: usize, step: isize| -> f64 {
        if !is_corner[k] {
            return field[k];
        }
        let at = |j: isize| ((k as isize + j * step).rem_euclid(nb as isize)) as usize;
        let (k1, k2) = (at(1), at(2));
        if is_corner[k1] {
            // Edge with corners at both ends: one-sided data only.
            return field[k1];
        }
        if is_corner[k2] {
            field[k1]
        } else {
            2.0 * field[k1] - field[k2]
        }
    };
    let edge_ut = |k: usize| (u[bv[(k + 1) % nb]] - u[bv[k]]) / len[k];

    let (mut normal_term, mut flux_term) = (0.0, 0.0);
    for k in 0..nb {
        let kb = (k + 1) % nb;
        let nu = normals[k];
        let (a, b) = (pts[bv[k]], pts[bv[kb]]);
        let tau = [(b[0] - a[0]) / len[k], (b[1] - a[1]) / len[k]];
        let mut ends = [0.0; 2];
        let mut fluxes = [0.0; 2];
        for (slot, (vk, step)) in [(k, 1isize), (kb, -1isize)].into_iter().enumerate() {
            let qv = on_edge(&q, vk, step);
            let tv = if is_corner[vk] && is_corner[if step > 0 { kb } else { k }] {
                edge_ut(k)
            } else {
                on_edge(&ut, vk, step)
            };
            let sv = vertex_sigma[bv[vk]];
            let dn = normal_derivative(p, sv, tv, qv);
            let g = [tv * tau[0] + dn * nu[0], tv * tau[1] + dn * nu[1]];
            ends[slot] = dot(alpha, nu) * sv * dot(g, g).sqrt().powf(p);
            fluxes[slot] = p * dot(alpha, g) * qv;
        }
        normal_term += 0.5 * len[k] * (ends[0] + ends[1]);
        flux_term += 0.5 * len[k] * (fluxes[0] + fluxes[1]);
    }
    RellichReport {
        lhs,
        rhs_normal_term: normal_term,
        rhs_flux_term: flux_term,
        residual: (lhs - normal_term + flux_term).abs(),
        alpha,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    /// `(middle − lower, upper − middle)`.
    pub margins: (f64, f64),
    /// Slack allowed for solver inaccuracy.
    pub tolerance: f64,
    pub holds: bool,
}

fn finite_values(sigma: &ConductivityField) -> Result<Vec<f64>> {
    sigma
        .finite_values()
        .ok_or_else(|| Error::InvalidField("monotonicity check needs finite positive conductivities".into()))
}

/// `lower`, `upper` from the background solution `u0` and the pairing
/// difference `middle` for the data `f`.
pub fn monotonicity_check(
    mesh: &Mesh2D,
    sigma0: &ConductivityField,
    sigma1: &ConductivityField,
    f: &BoundaryTrace,
    cfg: &SolverConfig,
) -> Result<MonotonicityReport> {
    let s0 = finite_values(sigma0)?;
    let s1 = finite_values(sigma1)?;
    let p = cfg.p.get();
    let eval0 = DnEvaluator::new(mesh, sigma0, *cfg)?;
    let eval1 = DnEvaluator::new(mesh, sigma1, *cfg)?;
    let (u0, _) = eval0.solve(f)?;
    let (u1, _) = eval1.solve(f)?;
    let fbar_ext = eval0.extend(f)?;
    let middle = eval1.pairing_with_extension(&u1, &fbar_ext) - eval0.pairing_with_extension(&u0, &fbar_ext);

    let q = 1.0 / (p - 1.0);
    let (mut lower, mut upper) = (0.0, 0.0);
    for (((geo, g), a), b) in mesh.geometry().iter().zip(&u0.gradients).zip(&s0).zip(&s1) {
        let w = geo.area * dot(*g, *g).sqrt().powf(p);
        lower += (p - 1.0) * a / b.powf(q) * (b.powf(q) - a.powf(q)) * w;
        upper += (b - a) * w;
    }
    let tolerance = 10.0 * cfg.tol_residual * u0.energy.max(u1.energy);
    let margins = (middle - lower, upper - middle);
    Ok(MonotonicityReport {
        lower,
        middle,
        upper,
        margins,
        tolerance,
        holds: margins.0 >= -tolerance && margins.1 >= -tolerance,
    })
}
