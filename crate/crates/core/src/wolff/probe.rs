use serde::{Deserialize, Serialize};

use super::wave::WolffWave;
use crate::domain::{Exponent, Mesh2D, Point};
use crate::{Error, Result};

/// Direction, offset and frequency of one plane-wave probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeParams {
    pub rho: Point,
    pub rho_perp: Point,
    pub t: f64,
    pub tau: f64,
}

impl ProbeParams {
    pub fn new(rho: Point, rho_perp: Point, t: f64, tau: f64) -> Result<Self> {
        let norm = |v: Point| v[0].hypot(v[1]);
        if (norm(rho) - 1.0).abs() > 1e-12 || (norm(rho_perp) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("probe directions must be unit vectors".into()));
        }
        if (rho[0] * rho_perp[0] + rho[1] * rho_perp[1]).abs() > 1e-12 {
            return Err(Error::InvalidArgument("rho and rho_perp must be orthogonal".into()));
        }
        if !(tau > 0.0 && tau.is_finite()) || !t.is_finite() {
            return Err(Error::InvalidArgument("tau must be positive and t finite".into()));
        }
        Ok(Self { rho, rho_perp, t, tau })
    }

    /// `rho = (cos θ, sin θ)` and `rho_perp` its counterclockwise rotation.
    pub fn from_angle(theta: f64, t: f64, tau: f64) -> Result<Self> {
        let (s, c) = theta.sin_cos();
        Self::new([c, s], [-s, c], t, tau)
    }

    pub fn with_t(self, t: f64) -> Self {
        Self { t, ..self }
    }

    pub fn with_tau(self, tau: f64) -> Self {
        Self { tau, ..self }
    }
}

/// `h(x) = e^{τ(ρ·x − t)} w(τ ρ⊥·x)` and its gradient.
pub fn plane_wave(wave: &WolffWave, probe: &ProbeParams, x: Point) -> (f64, Point) {
    let along = probe.rho[0] * x[0] + probe.rho[1] * x[1];
    let across = probe.rho_perp[0] * x[0] + probe.rho_perp[1] * x[1];
    let amp = (probe.tau * (along - probe.t)).exp();
    let (w, dw) = wave.eval(probe.tau * across);
    let g = |k: usize| probe.tau * amp * (w * probe.rho[k] + dw * probe.rho_perp[k]);
    (amp * w, [g(0), g(1)])
}

/// Relative discrete residual of `div(|∇h|^{p-2}∇h) = 0` for the nodal
/// interpolant of `h` on `mesh`: the ℓ² norm of the interior rows of the
/// weak form divided by the total absolute boundary flux (ℓ¹ norm of the
/// boundary rows).
pub fn p_harmonicity_residual(wave: &WolffWave, probe: &ProbeParams, mesh: &Mesh2D, p: f64) -> Result<f64> {
    let p = Exponent::new(p)?;
    if probe.tau * mesh.max_edge_length() > 0.5 {
        return Err(Error::UnresolvedProbe(probe.tau * mesh.max_edge_length()));
    }
    let u: Vec<f64> = mesh.vertices().iter().map(|&x| plane_wave(wave, probe, x).0).collect();
    let mut rows = vec![0.0; mesh.num_vertices()];
    for (tri, geo) in mesh.triangles().iter().zip(mesh.geometry()) {
        let mut g = [0.0; 2];
        for (k, &v) in tri.iter().enumerate() {
            g[0] += u[v] * geo.grad_basis[k][0];
            g[1] += u[v] * geo.grad_basis[k][1];
        }
        let norm = g[0].hypot(g[1]);
        let weight = if norm > 0.0 { geo.area * norm.powf(p.get() - 2.0) } else { 0.0 };
        for (k, &v) in tri.iter().enumerate() {
            rows[v] += weight * (g[0] * geo.grad_basis[k][0] + g[1] * geo.grad_basis[k][1]);
        }
    }
    let (mut interior, mut boundary) = (0.0, 0.0);
    for (v, r) in rows.iter().enumerate() {
        if mesh.is_boundary_vertex(v) {
            boundary += r.abs();
        } else {
            interior += r * r;
        }
    }
    if boundary == 0.0 {
        return Ok(interior.sqrt());
    }
    Ok(interior.sqrt() / boundary)
}
