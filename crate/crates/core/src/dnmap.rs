//! Weak Dirichlet-to-Neumann pairing `⟨Λσ f, g⟩ = ∫ σ |∇f̄|^{p-2} ∇f̄ · ∇ḡ`.

use serde::Serialize;

use crate::domain::{BoundaryTrace, Conductivity, ConductivityField, Mesh2D, SolverConfig};
use crate::solver::{ForwardProblem, PotentialField, SolveReport};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct WeakPairing {
    pub value: f64,
    pub f: BoundaryTrace,
    pub g: BoundaryTrace,
    pub solve_report: SolveReport,
}

/// Solver for `σ` plus the unit-conductivity p = 2 problem used to extend
/// test data into the domain. Both factorisations are reused across calls.
pub struct DnEvaluator<'a> {
    problem: ForwardProblem<'a>,
    extension: ForwardProblem<'a>,
}

impl<'a> DnEvaluator<'a> {
    pub fn new(mesh: &'a Mesh2D, sigma: &ConductivityField, cfg: SolverConfig) -> Result<Self> {
        let problem = ForwardProblem::new(mesh, sigma, cfg)?;
        let unit = ConductivityField::uniform(mesh, 1.0)?;
        let extension = ForwardProblem::new(mesh, &unit, SolverConfig::new(2.0)?)?;
        Ok(Self { problem, extension })
    }

    pub fn problem(&self) -> &ForwardProblem<'a> {
        &self.problem
    }

    pub fn p(&self) -> f64 {
        self.problem.config().p.get()
    }

    pub fn solve(&self, f: &BoundaryTrace) -> Result<(PotentialField, SolveReport)> {
        self.problem.solve(f)
    }

    /// Discrete harmonic extension of `g`, made constant (the component mean)
    /// on every D∞ component.
    pub fn extend(&self, g: &BoundaryTrace) -> Result<Vec<f64>> {
        let (ext, _) = self.extension.solve(g)?;
        Ok(self.flatten(ext.vertex_values))
    }

    /// Replaces the values on every D∞ component by their mean.
    pub fn flatten(&self, mut values: Vec<f64>) -> Vec<f64> {
        for comp in self.problem.dofs().components() {
            let mean = comp.iter().map(|&v| values[v]).sum::<f64>() / comp.len() as f64;
            for &v in comp {
                values[v] = mean;
            }
        }
        values
    }

    /// `Σ_T A σ |∇f̄|^{p-2} ∇f̄·∇ḡ` over finite triangles.
    pub fn pairing_with_extension(&self, fbar: &PotentialField, gbar: &[f64]) -> f64 {
        pairing(self.problem.mesh(), self.problem.sigma(), self.p(), fbar, gbar)
    }

    pub fn pairing(&self, fbar: &PotentialField, g: &BoundaryTrace) -> Result<f64> {
        Ok(self.pairing_with_extension(fbar, &self.extend(g)?))
    }

    pub fn weak_dn(&self, f: &BoundaryTrace, g: &BoundaryTrace) -> Result<WeakPairing> {
        let (fbar, solve_report) = self.solve(f)?;
        let value = self.pairing(&fbar, g)?;
        if !value.is_finite() {
            return Err(Error::Solver("pairing is not finite".into()));
        }
        Ok(WeakPairing { value, f: f.clone(), g: g.clone(), solve_report })
    }
}

pub(crate) fn pairing(mesh: &Mesh2D, sigma: &ConductivityField, p: f64, fbar: &PotentialField, gbar: &[f64]) -> f64 {
    let mut total = 0.0;
    for (((tri, geo), c), gf) in mesh.triangles().iter().zip(mesh.geometry()).zip(sigma.values()).zip(&fbar.gradients) {
        if let Conductivity::Finite(s) = *c {
            let gg = crate::solver::p1_gradient(&geo.grad_basis, [gbar[tri[0]], gbar[tri[1]], gbar[tri[2]]]);
            let n = gf[0].hypot(gf[1]);
            if n > 0.0 {
                total += geo.area * s * n.powf(p - 2.0) * (gf[0] * gg[0] + gf[1] * gg[1]);
            }
        }
    }
    total
}

pub fn weak_dn(
    mesh: &Mesh2D,
    sigma: &ConductivityField,
    f: &BoundaryTrace,
    g: &BoundaryTrace,
    cfg: &SolverConfig,
) -> Result<WeakPairing> {
    DnEvaluator::new(mesh, sigma, *cfg)?.weak_dn(f, g)
}

#[derive(Debug, Clone, Serialize)]
pub struct GateauxCheck {
    pub shift: f64,
    /// `(⟨Λ(a + t f), g⟩ − ⟨Λ(a), g⟩) / t`.
    pub quotient: f64,
    /// `|t|^{p-2} ⟨Λ f, g⟩`.
    pub expected: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HomogeneityReport {
    pub t: f64,
    pub base: f64,
    pub scaled: f64,
    /// `|t|^{p-2} t ⟨Λ f, g⟩`.
    pub expected: f64,
    /// Relative deviation of `scaled` from `expected`.
    pub deviation: f64,
    pub gateaux: GateauxCheck,
}

fn relative(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else {
        d / b.abs().max(a.abs()).max(f64::MIN_POSITIVE)
    }
}

/// Compares `⟨Λ(t f), g⟩` with `|t|^{p-2} t ⟨Λ f, g⟩` and the difference
/// quotient at the constant `shift` with `|t|^{p-2} ⟨Λ f, g⟩`.
pub fn dn_homogeneity_check(
    eval: &DnEvaluator,
    f: &BoundaryTrace,
    g: &BoundaryTrace,
    t: f64,
    shift: f64,
) -> Result<HomogeneityReport> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::InvalidArgument("t must be finite and nonzero".into()));
    }
    let p = eval.p();
    let gbar = eval.extend(g)?;
    let pair = |data: &BoundaryTrace| -> Result<f64> {
        let (fbar, _) = eval.solve(data)?;
        Ok(eval.pairing_with_extension(&fbar, &gbar))
    };
    let base = pair(f)?;
    let scaled = pair(&f.scaled(t))?;
    let expected = t.abs().powf(p - 2.0) * t * base;

    let a = f.scaled(0.0).shifted(shift);
    let at = f.scaled(t).shifted(shift);
    let quotient = (pair(&at)? - pair(&a)?) / t;
    let g_expected = t.abs().powf(p - 2.0) * base;
    Ok(HomogeneityReport {
        t,
        base,
        scaled,
        expected,
        deviation: relative(scaled, expected),
        gateaux: GateauxCheck { shift, quotient, expected: g_expected, deviation: relative(quotient, g_expected) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_rect_mesh;

    fn setup(n: usize) -> (Mesh2D, ConductivityField) {
        let mesh = build_rect_mesh(n, n, 1.0, 1.0).unwrap();
        let sigma = ConductivityField::from_fn(&mesh, |c| Conductivity::Finite(1.0 + c[0] * c[1])).unwrap();
        (mesh, sigma)
    }

    #[test]
    fn unit_square_affine() {
        let mesh = build_rect_mesh(8, 8, 1.0, 1.0).unwrap();
        let sigma = ConductivityField::uniform(&mesh, 1.0).unwrap();
        let f = BoundaryTrace::from_fn(&mesh, |x| x[0]).unwrap();
        let w = weak_dn(&mesh, &sigma, &f, &f, &SolverConfig::new(2.0).unwrap()).unwrap();
        assert!((w.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_test_data_pairs_to_zero() {
        let (mesh, sigma) = setup(8);
        let f = BoundaryTrace::from_fn(&mesh, |x| x[0] * x[0] - x[1]).unwrap();
        let g = BoundaryTrace::from_fn(&mesh, |_| 4.0).unwrap();
        let w = weak_dn(&mesh, &sigma, &f, &g, &SolverConfig::new(3.0).unwrap()).unwrap();
        assert!(w.value.abs() < 1e-12);
    }

    #[test]
    fn energy_identity() {
        let (mesh, sigma) = setup(12);
        for p in [1.5, 2.0, 3.0] {
            let eval = DnEvaluator::new(&mesh, &sigma, SolverConfig::new(p).unwrap()).unwrap();
            let f = BoundaryTrace::from_fn(&mesh, |x| (2.0 * x[0]).sin() + x[1]).unwrap();
            let w = eval.weak_dn(&f, &f).unwrap();
            assert!((w.value - w.solve_report.final_energy).abs() < 1e-10 * w.value, "p = {p}");
        }
    }

    #[test]
    fn homogeneity_and_gateaux() {
        let (mesh, sigma) = setup(10);
        let f = BoundaryTrace::from_fn(&mesh, |x| x[0] + 0.3 * x[1] * x[1]).unwrap();
        let g = BoundaryTrace::from_fn(&mesh, |x| x[1] - x[0] * x[1]).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let eval = DnEvaluator::new(&mesh, &sigma, SolverConfig::new(p).unwrap()).unwrap();
            for t in [-2.0, 0.5, 3.0] {
                let r = dn_homogeneity_check(&eval, &f, &g, t, 0.7).unwrap();
                assert!(r.deviation < 1e-8, "p = {p}, t = {t}: {r:?}");
                assert!(r.gateaux.deviation < 1e-8, "p = {p}, t = {t}: {r:?}");
            }
            let r = dn_homogeneity_check(&eval, &f, &g, 1.0, 0.0).unwrap();
            assert_eq!(r.deviation, 0.0);
        }
    }

    #[test]
    fn difference_quotient_diverges_below_two() {
        let (mesh, sigma) = setup(8);
        let f = BoundaryTrace::from_fn(&mesh, |x| x[0]).unwrap();
        let g = BoundaryTrace::from_fn(&mesh, |x| x[0] + x[1]).unwrap();
        let eval = DnEvaluator::new(&mesh, &sigma, SolverConfig::new(1.5).unwrap()).unwrap();
        let q1 = dn_homogeneity_check(&eval, &f, &g, 0.1, 1.0).unwrap().gateaux.quotient;
        let q2 = dn_homogeneity_check(&eval, &f, &g, 0.01, 1.0).unwrap().gateaux.quotient;
        assert!((q2 / q1 - 10f64.powf(0.5)).abs() < 1e-6);
    }

    #[test]
    fn symmetric_at_p2() {
        let (mesh, sigma) = setup(10);
        let eval = DnEvaluator::new(&mesh, &sigma, SolverConfig::new(2.0).unwrap()).unwrap();
        let f = BoundaryTrace::from_fn(&mesh, |x| x[0] * x[1]).unwrap();
        let g = BoundaryTrace::from_fn(&mesh, |x| (3.0 * x[1]).cos()).unwrap();
        let a = eval.weak_dn(&f, &g).unwrap().value;
        let b = eval.weak_dn(&g, &f).unwrap().value;
        assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn dinf_extension_is_flat() {
        let mesh = build_rect_mesh(12, 12, 1.0, 1.0).unwrap();
        let sigma = ConductivityField::uniform(&mesh, 1.0)
            .unwrap()
            .with_region(&mesh, |c| (c[0] - 0.5).abs() < 0.2 && (c[1] - 0.5).abs() < 0.2, Conductivity::Infinite)
            .unwrap();
        let eval = DnEvaluator::new(&mesh, &sigma, SolverConfig::new(2.0).unwrap()).unwrap();
        let g = BoundaryTrace::from_fn(&mesh, |x| x[0] * x[0] + x[1]).unwrap();
        let ext = eval.extend(&g).unwrap();
        let comp = &eval.problem().dofs().components()[0];
        assert!(comp.iter().all(|&v| ext[v] == ext[comp[0]]));
        let f = BoundaryTrace::from_fn(&mesh, |x| x[0]).unwrap();
        let w = eval.weak_dn(&f, &f).unwrap();
        assert!((w.value - w.solve_report.final_energy).abs() < 1e-10);
    }
}
