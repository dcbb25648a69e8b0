use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::scenario::{Scenario, ScenarioKind};
use crate::domain::{validate_field, ConductivityField, Mesh2D};
use crate::enclosure::{
    classify_inclusion, reconstruct_hull_with, uniform_directions, write_overlay_svg, write_sweep_csv, Enclosure,
    HullPolygon, SupportBound,
};
use crate::identities::{monotonicity_check, rellich_check};
use crate::oned::{dn_map_1d, recover_invariant, solve_1d, DirichletPair, RecoveredInvariant};
use crate::wolff::{exact_period, integrate_wave, integrate_wave_with, WaveOptions};
use crate::{solver, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Ok,
    Failed,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub name: String,
    pub status: StageStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    /// SHA-256 of the canonical JSON form of the scenario.
    pub scenario_hash: String,
    pub kind: ScenarioKind,
    pub wall_time_s: f64,
    pub stages: Vec<Stage>,
    pub outputs: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub results: Value,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.stages.iter().any(|s| s.status == StageStatus::Failed) {
            EXIT_SOLVER
        } else if self.stages.iter().any(|s| s.status == StageStatus::Inconclusive) {
            EXIT_INCONCLUSIVE
        } else {
            EXIT_OK
        }
    }
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Scenario(_) => EXIT_SCHEMA,
        Error::Reconstruction(_) => EXIT_INCONCLUSIVE,
        _ => EXIT_SOLVER,
    }
}

pub fn scenario_hash(scenario: &Scenario) -> Result<String> {
    let digest = Sha256::digest(serde_json::to_vec(scenario)?);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

struct Recorder<'a> {
    out_dir: &'a Path,
    prefix: String,
    stages: Vec<Stage>,
    outputs: Vec<PathBuf>,
    warnings: Vec<String>,
}

impl Recorder<'_> {
    fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self);
        let status = if out.is_ok() { StageStatus::Ok } else { StageStatus::Failed };
        self.stages.push(Stage {
            name: name.into(),
            status,
            message: out.as_ref().err().map(|e| e.to_string()),
            wall_time_s: start.elapsed().as_secs_f64(),
        });
        log::info!("stage {name}: {status:?}");
        out
    }

    fn mark(&mut self, name: &str, status: StageStatus, message: Option<String>) {
        log::info!("stage {name}: {status:?}");
        self.stages.push(Stage { name: name.into(), status, message, wall_time_s: 0.0 });
    }

    fn warn(&mut self, msg: String) {
        log::warn!("{msg}");
        self.warnings.push(msg);
    }

    fn file(&mut self, suffix: &str) -> Result<BufWriter<File>> {
        let path = self.out_dir.join(format!("{}_{suffix}", self.prefix));
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let file = File::create(&path)?;
        self.outputs.push(path);
        Ok(BufWriter::new(file))
    }

    fn json(&mut self, suffix: &str, value: &impl Serialize) -> Result<()> {
        let mut w = self.file(suffix)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        std::io::Write::flush(&mut w)?;
        Ok(())
    }
}

fn build_sigma(mesh: &Mesh2D, spec: Option<&super::scenario::ConductivitySpec>) -> Result<ConductivityField> {
    let sigma = spec.cloned().unwrap_or_default().build(mesh)?;
    validate_field(mesh, &sigma).into_result()?;
    Ok(sigma)
}

/// Runs the scenario, writing outputs under `out_dir`. Module errors are
/// returned as `Err`; an inconclusive reconstruction is reported in the
/// summary instead.
pub fn run(scenario: &Scenario, out_dir: &Path) -> Result<RunSummary> {
    let start = Instant::now();
    std::fs::create_dir_all(out_dir)?;
    let mut rec = Recorder {
        out_dir,
        prefix: scenario.prefix().to_string(),
        stages: Vec::new(),
        outputs: Vec::new(),
        warnings: Vec::new(),
    };
    let results = match scenario.kind {
        ScenarioKind::Forward => run_forward(scenario, &mut rec)?,
        ScenarioKind::Oned => run_oned(scenario, &mut rec)?,
        ScenarioKind::Enclosure => run_enclosure(scenario, &mut rec)?,
        ScenarioKind::Rellich => run_rellich(scenario, &mut rec)?,
        ScenarioKind::Monotonicity => run_monotonicity(scenario, &mut rec)?,
        ScenarioKind::Wolff => run_wolff(scenario, &mut rec)?,
    };
    Ok(RunSummary {
        scenario_hash: scenario_hash(scenario)?,
        kind: scenario.kind,
        wall_time_s: start.elapsed().as_secs_f64(),
        stages: rec.stages,
        outputs: rec.outputs,
        warnings: rec.warnings,
        results,
    })
}

fn run_forward(sc: &Scenario, rec: &mut Recorder) -> Result<Value> {
    let cfg = sc.solver_config()?;
    let mesh = rec.stage("mesh", |_| sc.mesh())?;
    let sigma = rec.stage("conductivity", |_| build_sigma(&mesh, sc.conductivity.as_ref()))?;
    let f = rec.stage("boundary", |_| sc.boundary.as_ref().expect("validated").build(&mesh, sc.p()))?;
    let (field, report) = rec.stage("solve", |_| solver::solve(&mesh, &sigma, &f, &cfg))?;
    let weak_residual = solver::weak_residual(&mesh, &sigma, sc.p(), &field.vertex_values)?;
    rec.stage("write", |r| {
        write_field_json(r, &mesh, &sigma, &field, &report, weak_residual)?;
        write_overlay_svg(r.file("field.svg")?, &mesh, &sigma, &[])
    })?;
    Ok(json!({
        "energy": field.energy,
        "iterations": report.iterations,
        "residual": report.residual,
        "weak_residual": weak_residual,
        "dinf_component_values": report.dinf_component_values,
    }))
}

fn write_field_json(
    rec: &mut Recorder,
    mesh: &Mesh2D,
    sigma: &ConductivityField,
    field: &solver::PotentialField,
    report: &solver::SolveReport,
    weak_residual: f64,
) -> Result<()> {
    rec.json(
        "field.json",
        &json!({
            "vertices": mesh.vertices(),
            "triangles": mesh.triangles(),
            "conductivity": sigma,
            "vertex_values": field.vertex_values,
            "gradients": field.gradients,
            "energy": field.energy,
            "report": report,
            "weak_residual": weak_residual,
        }),
    )
}

fn run_oned(sc: &Scenario, rec: &mut Recorder) -> Result<Value> {
    let p = sc.p();
    let sigma = rec.stage("conductivity", |_| sc.conductivity_1d())?;
    let d = sc.oned.as_ref().expect("validated").dirichlet;
    let bc = DirichletPair::new(d[0], d[1]);
    let sol = rec.stage("solve", |_| solve_1d(&sigma, p, bc))?;
    let dn = dn_map_1d(&sigma, p, bc)?;
    let invariant = rec.stage("invariant", |_| recover_invariant(|bc| dn_map_1d(&sigma, p, bc), p))?;
    let classification = match invariant {
        RecoveredInvariant::ZeroInclusion => "ZERO-INCLUSION",
        RecoveredInvariant::Integral(_) => "INVARIANT",
    };
    let n = 200;
    let profile: Vec<[f64; 3]> = (0..=n)
        .map(|k| {
            let x = sigma.a() + (sigma.b() - sigma.a()) * k as f64 / n as f64;
            [x, sol.value(x), sol.derivative(x)]
        })
        .collect();
    let results = json!({
        "classification": classification,
        "invariant": invariant,
        "closed_form_invariant": if sigma.has_zero() { None } else { Some(sigma.total_weight(p)) },
        "dn": dn,
        "flux": sol.flux(),
        "energy": sol.energy(),
    });
    rec.stage("write", |r| {
        let mut full = results.clone();
        full["conductivity"] = serde_json::to_value(&sigma)?;
        full["profile"] = serde_json::to_value(&profile)?;
        r.json("solution.json", &full)
    })?;
    Ok(results)
}

fn run_enclosure(sc: &Scenario, rec: &mut Recorder) -> Result<Value> {
    let cfg = sc.solver_config()?;
    let probes = sc.probes.as_ref().expect("validated");
    let mesh = rec.stage("mesh", |_| sc.mesh())?;
    let sigma = rec.stage("conductivity", |_| build_sigma(&mesh, sc.conductivity.as_ref()))?;
    let wave = rec.stage("wave", |_| integrate_wave(sc.p(), probes.initial[0], probes.initial[1]))?;
    let enc = Enclosure::new(&mesh, &sigma, wave, cfg)?;

    let max_tau = enc.max_tau();
    let taus: Vec<f64> = probes.tau_grid.iter().copied().filter(|&t| t <= max_tau).collect();
    if taus.len() < probes.tau_grid.len() {
        rec.warn(format!(
            "resolution guard tau * h <= 0.5 binds at tau = {max_tau:.3}; dropped {} of {} tau values",
            probes.tau_grid.len() - taus.len(),
            probes.tau_grid.len()
        ));
    }
    let directions = uniform_directions(probes.directions);
    let estimates = rec.stage("sweep", |_| enc.support_estimates(&directions, &taus))?;
    let samples: Vec<_> = estimates.iter().flat_map(|e| e.samples.iter().copied()).collect();
    let classification = classify_inclusion(&samples);
    let conclusive = estimates.iter().filter(|e| e.is_conclusive()).count();
    if conclusive < estimates.len() {
        rec.warn(format!("{} of {} directions are inconclusive", estimates.len() - conclusive, estimates.len()));
    }

    let mut hull_of = |bound: SupportBound| match reconstruct_hull_with(&estimates, bound) {
        Ok(h) => {
            rec.mark(&format!("hull_{}", bound_name(bound)), StageStatus::Ok, None);
            Some(h)
        }
        Err(e) => {
            rec.mark(&format!("hull_{}", bound_name(bound)), StageStatus::Inconclusive, Some(e.to_string()));
            None
        }
    };
    let central = hull_of(SupportBound::Central);
    let outer = hull_of(SupportBound::Outer);

    let summary_estimates: Vec<Value> = estimates
        .iter()
        .map(|e| json!({"rho": e.rho, "status": e.status, "h_est": e.h_est, "h_outer": e.h_outer, "fit": e.fit}))
        .collect();
    rec.stage("write", |r| {
        write_sweep_csv(r.file("sweep.csv")?, &samples)?;
        r.json(
            "hull.json",
            &json!({
                "classification": classification,
                "central": central,
                "outer": outer,
                "estimates": summary_estimates,
            }),
        )?;
        let hulls: Vec<&HullPolygon> = central.iter().chain(outer.iter()).collect();
        write_overlay_svg(r.file("overlay.svg")?, &mesh, &sigma, &hulls)
    })?;
    Ok(json!({
        "classification": classification,
        "conclusive_directions": conclusive,
        "directions": estimates.len(),
        "tau_grid": taus,
        "max_tau": max_tau,
        "central_area": central.as_ref().map(HullPolygon::area),
        "outer_area": outer.as_ref().map(HullPolygon::area),
    }))
}

fn bound_name(bound: SupportBound) -> &'static str {
    match bound {
        SupportBound::Central => "central",
        SupportBound::Outer => "outer",
    }
}

fn run_rellich(sc: &Scenario, rec: &mut Recorder) -> Result<Value> {
    let cfg = sc.solver_config()?;
    let spec = sc.rellich.as_ref().expect("validated");
    let mesh = rec.stage("mesh", |_| sc.mesh())?;
    let c = spec.sigma_affine;
    let vertex_sigma: Vec<f64> = mesh.vertices().iter().map(|x| c[0] + c[1] * x[0] + c[2] * x[1]).collect();
    rec.stage("conductivity", |_| {
        if vertex_sigma.iter().all(|&s| s > 0.0 && s.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidField("affine conductivity must be positive at every vertex".into()))
        }
    })?;
    let f = rec.stage("boundary", |_| sc.boundary.as_ref().expect("validated").build(&mesh, sc.p()))?;
    let report = rec.stage("check", |_| rellich_check(&mesh, &vertex_sigma, &f, spec.alpha, &cfg))?;
    rec.stage("write", |r| r.json("report.json", &report))?;
    Ok(serde_json::to_value(&report)?)
}

fn run_monotonicity(sc: &Scenario, rec: &mut Recorder) -> Result<Value> {
    let cfg = sc.solver_config()?;
    let mesh = rec.stage("mesh", |_| sc.mesh())?;
    let sigma0 = rec.stage("conductivity", |_| build_sigma(&mesh, sc.conductivity.as_ref()))?;
    let upper = &sc.monotonicity.as_ref().expect("validated").upper;
    let sigma1 = rec.stage("conductivity_upper", |_| build_sigma(&mesh, Some(upper)))?;
    let f = rec.stage("boundary", |_| sc.boundary.as_ref().expect("validated").build(&mesh, sc.p()))?;
    let report = rec.stage("check", |_| monotonicity_check(&mesh, &sigma0, &sigma1, &f, &cfg))?;
    rec.stage("write", |r| r.json("report.json", &report))?;
    if !report.holds {
        rec.mark(
            "inequality",
            StageStatus::Failed,
            Some(format!("margins {:?} below tolerance {:e}", report.margins, report.tolerance)),
        );
    }
    Ok(serde_json::to_value(&report)?)
}

fn run_wolff(sc: &Scenario, rec: &mut Recorder) -> Result<Value> {
    let spec = sc.wolff.clone().unwrap_or(super::scenario::WolffSpec { initial: [0.0, 1.0], samples: 4096 });
    let opts = WaveOptions { samples: spec.samples, ..WaveOptions::default() };
    let wave = rec.stage("integrate", |_| integrate_wave_with(sc.p(), spec.initial[0], spec.initial[1], opts))?;
    let exact = exact_period(sc.p())?;
    let (rmin, rmax) = wave.radius_sq_bounds();
    let results = json!({
        "p": wave.p(),
        "initial": wave.initial(),
        "period": wave.period(),
        "exact_period": exact,
        "period_error": (wave.period() - exact).abs(),
        "return_error": wave.return_error(),
        "mean": wave.mean_integral(),
        "min_radius_sq": rmin,
        "max_radius_sq": rmax,
    });
    rec.stage("write", |r| {
        wave.write_csv(r.file("wave.csv")?)?;
        r.json("wave.json", &results)
    })?;
    Ok(results)
}
