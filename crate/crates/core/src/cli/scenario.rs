use std::path::{Component, Path};

use serde::{Deserialize, Serialize};

use crate::domain::{
    build_rect_mesh_at, BoundaryTrace, Conductivity, ConductivityField, Exponent, Mesh2D, Point, SolverConfig,
};
use crate::oned::PiecewiseConductivity1D;
use crate::wolff::{plane_wave, ProbeParams, WolffWave};
use crate::{Error, Result};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Forward,
    Oned,
    Enclosure,
    Rellich,
    Monotonicity,
    Wolff,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Forward => "forward",
            Self::Oned => "oned",
            Self::Enclosure => "enclosure",
            Self::Rellich => "rellich",
            Self::Monotonicity => "monotonicity",
            Self::Wolff => "wolff",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Geometry {
    Rect {
        nx: usize,
        ny: usize,
        width: f64,
        height: f64,
        #[serde(default)]
        origin: Point,
    },
    Interval {
        breakpoints: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Shape {
    Disk { center: Point, radius: f64 },
    Rect { min: Point, max: Point },
    Polygon { vertices: Vec<Point> },
}

impl Shape {
    pub fn contains(&self, x: Point) -> bool {
        match self {
            Self::Disk { center, radius } => (x[0] - center[0]).hypot(x[1] - center[1]) < *radius,
            Self::Rect { min, max } => x[0] > min[0] && x[0] < max[0] && x[1] > min[1] && x[1] < max[1],
            Self::Polygon { vertices } => {
                let mut inside = false;
                let n = vertices.len();
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[(i + n - 1) % n]);
                    if (a[1] > x[1]) != (b[1] > x[1]) && x[0] < (b[0] - a[0]) * (x[1] - a[1]) / (b[1] - a[1]) + a[0] {
                        inside = !inside;
                    }
                }
                inside
            }
        }
    }

    fn bounding_box(&self) -> (Point, Point) {
        match self {
            Self::Disk { center, radius } => {
                ([center[0] - radius, center[1] - radius], [center[0] + radius, center[1] + radius])
            }
            Self::Rect { min, max } => (*min, *max),
            Self::Polygon { vertices } => vertices.iter().fold(
                ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]),
                |(lo, hi), v| ([lo[0].min(v[0]), lo[1].min(v[1])], [hi[0].max(v[0]), hi[1].max(v[1])]),
            ),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::Disk { center, radius } => center.iter().all(|c| c.is_finite()) && *radius > 0.0 && radius.is_finite(),
            Self::Rect { min, max } => min[0] < max[0] && min[1] < max[1] && max.iter().chain(min).all(|c| c.is_finite()),
            Self::Polygon { vertices } => vertices.len() >= 3 && vertices.iter().flatten().all(|c| c.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Scenario(format!("degenerate shape {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub shape: Shape,
    pub value: Conductivity,
}

fn unit() -> Conductivity {
    Conductivity::Finite(1.0)
}

/// Later regions overwrite earlier ones. `pieces` is the 1D form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConductivitySpec {
    #[serde(default = "unit")]
    pub background: Conductivity,
    #[serde(default)]
    pub regions: Vec<Region>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pieces: Vec<Conductivity>,
}

impl Default for ConductivitySpec {
    fn default() -> Self {
        Self { background: unit(), regions: Vec::new(), pieces: Vec::new() }
    }
}

impl ConductivitySpec {
    pub fn build(&self, mesh: &Mesh2D) -> Result<ConductivityField> {
        ConductivityField::from_fn(mesh, |c| {
            self.regions.iter().rev().find(|r| r.shape.contains(c)).map_or(self.background, |r| r.value)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundarySpec {
    /// `f(x) = a x₁ + b x₂ + c`.
    Affine { a: f64, b: f64, c: f64 },
    WolffProbe {
        angle: f64,
        t: f64,
        tau: f64,
        #[serde(default = "default_initial")]
        initial: Point,
    },
    /// One value per boundary vertex, in mesh boundary order.
    Custom { values: Vec<f64> },
}

fn default_initial() -> Point {
    [0.0, 1.0]
}

impl BoundarySpec {
    pub fn build(&self, mesh: &Mesh2D, p: f64) -> Result<BoundaryTrace> {
        match self {
            Self::Affine { a, b, c } => BoundaryTrace::from_fn(mesh, |x| a * x[0] + b * x[1] + c),
            Self::WolffProbe { angle, t, tau, initial } => {
                let wave = crate::wolff::integrate_wave(p, initial[0], initial[1])?;
                let probe = ProbeParams::from_angle(*angle, *t, *tau)?;
                wolff_trace(mesh, &wave, &probe)
            }
            Self::Custom { values } => BoundaryTrace::new(mesh, values.clone()),
        }
    }
}

fn wolff_trace(mesh: &Mesh2D, wave: &WolffWave, probe: &ProbeParams) -> Result<BoundaryTrace> {
    BoundaryTrace::from_fn(mesh, |x| plane_wave(wave, probe, x).0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub directions: usize,
    pub tau_grid: Vec<f64>,
    #[serde(default = "default_initial")]
    pub initial: Point,
}

/// Solver settings; omitted fields keep their defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_reg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// File-name prefix inside the output directory; defaults to the kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OnedSpec {
    pub dirichlet: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RellichSpec {
    /// Vertex conductivity `c₀ + c₁ x₁ + c₂ x₂`.
    pub sigma_affine: [f64; 3],
    pub alpha: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotonicitySpec {
    /// The larger conductivity; the top-level one is the smaller.
    pub upper: ConductivitySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WolffSpec {
    #[serde(default = "default_initial")]
    pub initial: Point,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    4096
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: String,
    pub kind: ScenarioKind,
    pub p: Exponent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conductivity: Option<ConductivitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundarySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<ProbeSpec>,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oned: Option<OnedSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rellich: Option<RellichSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monotonicity: Option<MonotonicitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wolff: Option<WolffSpec>,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Scenario(msg.into())
}

fn require<'a, T>(field: &'a Option<T>, name: &str, kind: ScenarioKind) -> Result<&'a T> {
    field.as_ref().ok_or_else(|| schema(format!("kind {:?} requires field `{name}`", kind.name())))
}

fn forbid<T>(field: &Option<T>, name: &str, kind: ScenarioKind) -> Result<()> {
    match field {
        Some(_) => Err(schema(format!("field `{name}` is not used by kind {:?}", kind.name()))),
        None => Ok(()),
    }
}

impl Scenario {
    pub fn p(&self) -> f64 {
        self.p.get()
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::new(self.p())?;
        let s = &self.solver;
        if let Some(v) = s.epsilon_reg {
            cfg.epsilon_reg = v;
        }
        if let Some(v) = s.tol_energy {
            cfg.tol_energy = v;
        }
        if let Some(v) = s.tol_residual {
            cfg.tol_residual = v;
        }
        if let Some(v) = s.max_iters {
            cfg.max_iters = v;
        }
        cfg.validate().map_err(|e| schema(format!("solver: {e}")))?;
        Ok(cfg)
    }

    pub fn prefix(&self) -> &str {
        self.outputs.prefix.as_deref().unwrap_or(self.kind.name())
    }

    /// The rectangular mesh; errors for 1D or missing geometry.
    pub fn mesh(&self) -> Result<Mesh2D> {
        match &self.geometry {
            Some(Geometry::Rect { nx, ny, width, height, origin }) => {
                build_rect_mesh_at(*origin, *nx, *ny, *width, *height)
            }
            _ => Err(schema(format!("kind {:?} needs a rect geometry", self.kind.name()))),
        }
    }

    pub fn conductivity_1d(&self) -> Result<PiecewiseConductivity1D> {
        let Some(Geometry::Interval { breakpoints }) = &self.geometry else {
            return Err(schema("kind \"oned\" needs an interval geometry"));
        };
        let spec = self.conductivity.clone().unwrap_or_default();
        PiecewiseConductivity1D::new(breakpoints.clone(), spec.pieces)
    }

    /// Kind-specific checks beyond what deserialisation enforces.
    pub fn validate(&self) -> Result<()> {
        use ScenarioKind as K;
        if self.version != SCHEMA_VERSION {
            return Err(schema(format!("unsupported version {:?}, expected \"{SCHEMA_VERSION}\"", self.version)));
        }
        self.solver_config()?;
        if let Some(prefix) = &self.outputs.prefix {
            let path = Path::new(prefix);
            if prefix.is_empty() || path.components().any(|c| !matches!(c, Component::Normal(_))) {
                return Err(schema(format!("outputs.prefix must be a relative path without `..`, got {prefix:?}")));
            }
        }
        let kind = self.kind;
        match kind {
            K::Wolff => {
                for (present, name) in [
                    (self.geometry.is_some(), "geometry"),
                    (self.conductivity.is_some(), "conductivity"),
                    (self.boundary.is_some(), "boundary"),
                    (self.probes.is_some(), "probes"),
                ] {
                    if present {
                        return Err(schema(format!("field `{name}` is not used by kind \"wolff\"")));
                    }
                }
            }
            K::Oned => {
                require(&self.oned, "oned", kind)?;
                forbid(&self.boundary, "boundary", kind)?;
                forbid(&self.probes, "probes", kind)?;
                if self.conductivity.as_ref().is_some_and(|c| !c.regions.is_empty()) {
                    return Err(schema("kind \"oned\" takes `conductivity.pieces`, not regions"));
                }
                self.conductivity_1d()?;
            }
            _ => {
                let mesh = self.mesh()?;
                let (lo, hi) = mesh.bounding_box();
                let specs = [self.conductivity.as_ref(), self.monotonicity.as_ref().map(|m| &m.upper)];
                for spec in specs.into_iter().flatten() {
                    if !spec.pieces.is_empty() {
                        return Err(schema("`conductivity.pieces` is only valid for kind \"oned\""));
                    }
                    for r in &spec.regions {
                        r.shape.validate()?;
                        let (a, b) = r.shape.bounding_box();
                        let tol = 1e-12 * (1.0 + mesh.diameter());
                        if a[0] < lo[0] - tol || a[1] < lo[1] - tol || b[0] > hi[0] + tol || b[1] > hi[1] + tol {
                            return Err(schema(format!("region {:?} extends outside the domain", r.shape)));
                        }
                    }
                }
                forbid(&self.oned, "oned", kind)?;
                forbid(&self.wolff, "wolff", kind)?;
                if kind != K::Rellich {
                    forbid(&self.rellich, "rellich", kind)?;
                }
                if kind != K::Monotonicity {
                    forbid(&self.monotonicity, "monotonicity", kind)?;
                }
                if kind == K::Enclosure {
                    let probes = require(&self.probes, "probes", kind)?;
                    forbid(&self.boundary, "boundary", kind)?;
                    if probes.directions < 3 {
                        return Err(schema("probes.directions must be at least 3"));
                    }
                    if probes.tau_grid.len() < 4
                        || probes.tau_grid[0] <= 0.0
                        || probes.tau_grid.windows(2).any(|w| w[1] <= w[0])
                    {
                        return Err(schema("probes.tau_grid needs at least 4 positive increasing values"));
                    }
                } else {
                    forbid(&self.probes, "probes", kind)?;
                    let boundary = require(&self.boundary, "boundary", kind)?;
                    if let BoundarySpec::Custom { values } = boundary {
                        if values.len() != mesh.boundary_vertices().len() {
                            return Err(schema(format!(
                                "boundary.values has {} entries but the mesh has {} boundary vertices",
                                values.len(),
                                mesh.boundary_vertices().len()
                            )));
                        }
                    }
                }
                match kind {
                    K::Rellich => {
                        require(&self.rellich, "rellich", kind)?;
                        forbid(&self.conductivity, "conductivity", kind)?;
                    }
                    K::Monotonicity => {
                        require(&self.monotonicity, "monotonicity", kind)?;
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// Parses and validates scenario text. Errors name the offending line and
/// column or field.
pub fn parse_scenario_str(text: &str) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(text)
        .map_err(|e| schema(format!("line {} column {}: {e}", e.line(), e.column())))?;
    scenario.validate().map_err(|e| match e {
        Error::Scenario(_) => e,
        other => schema(other.to_string()),
    })?;
    Ok(scenario)
}

pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| schema(format!("cannot read scenario {}: {e}", path.display())))?;
    parse_scenario_str(&text)
}
