use std::fmt;

use serde::{Deserialize, Serialize};

use super::mesh::{Mesh2D, Point};
use crate::{Error, Result};

/// Conductivity of one cell: a positive finite value, or one of the two
/// degenerate values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conductivity {
    Finite(f64),
    Zero,
    Infinite,
}

impl Conductivity {
    pub fn finite(v: f64) -> Result<Self> {
        if v.is_finite() && v > 0.0 {
            Ok(Self::Finite(v))
        } else {
            Err(Error::InvalidField(format!("finite conductivity must be positive, got {v}")))
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Self::Zero)
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinite)
    }
}

impl fmt::Display for Conductivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Zero => f.write_str("0"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Conductivity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(v) => s.serialize_f64(*v),
            Self::Zero => s.serialize_str("0"),
            Self::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Conductivity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Tag(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(0.0) => Ok(Self::Zero),
            Raw::Num(v) => Conductivity::finite(v).map_err(serde::de::Error::custom),
            Raw::Tag(t) => match t.trim() {
                "0" => Ok(Self::Zero),
                "inf" | "Infinity" | "infinity" => Ok(Self::Infinite),
                other => match other.parse::<f64>() {
                    Ok(0.0) => Ok(Self::Zero),
                    Ok(v) => Conductivity::finite(v).map_err(serde::de::Error::custom),
                    Err(_) => Err(serde::de::Error::custom(format!(
                        "conductivity must be a number, \"0\" or \"inf\", got {other:?}"
                    ))),
                },
            },
        }
    }
}

/// Piecewise-constant conductivity, one value per triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConductivityField {
    values: Vec<Conductivity>,
}

impl ConductivityField {
    pub fn new(values: Vec<Conductivity>) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            if let Conductivity::Finite(x) = v {
                if !(x.is_finite() && *x > 0.0) {
                    return Err(Error::InvalidField(format!("triangle {i}: bad value {x}")));
                }
            }
        }
        Ok(Self { values })
    }

    pub fn uniform(mesh: &Mesh2D, value: f64) -> Result<Self> {
        let c = Conductivity::finite(value)?;
        Ok(Self { values: vec![c; mesh.num_triangles()] })
    }

    /// Samples `f` at triangle centroids.
    pub fn from_fn(mesh: &Mesh2D, mut f: impl FnMut(Point) -> Conductivity) -> Result<Self> {
        Self::new(mesh.geometry().iter().map(|g| f(g.centroid)).collect())
    }

    /// Overwrites every triangle whose centroid satisfies `inside`.
    pub fn with_region(
        mut self,
        mesh: &Mesh2D,
        inside: impl Fn(Point) -> bool,
        value: Conductivity,
    ) -> Result<Self> {
        if let Conductivity::Finite(v) = value {
            Conductivity::finite(v)?;
        }
        for (c, g) in self.values.iter_mut().zip(mesh.geometry()) {
            if inside(g.centroid) {
                *c = value;
            }
        }
        Ok(self)
    }

    pub fn values(&self) -> &[Conductivity] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn d0_mask(&self) -> Vec<bool> {
        self.values.iter().map(|c| c.is_zero()).collect()
    }

    pub fn dinf_mask(&self) -> Vec<bool> {
        self.values.iter().map(|c| c.is_infinite()).collect()
    }

    pub fn has_degenerate(&self) -> bool {
        self.values.iter().any(|c| !matches!(c, Conductivity::Finite(_)))
    }

    /// Finite values as a plain vector, or `None` if any cell is degenerate.
    pub fn finite_values(&self) -> Option<Vec<f64>> {
        self.values.iter().map(|c| c.value()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    SizeMismatch { expected: usize, found: usize },
    D0TouchesBoundary,
    DinfTouchesBoundary,
    D0TouchesDinf,
    DinfCoversDomain,
    NoFiniteRegion,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SizeMismatch { expected, found } => {
                write!(f, "field has {found} values but the mesh has {expected} triangles")
            }
            Self::D0TouchesBoundary => f.write_str("D0 touches boundary"),
            Self::DinfTouchesBoundary => f.write_str("D∞ touches boundary"),
            Self::D0TouchesDinf => f.write_str("D0 touches D∞"),
            Self::DinfCoversDomain => f.write_str("D∞ covers all of Ω"),
            Self::NoFiniteRegion => f.write_str("no triangle has finite positive conductivity"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            let msg: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
            Err(Error::InvalidField(msg.join("; ")))
        }
    }
}

/// Checks the hypotheses of the forward problem: the closures of D0, D∞ and
/// the boundary must be pairwise disjoint (tested through shared vertices)
/// and a finite region must remain.
pub fn validate_field(mesh: &Mesh2D, sigma: &ConductivityField) -> ValidationReport {
    let mut report = ValidationReport::default();
    if sigma.len() != mesh.num_triangles() {
        report.violations.push(Violation::SizeMismatch {
            expected: mesh.num_triangles(),
            found: sigma.len(),
        });
        return report;
    }
    let nv = mesh.num_vertices();
    let mut in_d0 = vec![false; nv];
    let mut in_dinf = vec![false; nv];
    for (tri, c) in mesh.triangles().iter().zip(sigma.values()) {
        for &v in tri {
            match c {
                Conductivity::Zero => in_d0[v] = true,
                Conductivity::Infinite => in_dinf[v] = true,
                Conductivity::Finite(_) => {}
            }
        }
    }
    let bv = mesh.boundary_vertices();
    if bv.iter().any(|&v| in_d0[v]) {
        report.violations.push(Violation::D0TouchesBoundary);
    }
    if bv.iter().any(|&v| in_dinf[v]) {
        report.violations.push(Violation::DinfTouchesBoundary);
    }
    if (0..nv).any(|v| in_d0[v] && in_dinf[v]) {
        report.violations.push(Violation::D0TouchesDinf);
    }
    if sigma.values().iter().all(|c| c.is_infinite()) {
        report.violations.push(Violation::DinfCoversDomain);
    } else if !sigma.values().iter().any(|c| matches!(c, Conductivity::Finite(_))) {
        report.violations.push(Violation::NoFiniteRegion);
    }
    report
}
