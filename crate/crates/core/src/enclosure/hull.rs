use serde::{Deserialize, Serialize};

use super::support::{SupportBound, SupportEstimate};
use crate::domain::Point;
use crate::{Error, Result};

/// Intersection of the half-planes `{x : x·ρ ≤ h(ρ)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullPolygon {
    pub directions: Vec<Point>,
    pub offsets: Vec<f64>,
    /// Counterclockwise.
    pub vertices: Vec<Point>,
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Sutherland–Hodgman step: keeps the part of `poly` with `x·n ≤ h`.
fn clip(poly: &[Point], n: Point, h: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (da, db) = (dot(a, n) - h, dot(b, n) - h);
        if da <= 0.0 {
            out.push(a);
        }
        if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
            let s = da / (da - db);
            out.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
        }
    }
    out
}

fn signed_area(poly: &[Point]) -> f64 {
    let mut a = 0.0;
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}

/// Polygon cut out by the half-planes, or an error if they are inconsistent
/// or fail to bound a region.
pub fn intersect_half_planes(directions: &[Point], offsets: &[f64]) -> Result<HullPolygon> {
    if directions.len() != offsets.len() {
        return Err(Error::InvalidArgument("one offset per direction expected".into()));
    }
    if directions.len() < 3 {
        return Err(Error::Reconstruction(format!(
            "need at least 3 conclusive directions, got {}",
            directions.len()
        )));
    }
    let mut angles: Vec<f64> = directions.iter().map(|d| d[1].atan2(d[0])).collect();
    angles.sort_by(f64::total_cmp);
    let mut gap = angles[0] + 2.0 * std::f64::consts::PI - angles[angles.len() - 1];
    for w in angles.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    if gap >= std::f64::consts::PI - 1e-12 {
        return Err(Error::Reconstruction("conclusive directions do not surround the inclusion".into()));
    }
    let big = 1e3 * (1.0 + offsets.iter().fold(0.0_f64, |m, h| m.max(h.abs())));
    let mut poly = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
    for (n, &h) in directions.iter().zip(offsets) {
        poly = clip(&poly, *n, h);
        if poly.len() < 3 {
            break;
        }
    }
    // Drop near-duplicate vertices produced by nearly parallel cuts.
    let scale = 1e-12 * big;
    let mut cleaned: Vec<Point> = Vec::with_capacity(poly.len());
    for v in poly {
        if cleaned.last().is_none_or(|w: &Point| (v[0] - w[0]).hypot(v[1] - w[1]) > scale) {
            cleaned.push(v);
        }
    }
    if cleaned.len() > 1 {
        let (first, last) = (cleaned[0], cleaned[cleaned.len() - 1]);
        if (first[0] - last[0]).hypot(first[1] - last[1]) <= scale {
            cleaned.pop();
        }
    }
    if cleaned.len() < 3 || signed_area(&cleaned) <= 0.0 {
        return Err(Error::Reconstruction("support estimates are contradictory: empty intersection".into()));
    }
    Ok(HullPolygon { directions: directions.to_vec(), offsets: offsets.to_vec(), vertices: cleaned })
}

/// Hull from the central estimates of the conclusive directions; the
/// others are skipped.
pub fn reconstruct_hull(estimates: &[SupportEstimate]) -> Result<HullPolygon> {
    reconstruct_hull_with(estimates, SupportBound::Central)
}

pub fn reconstruct_hull_with(estimates: &[SupportEstimate], bound: SupportBound) -> Result<HullPolygon> {
    let (dirs, offs): (Vec<Point>, Vec<f64>) =
        estimates.iter().filter_map(|e| e.offset(bound).map(|h| (e.rho, h))).unzip();
    intersect_half_planes(&dirs, &offs)
}

impl HullPolygon {
    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// `max_{x ∈ hull} x·ρ`.
    pub fn support(&self, rho: Point) -> f64 {
        self.vertices.iter().map(|&v| dot(v, rho)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Hausdorff distance to a convex set given by its support function,
    /// as `max_ρ |h_self(ρ) − h_other(ρ)|` over `samples` directions.
    pub fn hausdorff_to(&self, other_support: impl Fn(Point) -> f64, samples: usize) -> f64 {
        (0..samples)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
                let rho = [a.cos(), a.sin()];
                (self.support(rho) - other_support(rho)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `min_ρ (h_self(ρ) − h_other(ρ))`: nonnegative iff the hull contains
    /// the other convex set (up to direction sampling).
    pub fn containment_margin(&self, other_support: impl Fn(Point) -> f64, samples: usize) -> f64 {
        (0..samples)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
                let rho = [a.cos(), a.sin()];
                self.support(rho) - other_support(rho)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Support function of a convex polygon given by its vertices.
pub fn polygon_support(vertices: &[Point]) -> impl Fn(Point) -> f64 + '_ {
    move |rho| vertices.iter().map(|&v| dot(v, rho)).fold(f64::NEG_INFINITY, f64::max)
}
