use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::hull::HullPolygon;
use super::indicator::IndicatorSample;
use crate::domain::{Conductivity, ConductivityField, Mesh2D};
use crate::Result;

#[derive(Serialize)]
struct SweepRow {
    rho_x: f64,
    rho_y: f64,
    t: f64,
    tau: f64,
    #[serde(rename = "I")]
    indicator: f64,
    pairing_sigma: f64,
    pairing_background: f64,
}

/// Writes one CSV row per indicator sample.
pub fn write_sweep_csv<W: Write>(writer: W, samples: &[IndicatorSample]) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    for s in samples {
        out.serialize(SweepRow {
            rho_x: s.probe.rho[0],
            rho_y: s.probe.rho[1],
            t: s.probe.t,
            tau: s.probe.tau,
            indicator: s.value,
            pairing_sigma: s.pairing_sigma,
            pairing_background: s.pairing_background,
        })?;
    }
    out.flush()?;
    Ok(())
}

fn fill_for(c: Conductivity) -> Option<&'static str> {
    match c {
        Conductivity::Zero => Some("#4477aa"),
        Conductivity::Infinite => Some("#aa3377"),
        Conductivity::Finite(v) if v > 1.0 => Some("#ee6677"),
        Conductivity::Finite(v) if v < 1.0 => Some("#66ccee"),
        Conductivity::Finite(_) => None,
    }
}

/// SVG picture of the domain with the inclusion triangles (any element whose
/// conductivity differs from 1) and hull outlines. The first hull is drawn
/// solid, the rest dashed.
pub fn write_overlay_svg<W: Write>(
    mut writer: W,
    mesh: &Mesh2D,
    sigma: &ConductivityField,
    hulls: &[&HullPolygon],
) -> Result<()> {
    let (lo, hi) = mesh.bounding_box();
    let size = 512.0;
    let scale = size / (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let map = |p: [f64; 2]| ((p[0] - lo[0]) * scale, (hi[1] - p[1]) * scale);
    let (w, h) = ((hi[0] - lo[0]) * scale, (hi[1] - lo[1]) * scale);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#);
    let _ = writeln!(svg, r##"<rect x="0" y="0" width="{w:.3}" height="{h:.3}" fill="#ffffff" stroke="#000000"/>"##);
    for (tri, &c) in mesh.triangles().iter().zip(sigma.values()) {
        let Some(fill) = fill_for(c) else { continue };
        let pts: Vec<String> = tri
            .iter()
            .map(|&v| {
                let (x, y) = map(mesh.vertices()[v]);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(svg, r#"<polygon points="{}" fill="{fill}" stroke="none"/>"#, pts.join(" "));
    }
    for (k, hull) in hulls.iter().enumerate() {
        let dash = if k == 0 { "" } else { r#" stroke-dasharray="6 4""# };
        let pts: Vec<String> = hull
            .vertices
            .iter()
            .map(|&v| {
                let (x, y) = map(v);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            svg,
            r##"<polygon points="{}" fill="none" stroke="#222222" stroke-width="2"{dash}/>"##,
            pts.join(" ")
        );
    }
    svg.push_str("</svg>\n");
    writer.write_all(svg.as_bytes())?;
    Ok(())
}
