//! Enclosure method: plane-wave indicator, support-function estimates,
//! convex-hull reconstruction and inclusion classification.

mod hull;
mod indicator;
mod output;
mod support;

use serde::{Deserialize, Serialize};

pub use hull::{intersect_half_planes, polygon_support, reconstruct_hull, reconstruct_hull_with, HullPolygon};
pub use indicator::{indicator, Enclosure, IndicatorSample, ScalingReport};
pub use output::{write_overlay_svg, write_sweep_csv};
pub use support::{
    estimate_from_samples, fit_line, uniform_directions, EstimateStatus, FitDiagnostics, SupportBound,
    SupportEstimate, MONOTONE_TOLERANCE, OUTER_POWER_CORRECTION, POWER_CORRECTION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Conducting,
    Insulating,
    None,
    Unclassified,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Conducting => "CONDUCTING",
            Self::Insulating => "INSULATING",
            Self::None => "NONE",
            Self::Unclassified => "UNCLASSIFIED",
        })
    }
}

/// Sign of the significant samples: all positive means a more conducting
/// inclusion, all negative a less conducting one.
pub fn classify_inclusion(samples: &[IndicatorSample]) -> Classification {
    let significant: Vec<&IndicatorSample> = samples.iter().filter(|s| s.is_significant()).collect();
    if significant.is_empty() {
        return Classification::None;
    }
    if significant.iter().all(|s| s.value > 0.0) {
        Classification::Conducting
    } else if significant.iter().all(|s| s.value < 0.0) {
        Classification::Insulating
    } else {
        Classification::Unclassified
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_rect_mesh_at, Conductivity, ConductivityField, Mesh2D, SolverConfig};
    use crate::wolff::{integrate_wave, ProbeParams};

    fn domain(n: usize) -> Mesh2D {
        build_rect_mesh_at([-0.5, -0.5], n, n, 1.0, 1.0).unwrap()
    }

    fn disk(mesh: &Mesh2D, r: f64, value: Conductivity) -> ConductivityField {
        ConductivityField::uniform(mesh, 1.0)
            .unwrap()
            .with_region(mesh, |c| c[0].hypot(c[1]) < r, value)
            .unwrap()
    }

    fn sample(value: f64, floor: f64) -> IndicatorSample {
        IndicatorSample {
            probe: ProbeParams::from_angle(0.0, 0.0, 1.0).unwrap(),
            value,
            pairing_sigma: 0.0,
            pairing_background: 0.0,
            noise_floor: floor,
        }
    }

    #[test]
    fn classification_rules() {
        assert_eq!(classify_inclusion(&[sample(1.0, 0.1), sample(2.0, 0.1)]), Classification::Conducting);
        assert_eq!(classify_inclusion(&[sample(-1.0, 0.1), sample(0.01, 0.1)]), Classification::Insulating);
        assert_eq!(classify_inclusion(&[sample(0.01, 0.1)]), Classification::None);
        assert_eq!(classify_inclusion(&[sample(1.0, 0.1), sample(-1.0, 0.1)]), Classification::Unclassified);
        assert_eq!(Classification::Conducting.to_string(), "CONDUCTING");
    }

    #[test]
    fn no_inclusion_is_inconclusive() {
        let mesh = domain(24);
        let sigma = ConductivityField::uniform(&mesh, 1.0).unwrap();
        let enc = Enclosure::new(&mesh, &sigma, integrate_wave(2.0, 0.0, 1.0).unwrap(), SolverConfig::new(2.0).unwrap()).unwrap();
        let est = enc.support_estimate([1.0, 0.0], &[2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(est.status, EstimateStatus::BelowNoiseFloor);
        assert!(est.samples.iter().all(|s| s.value == 0.0));
        assert_eq!(classify_inclusion(&est.samples), Classification::None);
    }

    #[test]
    fn indicator_sign_follows_contrast() {
        let mesh = domain(32);
        let wave = integrate_wave(2.0, 0.0, 1.0).unwrap();
        let cfg = SolverConfig::new(2.0).unwrap();
        let probe = ProbeParams::from_angle(0.3, 0.0, 6.0).unwrap();
        let hi = indicator(&mesh, &disk(&mesh, 0.25, Conductivity::Finite(2.0)), &wave, &probe, &cfg).unwrap();
        let lo = indicator(&mesh, &disk(&mesh, 0.25, Conductivity::Finite(0.5)), &wave, &probe, &cfg).unwrap();
        assert!(hi.value > hi.noise_floor);
        assert!(lo.value < -lo.noise_floor);
    }

    #[test]
    fn resolution_guard() {
        let mesh = domain(8);
        let sigma = ConductivityField::uniform(&mesh, 1.0).unwrap();
        let enc = Enclosure::new(&mesh, &sigma, integrate_wave(2.0, 0.0, 1.0).unwrap(), SolverConfig::new(2.0).unwrap()).unwrap();
        let err = enc.indicator(&ProbeParams::from_angle(0.0, 0.0, 10.0).unwrap()).unwrap_err();
        assert!(matches!(err, crate::Error::UnresolvedProbe(_)));
    }

    #[test]
    fn wave_and_solver_exponents_must_agree() {
        let mesh = domain(8);
        let sigma = ConductivityField::uniform(&mesh, 1.0).unwrap();
        assert!(Enclosure::new(&mesh, &sigma, integrate_wave(3.0, 0.0, 1.0).unwrap(), SolverConfig::new(2.0).unwrap()).is_err());
    }

    #[test]
    fn scaling_identity_is_algebraic() {
        let mesh = domain(32);
        let enc = Enclosure::new(
            &mesh,
            &disk(&mesh, 0.25, Conductivity::Finite(2.0)),
            integrate_wave(2.0, 0.0, 1.0).unwrap(),
            SolverConfig::new(2.0).unwrap(),
        )
        .unwrap();
        let same = enc.scaling_identity_check([1.0, 0.0], 0.1, 0.1, 5.0).unwrap();
        assert_eq!(same.relative_error, 0.0);
        let r = enc.scaling_identity_check([0.6, 0.8], 0.0, 0.1, 5.0).unwrap();
        assert!(r.relative_error < 1e-6, "{r:?}");
    }

    #[test]
    fn centered_disk_support() {
        let mesh = domain(32);
        let enc = Enclosure::new(
            &mesh,
            &disk(&mesh, 0.25, Conductivity::Finite(2.0)),
            integrate_wave(2.0, 0.0, 1.0).unwrap(),
            SolverConfig::new(2.0).unwrap(),
        )
        .unwrap();
        let est = enc.support_estimate([0.0, 1.0], &[4.0, 6.0, 8.0, 10.0]).unwrap();
        assert!(est.is_conclusive());
        let h = est.h_est.unwrap();
        assert!((h - 0.25).abs() < 0.05, "{h}");
    }
}
