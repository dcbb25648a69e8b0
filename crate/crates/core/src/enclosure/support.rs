use rayon::prelude::*;
use serde::Serialize;

use super::indicator::{Enclosure, IndicatorSample};
use crate::domain::Point;
use crate::wolff::ProbeParams;
use crate::{Error, Result};

/// Power of `τ` multiplying `e^{pτ h}` in the indicator asymptotics. A smooth
/// strictly convex inclusion boundary in the plane gives `τ^{1/2}`; flat
/// faces give `τ` and corners `τ^0`, so this sits in the middle.
pub const POWER_CORRECTION: f64 = 0.5;

/// The prefactor power is only known to be nonnegative, so a fit without
/// correction overestimates the support asymptotically. This is the bound
/// for the outer hull.
pub const OUTER_POWER_CORRECTION: f64 = 0.0;

/// Largest allowed decrease (in log units) of the corrected indicator
/// against the trend of the fit between consecutive `τ`.
pub const MONOTONE_TOLERANCE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateStatus {
    Conclusive,
    /// Every indicator value is below its noise floor.
    BelowNoiseFloor,
    /// Indicator values change sign along the `τ` grid.
    MixedSigns,
    /// `log |I|` runs against the fitted trend by more than the tolerance.
    NonMonotone,
}

/// Which support estimate a hull is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportBound {
    Central,
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitDiagnostics {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the linear fit.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupportEstimate {
    pub rho: Point,
    /// Estimated `sup_{x ∈ D} x·ρ`; `None` unless conclusive.
    pub h_est: Option<f64>,
    /// Conservative upper estimate of the same quantity.
    pub h_outer: Option<f64>,
    pub status: EstimateStatus,
    pub tau_grid: Vec<f64>,
    pub fit: Option<FitDiagnostics>,
    pub samples: Vec<IndicatorSample>,
}

impl SupportEstimate {
    pub fn is_conclusive(&self) -> bool {
        self.status == EstimateStatus::Conclusive
    }

    pub fn offset(&self, bound: SupportBound) -> Option<f64> {
        match bound {
            SupportBound::Central => self.h_est,
            SupportBound::Outer => self.h_outer,
        }
    }
}

/// Least-squares line `y = intercept + slope x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> FitDiagnostics {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum::<f64>() / n).sqrt();
    FitDiagnostics { slope, intercept, residual }
}

/// Turns indicator samples at `t = 0` along increasing `τ` into a support
/// estimate: fit `log|I| − c log τ = p τ h + const`.
pub fn estimate_from_samples(rho: Point, p: f64, samples: Vec<IndicatorSample>) -> SupportEstimate {
    let tau_grid: Vec<f64> = samples.iter().map(|s| s.probe.tau).collect();
    let make = |status, h: Option<(f64, f64)>, fit| SupportEstimate {
        rho,
        h_est: h.map(|v| v.0),
        h_outer: h.map(|v| v.1),
        status,
        tau_grid: tau_grid.clone(),
        fit,
        samples: samples.clone(),
    };

    let used: Vec<&IndicatorSample> = samples.iter().filter(|s| s.is_significant()).collect();
    if used.len() < 2 {
        return make(EstimateStatus::BelowNoiseFloor, None, None);
    }
    let positive = used[0].value > 0.0;
    if used.iter().any(|s| (s.value > 0.0) != positive) {
        return make(EstimateStatus::MixedSigns, None, None);
    }
    let x: Vec<f64> = used.iter().map(|s| s.probe.tau).collect();
    let y: Vec<f64> = used.iter().map(|s| s.value.abs().ln() - POWER_CORRECTION * s.probe.tau.ln()).collect();
    let fit = fit_line(&x, &y);
    let trend = fit.slope.signum();
    if y.windows(2).any(|w| trend * (w[1] - w[0]) < -MONOTONE_TOLERANCE) {
        return make(EstimateStatus::NonMonotone, None, Some(fit));
    }
    // The probe enters the pairing to the power p.
    let h = fit.slope / p;
    let shift = POWER_CORRECTION - OUTER_POWER_CORRECTION;
    let outer = fit_line(&x, &y.iter().zip(&x).map(|(v, t)| v + shift * t.ln()).collect::<Vec<_>>()).slope / p;
    make(EstimateStatus::Conclusive, Some((h, outer.max(h))), Some(fit))
}

fn check_grid(tau_grid: &[f64]) -> Result<()> {
    if tau_grid.len() < 4 {
        return Err(Error::InvalidArgument("support estimation needs at least 4 values of tau".into()));
    }
    if tau_grid.windows(2).any(|w| w[1] <= w[0]) || tau_grid[0] <= 0.0 {
        return Err(Error::InvalidArgument("tau grid must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// `n` unit directions `(cos 2πk/n, sin 2πk/n)`.
pub fn uniform_directions(n: usize) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            [a.cos(), a.sin()]
        })
        .collect()
}

impl Enclosure<'_> {
    pub fn support_estimate(&self, rho: Point, tau_grid: &[f64]) -> Result<SupportEstimate> {
        Ok(self.support_estimates(&[rho], tau_grid)?.remove(0))
    }

    /// Support estimates for several directions; all (direction, τ) pairs
    /// are evaluated in parallel and aggregated in input order.
    pub fn support_estimates(&self, directions: &[Point], tau_grid: &[f64]) -> Result<Vec<SupportEstimate>> {
        check_grid(tau_grid)?;
        let mut probes = Vec::with_capacity(directions.len() * tau_grid.len());
        for rho in directions {
            for &tau in tau_grid {
                probes.push(ProbeParams::new(*rho, [-rho[1], rho[0]], 0.0, tau)?);
            }
        }
        let samples = self.indicators(&probes)?;
        Ok(directions
            .par_iter()
            .zip(samples.par_chunks(tau_grid.len()))
            .map(|(rho, chunk)| estimate_from_samples(*rho, self.p(), chunk.to_vec()))
            .collect())
    }
}
