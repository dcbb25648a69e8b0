use std::io::Write;

use serde::Serialize;

use super::ode::{Integrator, State, Tableau, CASH_KARP, DORMAND_PRINCE};
use crate::domain::Exponent;
use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// `V(a, b) = ((2p-3) b² + (p-1) a²) / ((p-1) b² + a²)`.
pub fn wolff_potential(p: f64, a: f64, b: f64) -> Result<f64> {
    if a == 0.0 && b == 0.0 {
        return Err(Error::InvalidArgument("V(a, b) is undefined at the origin".into()));
    }
    Ok(((2.0 * p - 3.0) * b * b + (p - 1.0) * a * a) / ((p - 1.0) * b * b + a * a))
}

/// Right-hand side `w'' = -V(w, w') w`.
pub fn wolff_rhs(p: f64, a: f64, b: f64) -> Result<f64> {
    Exponent::new(p)?;
    Ok(-wolff_potential(p, a, b)? * a)
}

fn vector_field(p: f64) -> impl Fn(State) -> State {
    move |y: State| {
        let (a, b) = (y[0], y[1]);
        let denom = (p - 1.0) * b * b + a * a;
        let v = ((2.0 * p - 3.0) * b * b + (p - 1.0) * a * a) / denom;
        [b, -v * a]
    }
}

fn wrap_angle(x: f64) -> f64 {
    (x + std::f64::consts::PI).rem_euclid(TWO_PI) - std::f64::consts::PI
}

fn angle(y: State) -> f64 {
    y[1].atan2(y[0])
}

/// Integration settings for [`integrate_wave_with`].
#[derive(Debug, Clone, Copy)]
pub struct WaveOptions {
    pub tableau: &'static Tableau,
    pub tol: f64,
    /// Uniform samples per period.
    pub samples: usize,
}

impl Default for WaveOptions {
    fn default() -> Self {
        Self { tableau: &DORMAND_PRINCE, tol: 1e-12, samples: 4096 }
    }
}

impl WaveOptions {
    /// Independent cross-check configuration (different tableau and tolerance).
    pub fn cross_check() -> Self {
        Self { tableau: &CASH_KARP, tol: 1e-10, samples: 4096 }
    }
}

/// Periodic solution of the Wolff ODE sampled over one period.
#[derive(Debug, Clone, Serialize)]
pub struct WolffWave {
    p: f64,
    initial: State,
    period: f64,
    /// `samples[k] = (w, w')` at `s = k * period / n`, `k = 0..=n`.
    #[serde(skip)]
    samples: Vec<State>,
    min_radius_sq: f64,
    max_radius_sq: f64,
    mean: f64,
    return_error: f64,
}

/// Time at which the phase angle of the trajectory from `y0` has turned by a
/// full clockwise revolution, i.e. the oriented return to the initial ray.
pub fn detect_period(p: f64, y0: State, integ: &Integrator) -> Result<f64> {
    let f = vector_field(p);
    let mut s = 0.0;
    let mut y = y0;
    let mut turned = 0.0; // accumulated (negative) angle
    let mut h = 1e-3;
    let mut steps = 0usize;
    loop {
        let (taken, y_new, h_next) = integ.adaptive_step(&f, y, h, 0.25)?;
        let d_theta = wrap_angle(angle(y_new) - angle(y));
        if d_theta >= 0.0 {
            return Err(Error::Integration("phase angle failed to decrease".into()));
        }
        if turned + d_theta <= -TWO_PI {
            // Bracketed inside this step: find delta with turned + Δθ(delta) = -2π.
            let g = |delta: f64| -> f64 {
                let yd = integ.step(&f, y, delta).0;
                turned + wrap_angle(angle(yd) - angle(y)) + TWO_PI
            };
            let (mut lo, mut hi) = (0.0, taken);
            let (mut glo, mut ghi) = (turned + TWO_PI, turned + d_theta + TWO_PI);
            let mut side = 0i8;
            for _ in 0..200 {
                let mid = (lo * ghi - hi * glo) / (ghi - glo);
                let gm = g(mid);
                if gm == 0.0 || (hi - lo) < 1e-16 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if gm > 0.0 {
                    lo = mid;
                    glo = gm;
                    if side == 1 {
                        ghi *= 0.5;
                    }
                    side = 1;
                } else {
                    hi = mid;
                    ghi = gm;
                    if side == -1 {
                        glo *= 0.5;
                    }
                    side = -1;
                }
                if (hi - lo).abs() < 1e-15 * (1.0 + s) {
                    break;
                }
            }
            return Ok(s + 0.5 * (lo + hi));
        }
        turned += d_theta;
        y = y_new;
        s += taken;
        h = h_next;
        steps += 1;
        if steps > integ.max_steps {
            return Err(Error::NotConverged("period detection exceeded the step budget".into()));
        }
    }
}

/// Closed-form period `π p / (p − 1)` of every nonzero solution.
pub fn exact_period(p: f64) -> Result<f64> {
    Exponent::new(p)?;
    Ok(std::f64::consts::PI * p / (p - 1.0))
}

pub fn integrate_wave(p: f64, a0: f64, b0: f64) -> Result<WolffWave> {
    integrate_wave_with(p, a0, b0, WaveOptions::default())
}

pub fn integrate_wave_with(p: f64, a0: f64, b0: f64, opts: WaveOptions) -> Result<WolffWave> {
    Exponent::new(p)?;
    if !(a0.is_finite() && b0.is_finite()) || (a0 == 0.0 && b0 == 0.0) {
        return Err(Error::InvalidArgument("initial data must be finite and nonzero".into()));
    }
    if opts.samples < 16 {
        return Err(Error::InvalidArgument("need at least 16 samples per period".into()));
    }
    let integ = Integrator::new(opts.tableau, opts.tol);
    let y0 = [a0, b0];
    let period = detect_period(p, y0, &integ)?;

    let f = vector_field(p);
    let n = opts.samples;
    let ds = period / n as f64;
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(y0);
    let mut y = y0;
    let mut h = ds;
    for _ in 0..n {
        let mut s = 0.0;
        while s < ds {
            let remaining = ds - s;
            let (taken, y_new, h_next) = integ.adaptive_step(&f, y, h, remaining)?;
            y = y_new;
            s = if taken >= remaining { ds } else { s + taken };
            h = h_next;
        }
        samples.push(y);
    }

    let r0 = a0.hypot(b0);
    let end = samples[n];
    let return_error = (end[0] - a0).hypot(end[1] - b0) / r0;
    if return_error > 1e-8 {
        return Err(Error::NotConverged(format!(
            "trajectory does not close after one period (relative gap {return_error:.2e})"
        )));
    }
    // Trapezoidal rule over a full period of a smooth periodic function.
    let mean = samples[..n].iter().map(|y| y[0]).sum::<f64>() * ds;
    if mean.abs() > 1e-8 * r0.max(1.0) {
        return Err(Error::NotConverged(format!("∫w over one period is {mean:.3e}, not zero")));
    }
    let (min_radius_sq, max_radius_sq) = samples
        .iter()
        .map(|y| y[0] * y[0] + y[1] * y[1])
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    Ok(WolffWave { p, initial: y0, period, samples, min_radius_sq, max_radius_sq, mean, return_error })
}

impl WolffWave {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn num_samples(&self) -> usize {
        self.samples.len() - 1
    }

    /// `(s, w, w')` for each stored sample, including the closing point `s = period`.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let ds = self.period / self.num_samples() as f64;
        self.samples.iter().enumerate().map(move |(k, y)| (k as f64 * ds, y[0], y[1]))
    }

    /// Measured bounds `(min, max)` of `w² + w'²` over the samples.
    pub fn radius_sq_bounds(&self) -> (f64, f64) {
        (self.min_radius_sq, self.max_radius_sq)
    }

    /// Trapezoidal `∫_0^λ w ds`.
    pub fn mean_integral(&self) -> f64 {
        self.mean
    }

    /// Relative gap `|y(λ) - y(0)| / |y(0)|`.
    pub fn return_error(&self) -> f64 {
        self.return_error
    }

    /// `(w(s), w'(s))` for any real `s`, by periodic extension and cubic
    /// Hermite interpolation with the ODE supplying `w''`.
    pub fn eval(&self, s: f64) -> (f64, f64) {
        let n = self.num_samples();
        let ds = self.period / n as f64;
        let x = s.rem_euclid(self.period) / ds;
        let k = (x.floor() as usize).min(n - 1);
        let t = x - k as f64;
        let (y0, y1) = (self.samples[k], self.samples[k + 1]);
        let f = vector_field(self.p);
        let (d0, d1) = (f(y0), f(y1));
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let interp = |i: usize| h00 * y0[i] + h10 * ds * d0[i] + h01 * y1[i] + h11 * ds * d1[i];
        (interp(0), interp(1))
    }

    /// Writes `s,w,dw` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["s", "w", "dw"])?;
        for (s, w, dw) in self.samples() {
            wtr.serialize((s, w, dw))?;
        }
        wtr.flush()?;
        Ok(())
    }
}
