//! Embedded explicit Runge–Kutta pairs for planar autonomous systems.

use crate::{Error, Result};

pub type State = [f64; 2];

/// Butcher tableau of an embedded pair. `b` advances the solution, `b_hat`
/// is the companion used only for the error estimate.
#[derive(Debug)]
pub struct Tableau {
    pub name: &'static str,
    pub c: &'static [f64],
    pub a: &'static [&'static [f64]],
    pub b: &'static [f64],
    pub b_hat: &'static [f64],
    /// Order of the propagated solution.
    pub order: u32,
}

/// Dormand–Prince 5(4).
pub static DORMAND_PRINCE: Tableau = Tableau {
    name: "dopri5",
    c: &[0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0],
    a: &[
        &[],
        &[1.0 / 5.0],
        &[3.0 / 40.0, 9.0 / 40.0],
        &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
        &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
        &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
        &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ],
    b: &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0],
    b_hat: &[
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ],
    order: 5,
};

/// Cash–Karp 5(4).
pub static CASH_KARP: Tableau = Tableau {
    name: "cash-karp",
    c: &[0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0],
    a: &[
        &[],
        &[1.0 / 5.0],
        &[3.0 / 40.0, 9.0 / 40.0],
        &[3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0],
        &[-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0],
        &[
            1631.0 / 55296.0,
            175.0 / 512.0,
            575.0 / 13824.0,
            44275.0 / 110592.0,
            253.0 / 4096.0,
        ],
    ],
    b: &[37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0],
    b_hat: &[
        2825.0 / 27648.0,
        0.0,
        18575.0 / 48384.0,
        13525.0 / 55296.0,
        277.0 / 14336.0,
        1.0 / 4.0,
    ],
    order: 5,
};

/// Adaptive integrator with standard PI-free step control.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub tableau: &'static Tableau,
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Integrator {
    pub fn new(tableau: &'static Tableau, tol: f64) -> Self {
        Self { tableau, rtol: tol, atol: tol, max_step: 0.05, max_steps: 5_000_000 }
    }

    /// One step of size `h`; returns the new state and the scaled error norm.
    pub fn step(&self, f: &impl Fn(State) -> State, y: State, h: f64) -> (State, f64) {
        let t = self.tableau;
        let mut k: [State; 8] = [[0.0; 2]; 8];
        for i in 0..t.c.len() {
            let mut yi = y;
            for (j, aij) in t.a[i].iter().enumerate() {
                yi[0] += h * aij * k[j][0];
                yi[1] += h * aij * k[j][1];
            }
            k[i] = f(yi);
        }
        let mut y_new = y;
        let mut err = [0.0; 2];
        for i in 0..t.c.len() {
            for d in 0..2 {
                y_new[d] += h * t.b[i] * k[i][d];
                err[d] += h * (t.b[i] - t.b_hat[i]) * k[i][d];
            }
        }
        let norm = (0..2)
            .map(|d| {
                let sc = self.atol + self.rtol * y[d].abs().max(y_new[d].abs());
                (err[d] / sc).powi(2)
            })
            .sum::<f64>()
            .sqrt()
            / std::f64::consts::SQRT_2;
        (y_new, norm)
    }

    /// Adaptive step attempt starting with `h`; returns (accepted step, new
    /// state, suggested next step).
    pub fn adaptive_step(
        &self,
        f: &impl Fn(State) -> State,
        y: State,
        mut h: f64,
        h_limit: f64,
    ) -> Result<(f64, State, f64)> {
        let expo = 1.0 / self.tableau.order as f64;
        h = h.min(h_limit).min(self.max_step);
        for _ in 0..60 {
            let (y_new, err) = self.step(f, y, h);
            if err <= 1.0 {
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-expo)).clamp(0.2, 5.0) };
                return Ok((h, y_new, (h * grow).min(self.max_step)));
            }
            h *= (0.9 * err.powf(-expo)).clamp(0.1, 0.9);
            if h < 1e-14 {
                break;
            }
        }
        Err(Error::Integration("step size underflow".into()))
    }

    /// Integrates from `y0` over `[0, span]`.
    pub fn integrate(&self, f: &impl Fn(State) -> State, y0: State, span: f64) -> Result<State> {
        let mut s = 0.0;
        let mut y = y0;
        let mut h = 1e-3_f64.min(span);
        let mut steps = 0;
        while s < span {
            let remaining = span - s;
            let (taken, y_new, h_next) = self.adaptive_step(f, y, h, remaining)?;
            y = y_new;
            s = if taken >= remaining { span } else { s + taken };
            h = h_next;
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::Integration("step budget exhausted".into()));
            }
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_order_conditions(t: &Tableau) {
        for (i, row) in t.a.iter().enumerate() {
            let s: f64 = row.iter().sum();
            assert!((s - t.c[i]).abs() < 1e-14, "{} row {i}", t.name);
        }
        let dot = |w: &[f64], g: &dyn Fn(usize) -> f64| -> f64 { w.iter().enumerate().map(|(i, b)| b * g(i)).sum() };
        for w in [t.b, t.b_hat] {
            assert!((dot(w, &|_| 1.0) - 1.0).abs() < 1e-14);
            assert!((dot(w, &|i| t.c[i]) - 0.5).abs() < 1e-14);
            assert!((dot(w, &|i| t.c[i] * t.c[i]) - 1.0 / 3.0).abs() < 1e-14);
            assert!((dot(w, &|i| t.c[i].powi(3)) - 0.25).abs() < 1e-14);
        }
        assert!((dot(t.b, &|i| t.c[i].powi(4)) - 0.2).abs() < 1e-14);
    }

    #[test]
    fn tableaux_satisfy_quadrature_conditions() {
        check_order_conditions(&DORMAND_PRINCE);
        check_order_conditions(&CASH_KARP);
    }

    #[test]
    fn harmonic_oscillator_full_turn() {
        let f = |y: State| [y[1], -y[0]];
        for tab in [&DORMAND_PRINCE, &CASH_KARP] {
            let y = Integrator::new(tab, 1e-12).integrate(&f, [1.0, 0.0], 2.0 * std::f64::consts::PI).unwrap();
            assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9, "{}: {y:?}", tab.name);
        }
    }

    #[test]
    fn fixed_step_convergence_order() {
        // y' = y on one component, measured with a fixed step.
        let f = |y: State| [y[0], 0.0];
        for tab in [&DORMAND_PRINCE, &CASH_KARP] {
            let integ = Integrator::new(tab, 1.0);
            let err = |n: usize| {
                let h = 1.0 / n as f64;
                let mut y = [1.0, 0.0];
                for _ in 0..n {
                    y = integ.step(&f, y, h).0;
                }
                (y[0] - std::f64::consts::E).abs()
            };
            let rate = (err(8) / err(16)).log2();
            assert!(rate > 4.7, "{} rate {rate}", tab.name);
        }
    }
}
