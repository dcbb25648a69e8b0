use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exponent `p` of the p-conductivity equation, restricted to `1 < p < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 1.0 {
            Ok(Self(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `|x|^{p-2} x`, the one-dimensional flux law.
    pub fn phi(self, x: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else {
            x.abs().powf(self.0 - 2.0) * x
        }
    }

    /// Inverse of [`Exponent::phi`]: `|y|^{(2-p)/(p-1)} y`.
    pub fn phi_inv(self, y: f64) -> f64 {
        if y == 0.0 {
            0.0
        } else {
            y.abs().powf((2.0 - self.0) / (self.0 - 1.0)) * y
        }
    }

    pub fn is_two(self) -> bool {
        self.0 == 2.0
    }
}

impl TryFrom<f64> for Exponent {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<Exponent> for f64 {
    fn from(p: Exponent) -> f64 {
        p.0
    }
}

/// Settings of the variational forward solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub p: Exponent,
    /// Final gradient regularisation, relative to the gradient scale of the
    /// boundary data.
    #[serde(default = "default_eps")]
    pub epsilon_reg: f64,
    /// Relative energy decrease below which Newton iterations stop.
    #[serde(default = "default_tol_energy")]
    pub tol_energy: f64,
    /// Weak-residual tolerance.
    #[serde(default = "default_tol_residual")]
    pub tol_residual: f64,
    /// Cap on Newton iterations per continuation level.
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

fn default_eps() -> f64 {
    1e-6
}
fn default_tol_energy() -> f64 {
    1e-12
}
fn default_tol_residual() -> f64 {
    1e-9
}
fn default_max_iters() -> usize {
    200
}

impl SolverConfig {
    pub fn new(p: f64) -> Result<Self> {
        Ok(Self {
            p: Exponent::new(p)?,
            epsilon_reg: default_eps(),
            tol_energy: default_tol_energy(),
            tol_residual: default_tol_residual(),
            max_iters: default_max_iters(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        Exponent::new(self.p.get())?;
        if !(self.epsilon_reg >= 0.0 && self.epsilon_reg.is_finite()) {
            return Err(Error::InvalidArgument("epsilon_reg must be >= 0".into()));
        }
        if !(self.tol_energy > 0.0 && self.tol_residual > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be positive".into()));
        }
        Ok(())
    }

    pub fn with_p(mut self, p: f64) -> Result<Self> {
        self.p = Exponent::new(p)?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_range() {
        assert!(Exponent::new(1.0).is_err());
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::INFINITY).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert!(Exponent::new(1.0001).is_ok());
        assert_eq!(Exponent::new(1.0).unwrap_err().to_string(), "p must lie in (1, ∞), got 1");
    }

    #[test]
    fn phi_inverse() {
        for p in [1.2, 1.5, 2.0, 3.0, 7.5] {
            let e = Exponent::new(p).unwrap();
            for y in [-3.0, -0.1, 0.0, 1e-3, 2.0, 40.0] {
                let x = e.phi_inv(y);
                assert!((e.phi(x) - y).abs() <= 1e-12 * y.abs().max(1.0));
            }
        }
    }

    #[test]
    fn config_checks() {
        let mut c = SolverConfig::new(2.0).unwrap();
        assert!(c.validate().is_ok());
        c.tol_residual = 0.0;
        assert!(c.validate().is_err());
        c.tol_residual = 1e-9;
        c.epsilon_reg = -1.0;
        assert!(c.validate().is_err());
    }
}
