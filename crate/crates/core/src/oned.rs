//! Exact theory of the p-conductivity equation on an interval `]a, b[`.
//!
//! For piecewise-constant conductivity everything is closed form. With no
//! insulating piece the solution is
//!
//! ```text
//! u(x) = A + (B - A) F(x) / F(b),   F(x) = ∫_a^x σ^{1/(1-p)} dt,
//! ```
//!
//! with the convention `∞^{1/(1-p)} = 0`, and the flux
//! `σ |u'|^{p-2} u'` is the constant `φ(c) = |c|^{p-2} c`, `c = (B - A) / F(b)`.
//! If an insulating piece is present the energy can be driven to zero, the
//! solution is constant outside the insulating pieces and the flux vanishes.

use serde::{Deserialize, Serialize};

use crate::domain::{Conductivity, Exponent};
use crate::{Error, Result};

/// Piecewise-constant conductivity on `]x_0, x_n[`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewise", into = "RawPiecewise")]
pub struct PiecewiseConductivity1D {
    breakpoints: Vec<f64>,
    pieces: Vec<Conductivity>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiecewise {
    breakpoints: Vec<f64>,
    values: Vec<Conductivity>,
}

impl TryFrom<RawPiecewise> for PiecewiseConductivity1D {
    type Error = Error;
    fn try_from(raw: RawPiecewise) -> Result<Self> {
        Self::new(raw.breakpoints, raw.values)
    }
}

impl From<PiecewiseConductivity1D> for RawPiecewise {
    fn from(s: PiecewiseConductivity1D) -> Self {
        Self { breakpoints: s.breakpoints, values: s.pieces }
    }
}

impl PiecewiseConductivity1D {
    /// Adjacent pieces carrying the same degenerate tag are merged. The first
    /// and last pieces must be finite, and no zero piece may border an
    /// infinite one.
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Conductivity>) -> Result<Self> {
        if pieces.is_empty() || breakpoints.len() != pieces.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} breakpoints for {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints.iter().any(|x| !x.is_finite()) || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("breakpoints must be finite and strictly increasing".into()));
        }
        for c in &pieces {
            if let Conductivity::Finite(v) = c {
                Conductivity::finite(*v)?;
            }
        }
        let mut bp = vec![breakpoints[0]];
        let mut merged: Vec<Conductivity> = Vec::with_capacity(pieces.len());
        for (k, c) in pieces.iter().enumerate() {
            let degenerate = !matches!(c, Conductivity::Finite(_));
            if degenerate && merged.last() == Some(c) {
                *bp.last_mut().unwrap() = breakpoints[k + 1];
            } else {
                merged.push(*c);
                bp.push(breakpoints[k + 1]);
            }
        }
        if !matches!(merged[0], Conductivity::Finite(_))
            || !matches!(merged[merged.len() - 1], Conductivity::Finite(_))
        {
            return Err(Error::InvalidField(
                "degenerate pieces must not touch the endpoints of the interval".into(),
            ));
        }
        if merged
            .windows(2)
            .any(|w| (w[0].is_zero() && w[1].is_infinite()) || (w[0].is_infinite() && w[1].is_zero()))
        {
            return Err(Error::InvalidField("zero and infinite pieces must not touch".into()));
        }
        Ok(Self { breakpoints: bp, pieces: merged })
    }

    pub fn uniform(a: f64, b: f64, value: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![Conductivity::finite(value)?])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Conductivity] {
        &self.pieces
    }

    pub fn a(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn b(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1]
    }

    pub fn has_zero(&self) -> bool {
        self.pieces.iter().any(|c| c.is_zero())
    }

    fn intervals(&self) -> impl Iterator<Item = (f64, f64, Conductivity)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.pieces)
            .map(|(w, c)| (w[0], w[1], *c))
    }

    fn piece_index(&self, x: f64) -> usize {
        let k = self.breakpoints.partition_point(|&b| b <= x);
        k.saturating_sub(1).min(self.pieces.len() - 1)
    }

    /// `σ^{1/(1-p)}` on one piece; zero on infinite pieces. Not defined for zero pieces.
    fn weight(c: Conductivity, p: f64) -> f64 {
        match c {
            Conductivity::Finite(v) => v.powf(1.0 / (1.0 - p)),
            Conductivity::Infinite => 0.0,
            Conductivity::Zero => f64::INFINITY,
        }
    }

    /// `F(x) = ∫_a^x σ^{1/(1-p)}`.
    pub fn cumulative_weight(&self, p: f64, x: f64) -> f64 {
        let mut acc = 0.0;
        for (l, r, c) in self.intervals() {
            if x <= l {
                break;
            }
            acc += Self::weight(c, p) * (x.min(r) - l);
        }
        acc
    }

    /// `∫_a^b σ^{1/(1-p)}`; infinite when an insulating piece is present.
    pub fn total_weight(&self, p: f64) -> f64 {
        self.cumulative_weight(p, self.b())
    }
}

/// Dirichlet values `(u(a), u(b))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletPair {
    pub left: f64,
    pub right: f64,
}

impl DirichletPair {
    pub fn new(left: f64, right: f64) -> Self {
        Self { left, right }
    }
}

/// Boundary fluxes `(-σ|u'|^{p-2}u'(a), σ|u'|^{p-2}u'(b))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeumannPair {
    pub left: f64,
    pub right: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    /// No insulating piece: `u = A + c F(x)`.
    Conducting { slope: f64 },
    /// Constant outside insulating pieces, smoothstep bridges inside.
    Insulated { total_zero_length: f64 },
}

/// Closed-form solution of the 1D Dirichlet problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution1D {
    sigma: PiecewiseConductivity1D,
    p: Exponent,
    bc: DirichletPair,
    shape: Shape,
}

fn check(bc: DirichletPair) -> Result<()> {
    if !(bc.left.is_finite() && bc.right.is_finite()) {
        return Err(Error::InvalidArgument("Dirichlet values must be finite".into()));
    }
    Ok(())
}

pub fn solve_1d(sigma: &PiecewiseConductivity1D, p: f64, bc: DirichletPair) -> Result<Solution1D> {
    let p = Exponent::new(p)?;
    check(bc)?;
    let shape = if sigma.has_zero() {
        let total_zero_length = sigma
            .intervals()
            .filter(|(_, _, c)| c.is_zero())
            .map(|(l, r, _)| r - l)
            .sum();
        Shape::Insulated { total_zero_length }
    } else {
        let fb = sigma.total_weight(p.get());
        if fb.is_nan() || fb <= 0.0 {
            return Err(Error::InvalidField(
                "∫σ^{1/(1-p)} vanishes: the conductivity is infinite up to both endpoints".into(),
            ));
        }
        Shape::Conducting { slope: (bc.right - bc.left) / fb }
    };
    Ok(Solution1D { sigma: sigma.clone(), p, bc, shape })
}

fn smoothstep(s: f64) -> (f64, f64) {
    (s * s * (3.0 - 2.0 * s), 6.0 * s * (1.0 - s))
}

impl Solution1D {
    pub fn value(&self, x: f64) -> f64 {
        let x = x.clamp(self.sigma.a(), self.sigma.b());
        match self.shape {
            Shape::Conducting { slope } => {
                self.bc.left + slope * self.sigma.cumulative_weight(self.p.get(), x)
            }
            Shape::Insulated { total_zero_length } => {
                let jump = self.bc.right - self.bc.left;
                let mut acc = self.bc.left;
                for (l, r, c) in self.sigma.intervals() {
                    if !c.is_zero() {
                        continue;
                    }
                    let share = jump * (r - l) / total_zero_length;
                    if x >= r {
                        acc += share;
                    } else if x > l {
                        acc += share * smoothstep((x - l) / (r - l)).0;
                    }
                }
                acc
            }
        }
    }

    /// `u'(x)`; on a breakpoint the right-hand piece is used.
    pub fn derivative(&self, x: f64) -> f64 {
        let k = self.sigma.piece_index(x);
        let c = self.sigma.pieces[k];
        match self.shape {
            Shape::Conducting { slope } => slope * PiecewiseConductivity1D::weight(c, self.p.get()),
            Shape::Insulated { total_zero_length } => {
                if !c.is_zero() {
                    return 0.0;
                }
                let (l, r) = (self.sigma.breakpoints[k], self.sigma.breakpoints[k + 1]);
                let share = (self.bc.right - self.bc.left) * (r - l) / total_zero_length;
                share * smoothstep((x - l) / (r - l)).1 / (r - l)
            }
        }
    }

    /// The constant flux `σ|u'|^{p-2}u'`; zero when an insulating piece exists.
    pub fn flux(&self) -> f64 {
        match self.shape {
            Shape::Conducting { slope } => self.p.phi(slope),
            Shape::Insulated { .. } => 0.0,
        }
    }

    /// Pointwise flux density, with `∞ · 0 = 0` on infinite pieces.
    pub fn flux_density(&self, x: f64) -> f64 {
        match self.sigma.pieces[self.sigma.piece_index(x)] {
            Conductivity::Finite(_) => self.flux(),
            _ => 0.0,
        }
    }

    /// `I(u) = ∫σ|u'|^p`, computed in closed form.
    pub fn energy(&self) -> f64 {
        match self.shape {
            Shape::Conducting { slope } => {
                slope.abs().powf(self.p.get()) * self.sigma.total_weight(self.p.get())
            }
            Shape::Insulated { .. } => 0.0,
        }
    }

    pub fn sigma(&self) -> &PiecewiseConductivity1D {
        &self.sigma
    }

    pub fn exponent(&self) -> Exponent {
        self.p
    }
}

pub fn dn_map_1d(sigma: &PiecewiseConductivity1D, p: f64, bc: DirichletPair) -> Result<NeumannPair> {
    let flux = solve_1d(sigma, p, bc)?.flux();
    Ok(NeumannPair { left: -flux, right: flux })
}

/// `⟨Λσ(A, B), (α, β)⟩ = φ(c) (β - α)`.
pub fn weak_pairing_1d(
    sigma: &PiecewiseConductivity1D,
    p: f64,
    bc: DirichletPair,
    test: DirichletPair,
) -> Result<f64> {
    check(test)?;
    Ok(solve_1d(sigma, p, bc)?.flux() * (test.right - test.left))
}

/// Continuous piecewise-linear test function on the interval.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear1D {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseLinear1D {
    /// Ramp rising from 0 to 1 on `[b - eps, b]` (`endpoint_right`) or falling
    /// from 1 to 0 on `[a, a + eps]`.
    pub fn endpoint_ramp(a: f64, b: f64, eps: f64, endpoint_right: bool) -> Self {
        if endpoint_right {
            Self { knots: vec![a, b - eps, b], values: vec![0.0, 0.0, 1.0] }
        } else {
            Self { knots: vec![a, a + eps, b], values: vec![1.0, 0.0, 0.0] }
        }
    }
}

/// Weak pairing against an explicit test function `h`:
/// `∫ σ|u'|^{p-2}u' h' dx`, integrated exactly piece by piece.
///
/// Admissible test functions have `h' = 0` on infinite pieces; a window that
/// overlaps one loses that part of the flux.
pub fn weak_pairing_1d_with(
    sigma: &PiecewiseConductivity1D,
    p: f64,
    bc: DirichletPair,
    h: &PiecewiseLinear1D,
) -> Result<f64> {
    let sol = solve_1d(sigma, p, bc)?;
    if h.knots.len() != h.values.len() || h.knots.len() < 2 {
        return Err(Error::InvalidArgument("test function needs matching knots and values".into()));
    }
    let mut total = 0.0;
    for (w, hv) in h.knots.windows(2).zip(h.values.windows(2)) {
        let (hl, hr) = (w[0], w[1]);
        if hr <= hl {
            continue;
        }
        let slope = (hv[1] - hv[0]) / (hr - hl);
        for (l, r, c) in sigma.intervals() {
            let (lo, hi) = (l.max(hl), r.min(hr));
            if hi > lo && matches!(c, Conductivity::Finite(_)) {
                total += sol.flux() * slope * (hi - lo);
            }
        }
    }
    Ok(total)
}

/// Recovers the strong DN map from a weak-pairing oracle by testing against
/// ramps of width ε at each endpoint and taking ε → 0 along `schedule`.
pub fn strong_from_weak_1d(
    weak: impl Fn(&PiecewiseLinear1D) -> Result<f64>,
    interval: (f64, f64),
    schedule: &[f64],
    tol: f64,
) -> Result<NeumannPair> {
    let (a, b) = interval;
    if schedule.is_empty() || schedule.iter().any(|&e| !(e > 0.0 && e < b - a)) {
        return Err(Error::InvalidArgument("ε schedule must be nonempty and inside (0, b - a)".into()));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("ε schedule must be decreasing".into()));
    }
    let endpoint = |right: bool| -> Result<f64> {
        let values: Vec<f64> = schedule
            .iter()
            .map(|&eps| weak(&PiecewiseLinear1D::endpoint_ramp(a, b, eps, right)))
            .collect::<Result<_>>()?;
        let last = values[values.len() - 1];
        if values.len() >= 2 {
            let prev = values[values.len() - 2];
            if (last - prev).abs() > tol * last.abs().max(1.0) {
                return Err(Error::NotConverged(format!(
                    "ε-ramp pairing still changing at the smallest ε: {prev} vs {last}"
                )));
            }
        }
        Ok(last)
    };
    // The falling ramp at `a` pairs to -σ|u'|^{p-2}u'(a) directly.
    let left = endpoint(false)?;
    let right = endpoint(true)?;
    Ok(NeumannPair { left, right })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RecoveredInvariant {
    /// The DN map vanishes identically: an insulating piece is present and
    /// nothing else can be learned.
    ZeroInclusion,
    /// `∫_a^b σ^{1/(1-p)}`.
    Integral(f64),
}

fn probe_pairs() -> [DirichletPair; 5] {
    [
        DirichletPair::new(0.0, 1.0),
        DirichletPair::new(1.0, 0.0),
        DirichletPair::new(-1.0, 2.0),
        DirichletPair::new(3.0, -0.5),
        DirichletPair::new(0.25, 0.75),
    ]
}

/// Recovers the only invariant the 1D DN map carries.
pub fn recover_invariant(
    dn: impl Fn(DirichletPair) -> Result<NeumannPair>,
    p: f64,
) -> Result<RecoveredInvariant> {
    let p = Exponent::new(p)?;
    let outputs: Vec<NeumannPair> = probe_pairs().iter().map(|&bc| dn(bc)).collect::<Result<_>>()?;
    if outputs.iter().all(|n| n.left == 0.0 && n.right == 0.0) {
        return Ok(RecoveredInvariant::ZeroInclusion);
    }
    // Probe (0, 1) makes c = 1 / F(b) > 0.
    let c = p.phi_inv(outputs[0].right);
    Ok(RecoveredInvariant::Integral(1.0 / c))
}
