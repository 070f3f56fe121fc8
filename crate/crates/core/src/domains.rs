//! The model domains and the maps between them.
//!
//! - half space `ℍ = {Re z₁ > 0}`
//! - Siegel half space `ℍ² = {Re z₁ > |z₂|²}`
//! - unit ball `𝔹₂ = {|z₁|² + |z₂|² < 1}`
//!
//! The Cayley map `Ψ(z) = ((1+z₁)/(1−z₁), z₂/(1−z₁))` takes the ball onto the
//! Siegel half space. `ω(z) = (√(2z₁), √z₂)` maps `ℍ²` into itself, and
//! `σ = ω ∘ Ψ`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matalg::{norm_sqr, Point};

/// `|1 − z₁|` (resp. `|1 + z₁|`, `|z₁² + 2|`) at or below this is a pole.
const TOL_POLE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DomainKind {
    WholeSpace,
    HalfSpace,
    SiegelHalfSpace,
    UnitBall,
}

impl DomainKind {
    pub fn label(self) -> &'static str {
        match self {
            DomainKind::WholeSpace => "whole space C^2",
            DomainKind::HalfSpace => "half space H",
            DomainKind::SiegelHalfSpace => "Siegel half space H^2",
            DomainKind::UnitBall => "unit ball B_2",
        }
    }
}

/// Signed membership margin; positive strictly inside.
fn margin(kind: DomainKind, z: &Point) -> f64 {
    match kind {
        DomainKind::WholeSpace => f64::INFINITY,
        DomainKind::HalfSpace => z[0].re,
        DomainKind::SiegelHalfSpace => z[0].re - z[1].norm_sqr(),
        DomainKind::UnitBall => 1.0 - norm_sqr(z),
    }
}

/// Strict membership.
pub fn contains(kind: DomainKind, z: &Point) -> bool {
    margin(kind, z) > 0.0
}

/// Membership of the closure, widened by `tol`.
pub fn contains_closed(kind: DomainKind, z: &Point, tol: f64) -> bool {
    margin(kind, z) >= -tol
}

/// Whether `t·u + (1−t)·w` stays in the domain. Both endpoints must lie in
/// it and `t ∈ [0, 1]`; the answer is always `true` for these convex
/// domains, which is what property tests check.
pub fn convexity_witness(kind: DomainKind, u: &Point, w: &Point, t: f64) -> Result<bool> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Precondition(format!("t = {t} outside [0, 1]")));
    }
    if !contains(kind, u) || !contains(kind, w) {
        return Err(Error::Precondition("endpoints must lie in the domain".into()));
    }
    let s = 1.0 - t;
    Ok(contains(kind, &[u[0] * t + w[0] * s, u[1] * t + w[1] * s]))
}

/// Principal square root with arg in `(−π/2, π/2]`; the open negative real
/// axis is the cut and is rejected rather than assigned a side.
pub fn principal_sqrt(w: Complex64) -> Result<Complex64> {
    if w.im == 0.0 && w.re < 0.0 {
        return Err(Error::BranchCut);
    }
    Ok(w.sqrt())
}

/// `Ψ(z) = ((1+z₁)/(1−z₁), z₂/(1−z₁))`
pub fn cayley(z: &Point) -> Result<Point> {
    let den = 1.0 - z[0];
    if den.norm() <= TOL_POLE {
        return Err(Error::PoleAtPoint);
    }
    Ok([(1.0 + z[0]) / den, z[1] / den])
}

/// `Ψ⁻¹(z) = ((z₁−1)/(z₁+1), 2z₂/(z₁+1))`
pub fn cayley_inv(z: &Point) -> Result<Point> {
    let den = z[0] + 1.0;
    if den.norm() <= TOL_POLE {
        return Err(Error::PoleAtPoint);
    }
    Ok([(z[0] - 1.0) / den, z[1] * 2.0 / den])
}

/// `ω(z) = (√(2z₁), √z₂)`, principal branches.
pub fn omega(z: &Point) -> Result<Point> {
    if z[0].re <= 0.0 {
        return Err(Error::BranchCut);
    }
    Ok([principal_sqrt(z[0] * 2.0)?, principal_sqrt(z[1])?])
}

/// `ω⁻¹(z) = (z₁²/2, z₂²)`
pub fn omega_inv(z: &Point) -> Point {
    [z[0] * z[0] / 2.0, z[1] * z[1]]
}

/// `σ(z) = (√(2(z₁+1)/(1−z₁)), √(z₂/(1−z₁)))`
pub fn sigma(z: &Point) -> Result<Point> {
    let den = 1.0 - z[0];
    if den.norm() <= TOL_POLE {
        return Err(Error::PoleAtPoint);
    }
    Ok([principal_sqrt((z[0] + 1.0) * 2.0 / den)?, principal_sqrt(z[1] / den)?])
}

/// `σ⁻¹(z) = ((z₁²−2)/(z₁²+2), 4z₂²/(z₁²+2))`
pub fn sigma_inv(z: &Point) -> Result<Point> {
    let sq = z[0] * z[0];
    let den = sq + 2.0;
    if den.norm() <= TOL_POLE {
        return Err(Error::PoleAtPoint);
    }
    Ok([(sq - 2.0) / den, z[1] * z[1] * 4.0 / den])
}
