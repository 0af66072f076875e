//! Closed-form solution of the inverse-square initial-value problem.
//!
//! From a field strength and one state, the orbit is a conic with the
//! focus at the origin. Two routes produce it: the hodograph constant
//! δ = v − (C/k)(−sin θ, cos θ), whose magnitude fixes the eccentricity
//! via e = k|δ|/C, and the general solution q = A cos(θ + θ0) + h of the
//! orbital ODE. Repulsive fields yield the far branch of a hyperbola.

use crate::dynamics::{specific_energy, CentralField, State2D};
use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, ConicOrbit, Sense};
use crate::vec::Vec2;
use std::f64::consts::TAU;

/// Conic solution of the inverse-square problem, with the quantities the
/// construction runs through.
#[derive(Debug, Clone, Copy)]
pub struct KeplerSolution {
    pub orbit: ConicOrbit,
    /// Specific angular momentum pos × vel (signed).
    pub k: f64,
    /// Hodograph offset: the constant part of the velocity.
    pub delta: Vec2,
    /// Specific orbital energy v²/2 − C/r.
    pub energy: f64,
    /// True for C < 0: the radius law flips to r = p/(e cos(θ−ω) − 1)
    /// (far hyperbola branch, focus on the convex side).
    pub repulsive: bool,
}

impl KeplerSolution {
    /// Radius at focal angle θ, if admissible for this branch.
    pub fn radius(&self, theta: f64) -> Result<f64> {
        if !self.repulsive {
            return self.orbit.radius(theta);
        }
        let denom = self.orbit.eccentricity() * (theta - self.orbit.perihelion_angle()).cos() - 1.0;
        if denom <= 0.0 {
            return Err(Error::OutsideAdmissibleRange { theta });
        }
        Ok(self.orbit.semi_latus_rectum() / denom)
    }

    /// Closest approach: p/(1+e) for attraction, p/(e−1) for repulsion.
    pub fn perihelion_radius(&self) -> f64 {
        let p = self.orbit.semi_latus_rectum();
        let e = self.orbit.eccentricity();
        if self.repulsive {
            p / (e - 1.0)
        } else {
            p / (1.0 + e)
        }
    }

    /// Position on the orbit at focal angle θ.
    pub fn predict_position(&self, theta: f64) -> Result<Vec2> {
        Ok(Vec2::from_angle(theta) * self.radius(theta)?)
    }
}

/// Solve the inverse-square problem from one state via the hodograph
/// constant. Accepts any initial angle and either traversal sense;
/// rejects radial motion (k = 0) and non-inverse-square fields.
pub fn solve_kepler(field: &CentralField, s0: &State2D) -> Result<KeplerSolution> {
    if field.exponent() != -2.0 {
        return Err(Error::InvalidField(format!(
            "conic solution requires an inverse-square field, got exponent {}",
            field.exponent()
        )));
    }
    let c = field.strength();
    let r0 = s0.pos.norm();
    if r0 == 0.0 {
        return Err(Error::OriginSingularity);
    }
    let k = s0.angular_momentum();
    if k.abs() <= 1e-12 * r0 * s0.vel.norm() || k == 0.0 {
        return Err(Error::ZeroAngularMomentum);
    }

    let theta0 = s0.pos.angle();
    let delta = s0.vel - Vec2::new(-theta0.sin(), theta0.cos()) * (c / k);
    // 1/r = C/k² + (δ·θ̂)/k, so the eccentricity vector (pointing at
    // perihelion, length e) is (k/C) δ rotated a quarter turn against
    // the traversal.
    let e_vec = delta.rotated(-std::f64::consts::FRAC_PI_2) * (k / c);
    let e = e_vec.norm();
    let p = k * k / c.abs();
    let repulsive = c < 0.0;
    if repulsive && e <= 1.0 {
        return Err(Error::InvalidInput(format!(
            "repulsive motion must be hyperbolic, got e = {e}"
        )));
    }
    // For C < 0 the admissible arc satisfies e cos(θ − e_vec.angle()) < −1,
    // so closest approach sits opposite the eccentricity vector.
    let omega = if e == 0.0 {
        0.0
    } else if repulsive {
        wrap_angle(e_vec.angle() + std::f64::consts::PI)
    } else {
        e_vec.angle()
    };
    let orbit = ConicOrbit::new(p, e, omega, Sense::from_signum(k))?;
    Ok(KeplerSolution {
        orbit,
        k,
        delta,
        energy: specific_energy(field, s0),
        repulsive,
    })
}

/// Orbit from the general solution q(θ) = A cos(θ + θ0) + h of the
/// orbital ODE q″ + q = h: semi-latus rectum 1/h, eccentricity A/h
/// (normalized to e ≥ 0 by shifting ω half a turn).
pub fn binet_solve(h: f64, amplitude: f64, theta0: f64) -> Result<ConicOrbit> {
    if h <= 0.0 || h.is_nan() {
        return Err(Error::InvalidConic(format!(
            "mean inverse radius h = {h} must be positive (attractive balance)"
        )));
    }
    ConicOrbit::new(1.0 / h, amplitude / h, -theta0, Sense::Ccw)
}

/// Period of a bound orbit under field strength `c`: 2π sqrt(a³/c).
pub fn orbit_period(orbit: &ConicOrbit, c: f64) -> Result<f64> {
    let e = orbit.eccentricity();
    if e >= 1.0 {
        return Err(Error::UnboundOrbit { e });
    }
    if c <= 0.0 || c.is_nan() {
        return Err(Error::InvalidField(format!(
            "bound orbits need an attractive field, got C = {c}"
        )));
    }
    let a = orbit.semi_major();
    Ok(TAU * (a * a * a / c).sqrt())
}

/// Focal angle of a position in the solution's frame, wrapped to (−π, π].
pub fn focal_angle(pos: Vec2) -> f64 {
    wrap_angle(pos.angle())
}
