//! Focal geometry of ellipses and conic orbits.
//!
//! Everything here is a pure function of value-semantic inputs. Two polar
//! conventions coexist and are bridged explicitly:
//!
//! * the *geometric* frame of [`Ellipse::focal_radius`], centered on the
//!   attracting focus F1 with the far vertex (r = a + c) at θ = 0, where
//!   1/r = (a − c cos θ)/b²;
//! * the *orbital* frame of [`ConicOrbit`], where perihelion sits at
//!   θ = ω and 1/r = (1 + e cos(θ − ω))/p.
//!
//! The two angles differ by θ_orbital = π − θ_geometric; see
//! [`geometric_to_orbital_angle`].

use crate::error::{Error, Result};
use crate::vec::Vec2;

/// Default eccentricity tolerance for conic classification.
pub const CLASSIFY_E_TOL: f64 = 1e-9;

/// An ellipse in its canonical centered frame: semi-axes `a ≥ b > 0`,
/// focal half-distance `c`, foci F1 = (−c, 0) and F2 = (+c, 0).
///
/// F1 is the attracting focus throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    a: f64,
    b: f64,
    c: f64,
    e: f64,
}

impl Ellipse {
    /// Build an ellipse from the semi-major length `a` and the focal
    /// half-distance `c`, with `b = sqrt(a² − c²)`.
    pub fn new(a: f64, c: f64) -> Result<Ellipse> {
        if !a.is_finite() || !c.is_finite() {
            return Err(Error::InvalidEllipse("a and c must be finite".into()));
        }
        if a <= 0.0 {
            return Err(Error::InvalidEllipse(format!("a = {a} must be positive")));
        }
        if c < 0.0 || c >= a {
            return Err(Error::InvalidEllipse(format!(
                "focal half-distance c = {c} must satisfy 0 <= c < a = {a}"
            )));
        }
        let b = ((a - c) * (a + c)).sqrt();
        Ok(Ellipse { a, b, c, e: c / a })
    }

    /// Build an ellipse from the semi-major length and eccentricity.
    pub fn from_eccentricity(a: f64, e: f64) -> Result<Ellipse> {
        if !(0.0..1.0).contains(&e) {
            return Err(Error::InvalidEllipse(format!(
                "eccentricity {e} outside [0, 1)"
            )));
        }
        Ellipse::new(a, a * e)
    }

    pub fn semi_major(&self) -> f64 {
        self.a
    }

    pub fn semi_minor(&self) -> f64 {
        self.b
    }

    pub fn focal_distance(&self) -> f64 {
        self.c
    }

    pub fn eccentricity(&self) -> f64 {
        self.e
    }

    /// The attracting focus F1 = (−c, 0).
    pub fn focus1(&self) -> Vec2 {
        Vec2::new(-self.c, 0.0)
    }

    /// The empty focus F2 = (+c, 0).
    pub fn focus2(&self) -> Vec2 {
        Vec2::new(self.c, 0.0)
    }

    /// Semi-latus rectum b²/a.
    pub fn semi_latus_rectum(&self) -> f64 {
        self.b * self.b / self.a
    }

    /// Polar radius from F1 at angle θ = ∠F2F1P: r = b²/(a − c cos θ).
    ///
    /// The far vertex (r = a + c) sits at θ = 0. The denominator is at
    /// least a − c > 0, so this is total.
    pub fn focal_radius(&self, theta: f64) -> f64 {
        self.b * self.b / (self.a - self.c * theta.cos())
    }

    /// Point (a cos t, b sin t) of the parametric representation.
    pub fn parametric_point(&self, t: f64) -> Vec2 {
        Vec2::new(self.a * t.cos(), self.b * t.sin())
    }

    /// Unit tangent direction at parameter `t`.
    pub fn tangent_direction(&self, t: f64) -> Vec2 {
        Vec2::new(-self.a * t.sin(), self.b * t.cos()).normalized()
    }

    /// The parametric point together with its distances to F1 and F2.
    /// The two distances always sum to 2a.
    pub fn point_with_focal_distances(&self, t: f64) -> (Vec2, f64, f64) {
        let p = self.parametric_point(t);
        let r1 = (p - self.focus1()).norm();
        let r2 = (p - self.focus2()).norm();
        (p, r1, r2)
    }

    /// Tangent-line data at parameter `t`: the angle ε between the focal
    /// chord PF1 and the tangent, both focal distances to the tangent
    /// line, and the curvature κ = (a/b²) sin³ε.
    pub fn tangent_data(&self, t: f64) -> TangentData {
        let (p, r1, _) = self.point_with_focal_distances(t);
        let tangent = self.tangent_direction(t);
        let chord1 = self.focus1() - p;
        let d1 = chord1.cross(tangent).abs();
        let d2 = (self.focus2() - p).cross(tangent).abs();
        let sin_eps = (d1 / r1).min(1.0);
        // atan2 of the cross/dot pair stays accurate where asin(d1/r1)
        // loses digits (near right angles).
        let epsilon = d1.atan2(chord1.dot(tangent).abs());
        let kappa = self.a / (self.b * self.b) * sin_eps.powi(3);
        TangentData {
            epsilon,
            d1,
            d2,
            kappa,
        }
    }

    /// Curvature from the parametric representation,
    /// κ = (ẋÿ − ẏẍ)/(ẋ² + ẏ²)^{3/2} = ab/(a² sin²t + b² cos²t)^{3/2}.
    pub fn curvature_parametric(&self, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        let speed_sq = self.a * self.a * s * s + self.b * self.b * c * c;
        self.a * self.b / speed_sq.powf(1.5)
    }

    /// Angle of the parametric point seen from F1, measured toward F2:
    /// θ = atan2(b sin t, a cos t + c). Bridges the parametric frame to
    /// the focal polar frame of [`Ellipse::focal_radius`].
    pub fn param_to_focal_angle(&self, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        (self.b * s).atan2(self.a * c + self.c)
    }

    /// Inverse of [`Ellipse::param_to_focal_angle`].
    pub fn focal_angle_to_param(&self, theta: f64) -> f64 {
        let r = self.focal_radius(theta);
        let (s, c) = theta.sin_cos();
        // P − F1 = r (cos θ, sin θ) = (a cos t + c, b sin t)
        (r * s / self.b).atan2((r * c - self.c) / self.a)
    }

    /// Intersection K of the focal chord PF1 with the line through the
    /// center parallel to the tangent at P, and the distance |PK|.
    /// |PK| equals the semi-major length for every point of the ellipse.
    pub fn tangent_parallel_intercept(&self, t: f64) -> (Vec2, f64) {
        let p = self.parametric_point(t);
        let tangent = self.tangent_direction(t);
        let chord = self.focus1() - p;
        // Solve (P + s·chord) × tangent = 0 for s.
        let s = p.cross(tangent) / -chord.cross(tangent);
        let k = p + chord * s;
        (k, s * chord.norm())
    }

    /// The dynamical conic with perihelion direction `omega` that traces
    /// this ellipse around F1.
    pub fn to_conic(&self, omega: f64, sense: Sense) -> ConicOrbit {
        ConicOrbit {
            p: self.semi_latus_rectum(),
            e: self.e,
            omega,
            sense,
        }
    }
}

/// Tangent-line geometry at a point of an ellipse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentData {
    /// Acute angle between the focal chord PF1 and the tangent, in (0, π/2].
    pub epsilon: f64,
    /// Distance from F1 to the tangent line.
    pub d1: f64,
    /// Distance from F2 to the tangent line.
    pub d2: f64,
    /// Curvature (a/b²) sin³ε.
    pub kappa: f64,
}

/// Orbit direction in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sense {
    /// Counterclockwise (positive angular momentum).
    #[default]
    Ccw,
    /// Clockwise.
    Cw,
}

impl Sense {
    pub fn signum(self) -> f64 {
        match self {
            Sense::Ccw => 1.0,
            Sense::Cw => -1.0,
        }
    }

    pub fn from_signum(k: f64) -> Sense {
        if k < 0.0 {
            Sense::Cw
        } else {
            Sense::Ccw
        }
    }
}

/// Conic-section class reported by [`ConicOrbit::classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConicClass {
    Circle,
    Ellipse,
    Parabola,
    Hyperbola,
}

impl std::fmt::Display for ConicClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConicClass::Circle => "circle",
            ConicClass::Ellipse => "ellipse",
            ConicClass::Parabola => "parabola",
            ConicClass::Hyperbola => "hyperbola",
        };
        f.write_str(s)
    }
}

/// A conic in focal polar form, 1/r = (1 + e cos(θ − ω))/p, with the
/// attracting focus at the origin and perihelion along the θ = ω ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicOrbit {
    p: f64,
    e: f64,
    omega: f64,
    sense: Sense,
}

impl ConicOrbit {
    /// Build a conic from semi-latus rectum `p > 0` and eccentricity
    /// `e ≥ 0`. A negative `e` is normalized by rotating ω half a turn.
    pub fn new(p: f64, e: f64, omega: f64, sense: Sense) -> Result<ConicOrbit> {
        if !(p.is_finite() && e.is_finite() && omega.is_finite()) {
            return Err(Error::InvalidConic("parameters must be finite".into()));
        }
        if p <= 0.0 {
            return Err(Error::InvalidConic(format!(
                "semi-latus rectum p = {p} must be positive"
            )));
        }
        let (e, omega) = if e < 0.0 {
            (-e, wrap_angle(omega + std::f64::consts::PI))
        } else {
            (e, wrap_angle(omega))
        };
        Ok(ConicOrbit { p, e, omega, sense })
    }

    pub fn semi_latus_rectum(&self) -> f64 {
        self.p
    }

    pub fn eccentricity(&self) -> f64 {
        self.e
    }

    /// Perihelion axis angle ω.
    pub fn perihelion_angle(&self) -> f64 {
        self.omega
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// Radius at focal angle θ, if θ is in the admissible range.
    pub fn radius(&self, theta: f64) -> Result<f64> {
        let denom = 1.0 + self.e * (theta - self.omega).cos();
        if denom <= 0.0 {
            return Err(Error::OutsideAdmissibleRange { theta });
        }
        Ok(self.p / denom)
    }

    /// Semi-major axis p/(1 − e²); negative for hyperbolas, infinite for
    /// parabolas.
    pub fn semi_major(&self) -> f64 {
        self.p / (1.0 - self.e * self.e)
    }

    /// Classify with the default eccentricity tolerance of 1e−9.
    pub fn classify(&self) -> ConicClass {
        self.classify_with_tol(CLASSIFY_E_TOL)
    }

    /// Classify as circle / ellipse / parabola / hyperbola, treating
    /// eccentricities within `e_tol` of 0 or 1 as the degenerate classes.
    pub fn classify_with_tol(&self, e_tol: f64) -> ConicClass {
        if self.e < e_tol {
            ConicClass::Circle
        } else if (self.e - 1.0).abs() <= e_tol {
            ConicClass::Parabola
        } else if self.e < 1.0 {
            ConicClass::Ellipse
        } else {
            ConicClass::Hyperbola
        }
    }

    /// The geometric ellipse traced by a bound conic (e < 1).
    pub fn to_ellipse(&self) -> Result<Ellipse> {
        if self.e >= 1.0 {
            return Err(Error::InvalidConic(format!(
                "eccentricity {} is not an ellipse",
                self.e
            )));
        }
        let a = self.p / (1.0 - self.e * self.e);
        Ellipse::new(a, a * self.e)
    }
}

/// Bridge from the geometric focal angle (far vertex at θ = 0, equation
/// 1/r = (a − c cos θ)/b²) to the orbital true anomaly relative to
/// perihelion (1/r = (1 + e cos ν)/p): ν = π − θ.
pub fn geometric_to_orbital_angle(theta_geometric: f64) -> f64 {
    std::f64::consts::PI - theta_geometric
}

/// Inverse bridge of [`geometric_to_orbital_angle`] (an involution).
pub fn orbital_to_geometric_angle(theta_orbital: f64) -> f64 {
    std::f64::consts::PI - theta_orbital
}

/// Wrap an angle to (−π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(std::f64::consts::TAU);
    if t > std::f64::consts::PI {
        t -= std::f64::consts::TAU;
    }
    t
}
