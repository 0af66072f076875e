//! Recovery of the force law from a Kepler orbit.
//!
//! Given an ellipse traversed under the area law, three independent
//! routes produce the acceleration magnitude: differentiating the
//! hodograph velocity, curvature kinematics, and the orbital ODE in
//! q = 1/r. All three reduce algebraically to |a| = (4π²a³/T²)/r², so
//! their pairwise agreement and the fitted exponent −2 are the checks.
//!
//! Everything is expressed in the focal frame: the attracting focus F1
//! at the origin, the second focus on the positive x-axis, θ measured
//! from that axis (so the far vertex r = a + c sits at θ = 0). For other
//! frames rotate inputs/outputs with [`Vec2::rotated`].

use crate::error::{Error, Result};
use crate::geometry::{Ellipse, Sense};
use crate::vec::Vec2;
use std::f64::consts::{PI, TAU};

/// An ellipse traversed under the area law with period `T`: the areal
/// constant is k = 2πab/T.
#[derive(Debug, Clone, Copy)]
pub struct KeplerMotion {
    ell: Ellipse,
    period: f64,
    sense: Sense,
}

/// Which algebraic route produced a force estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Hodograph,
    Curvature,
    Binet,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Hodograph => "hodograph",
            Method::Curvature => "curvature",
            Method::Binet => "binet",
        };
        f.write_str(s)
    }
}

/// Power-law fit of (r, |a|) samples: |a| ≈ coefficient · r^exponent.
#[derive(Debug, Clone, Copy)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub coefficient: f64,
    /// RMS of the log-space residuals.
    pub residual_rms: f64,
}

/// Sampled force data plus its fitted power law.
#[derive(Debug, Clone)]
pub struct ForceEstimate {
    pub samples: Vec<(f64, f64)>,
    pub fit: PowerLawFit,
    pub method: Method,
}

impl KeplerMotion {
    pub fn new(ell: Ellipse, period: f64, sense: Sense) -> Result<KeplerMotion> {
        if period <= 0.0 || !period.is_finite() {
            return Err(Error::InvalidInput(format!(
                "period {period} must be positive and finite"
            )));
        }
        Ok(KeplerMotion { ell, period, sense })
    }

    pub fn ellipse(&self) -> &Ellipse {
        &self.ell
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// Areal constant magnitude k = 2πab/T (twice the areal velocity).
    pub fn areal_constant(&self) -> f64 {
        TAU * self.ell.semi_major() * self.ell.semi_minor() / self.period
    }

    /// The inverse-square strength this motion implies, 4π²a³/T².
    pub fn implied_strength(&self) -> f64 {
        let a = self.ell.semi_major();
        4.0 * PI * PI * a * a * a / (self.period * self.period)
    }

    /// Closed-form velocity at focal angle θ: a fixed vector plus a
    /// rotating one of constant length,
    /// v = (πa/(bT))(0, −2c) + (2πa²/(bT))(−sin θ, cos θ),
    /// mirrored in sign for clockwise traversal.
    pub fn velocity_hodograph(&self, theta: f64) -> Vec2 {
        let (a, b, c) = (
            self.ell.semi_major(),
            self.ell.semi_minor(),
            self.ell.focal_distance(),
        );
        let bt = b * self.period;
        let fixed = Vec2::new(0.0, -2.0 * c * PI * a / bt);
        let rotating = Vec2::new(-theta.sin(), theta.cos()) * (TAU * a * a / bt);
        (fixed + rotating) * self.sense.signum()
    }

    /// Center and radius of the circle traced by
    /// [`KeplerMotion::velocity_hodograph`].
    pub fn hodograph_circle(&self) -> (Vec2, f64) {
        let (a, b, c) = (
            self.ell.semi_major(),
            self.ell.semi_minor(),
            self.ell.focal_distance(),
        );
        let bt = b * self.period;
        (
            Vec2::new(0.0, -2.0 * c * PI * a / bt) * self.sense.signum(),
            TAU * a * a / bt,
        )
    }

    /// Acceleration vector at focal angle θ from differentiating the
    /// hodograph: magnitude (4π²a³/T²)/r², directed at the focus.
    pub fn accel_via_hodograph(&self, theta: f64) -> Vec2 {
        let r = self.ell.focal_radius(theta);
        let mag = self.implied_strength() / (r * r);
        Vec2::new(-theta.cos(), -theta.sin()) * mag
    }

    /// Acceleration magnitude at focal angle θ from curvature
    /// kinematics: |v| from the area law r |v| sin ε = k, κ from the
    /// focal curvature formula, then |a| = |v|² κ / sin ε.
    pub fn accel_via_curvature(&self, theta: f64) -> f64 {
        let t = self.ell.focal_angle_to_param(theta);
        let td = self.ell.tangent_data(t);
        let (_, r1, _) = self.ell.point_with_focal_distances(t);
        let sin_eps = td.epsilon.sin();
        let speed = self.areal_constant() / (r1 * sin_eps);
        speed * speed * td.kappa / sin_eps
    }

    /// q″ + q for q = 1/r along the orbit, from differentiating the
    /// polar equation q = (a − c cos θ)/b² twice; equals a/b² up to
    /// rounding, independent of θ.
    pub fn binet_lhs(&self, theta: f64) -> f64 {
        let (a, c) = (self.ell.semi_major(), self.ell.focal_distance());
        let b_sq = self.ell.semi_minor() * self.ell.semi_minor();
        let q = (a - c * theta.cos()) / b_sq;
        let qpp = c * theta.cos() / b_sq;
        qpp + q
    }

    /// Acceleration magnitude at focal angle θ from the orbital ODE:
    /// |a| = k² q² (q″ + q).
    pub fn accel_via_binet(&self, theta: f64) -> f64 {
        let k = self.areal_constant();
        let q = 1.0 / self.ell.focal_radius(theta);
        k * k * q * q * self.binet_lhs(theta)
    }

    /// Acceleration magnitude at focal angle θ by the chosen route.
    pub fn accel_magnitude(&self, method: Method, theta: f64) -> f64 {
        match method {
            Method::Hodograph => self.accel_via_hodograph(theta).norm(),
            Method::Curvature => self.accel_via_curvature(theta),
            Method::Binet => self.accel_via_binet(theta),
        }
    }
}

/// (r, |a|) pairs at `n` focal angles uniform on [0, 2π).
pub fn force_samples(motion: &KeplerMotion, method: Method, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let theta = TAU * i as f64 / n as f64;
            (
                motion.ellipse().focal_radius(theta),
                motion.accel_magnitude(method, theta),
            )
        })
        .collect()
}

/// Least-squares power law through (r, |a|) samples:
/// log|a| = log coefficient + exponent · log r.
pub fn fit_force_law(samples: &[(f64, f64)]) -> Result<PowerLawFit> {
    if samples.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 samples for a fit, got {}",
            samples.len()
        )));
    }
    if let Some(&(r, f)) = samples.iter().find(|&&(r, f)| !(r > 0.0 && f > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "samples must be positive, got (r = {r}, |a| = {f})"
        )));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|&(r, _)| r.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, f)| f.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if sxx / n < 1e-20 {
        return Err(Error::DegenerateFit(
            "all radii coincide; the exponent is unidentifiable".into(),
        ));
    }
    let exponent = sxy / sxx;
    let intercept = y_mean - exponent * x_mean;
    let mut ss = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let resid = y - (intercept + exponent * x);
        ss += resid * resid;
    }
    Ok(PowerLawFit {
        exponent,
        coefficient: intercept.exp(),
        residual_rms: (ss / n).sqrt(),
    })
}

/// Sample one route at `n` uniform angles and fit the power law.
pub fn estimate_force(motion: &KeplerMotion, method: Method, n: usize) -> Result<ForceEstimate> {
    let samples = force_samples(motion, method, n);
    let fit = fit_force_law(&samples)?;
    Ok(ForceEstimate {
        samples,
        fit,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate_uniform, CentralField, SimConfig, State2D};

    fn motion_5_3() -> KeplerMotion {
        KeplerMotion::new(Ellipse::new(5.0, 3.0).unwrap(), 1.0, Sense::Ccw).unwrap()
    }

    /// Position on the orbit at focal angle θ, F1 at the origin.
    fn position(motion: &KeplerMotion, theta: f64) -> Vec2 {
        Vec2::from_angle(theta) * motion.ellipse().focal_radius(theta)
    }

    /// Velocity oracle: chain rule through the area law, v = dP/dθ · θ̇
    /// with θ̇ = k/r² and dP/dθ by central difference. Uses only the
    /// polar equation and the area law, not the hodograph form.
    fn velocity_fd(motion: &KeplerMotion, theta: f64) -> Vec2 {
        let h = 1e-6;
        let dp = (position(motion, theta + h) - position(motion, theta - h)) / (2.0 * h);
        let r = motion.ellipse().focal_radius(theta);
        dp * (motion.areal_constant() / (r * r))
    }

    #[test]
    fn hodograph_velocity_at_vertices() {
        let m = motion_5_3();
        let v0 = m.velocity_hodograph(0.0);
        assert!((v0 - Vec2::new(0.0, 5.0 * PI)).norm() < 1e-12);
        let v_pi = m.velocity_hodograph(PI);
        assert!((v_pi - Vec2::new(0.0, -20.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn hodograph_velocity_matches_area_law_oracle() {
        let m = motion_5_3();
        for i in 0..36 {
            let theta = TAU * i as f64 / 36.0;
            let closed = m.velocity_hodograph(theta);
            let fd = velocity_fd(&m, theta);
            assert!(
                (closed - fd).norm() < 1e-7 * closed.norm(),
                "theta = {theta}: {closed:?} vs {fd:?}"
            );
        }
    }

    #[test]
    fn circular_speed_is_constant() {
        let circ = KeplerMotion::new(Ellipse::new(1.0, 0.0).unwrap(), 1.0, Sense::Ccw).unwrap();
        for i in 0..12 {
            let v = circ.velocity_hodograph(i as f64 * 0.5);
            assert!((v.norm() - TAU).abs() < 1e-13);
        }
    }

    #[test]
    fn clockwise_velocity_is_negated() {
        let ccw = motion_5_3();
        let cw = KeplerMotion::new(Ellipse::new(5.0, 3.0).unwrap(), 1.0, Sense::Cw).unwrap();
        let theta = 0.8;
        assert!((ccw.velocity_hodograph(theta) + cw.velocity_hodograph(theta)).norm() < 1e-15);
    }

    #[test]
    fn hodograph_values_lie_on_circle() {
        let m = motion_5_3();
        let (center, radius) = m.hodograph_circle();
        for i in 0..100 {
            let v = m.velocity_hodograph(TAU * i as f64 / 100.0);
            assert!(((v - center).norm() - radius).abs() < 1e-12 * radius);
        }
    }

    #[test]
    fn hodograph_accel_magnitude_and_direction() {
        let m = motion_5_3();
        let a0 = m.accel_via_hodograph(0.0);
        let expected = 4.0 * PI * PI * 125.0 / 64.0;
        assert!((a0.norm() - expected).abs() < 1e-12 * expected);
        assert!((a0.normalized() - Vec2::new(-1.0, 0.0)).norm() < 1e-15);

        let quarter = m.accel_via_hodograph(PI / 4.0);
        let dir = Vec2::new(-(PI / 4.0).cos(), -(PI / 4.0).sin());
        assert!((quarter.normalized() - dir).norm() < 1e-14);
    }

    #[test]
    fn hodograph_accel_matches_velocity_derivative() {
        // Oracle: a = dv/dθ · θ̇ with dv/dθ by central difference of the
        // closed-form velocity.
        let m = motion_5_3();
        for i in 0..24 {
            let theta = TAU * i as f64 / 24.0;
            let h = 1e-6;
            let dv =
                (m.velocity_hodograph(theta + h) - m.velocity_hodograph(theta - h)) / (2.0 * h);
            let r = m.ellipse().focal_radius(theta);
            let fd = dv * (m.areal_constant() / (r * r));
            let closed = m.accel_via_hodograph(theta);
            assert!(
                (closed - fd).norm() < 1e-6 * closed.norm(),
                "theta = {theta}"
            );
        }
    }

    #[test]
    fn curvature_accel_agrees_with_hodograph() {
        let m = motion_5_3();
        let at0 = m.accel_via_curvature(0.0);
        let expected = 4.0 * PI * PI * 125.0 / 64.0;
        assert!((at0 - expected).abs() < 1e-12 * expected);
        for i in 0..100 {
            let theta = TAU * i as f64 / 100.0;
            let hodo = m.accel_via_hodograph(theta).norm();
            let curv = m.accel_via_curvature(theta);
            assert!((hodo - curv).abs() < 1e-12 * hodo, "theta = {theta}");
        }
    }

    #[test]
    fn curvature_accel_circle() {
        let circ = KeplerMotion::new(Ellipse::new(1.0, 0.0).unwrap(), TAU, Sense::Ccw).unwrap();
        for i in 0..12 {
            let a = circ.accel_via_curvature(i as f64 * 0.5);
            assert!((a - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn inverse_square_profile() {
        // |a| r² is the same constant at every angle.
        let m = motion_5_3();
        let c0 = m.accel_via_curvature(0.0) * 64.0;
        for i in 0..100 {
            let theta = TAU * i as f64 / 100.0;
            let r = m.ellipse().focal_radius(theta);
            let c = m.accel_via_curvature(theta) * r * r;
            assert!((c - c0).abs() < 1e-12 * c0);
        }
    }

    #[test]
    fn binet_lhs_is_a_over_b_squared() {
        let m = motion_5_3();
        for i in 0..32 {
            let theta = TAU * i as f64 / 32.0;
            assert!(
                (m.binet_lhs(theta) - 0.3125).abs() < 1e-15,
                "theta = {theta}"
            );
        }
    }

    #[test]
    fn binet_accel_values() {
        let m = motion_5_3();
        let at0 = m.accel_via_binet(0.0);
        let expected = 4.0 * PI * PI * 125.0 / 64.0;
        assert!((at0 - expected).abs() < 1e-12 * expected);

        let circ = KeplerMotion::new(Ellipse::new(2.0, 0.0).unwrap(), 3.0, Sense::Ccw).unwrap();
        let c = circ.implied_strength();
        let a = circ.accel_via_binet(1.0);
        assert!((a - c / 4.0).abs() < 1e-12 * a);
    }

    #[test]
    fn three_methods_agree_pairwise() {
        let m = motion_5_3();
        for i in 0..100 {
            let theta = TAU * i as f64 / 100.0;
            let h = m.accel_via_hodograph(theta).norm();
            let c = m.accel_via_curvature(theta);
            let b = m.accel_via_binet(theta);
            let scale = h;
            assert!((h - c).abs() <= 1e-11 * scale, "h vs c at {theta}");
            assert!((h - b).abs() <= 1e-11 * scale, "h vs b at {theta}");
            assert!((c - b).abs() <= 1e-11 * scale, "c vs b at {theta}");
        }
    }

    #[test]
    fn third_law_identity() {
        // |a| r² T² / a³ = 4π² exactly, for any ellipse and period.
        for (a, c, t) in [(5.0, 3.0, 1.0), (2.0, 0.5, 7.0), (1.0, 0.0, 2.0)] {
            let m = KeplerMotion::new(Ellipse::new(a, c).unwrap(), t, Sense::Ccw).unwrap();
            for i in 0..16 {
                let theta = TAU * i as f64 / 16.0;
                let r = m.ellipse().focal_radius(theta);
                let lhs = m.accel_via_binet(theta) * r * r * t * t / (a * a * a);
                assert!((lhs - 4.0 * PI * PI).abs() < 1e-12 * 4.0 * PI * PI);
            }
        }
    }

    #[test]
    fn fit_recovers_inverse_square() {
        let m = motion_5_3();
        for method in [Method::Hodograph, Method::Curvature, Method::Binet] {
            let est = estimate_force(&m, method, 64).unwrap();
            assert!(
                (est.fit.exponent + 2.0).abs() < 1e-9,
                "{method}: exponent {}",
                est.fit.exponent
            );
            let expected = 500.0 * PI * PI;
            assert!(
                (est.fit.coefficient - expected).abs() < 1e-9 * expected,
                "{method}: coefficient {}",
                est.fit.coefficient
            );
            assert!(est.fit.residual_rms < 1e-12);
        }
    }

    #[test]
    fn fit_recovers_hooke_exponent_from_trajectory() {
        // Integrate a linear field, differentiate sampled velocities,
        // and fit |a| against r: the exponent must come out +1.
        let field = CentralField::new(1.0, 1.0).unwrap();
        let s0 = State2D::new(Vec2::new(1.0, 0.0), Vec2::new(0.0, 0.5), 0.0);
        let cfg = SimConfig {
            rel_tol: 1e-13,
            abs_tol: 1e-15,
            ..SimConfig::default()
        };
        let n = 8192;
        let traj = integrate_uniform(&field, &s0, TAU, n + 1, &cfg).unwrap();
        let dt = TAU / n as f64;
        let mut samples = Vec::new();
        for i in (1..n).step_by(16) {
            let accel = (traj.samples[i + 1].vel - traj.samples[i - 1].vel) / (2.0 * dt);
            samples.push((traj.samples[i].pos.norm(), accel.norm()));
        }
        let fit = fit_force_law(&samples).unwrap();
        assert!(
            (fit.exponent - 1.0).abs() < 1e-6,
            "exponent {}",
            fit.exponent
        );
        assert!((fit.coefficient - 1.0).abs() < 1e-6);
    }

    #[test]
    fn fit_rejects_degenerate_radii() {
        let samples: Vec<(f64, f64)> = (0..10).map(|_| (2.0, 0.25)).collect();
        assert!(matches!(
            fit_force_law(&samples),
            Err(Error::DegenerateFit(_))
        ));
        let circle = KeplerMotion::new(Ellipse::new(1.0, 0.0).unwrap(), 1.0, Sense::Ccw).unwrap();
        assert!(matches!(
            estimate_force(&circle, Method::Binet, 64),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn fit_rejects_bad_samples() {
        assert!(fit_force_law(&[(1.0, 1.0), (2.0, 0.5)]).is_err());
        assert!(fit_force_law(&[(1.0, 1.0), (2.0, 0.5), (-1.0, 0.3)]).is_err());
    }

    #[test]
    fn coefficient_scales_inversely_with_period_squared() {
        let m1 = motion_5_3();
        let m2 = KeplerMotion::new(Ellipse::new(5.0, 3.0).unwrap(), 2.0, Sense::Ccw).unwrap();
        let e1 = estimate_force(&m1, Method::Binet, 64).unwrap();
        let e2 = estimate_force(&m2, Method::Binet, 64).unwrap();
        let ratio = e1.fit.coefficient / e2.fit.coefficient;
        assert!((ratio - 4.0).abs() < 1e-12 * 4.0);
    }
}
