//! Randomized invariant checks over the closed-form layer: focal
//! geometry identities, conic solving, and quadrature bookkeeping.
//! Anything requiring numerical integration lives in the unit and
//! acceptance suites with fixed seeds; these properties exercise the
//! algebra across the whole admissible parameter space.

use orbita::dynamics::{specific_energy, CentralField, State2D};
use orbita::geometry::{geometric_to_orbital_angle, orbital_to_geometric_angle, wrap_angle};
use orbita::inference::{fit_force_law, KeplerMotion, Method};
use orbita::quadrature::{gauss_legendre, pairwise_sum};
use orbita::shell::{inversion_point, SphericalShell};
use orbita::solver::{binet_solve, orbit_period, solve_kepler};
use orbita::{Ellipse, Sense, Vec2, Vec3};
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn ellipse_strategy() -> impl Strategy<Value = (Ellipse, f64)> {
    (0.5..20.0_f64, 0.0..0.98_f64, 0.0..TAU)
        .prop_map(|(a, e, t)| (Ellipse::from_eccentricity(a, e).unwrap(), t))
}

/// States with enough transverse velocity to stay clear of the radial
/// degeneracy, plus a field strength.
fn state_strategy() -> impl Strategy<Value = (f64, State2D)> {
    (
        0.5..5.0_f64,
        0.0..TAU,
        0.3..5.0_f64,
        -1.0..1.0_f64,
        0.08..2.0_f64,
        prop::bool::ANY,
    )
        .prop_map(|(c, theta, r, v_radial, v_transverse, flip)| {
            let radial = Vec2::from_angle(theta);
            let transverse = radial.rotated(std::f64::consts::FRAC_PI_2);
            let vt = if flip { -v_transverse } else { v_transverse };
            let state = State2D::new(radial * r, radial * v_radial + transverse * vt, 0.0);
            (c, state)
        })
}

proptest! {
    #[test]
    fn focal_sum_is_major_axis((ell, t) in ellipse_strategy()) {
        let (_, r1, r2) = ell.point_with_focal_distances(t);
        let a = ell.semi_major();
        prop_assert!((r1 + r2 - 2.0 * a).abs() <= 1e-12 * 2.0 * a);
    }

    #[test]
    fn tangent_distance_product_is_b_squared((ell, t) in ellipse_strategy()) {
        let td = ell.tangent_data(t);
        let b_sq = ell.semi_minor() * ell.semi_minor();
        prop_assert!((td.d1 * td.d2 - b_sq).abs() <= 1e-12 * b_sq);
    }

    #[test]
    fn curvature_routes_agree((ell, t) in ellipse_strategy()) {
        let focal = ell.tangent_data(t).kappa;
        let param = ell.curvature_parametric(t);
        prop_assert!((focal - param).abs() <= 1e-10 * param,
            "focal {focal} vs parametric {param}");
    }

    #[test]
    fn tangent_bisects_focal_chords_equally((ell, t) in ellipse_strategy()) {
        let (point, _, _) = ell.point_with_focal_distances(t);
        let tangent = ell.tangent_direction(t).normalized();
        let c1 = point - ell.focus1();
        let c2 = point - ell.focus2();
        let a1 = c1.cross(tangent).abs().atan2(c1.dot(tangent).abs());
        let a2 = c2.cross(tangent).abs().atan2(c2.dot(tangent).abs());
        prop_assert!((a1 - a2).abs() <= 1e-12 * a1.max(1e-3));
    }

    #[test]
    fn chord_intercept_length_is_semi_major((ell, t) in ellipse_strategy()) {
        let (_, pk) = ell.tangent_parallel_intercept(t);
        let a = ell.semi_major();
        prop_assert!((pk - a).abs() <= 1e-12 * a);
    }

    #[test]
    fn parametric_focal_angle_roundtrip((ell, t) in ellipse_strategy()) {
        let theta = ell.param_to_focal_angle(t);
        let back = ell.focal_angle_to_param(theta);
        let diff = wrap_angle(back - t).abs();
        prop_assert!(diff <= 1e-9, "t {t} -> theta {theta} -> {back}");
    }

    #[test]
    fn focal_radius_matches_point(( ell, t) in ellipse_strategy()) {
        let theta = ell.param_to_focal_angle(t);
        let r_formula = ell.focal_radius(theta);
        let (point, r1, _) = ell.point_with_focal_distances(t);
        prop_assert!((r_formula - r1).abs() <= 1e-11 * r1);
        let from_focus = (point - ell.focus1()).norm();
        prop_assert!((from_focus - r1).abs() <= 1e-11 * r1);
    }

    #[test]
    fn angle_bridge_is_involutive(theta in -PI..PI) {
        let forward = geometric_to_orbital_angle(theta);
        let back = orbital_to_geometric_angle(forward);
        prop_assert!(wrap_angle(back - theta).abs() <= 1e-15);
    }

    #[test]
    fn hodograph_is_a_circle((ell, t) in ellipse_strategy(), period in 0.1..50.0_f64) {
        let motion = KeplerMotion::new(ell, period, Sense::Ccw).unwrap();
        let (center, radius) = motion.hodograph_circle();
        let theta = ell.param_to_focal_angle(t);
        let v = motion.velocity_hodograph(theta);
        prop_assert!(((v - center).norm() - radius).abs() <= 1e-12 * radius);
    }

    #[test]
    fn estimator_magnitudes_scale_inverse_square(
        (ell, t) in ellipse_strategy(),
        period in 0.1..50.0_f64,
    ) {
        let motion = KeplerMotion::new(ell, period, Sense::Ccw).unwrap();
        let theta = ell.param_to_focal_angle(t);
        let r = ell.focal_radius(theta);
        let expected = motion.implied_strength() / (r * r);
        for method in [Method::Hodograph, Method::Curvature, Method::Binet] {
            let mag = motion.accel_magnitude(method, theta);
            prop_assert!((mag - expected).abs() <= 1e-9 * expected,
                "{method:?}: {mag} vs {expected}");
        }
    }

    #[test]
    fn solved_conic_passes_through_the_state((c, s0) in state_strategy()) {
        let field = CentralField::inverse_square(c).unwrap();
        let sol = solve_kepler(&field, &s0).unwrap();
        let theta0 = s0.pos.angle();
        let r = sol.radius(theta0).unwrap();
        prop_assert!((r - s0.pos.norm()).abs() <= 1e-9 * s0.pos.norm());

        let p_expected = sol.k * sol.k / c;
        prop_assert!((sol.orbit.semi_latus_rectum() - p_expected).abs() <= 1e-12 * p_expected);
        let e_expected = (sol.k * sol.delta.norm() / c).abs();
        prop_assert!((sol.orbit.eccentricity() - e_expected).abs() <= 1e-12 * (1.0 + e_expected));
    }

    #[test]
    fn bound_iff_negative_energy((c, s0) in state_strategy()) {
        let field = CentralField::inverse_square(c).unwrap();
        let sol = solve_kepler(&field, &s0).unwrap();
        let energy = specific_energy(&field, &s0);
        prop_assert!((energy - sol.energy).abs() <= 1e-12 * energy.abs().max(1.0));
        // Skip the razor's edge where roundoff could flip the sign.
        prop_assume!((sol.orbit.eccentricity() - 1.0).abs() > 1e-10);
        prop_assert_eq!(sol.orbit.eccentricity() < 1.0, energy < 0.0);
    }

    #[test]
    fn vis_viva_semi_major((c, s0) in state_strategy()) {
        let field = CentralField::inverse_square(c).unwrap();
        let energy = specific_energy(&field, &s0);
        prop_assume!(energy < -1e-3);
        let sol = solve_kepler(&field, &s0).unwrap();
        let a_vis_viva = 1.0 / (2.0 / s0.pos.norm() - s0.vel.norm_squared() / c);
        prop_assert!((sol.orbit.semi_major() - a_vis_viva).abs() <= 1e-9 * a_vis_viva);
        // Same number again from the energy: a = −C/(2E).
        let a_energy = -c / (2.0 * energy);
        prop_assert!((sol.orbit.semi_major() - a_energy).abs() <= 1e-9 * a_energy);
    }

    #[test]
    fn binet_route_matches_hodograph_route((c, s0) in state_strategy()) {
        let field = CentralField::inverse_square(c).unwrap();
        let sol = solve_kepler(&field, &s0).unwrap();
        let h = c / (sol.k * sol.k);
        let amplitude = sol.orbit.eccentricity() * h;
        let other = binet_solve(h, amplitude, -sol.orbit.perihelion_angle()).unwrap();
        let p = sol.orbit.semi_latus_rectum();
        prop_assert!((other.semi_latus_rectum() - p).abs() <= 1e-12 * p);
        prop_assert!((other.eccentricity() - sol.orbit.eccentricity()).abs() <= 1e-12);
    }

    #[test]
    fn period_obeys_third_law((c, s0) in state_strategy()) {
        let field = CentralField::inverse_square(c).unwrap();
        let sol = solve_kepler(&field, &s0).unwrap();
        prop_assume!(sol.orbit.eccentricity() < 0.999);
        let t = orbit_period(&sol.orbit, c).unwrap();
        let a = sol.orbit.semi_major();
        let ratio = t * t * c / (a * a * a);
        prop_assert!((ratio - 4.0 * PI * PI).abs() <= 1e-9 * ratio);
    }

    #[test]
    fn power_law_fit_inverts_synthesis(
        coeff in 0.1..100.0_f64,
        exponent in -3.0..3.0_f64,
        n in 8usize..64,
    ) {
        // Synthesize |F| = coeff · r^exponent on distinct radii, then
        // require the fit to read the parameters back.
        let samples: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let r = 0.5 + 3.0 * i as f64 / n as f64;
                (r, coeff * r.powf(exponent))
            })
            .collect();
        let fit = fit_force_law(&samples).unwrap();
        prop_assert!((fit.exponent - exponent).abs() <= 1e-7 * (1.0 + exponent.abs()));
        prop_assert!((fit.coefficient - coeff).abs() <= 1e-7 * coeff);
    }

    #[test]
    fn inversion_scales_all_chords_alike(
        radius in 0.1..10.0_f64,
        d_factor in 1.001..50.0_f64,
        u in -1.0..1.0_f64,
        psi in 0.0..TAU,
        axis in 0.0..TAU,
        tilt in -1.0..1.0_f64,
    ) {
        let shell = SphericalShell::new(Vec3::new(0.0, 0.0, 0.0), radius, 1.0).unwrap();
        let d = radius * d_factor;
        let st = (1.0 - tilt * tilt).sqrt();
        let p = Vec3::new(st * axis.cos(), st * axis.sin(), tilt) * d;
        let p_inv = inversion_point(&shell, p).unwrap();
        prop_assert!((p_inv.norm() * d - radius * radius).abs() <= 1e-12 * radius * radius);

        let s = (1.0 - u * u).sqrt();
        let q = Vec3::new(s * psi.cos(), s * psi.sin(), u) * radius;
        let ratio = (q - p_inv).norm() / (q - p).norm();
        prop_assert!((ratio - radius / d).abs() <= 1e-12 * (radius / d));
    }

    #[test]
    fn quadrature_weights_integrate_constants(n in 1usize..200) {
        let (nodes, weights) = gauss_legendre(n);
        prop_assert!((pairwise_sum(&weights) - 2.0).abs() <= 1e-13);
        // Nodes stay strictly inside the interval and ordered.
        for pair in nodes.windows(2) {
            prop_assert!(pair[0] < pair[1]);
        }
        prop_assert!(nodes.iter().all(|x| x.abs() < 1.0));
    }

    #[test]
    fn pairwise_sum_is_permutation_stable(values in prop::collection::vec(-1e6..1e6_f64, 1..500)) {
        let total = pairwise_sum(&values);
        let expected: f64 = values.iter().sum();
        let scale: f64 = values.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        prop_assert!((total - expected).abs() <= 1e-10 * scale);
    }
}
