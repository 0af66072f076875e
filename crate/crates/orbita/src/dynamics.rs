//! Central-force fields and the numerical trajectory oracle.
//!
//! The integrator here is the reference against which every closed form
//! in the crate is checked: adaptive 5(4) Runge–Kutta at tolerances well
//! below all test thresholds, plus diagnostics that read conserved
//! quantities straight off the samples.

use crate::error::{Error, Result};
use crate::ode::{self, AdaptiveOpts, IntegratorStats, OdeSystem};
use crate::vec::Vec2;
use std::ops::ControlFlow;

/// Power-law central force: acceleration magnitude |C| r^n directed along
/// −r̂ when C > 0 (attraction) and +r̂ when C < 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralField {
    c: f64,
    n: f64,
}

impl CentralField {
    pub fn new(c: f64, n: f64) -> Result<CentralField> {
        if !(c.is_finite() && n.is_finite()) || c == 0.0 {
            return Err(Error::InvalidField(format!(
                "field strength C = {c}, exponent n = {n}: C must be finite and nonzero"
            )));
        }
        Ok(CentralField { c, n })
    }

    /// Attractive inverse-square field of strength `c > 0`.
    pub fn inverse_square(c: f64) -> Result<CentralField> {
        CentralField::new(c, -2.0)
    }

    pub fn strength(&self) -> f64 {
        self.c
    }

    pub fn exponent(&self) -> f64 {
        self.n
    }

    pub fn attractive(&self) -> bool {
        self.c > 0.0
    }

    /// Acceleration at `pos`: −C |pos|^n · (pos/|pos|).
    pub fn acceleration(&self, pos: Vec2) -> Result<Vec2> {
        let r = pos.norm();
        if r == 0.0 {
            return Err(Error::OriginSingularity);
        }
        Ok(pos * (-self.c * r.powf(self.n - 1.0)))
    }

    /// Specific potential energy with the usual normalization:
    /// C r^{n+1}/(n+1) for n ≠ −1, C ln r for n = −1 (so that
    /// −dU/dr matches the radial acceleration).
    pub fn potential(&self, r: f64) -> f64 {
        if self.n == -1.0 {
            self.c * r.ln()
        } else {
            self.c * r.powf(self.n + 1.0) / (self.n + 1.0)
        }
    }
}

/// Planar kinematic state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State2D {
    pub pos: Vec2,
    pub vel: Vec2,
    pub t: f64,
}

impl State2D {
    pub fn new(pos: Vec2, vel: Vec2, t: f64) -> State2D {
        State2D { pos, vel, t }
    }

    /// Specific angular momentum k = pos × vel (signed).
    pub fn angular_momentum(&self) -> f64 {
        self.pos.cross(self.vel)
    }
}

/// Areal velocity dA/dt = (pos × vel)/2; twice this is r²θ̇ = k.
pub fn areal_velocity(s: &State2D) -> f64 {
    0.5 * s.pos.cross(s.vel)
}

/// Specific orbital energy v²/2 + U(r) for the given field.
pub fn specific_energy(field: &CentralField, s: &State2D) -> f64 {
    0.5 * s.vel.norm_squared() + field.potential(s.pos.norm())
}

/// Integrator selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegratorKind {
    /// Adaptive 5(4) embedded pair (the default oracle).
    Adaptive,
    /// Classical RK4 with the given step, for convergence studies. The
    /// step is rounded so that a whole number of steps covers the span.
    Fixed { dt: f64 },
}

/// Integration configuration shared by the trajectory operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub integrator: IntegratorKind,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Collision radius; `None` means 1e−8 × the initial radius.
    /// `Some(0.0)` disables the guard.
    pub r_min: Option<f64>,
    pub max_steps: usize,
    /// Seed for randomized sweeps built on top of the integrator; the
    /// integration itself is deterministic and ignores it.
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            integrator: IntegratorKind::Adaptive,
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            r_min: None,
            max_steps: 1_000_000,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerances must be positive (rel {}, abs {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive".into()));
        }
        if let IntegratorKind::Fixed { dt } = self.integrator {
            if dt <= 0.0 || dt.is_nan() {
                return Err(Error::InvalidConfig(format!(
                    "fixed step dt = {dt} must be positive"
                )));
            }
        }
        if let Some(r) = self.r_min {
            if r < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "r_min = {r} must be nonnegative"
                )));
            }
        }
        Ok(())
    }

    fn adaptive_opts(&self) -> AdaptiveOpts {
        AdaptiveOpts {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_steps: self.max_steps,
        }
    }

    fn collision_radius(&self, r0: f64) -> f64 {
        self.r_min.unwrap_or(1e-8 * r0)
    }
}

/// An integrated trajectory: ordered samples plus the work counters of
/// the run. `field` is present when the motion came from a single
/// central field (absent for general-force and two-body runs).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<State2D>,
    pub field: Option<CentralField>,
    pub stats: IntegratorStats,
}

impl Trajectory {
    /// Largest relative drift of the specific angular momentum across
    /// the samples, |k(t) − k(0)| / |k(0)|.
    pub fn angular_momentum_drift(&self) -> f64 {
        let k0 = self.samples[0].angular_momentum();
        self.samples
            .iter()
            .map(|s| (s.angular_momentum() - k0).abs())
            .fold(0.0, f64::max)
            / k0.abs()
    }
}

struct CentralSystem {
    field: CentralField,
}

impl OdeSystem<4> for CentralSystem {
    fn rhs(&self, _t: f64, y: &[f64; 4], dydt: &mut [f64; 4]) {
        let r = y[0].hypot(y[1]);
        let f = -self.field.c * r.powf(self.field.n - 1.0);
        dydt[0] = y[2];
        dydt[1] = y[3];
        dydt[2] = f * y[0];
        dydt[3] = f * y[1];
    }
}

struct ForceSystem<F: Fn(f64, Vec2, Vec2) -> Vec2> {
    force: F,
}

impl<F: Fn(f64, Vec2, Vec2) -> Vec2> OdeSystem<4> for ForceSystem<F> {
    fn rhs(&self, t: f64, y: &[f64; 4], dydt: &mut [f64; 4]) {
        let a = (self.force)(t, Vec2::new(y[0], y[1]), Vec2::new(y[2], y[3]));
        dydt[0] = y[2];
        dydt[1] = y[3];
        dydt[2] = a.x;
        dydt[3] = a.y;
    }
}

fn pack(s: &State2D) -> [f64; 4] {
    [s.pos.x, s.pos.y, s.vel.x, s.vel.y]
}

fn unpack(t: f64, y: &[f64; 4]) -> State2D {
    State2D::new(Vec2::new(y[0], y[1]), Vec2::new(y[2], y[3]), t)
}

fn check_start(s0: &State2D, duration: f64, cfg: &SimConfig) -> Result<()> {
    cfg.validate()?;
    if s0.pos.norm() == 0.0 {
        return Err(Error::OriginSingularity);
    }
    if duration <= 0.0 || duration.is_nan() {
        return Err(Error::InvalidInput(format!(
            "duration {duration} must be positive"
        )));
    }
    Ok(())
}

fn drive_system<S: OdeSystem<4>>(
    sys: &S,
    s0: &State2D,
    duration: f64,
    t_stops: &[f64],
    cfg: &SimConfig,
    mut keep: impl FnMut(f64) -> bool,
) -> Result<Trajectory> {
    let r_min = cfg.collision_radius(s0.pos.norm());
    let t_end = s0.t + duration;
    let mut samples = vec![*s0];
    let mut collided: Option<(f64, f64)> = None;

    let observe = |t: f64, y: &[f64; 4]| {
        let s = unpack(t, y);
        let r = s.pos.norm();
        if keep(t) {
            samples.push(s);
        }
        if r < r_min {
            collided = Some((t, r));
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    };

    let end = match cfg.integrator {
        IntegratorKind::Adaptive => ode::drive_adaptive(
            sys,
            s0.t,
            pack(s0),
            t_end,
            t_stops,
            &cfg.adaptive_opts(),
            observe,
        )?,
        IntegratorKind::Fixed { dt } => {
            let n = (duration / dt).round().max(1.0) as usize;
            ode::drive_rk4(sys, s0.t, pack(s0), t_end, n, observe)?
        }
    };

    if let Some((t, r)) = collided {
        return Err(Error::Collision { t, r, r_min });
    }
    Ok(Trajectory {
        samples,
        field: None,
        stats: end.stats,
    })
}

/// Integrate a central-field trajectory, sampling every accepted step.
pub fn integrate(
    field: &CentralField,
    s0: &State2D,
    duration: f64,
    cfg: &SimConfig,
) -> Result<Trajectory> {
    check_start(s0, duration, cfg)?;
    let sys = CentralSystem { field: *field };
    let mut traj = drive_system(&sys, s0, duration, &[], cfg, |_| true)?;
    traj.field = Some(*field);
    Ok(traj)
}

/// Integrate a central-field trajectory sampled on a uniform time grid
/// of `n_samples` points spanning [s0.t, s0.t + duration], endpoints
/// included. The grid points are hit exactly (no interpolation).
pub fn integrate_uniform(
    field: &CentralField,
    s0: &State2D,
    duration: f64,
    n_samples: usize,
    cfg: &SimConfig,
) -> Result<Trajectory> {
    check_start(s0, duration, cfg)?;
    if n_samples < 2 {
        return Err(Error::InvalidInput(format!(
            "n_samples = {n_samples}: need at least the two endpoints"
        )));
    }
    let dt = duration / (n_samples - 1) as f64;
    let mut stops: Vec<f64> = (1..n_samples).map(|i| s0.t + i as f64 * dt).collect();
    // Accumulated rounding can put the last grid point a few ulp past
    // the end of the span; pin it.
    *stops.last_mut().unwrap() = s0.t + duration;
    let sys = CentralSystem { field: *field };
    let mut next = 0usize;
    let mut traj = drive_system(&sys, s0, duration, &stops, cfg, |t| {
        if next < stops.len() && t == stops[next] {
            next += 1;
            true
        } else {
            false
        }
    })?;
    traj.field = Some(*field);
    Ok(traj)
}

/// Integrate under an arbitrary acceleration law `force(t, pos, vel)`,
/// sampling every accepted step. Used to exercise non-central
/// perturbations; the collision guard still applies around the origin.
pub fn integrate_force(
    force: impl Fn(f64, Vec2, Vec2) -> Vec2,
    s0: &State2D,
    duration: f64,
    cfg: &SimConfig,
) -> Result<Trajectory> {
    check_start(s0, duration, cfg)?;
    let sys = ForceSystem { force };
    drive_system(&sys, s0, duration, &[], cfg, |_| true)
}

/// Radial and transverse acceleration components (r̈ − rθ̇², 2ṙθ̇ + rθ̈)
/// at an interior sample of a uniformly sampled trajectory, from 5-point
/// central differences of r(t) and the unwrapped θ(t).
pub fn polar_decompose_accel(traj: &Trajectory, index: usize) -> Result<(f64, f64)> {
    let n = traj.samples.len();
    if n < 5 {
        return Err(Error::GridTooCoarse { needed: 5, got: n });
    }
    if index < 2 || index + 2 >= n {
        return Err(Error::IndexOutOfRange { index, max: n - 3 });
    }
    let window = &traj.samples[index - 2..=index + 2];
    let h = window[1].t - window[0].t;
    for w in window.windows(2) {
        let dt = w[1].t - w[0].t;
        if (dt - h).abs() > 1e-6 * h.abs() {
            return Err(Error::NonUniformGrid);
        }
    }

    let r: Vec<f64> = window.iter().map(|s| s.pos.norm()).collect();
    // Unwrap θ across the stencil so differences stay continuous.
    let mut theta = [0.0; 5];
    theta[0] = window[0].pos.angle();
    for i in 1..5 {
        let raw = window[i].pos.angle();
        let mut d = raw - theta[i - 1];
        while d > std::f64::consts::PI {
            d -= std::f64::consts::TAU;
        }
        while d < -std::f64::consts::PI {
            d += std::f64::consts::TAU;
        }
        theta[i] = theta[i - 1] + d;
    }

    let d1 = |f: &dyn Fn(usize) -> f64| (f(0) - 8.0 * f(1) + 8.0 * f(3) - f(4)) / (12.0 * h);
    let d2 = |f: &dyn Fn(usize) -> f64| {
        (-f(0) + 16.0 * f(1) - 30.0 * f(2) + 16.0 * f(3) - f(4)) / (12.0 * h * h)
    };
    let rf = |i: usize| r[i];
    let tf = |i: usize| theta[i];
    let (r0, rdot, rddot) = (r[2], d1(&rf), d2(&rf));
    let (tdot, tddot) = (d1(&tf), d2(&tf));

    let radial = rddot - r0 * tdot * tdot;
    let transverse = 2.0 * rdot * tdot + r0 * tddot;
    Ok((radial, transverse))
}

/// Residuals of the orbital ODE for sampled q(θ) = 1/r(θ) on a uniform
/// θ-grid with spacing `dtheta`: F(1/q) + m k² q² (q″ + q), where F is
/// the radial force of `field` on a particle of mass `mass` and q″ is
/// the 5-point central second difference. One residual per interior
/// sample (the first and last two are stencil margin).
pub fn binet_residual(
    q: &[f64],
    dtheta: f64,
    k: f64,
    field: &CentralField,
    mass: f64,
) -> Result<Vec<f64>> {
    if q.len() < 5 {
        return Err(Error::GridTooCoarse {
            needed: 5,
            got: q.len(),
        });
    }
    if dtheta <= 0.0 || dtheta.is_nan() {
        return Err(Error::InvalidInput(format!(
            "grid spacing dtheta = {dtheta} must be positive"
        )));
    }
    let mut out = Vec::with_capacity(q.len() - 4);
    for i in 2..q.len() - 2 {
        let qpp = (-q[i - 2] + 16.0 * q[i - 1] - 30.0 * q[i] + 16.0 * q[i + 1] - q[i + 2])
            / (12.0 * dtheta * dtheta);
        let r = 1.0 / q[i];
        let force = -mass * field.c * r.powf(field.n);
        out.push(force + mass * k * k * q[i] * q[i] * (qpp + q[i]));
    }
    Ok(out)
}

/// Two point masses under mutual inverse-square gravity.
#[derive(Debug, Clone, Copy)]
pub struct TwoBodyState {
    pub g: f64,
    pub mass1: f64,
    pub mass2: f64,
    pub state1: State2D,
    pub state2: State2D,
}

impl TwoBodyState {
    pub fn new(
        g: f64,
        mass1: f64,
        mass2: f64,
        state1: State2D,
        state2: State2D,
    ) -> Result<TwoBodyState> {
        if !(g > 0.0 && mass1 > 0.0 && mass2 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "G = {g}, m1 = {mass1}, m2 = {mass2}: all must be positive"
            )));
        }
        if state1.pos == state2.pos {
            return Err(Error::InvalidInput("bodies must start apart".into()));
        }
        Ok(TwoBodyState {
            g,
            mass1,
            mass2,
            state1,
            state2,
        })
    }

    /// Barycenter position and velocity.
    pub fn barycenter(&self) -> (Vec2, Vec2) {
        let m = self.mass1 + self.mass2;
        (
            (self.state1.pos * self.mass1 + self.state2.pos * self.mass2) / m,
            (self.state1.vel * self.mass1 + self.state2.vel * self.mass2) / m,
        )
    }

    /// State of body 2 relative to body 1. The relative coordinate obeys
    /// a one-body inverse-square field of strength G (m1 + m2).
    pub fn relative_state(&self) -> State2D {
        State2D::new(
            self.state2.pos - self.state1.pos,
            self.state2.vel - self.state1.vel,
            self.state1.t,
        )
    }

    pub fn total_momentum(&self) -> Vec2 {
        self.state1.vel * self.mass1 + self.state2.vel * self.mass2
    }

    pub fn total_angular_momentum(&self) -> f64 {
        self.mass1 * self.state1.pos.cross(self.state1.vel)
            + self.mass2 * self.state2.pos.cross(self.state2.vel)
    }
}

struct TwoBodySystem {
    g_m1: f64,
    g_m2: f64,
}

impl OdeSystem<8> for TwoBodySystem {
    fn rhs(&self, _t: f64, y: &[f64; 8], dydt: &mut [f64; 8]) {
        let dx = y[2] - y[0];
        let dy = y[3] - y[1];
        let r = dx.hypot(dy);
        let inv_r3 = 1.0 / (r * r * r);
        dydt[0] = y[4];
        dydt[1] = y[5];
        dydt[2] = y[6];
        dydt[3] = y[7];
        // Body 1 is pulled toward body 2 and vice versa.
        dydt[4] = self.g_m2 * dx * inv_r3;
        dydt[5] = self.g_m2 * dy * inv_r3;
        dydt[6] = -self.g_m1 * dx * inv_r3;
        dydt[7] = -self.g_m1 * dy * inv_r3;
    }
}

/// Integrate the two-body problem, sampling both bodies at every
/// accepted step (shared times). The collision guard applies to the
/// separation, defaulting to 1e−8 × the initial separation.
pub fn two_body_integrate(
    tb: &TwoBodyState,
    duration: f64,
    cfg: &SimConfig,
) -> Result<(Trajectory, Trajectory)> {
    cfg.validate()?;
    if duration <= 0.0 || duration.is_nan() {
        return Err(Error::InvalidInput(format!(
            "duration {duration} must be positive"
        )));
    }
    let sep0 = (tb.state2.pos - tb.state1.pos).norm();
    let r_min = cfg.collision_radius(sep0);
    let sys = TwoBodySystem {
        g_m1: tb.g * tb.mass1,
        g_m2: tb.g * tb.mass2,
    };
    let y0 = [
        tb.state1.pos.x,
        tb.state1.pos.y,
        tb.state2.pos.x,
        tb.state2.pos.y,
        tb.state1.vel.x,
        tb.state1.vel.y,
        tb.state2.vel.x,
        tb.state2.vel.y,
    ];
    let mut s1 = vec![tb.state1];
    let mut s2 = vec![tb.state2];
    let mut collided: Option<(f64, f64)> = None;
    let end = match cfg.integrator {
        IntegratorKind::Adaptive => ode::drive_adaptive(
            &sys,
            tb.state1.t,
            y0,
            tb.state1.t + duration,
            &[],
            &cfg.adaptive_opts(),
            |t, y| {
                s1.push(State2D::new(
                    Vec2::new(y[0], y[1]),
                    Vec2::new(y[4], y[5]),
                    t,
                ));
                s2.push(State2D::new(
                    Vec2::new(y[2], y[3]),
                    Vec2::new(y[6], y[7]),
                    t,
                ));
                let sep = (y[2] - y[0]).hypot(y[3] - y[1]);
                if sep < r_min {
                    collided = Some((t, sep));
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            },
        )?,
        IntegratorKind::Fixed { dt } => {
            let n = (duration / dt).round().max(1.0) as usize;
            ode::drive_rk4(&sys, tb.state1.t, y0, tb.state1.t + duration, n, |t, y| {
                s1.push(State2D::new(
                    Vec2::new(y[0], y[1]),
                    Vec2::new(y[4], y[5]),
                    t,
                ));
                s2.push(State2D::new(
                    Vec2::new(y[2], y[3]),
                    Vec2::new(y[6], y[7]),
                    t,
                ));
                let sep = (y[2] - y[0]).hypot(y[3] - y[1]);
                if sep < r_min {
                    collided = Some((t, sep));
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            })?
        }
    };
    if let Some((t, r)) = collided {
        return Err(Error::Collision { t, r, r_min });
    }
    Ok((
        Trajectory {
            samples: s1,
            field: None,
            stats: end.stats,
        },
        Trajectory {
            samples: s2,
            field: None,
            stats: end.stats,
        },
    ))
}

/// Semi-major axis implied by an inverse-square state, 1/(2/r − v²/C);
/// `None` when the state is unbound.
fn bound_semi_major(c: f64, s: &State2D) -> Option<f64> {
    let inv_a = 2.0 / s.pos.norm() - s.vel.norm_squared() / c;
    (inv_a > 0.0).then(|| 1.0 / inv_a)
}

/// Detect the orbital period of a closed orbit by integrating until the
/// position angle has swept 2π, locating the crossing by bisection, and
/// verifying that position and velocity return to their initial values
/// within 1e−8 relative. Errors with `NotPeriodic` when they do not
/// (precessing orbits), `ZeroAngularMomentum` for radial motion, and
/// `UnboundOrbit` for inverse-square states with nonnegative energy.
pub fn detect_period(field: &CentralField, s0: &State2D, cfg: &SimConfig) -> Result<f64> {
    cfg.validate()?;
    let k = s0.angular_momentum();
    let r0 = s0.pos.norm();
    let v0 = s0.vel.norm();
    if k.abs() < 1e-300 || r0 == 0.0 {
        return Err(Error::ZeroAngularMomentum);
    }

    // Horizon and length scale for the return test.
    let (horizon, scale) = if field.n == -2.0 && field.c > 0.0 {
        match bound_semi_major(field.c, s0) {
            Some(a) => (
                3.0 * std::f64::consts::TAU * (a * a * a / field.c).sqrt(),
                a,
            ),
            None => {
                // Eccentricity from the eccentricity vector, for the report.
                let e_vec = s0.vel.rotated(-std::f64::consts::FRAC_PI_2) * (k / field.c)
                    - s0.pos.normalized();
                return Err(Error::UnboundOrbit { e: e_vec.norm() });
            }
        }
    } else {
        (200.0 * std::f64::consts::PI * r0 / v0.max(1e-12), r0)
    };

    let sys = CentralSystem { field: *field };
    let r_min = cfg.collision_radius(r0);
    let opts = cfg.adaptive_opts();
    let target = std::f64::consts::TAU;

    // Swept angle along a run starting from `start`, halting once it
    // passes `stop_angle`; returns (t_prev, swept_prev, state_prev,
    // t_hit, swept_hit) bracketing the crossing.
    let sweep = |start: &State2D, t_end: f64, stop_angle: f64| -> Result<SweepEnd> {
        let mut prev_angle = start.pos.angle();
        let mut swept = 0.0_f64;
        let mut before = (*start, 0.0_f64);
        let mut bracket: Option<(State2D, f64)> = None;
        ode::drive_adaptive(&sys, start.t, pack(start), t_end, &[], &opts, |t, y| {
            let s = unpack(t, y);
            if s.pos.norm() < r_min {
                return ControlFlow::Break(());
            }
            let raw = s.pos.angle();
            let mut d = raw - prev_angle;
            while d > std::f64::consts::PI {
                d -= std::f64::consts::TAU;
            }
            while d < -std::f64::consts::PI {
                d += std::f64::consts::TAU;
            }
            prev_angle = raw;
            swept += d;
            if swept.abs() >= stop_angle {
                bracket = Some((s, swept.abs()));
                ControlFlow::Break(())
            } else {
                before = (s, swept.abs());
                ControlFlow::Continue(())
            }
        })?;
        Ok(SweepEnd { before, bracket })
    };

    let first = sweep(s0, s0.t + horizon, target)?;
    let Some((hit, _)) = first.bracket else {
        return Err(Error::NotPeriodic {
            deviation: f64::NAN,
        });
    };
    let (before_state, before_swept) = first.before;

    // Bisect the crossing time inside the bracketing step: integrate
    // short spans from the pre-crossing state and measure the extra
    // swept angle.
    let remaining = target - before_swept;
    let mut lo = 0.0_f64;
    let mut hi = hit.t - before_state.t;
    let extra_sweep = |tau: f64| -> Result<f64> {
        if tau == 0.0 {
            return Ok(0.0);
        }
        let mut prev_angle = before_state.pos.angle();
        let mut swept = 0.0_f64;
        ode::drive_adaptive(
            &sys,
            before_state.t,
            pack(&before_state),
            before_state.t + tau,
            &[],
            &opts,
            |_, y| {
                let raw = y[1].atan2(y[0]);
                let mut d = raw - prev_angle;
                while d > std::f64::consts::PI {
                    d -= std::f64::consts::TAU;
                }
                while d < -std::f64::consts::PI {
                    d += std::f64::consts::TAU;
                }
                prev_angle = raw;
                swept += d;
                ControlFlow::Continue(())
            },
        )?;
        Ok(swept.abs())
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if extra_sweep(mid)? < remaining {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let period = before_state.t + 0.5 * (lo + hi) - s0.t;

    // Verify this is a genuine return, not just a 2π sweep.
    let end = ode::drive_adaptive(&sys, s0.t, pack(s0), s0.t + period, &[], &opts, |_, _| {
        ControlFlow::Continue(())
    })?;
    let s_end = unpack(end.t, &end.y);
    let dev_pos = (s_end.pos - s0.pos).norm() / scale;
    let dev_vel = (s_end.vel - s0.vel).norm() / v0.max(1e-12);
    let deviation = dev_pos.max(dev_vel);
    if deviation > 1e-8 {
        return Err(Error::NotPeriodic { deviation });
    }
    Ok(period)
}

struct SweepEnd {
    before: (State2D, f64),
    bracket: Option<(State2D, f64)>,
}
