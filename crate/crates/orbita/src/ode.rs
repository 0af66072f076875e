//! Explicit Runge–Kutta integrators over a fixed-size state vector.
//!
//! Two schemes: the Dormand–Prince 5(4) embedded pair with FSAL and
//! adaptive step control (the workhorse oracle), and classical fixed-step
//! RK4 for convergence studies. Both are deterministic: identical inputs
//! give bitwise-identical outputs.

use crate::error::{Error, Result};
use std::ops::ControlFlow;

/// Right-hand side of an autonomous-or-not first-order system
/// y' = f(t, y) with N components.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N], dydt: &mut [f64; N]);
}

impl<F, const N: usize> OdeSystem<N> for F
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    fn rhs(&self, t: f64, y: &[f64; N], dydt: &mut [f64; N]) {
        self(t, y, dydt)
    }
}

/// Adaptive-driver options.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOpts {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for AdaptiveOpts {
    fn default() -> Self {
        AdaptiveOpts {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

/// Work counters reported by every driver run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegratorStats {
    pub steps_accepted: u64,
    pub steps_rejected: u64,
    pub rhs_evals: u64,
}

impl IntegratorStats {
    pub fn merge(&mut self, other: &IntegratorStats) {
        self.steps_accepted += other.steps_accepted;
        self.steps_rejected += other.steps_rejected;
        self.rhs_evals += other.rhs_evals;
    }
}

/// Where a driver run ended: at `t_end`, or earlier because the
/// per-step observer requested a halt.
#[derive(Debug, Clone, Copy)]
pub struct DriveEnd<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub halted: bool,
    pub stats: IntegratorStats,
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Error coefficients: 5th-order weights minus the embedded 4th-order ones.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Dp54Workspace<const N: usize> {
    k: [[f64; N]; 7],
    y_stage: [f64; N],
}

impl<const N: usize> Dp54Workspace<N> {
    fn new() -> Self {
        Dp54Workspace {
            k: [[0.0; N]; 7],
            y_stage: [0.0; N],
        }
    }

    /// One trial step from (t, y) with size h. k[0] must hold f(t, y) on
    /// entry (FSAL); on exit k[6] holds f(t+h, y_new). Returns the new
    /// state and the scaled error norm.
    fn try_step<S: OdeSystem<N>>(
        &mut self,
        sys: &S,
        t: f64,
        y: &[f64; N],
        h: f64,
        opts: &AdaptiveOpts,
    ) -> ([f64; N], f64) {
        for stage in 1..7 {
            for i in 0..N {
                let mut acc = 0.0;
                for (j, kj) in self.k.iter().enumerate().take(stage) {
                    acc += A[stage - 1][j] * kj[i];
                }
                self.y_stage[i] = y[i] + h * acc;
            }
            let (head, tail) = self.k.split_at_mut(stage);
            let _ = head;
            sys.rhs(t + C[stage] * h, &self.y_stage, &mut tail[0]);
        }
        // Stage 6 already evaluated f at the 5th-order solution (FSAL):
        // y_stage now holds y_new.
        let y_new = self.y_stage;
        let mut err_sq = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in self.k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            let r = h * e / scale;
            err_sq += r * r;
        }
        (y_new, (err_sq / N as f64).sqrt())
    }
}

/// Starting step size, following the standard norm-balancing heuristic:
/// small enough that one explicit Euler step stays well inside tolerance.
fn initial_step<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    t_end: f64,
    opts: &AdaptiveOpts,
) -> f64 {
    let span = t_end - t0;
    let scale = |y: &[f64; N], i: usize| opts.abs_tol + opts.rel_tol * y[i].abs();
    let mut d0 = 0.0_f64;
    let mut d1 = 0.0_f64;
    for i in 0..N {
        d0 += (y0[i] / scale(y0, i)).powi(2);
        d1 += (f0[i] / scale(y0, i)).powi(2);
    }
    d0 = (d0 / N as f64).sqrt();
    d1 = (d1 / N as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span.abs());

    let mut y1 = *y0;
    for i in 0..N {
        y1[i] += h0 * f0[i];
    }
    let mut f1 = [0.0; N];
    sys.rhs(t0 + h0, &y1, &mut f1);
    let mut d2 = 0.0_f64;
    for i in 0..N {
        d2 += ((f1[i] - f0[i]) / scale(y0, i)).powi(2);
    }
    d2 = (d2 / N as f64).sqrt() / h0;

    let d_max = d1.max(d2);
    let h1 = if d_max <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d_max).powf(0.2)
    };
    h1.min(100.0 * h0).min(span.abs())
}

/// Drive the 5(4) pair from `t0` to `t_end`, calling `on_step(t, y)`
/// after every accepted step (not for the initial state). The observer
/// may return `ControlFlow::Break(())` to halt early; the returned
/// [`DriveEnd`] then carries the halting state and `halted = true`.
///
/// If `t_stops` is nonempty, steps are clamped so that each listed time
/// is hit exactly (they must be sorted, inside (t0, t_end]).
pub fn drive_adaptive<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    t_stops: &[f64],
    opts: &AdaptiveOpts,
    mut on_step: impl FnMut(f64, &[f64; N]) -> ControlFlow<()>,
) -> Result<DriveEnd<N>> {
    let mut stats = IntegratorStats::default();
    let mut t = t0;
    let mut y = y0;
    let mut ws = Dp54Workspace::<N>::new();
    sys.rhs(t, &y, &mut ws.k[0]);
    stats.rhs_evals += 1;

    let f0 = ws.k[0];
    let mut h = initial_step(sys, t0, &y0, &f0, t_end, opts);
    stats.rhs_evals += 1;
    let mut next_stop = t_stops
        .iter()
        .position(|&s| s > t0)
        .unwrap_or(t_stops.len());
    let mut just_rejected = false;

    while t < t_end {
        if stats.steps_accepted + stats.steps_rejected >= opts.max_steps as u64 {
            return Err(Error::StepLimit {
                t,
                t_end,
                max_steps: opts.max_steps,
            });
        }
        let target = if next_stop < t_stops.len() {
            t_stops[next_stop].min(t_end)
        } else {
            t_end
        };
        let mut h_try = h.min(target - t);
        let clamped = h_try < h;
        if t + h_try <= t {
            return Err(Error::StepUnderflow { t });
        }
        // Land exactly on the target when the remaining gap is tiny.
        if target - (t + h_try) < 1e-14 * target.abs().max(1.0) {
            h_try = target - t;
        }

        let (y_new, err) = ws.try_step(sys, t, &y, h_try, opts);
        stats.rhs_evals += 6;

        if err <= 1.0 {
            stats.steps_accepted += 1;
            t += h_try;
            if (t - target).abs() < 1e-14 * target.abs().max(1.0) {
                t = target;
                if next_stop < t_stops.len() && target == t_stops[next_stop].min(t_end) {
                    while next_stop < t_stops.len() && t_stops[next_stop] <= t {
                        next_stop += 1;
                    }
                }
            }
            y = y_new;
            ws.k[0] = ws.k[6];
            let grow_cap = if just_rejected { 1.0 } else { 10.0 };
            just_rejected = false;
            let factor = if err == 0.0 {
                grow_cap
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, grow_cap)
            };
            // A clamped step says nothing about the error-optimal size.
            if !clamped {
                h = h_try * factor;
            }
            if let ControlFlow::Break(()) = on_step(t, &y) {
                return Ok(DriveEnd {
                    t,
                    y,
                    halted: true,
                    stats,
                });
            }
        } else {
            stats.steps_rejected += 1;
            just_rejected = true;
            let factor = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.2, 1.0)
            } else {
                0.2
            };
            h = h_try * factor;
        }
    }

    Ok(DriveEnd {
        t,
        y,
        halted: false,
        stats,
    })
}

/// One classical RK4 step of size `h`.
pub fn rk4_step<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> [f64; N] {
    let mut k1 = [0.0; N];
    let mut k2 = [0.0; N];
    let mut k3 = [0.0; N];
    let mut k4 = [0.0; N];
    let mut tmp = [0.0; N];
    sys.rhs(t, y, &mut k1);
    for i in 0..N {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    sys.rhs(t + 0.5 * h, &tmp, &mut k2);
    for i in 0..N {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    sys.rhs(t + 0.5 * h, &tmp, &mut k3);
    for i in 0..N {
        tmp[i] = y[i] + h * k3[i];
    }
    sys.rhs(t + h, &tmp, &mut k4);
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Drive fixed-step RK4 over `n_steps` equal steps, calling `on_step`
/// after each one.
pub fn drive_rk4<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    n_steps: usize,
    mut on_step: impl FnMut(f64, &[f64; N]) -> ControlFlow<()>,
) -> Result<DriveEnd<N>> {
    let h = (t_end - t0) / n_steps as f64;
    let mut y = y0;
    let mut stats = IntegratorStats::default();
    for step in 1..=n_steps {
        let t = t0 + (step - 1) as f64 * h;
        y = rk4_step(sys, t, &y, h);
        stats.steps_accepted += 1;
        stats.rhs_evals += 4;
        let t_new = t0 + step as f64 * h;
        if let ControlFlow::Break(()) = on_step(t_new, &y) {
            return Ok(DriveEnd {
                t: t_new,
                y,
                halted: true,
                stats,
            });
        }
    }
    Ok(DriveEnd {
        t: t_end,
        y,
        halted: false,
        stats,
    })
}
