//! Experiment runner over the orbital-mechanics library: each
//! subcommand runs one named experiment and writes a CSV or JSON report
//! with echoed inputs, plot-ready data columns, and tolerance verdicts.
//!
//! Exit codes: 0 when every verdict passes (or is N/A), 1 when a
//! verdict fails, 2 for invalid input.

mod commands;
mod config;
mod report;

use clap::{Parser, Subcommand};
use commands::{ShellArgs, TwoBodyArgs};
use config::FileConfig;
use orbita::dynamics::State2D;
use orbita::Vec2;
use report::Report;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "orbita", version, about)]
struct Cli {
    /// Report format: csv or json
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write the report to this path instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON config file; explicit flags win over its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Multiply every verdict threshold by this factor
    #[arg(long = "tol-scale", global = true)]
    tol_scale: Option<f64>,
    /// Seed for the randomized sample sweeps
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Integrator: adaptive (default) or fixed
    #[arg(long, global = true)]
    integrator: Option<String>,
    /// Step size for the fixed integrator
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Relative tolerance of the adaptive integrator
    #[arg(long = "rel-tol", global = true)]
    rel_tol: Option<f64>,
    /// Absolute tolerance of the adaptive integrator
    #[arg(long = "abs-tol", global = true)]
    abs_tol: Option<f64>,
    /// Collision radius (0 disables the guard)
    #[arg(long = "r-min", global = true)]
    r_min: Option<f64>,
    /// Step budget per integration
    #[arg(long = "max-steps", global = true)]
    max_steps: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate focal-geometry identities over ellipse sample points
    Ellipse {
        /// Semi-major axis
        #[arg(long)]
        a: Option<f64>,
        /// Center-to-focus distance
        #[arg(long)]
        c: Option<f64>,
        /// Evenly spaced sample points
        #[arg(long)]
        samples: Option<usize>,
        /// Extra seeded-random sample points
        #[arg(long)]
        random: Option<usize>,
    },
    /// Recover the force law from Kepler motion on a given ellipse
    Infer {
        /// Semi-major axis
        #[arg(long)]
        a: Option<f64>,
        /// Center-to-focus distance
        #[arg(long)]
        c: Option<f64>,
        /// Orbital period
        #[arg(long = "T")]
        period: Option<f64>,
        /// Sample points per estimator
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Solve the inverse-square initial-value problem in closed form
    Solve {
        /// Field strength (negative for a repulsive field)
        #[arg(long = "C", allow_hyphen_values = true)]
        strength: Option<f64>,
        /// Initial position as x,y
        #[arg(long, allow_hyphen_values = true)]
        pos: Option<String>,
        /// Initial velocity as vx,vy
        #[arg(long, allow_hyphen_values = true)]
        vel: Option<String>,
    },
    /// Attraction of a spherical shell or solid ball by quadrature
    Shell {
        /// Shell radius; solid balls default to the profile's outer radius
        #[arg(long = "R")]
        radius: Option<f64>,
        /// Uniform surface density (thin shell mode)
        #[arg(long)]
        rho: Option<f64>,
        /// Distance of the probe mass from the center
        #[arg(long)]
        d: Option<f64>,
        /// Mesh refinement level (node counts double per level)
        #[arg(long)]
        mesh: Option<u32>,
        /// Probe mass
        #[arg(long)]
        m1: Option<f64>,
        /// Gravitational constant
        #[arg(long = "G")]
        g: Option<f64>,
        /// Radial density profile CSV (solid ball mode)
        #[arg(long)]
        profile: Option<String>,
        /// Radial layers for the solid ball
        #[arg(long)]
        layers: Option<usize>,
    },
    /// Check the third law across simulated orbits
    Kepler3 {
        /// Field strength
        #[arg(long = "C")]
        strength: Option<f64>,
        /// Semi-major axes, comma separated
        #[arg(long, value_delimiter = ',')]
        a: Option<Vec<f64>>,
        /// Orbit eccentricity used for each run
        #[arg(long)]
        ecc: Option<f64>,
    },
    /// Integrate a two-body system and test the one-body reduction
    Twobody {
        /// Gravitational constant
        #[arg(long = "G")]
        g: Option<f64>,
        /// Mass of the first body
        #[arg(long)]
        m1: Option<f64>,
        /// Mass of the second body
        #[arg(long)]
        m2: Option<f64>,
        /// First body state as x,y,vx,vy
        #[arg(long, allow_hyphen_values = true)]
        state1: Option<String>,
        /// Second body state as x,y,vx,vy
        #[arg(long, allow_hyphen_values = true)]
        state2: Option<String>,
        /// Integration span (default: one relative-orbit period)
        #[arg(long)]
        duration: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(cli) {
        Ok((report, format, out)) => {
            let text = match format.as_str() {
                "csv" => report.to_csv(),
                "json" => report.to_json(start.elapsed().as_secs_f64()),
                _ => unreachable!("format validated in run"),
            };
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(Report, String, Option<PathBuf>), String> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };

    let format = cli
        .format
        .or(file.format.clone())
        .unwrap_or_else(|| "csv".to_string());
    if format != "csv" && format != "json" {
        return Err(format!("unknown format {format:?}: expected csv or json"));
    }
    let out = cli.out.or_else(|| file.out.clone().map(PathBuf::from));
    let tol_scale = cli.tol_scale.or(file.tol_scale).unwrap_or(1.0);
    if tol_scale <= 0.0 || tol_scale.is_nan() {
        return Err(format!("tol-scale {tol_scale} must be positive"));
    }
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let sim = config::build_sim_config(
        cli.integrator.or(file.sim.integrator.clone()),
        cli.dt.or(file.sim.dt),
        cli.rel_tol.or(file.sim.rel_tol),
        cli.abs_tol.or(file.sim.abs_tol),
        cli.r_min.or(file.sim.r_min),
        cli.max_steps.or(file.sim.max_steps),
        seed,
    )?;

    let missing = |flag: &str| format!("missing required value: give {flag} or set it in --config");

    let report = match cli.command {
        Command::Ellipse {
            a,
            c,
            samples,
            random,
        } => commands::cmd_ellipse(
            a.or(file.ellipse.a).ok_or_else(|| missing("--a"))?,
            c.or(file.ellipse.c).ok_or_else(|| missing("--c"))?,
            samples.or(file.ellipse.samples).unwrap_or(360),
            random.or(file.ellipse.random).unwrap_or(0),
            seed,
            tol_scale,
        )?,
        Command::Infer {
            a,
            c,
            period,
            samples,
        } => commands::cmd_infer(
            a.or(file.infer.a).ok_or_else(|| missing("--a"))?,
            c.or(file.infer.c).ok_or_else(|| missing("--c"))?,
            period.or(file.infer.period).ok_or_else(|| missing("--T"))?,
            samples.or(file.infer.samples).unwrap_or(64),
            tol_scale,
        )?,
        Command::Solve { strength, pos, vel } => commands::cmd_solve(
            strength
                .or(file.solve.strength)
                .ok_or_else(|| missing("--C"))?,
            parse_vec2(
                &pos.or(file.solve.pos.clone())
                    .ok_or_else(|| missing("--pos"))?,
            )?,
            parse_vec2(
                &vel.or(file.solve.vel.clone())
                    .ok_or_else(|| missing("--vel"))?,
            )?,
            &sim,
            tol_scale,
        )?,
        Command::Shell {
            radius,
            rho,
            d,
            mesh,
            m1,
            g,
            profile,
            layers,
        } => commands::cmd_shell(
            &ShellArgs {
                radius: radius.or(file.shell.radius),
                rho: rho.or(file.shell.rho),
                d: d.or(file.shell.d).ok_or_else(|| missing("--d"))?,
                mesh: mesh.or(file.shell.mesh).unwrap_or(6),
                m1: m1.or(file.shell.m1).unwrap_or(1.0),
                g: g.or(file.shell.g).unwrap_or(1.0),
                profile: profile.or(file.shell.profile.clone()),
                layers: layers.or(file.shell.layers),
            },
            tol_scale,
        )?,
        Command::Kepler3 { strength, a, ecc } => commands::cmd_kepler3(
            strength
                .or(file.kepler3.strength)
                .ok_or_else(|| missing("--C"))?,
            &a.or(file.kepler3.a.clone()).ok_or_else(|| missing("--a"))?,
            ecc.or(file.kepler3.ecc).unwrap_or(0.2),
            &sim,
            tol_scale,
        )?,
        Command::Twobody {
            g,
            m1,
            m2,
            state1,
            state2,
            duration,
        } => {
            let state1 = match state1.or(file.twobody.state1.clone()) {
                Some(text) => parse_state(&text)?,
                None => State2D::new(Vec2::new(0.5, 0.0), Vec2::new(0.0, 0.65), 0.0),
            };
            let state2 = match state2.or(file.twobody.state2.clone()) {
                Some(text) => parse_state(&text)?,
                None => State2D::new(Vec2::new(-0.5, 0.0), Vec2::new(0.0, -0.65), 0.0),
            };
            commands::cmd_twobody(
                &TwoBodyArgs {
                    g: g.or(file.twobody.g).unwrap_or(1.0),
                    m1: m1.or(file.twobody.m1).unwrap_or(1.0),
                    m2: m2.or(file.twobody.m2).unwrap_or(1.0),
                    state1,
                    state2,
                    duration: duration.or(file.twobody.duration),
                },
                &sim,
                tol_scale,
            )?
        }
    };
    Ok((report, format, out))
}

fn parse_vec2(text: &str) -> Result<Vec2, String> {
    let parts = parse_floats(text)?;
    match parts.as_slice() {
        [x, y] => Ok(Vec2::new(*x, *y)),
        _ => Err(format!("expected x,y but got {text:?}")),
    }
}

fn parse_state(text: &str) -> Result<State2D, String> {
    let parts = parse_floats(text)?;
    match parts.as_slice() {
        [x, y, vx, vy] => Ok(State2D::new(Vec2::new(*x, *y), Vec2::new(*vx, *vy), 0.0)),
        _ => Err(format!("expected x,y,vx,vy but got {text:?}")),
    }
}

fn parse_floats(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number {part:?} in {text:?}"))
        })
        .collect()
}
