//! Gravity of spherical shells and solid balls by surface quadrature.
//!
//! A uniform-density shell attracts an exterior point as if its mass sat
//! at the center. The quadrature here verifies that directly: the sphere
//! is sampled with a Gauss–Legendre rule in the polar cosine crossed
//! with a uniform azimuth rule, and the inverse-square contributions are
//! pairwise-summed in a fixed order so the result is reproducible bit
//! for bit. The inversion map P ↦ P′ with |OP′|·|OP| = R² provides the
//! similar-triangle identities the classical proof rests on, and solid
//! balls reduce to stacked thin shells.

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::vec::Vec3;
use std::f64::consts::{PI, TAU};

/// Points closer to the surface than this factor (relative to R) need a
/// mesh level above [`MAX_GUARDED_LEVEL`] before quadrature is attempted.
pub const NEAR_SURFACE_FACTOR: f64 = 1.0 + 1e-3;

/// Highest mesh level at which the near-surface guard refuses to run.
pub const MAX_GUARDED_LEVEL: u32 = 8;

/// Thin spherical shell of uniform surface density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalShell {
    center: Vec3,
    radius: f64,
    surface_density: f64,
}

impl SphericalShell {
    pub fn new(center: Vec3, radius: f64, surface_density: f64) -> Result<SphericalShell> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "shell radius must be positive and finite, got {radius}"
            )));
        }
        if !(surface_density > 0.0 && surface_density.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "surface density must be positive and finite, got {surface_density}"
            )));
        }
        Ok(SphericalShell {
            center,
            radius,
            surface_density,
        })
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn surface_density(&self) -> f64 {
        self.surface_density
    }

    pub fn total_mass(&self) -> f64 {
        4.0 * PI * self.radius * self.radius * self.surface_density
    }
}

/// Outcome of a quadrature run: the force vector on the probe mass, the
/// mesh level used, and a relative error estimate from comparing against
/// the next-coarser level.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub force: Vec3,
    pub mesh_level: u32,
    pub est_error: f64,
}

/// Magnitude of the inverse-square attraction between two point masses.
pub fn point_mass_force(g: f64, m1: f64, m2: f64, d: f64) -> Result<f64> {
    if d <= 0.0 || d.is_nan() {
        return Err(Error::InvalidInput(format!(
            "point separation must be positive, got {d}"
        )));
    }
    Ok(g * m1 * m2 / (d * d))
}

/// Inverse point of an exterior P with respect to the shell's sphere:
/// the point P′ on segment OP with |OP′|·|OP| = R². Every surface point
/// Q then satisfies |P′Q| / |PQ| = R / |OP|.
pub fn inversion_point(shell: &SphericalShell, p: Vec3) -> Result<Vec3> {
    let offset = p - shell.center;
    let d = offset.norm();
    if d <= shell.radius {
        return Err(Error::NotExterior { d, r: shell.radius });
    }
    Ok(shell.center + offset * (shell.radius * shell.radius / (d * d)))
}

/// Number of polar nodes (and azimuth nodes) at a mesh level.
fn nodes_at_level(level: u32) -> usize {
    1usize << (level + 1)
}

/// Orthonormal frame whose third axis points along `axis` (unit length
/// not required). Choice is deterministic in the input.
fn axis_frame(axis: Vec3) -> (Vec3, Vec3, Vec3) {
    let w = axis.normalized();
    let pick = if w.x.abs() <= 0.9 {
        Vec3::new(1.0, 0.0, 0.0)
    } else {
        Vec3::new(0.0, 1.0, 0.0)
    };
    let u = (pick - w * pick.dot(w)).normalized();
    let v = w.cross(u);
    (u, v, w)
}

fn pairwise_sum_vec3(values: &[Vec3]) -> Vec3 {
    if values.len() <= 8 {
        return values
            .iter()
            .fold(Vec3::new(0.0, 0.0, 0.0), |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum_vec3(&values[..mid]) + pairwise_sum_vec3(&values[mid..])
}

/// Raw product-rule quadrature of the shell's pull on a probe mass at p.
/// No exterior or surface guards; callers validate.
fn shell_force_raw(shell: &SphericalShell, p: Vec3, m1: f64, g: f64, level: u32) -> Vec3 {
    let n = nodes_at_level(level);
    let (u_nodes, u_weights) = gauss_legendre(n);
    let dpsi = TAU / n as f64;
    let (e1, e2, e3) = axis_frame(p - shell.center);
    let r = shell.radius;
    let scale = g * m1 * shell.surface_density * r * r * dpsi;

    let mut terms = Vec::with_capacity(n * n);
    for (&u, &wu) in u_nodes.iter().zip(&u_weights) {
        let s = (1.0 - u * u).max(0.0).sqrt();
        for j in 0..n {
            let psi = dpsi * (j as f64 + 0.5);
            let q = shell.center + (e1 * (s * psi.cos()) + e2 * (s * psi.sin()) + e3 * u) * r;
            let dv = q - p;
            let dist = dv.norm();
            terms.push(dv * (scale * wu / (dist * dist * dist)));
        }
    }
    pairwise_sum_vec3(&terms)
}

fn check_exterior(shell: &SphericalShell, p: Vec3, level: u32) -> Result<f64> {
    let d = (p - shell.center).norm();
    if d <= shell.radius {
        return Err(Error::NotExterior { d, r: shell.radius });
    }
    if d < shell.radius * NEAR_SURFACE_FACTOR && level <= MAX_GUARDED_LEVEL {
        return Err(Error::NearSurface {
            d,
            r: shell.radius,
            level,
        });
    }
    Ok(d)
}

/// Force on a point mass m1 at p from the shell, via surface quadrature
/// at the given mesh level (polar and azimuth node counts both double
/// per level). The error estimate compares against level − 1.
pub fn shell_force(
    shell: &SphericalShell,
    p: Vec3,
    m1: f64,
    g: f64,
    mesh_level: u32,
) -> Result<QuadratureResult> {
    if mesh_level < 1 {
        return Err(Error::InvalidInput("mesh level must be at least 1".into()));
    }
    check_exterior(shell, p, mesh_level)?;
    let force = shell_force_raw(shell, p, m1, g, mesh_level);
    let coarse = shell_force_raw(shell, p, m1, g, mesh_level - 1);
    let norm = force.norm();
    let diff = (force - coarse).norm();
    let est_error = if norm > 0.0 { diff / norm } else { diff };
    Ok(QuadratureResult {
        force,
        mesh_level,
        est_error,
    })
}

/// Radial density profile of a solid ball, given as constant-density
/// bands: each entry is (outer radius, density), the first band starting
/// at the center. Radii must be strictly increasing and densities
/// nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    edges: Vec<f64>,
    densities: Vec<f64>,
}

impl DensityProfile {
    /// Single band of constant density out to `r_outer`.
    pub fn uniform(rho: f64, r_outer: f64) -> Result<DensityProfile> {
        DensityProfile::from_bands(&[(r_outer, rho)])
    }

    pub fn from_bands(bands: &[(f64, f64)]) -> Result<DensityProfile> {
        if bands.is_empty() {
            return Err(Error::InvalidProfile("no bands given".into()));
        }
        let mut edges = Vec::with_capacity(bands.len());
        let mut densities = Vec::with_capacity(bands.len());
        let mut prev = 0.0;
        for &(radius, rho) in bands {
            if !(radius > prev && radius.is_finite()) {
                return Err(Error::InvalidProfile(format!(
                    "band radii must be strictly increasing and positive; \
                     got {radius} after {prev}"
                )));
            }
            if !(rho >= 0.0 && rho.is_finite()) {
                return Err(Error::InvalidProfile(format!(
                    "density must be nonnegative and finite, got {rho}"
                )));
            }
            edges.push(radius);
            densities.push(rho);
            prev = radius;
        }
        Ok(DensityProfile { edges, densities })
    }

    /// Parse a two-column CSV body: `radius,density` per line, radii
    /// strictly increasing. Blank lines and a `radius,density` header
    /// are tolerated.
    pub fn from_csv(text: &str) -> Result<DensityProfile> {
        let mut bands = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (a, b) = match (cols.next(), cols.next(), cols.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(Error::InvalidProfile(format!(
                        "line {}: expected two comma-separated columns",
                        idx + 1
                    )))
                }
            };
            if idx == 0 && a.parse::<f64>().is_err() && a.eq_ignore_ascii_case("radius") {
                continue;
            }
            let radius: f64 = a.parse().map_err(|_| {
                Error::InvalidProfile(format!("line {}: bad radius {a:?}", idx + 1))
            })?;
            let rho: f64 = b.parse().map_err(|_| {
                Error::InvalidProfile(format!("line {}: bad density {b:?}", idx + 1))
            })?;
            bands.push((radius, rho));
        }
        DensityProfile::from_bands(&bands)
    }

    pub fn outer_radius(&self) -> f64 {
        *self.edges.last().expect("profile has at least one band")
    }

    /// Density of the band containing radius r (bands are closed on
    /// their outer edge). Zero outside the outermost edge.
    pub fn density_at(&self, r: f64) -> f64 {
        if r < 0.0 || r > self.outer_radius() {
            return 0.0;
        }
        let idx = self.edges.partition_point(|&e| e < r);
        self.densities[idx.min(self.densities.len() - 1)]
    }

    /// Exact mass of the profile out to its outer edge.
    pub fn total_mass(&self) -> f64 {
        let mut mass = 0.0;
        let mut lo = 0.0;
        for (&hi, &rho) in self.edges.iter().zip(&self.densities) {
            mass += rho * (4.0 * PI / 3.0) * (hi * hi * hi - lo * lo * lo);
            lo = hi;
        }
        mass
    }

    /// Layer edges for an n-layer discretization: a uniform grid joined
    /// with the band edges, so no layer straddles a density jump.
    fn layer_edges(&self, layers: usize) -> Vec<f64> {
        let r_outer = self.outer_radius();
        let mut edges: Vec<f64> = (0..=layers)
            .map(|i| r_outer * i as f64 / layers as f64)
            .collect();
        edges.extend_from_slice(&self.edges);
        edges.sort_by(|a, b| a.partial_cmp(b).expect("finite edges"));
        edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * r_outer);
        edges
    }
}

/// Force on m1 at p from a solid ball built of concentric constant-
/// density bands. The ball is cut into thin layers (density sampled at
/// each layer midpoint, layer volume exact) and each layer is treated
/// as a thin shell at its mid radius.
pub fn solid_ball_force(
    profile: &DensityProfile,
    r_outer: f64,
    p: Vec3,
    m1: f64,
    g: f64,
    layers: usize,
    mesh_level: u32,
) -> Result<QuadratureResult> {
    if (r_outer - profile.outer_radius()).abs() > 1e-9 * r_outer.abs() {
        return Err(Error::InvalidProfile(format!(
            "outer radius {r_outer} does not match the profile edge {}",
            profile.outer_radius()
        )));
    }
    if layers == 0 {
        return Err(Error::InvalidInput("layer count must be positive".into()));
    }
    if mesh_level < 1 {
        return Err(Error::InvalidInput("mesh level must be at least 1".into()));
    }
    let outer_guard = SphericalShell {
        center: Vec3::new(0.0, 0.0, 0.0),
        radius: r_outer,
        surface_density: 1.0,
    };
    check_exterior(&outer_guard, p, mesh_level)?;

    let edges = profile.layer_edges(layers);
    let mut fine = Vec::new();
    let mut coarse = Vec::new();
    for pair in edges.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let r_mid = 0.5 * (lo + hi);
        let rho = profile.density_at(r_mid);
        if rho == 0.0 || r_mid == 0.0 {
            continue;
        }
        // Surface density that gives the layer its exact volume:
        // 4πr_mid²σ = ρ · (4π/3)(hi³ − lo³).
        let sigma = rho * (hi * hi * hi - lo * lo * lo) / (3.0 * r_mid * r_mid);
        let layer = SphericalShell {
            center: Vec3::new(0.0, 0.0, 0.0),
            radius: r_mid,
            surface_density: sigma,
        };
        fine.push(shell_force_raw(&layer, p, m1, g, mesh_level));
        coarse.push(shell_force_raw(&layer, p, m1, g, mesh_level - 1));
    }
    let force = pairwise_sum_vec3(&fine);
    let coarse_total = pairwise_sum_vec3(&coarse);
    let norm = force.norm();
    let diff = (force - coarse_total).norm();
    let est_error = if norm > 0.0 { diff / norm } else { diff };
    Ok(QuadratureResult {
        force,
        mesh_level,
        est_error,
    })
}
