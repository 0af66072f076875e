//! Optional JSON configuration file. Every field mirrors a flag; the
//! resolution order is flag, then config value, then built-in default.

use orbita::dynamics::{IntegratorKind, SimConfig};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<String>,
    pub out: Option<String>,
    pub tol_scale: Option<f64>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub ellipse: EllipseSection,
    #[serde(default)]
    pub infer: InferSection,
    #[serde(default)]
    pub solve: SolveSection,
    #[serde(default)]
    pub shell: ShellSection,
    #[serde(default)]
    pub kepler3: Kepler3Section,
    #[serde(default)]
    pub twobody: TwoBodySection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub integrator: Option<String>,
    pub dt: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub r_min: Option<f64>,
    pub max_steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipseSection {
    pub a: Option<f64>,
    pub c: Option<f64>,
    pub samples: Option<usize>,
    pub random: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InferSection {
    pub a: Option<f64>,
    pub c: Option<f64>,
    #[serde(rename = "T")]
    pub period: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    #[serde(rename = "C")]
    pub strength: Option<f64>,
    pub pos: Option<String>,
    pub vel: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShellSection {
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub rho: Option<f64>,
    pub d: Option<f64>,
    pub mesh: Option<u32>,
    pub m1: Option<f64>,
    #[serde(rename = "G")]
    pub g: Option<f64>,
    pub profile: Option<String>,
    pub layers: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Kepler3Section {
    #[serde(rename = "C")]
    pub strength: Option<f64>,
    pub a: Option<Vec<f64>>,
    pub ecc: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoBodySection {
    #[serde(rename = "G")]
    pub g: Option<f64>,
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub state1: Option<String>,
    pub state2: Option<String>,
    pub duration: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| format!("cannot parse config {}: {e}", path.display()))
    }
}

/// Assemble the integrator configuration from resolved option values.
pub fn build_sim_config(
    integrator: Option<String>,
    dt: Option<f64>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    r_min: Option<f64>,
    max_steps: Option<usize>,
    seed: u64,
) -> Result<SimConfig, String> {
    let kind = match integrator.as_deref() {
        None | Some("adaptive") => IntegratorKind::Adaptive,
        Some("fixed") => IntegratorKind::Fixed {
            dt: dt.ok_or("--integrator fixed requires --dt")?,
        },
        Some(other) => return Err(format!("unknown integrator {other:?}")),
    };
    let defaults = SimConfig::default();
    let cfg = SimConfig {
        integrator: kind,
        rel_tol: rel_tol.unwrap_or(defaults.rel_tol),
        abs_tol: abs_tol.unwrap_or(defaults.abs_tol),
        r_min,
        max_steps: max_steps.unwrap_or(defaults.max_steps),
        seed,
    };
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = r#"{
            "format": "json",
            "tol_scale": 2.0,
            "sim": {"rel_tol": 1e-10, "max_steps": 500},
            "ellipse": {"a": 5.0, "c": 3.0, "samples": 12},
            "solve": {"C": 1.0, "pos": "1,0", "vel": "0,1.2"}
        }"#;
        let cfg: FileConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.format.as_deref(), Some("json"));
        assert_eq!(cfg.ellipse.samples, Some(12));
        assert_eq!(cfg.solve.strength, Some(1.0));
        assert_eq!(cfg.sim.max_steps, Some(500));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<FileConfig>(r#"{"elipse": {}}"#).is_err());
    }

    #[test]
    fn sim_config_resolution() {
        let cfg = build_sim_config(None, None, Some(1e-9), None, None, None, 7).unwrap();
        assert_eq!(cfg.rel_tol, 1e-9);
        assert_eq!(cfg.abs_tol, 1e-14);
        assert_eq!(cfg.seed, 7);
        assert!(build_sim_config(Some("fixed".into()), None, None, None, None, None, 0).is_err());
        assert!(build_sim_config(Some("rk9".into()), None, None, None, None, None, 0).is_err());
        let fixed =
            build_sim_config(Some("fixed".into()), Some(0.01), None, None, None, None, 0).unwrap();
        assert_eq!(fixed.integrator, IntegratorKind::Fixed { dt: 0.01 });
    }
}
