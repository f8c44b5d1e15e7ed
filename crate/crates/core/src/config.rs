//! Scenario configuration files (TOML).
//!
//! Every section and key is optional; omitted values take the defaults of the
//! sinusoidal-terrain benchmark. Unknown keys are rejected.
//!
//! ```toml
//! [surface]
//! kind = "sinusoidal"   # or "plane" with slope_x, slope_y
//! a = 0.2
//! omega = 2.0
//!
//! [robot]
//! class = "3R"          # 3R, 2R, RT, RS
//! radius = 0.2
//! phi_max = 0.7853981633974483
//!
//! [gains]
//! k_theta = 5.0
//! k_e = 1.0
//!
//! [path]
//! name = "paper-eq60-sine-corrected"
//! amplitude = 2.0
//! rate = 0.05
//!
//! [sim]
//! dt = 0.01
//! t_end = 100.0
//! z_tol = 1e-6
//! initial_state = { x = 0.5, y = -0.5 }
//!
//! [output]
//! emit_plot_script = true
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::Gains;
use crate::path::{DesiredPath, PathKind, PathVariant, BENCHMARK_AMPLITUDE, BENCHMARK_RATE};
use crate::robots::{RobotClass, RobotState};
use crate::sim::{self, Scenario, SimError};
use crate::terrain::{SinusoidalParams, Surface, Terrain};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("{}{field}: {reason}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid {
        field: String,
        reason: String,
        line: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SurfaceConfig {
    Sinusoidal {
        #[serde(default = "default_a")]
        a: f64,
        #[serde(default = "default_omega")]
        omega: f64,
    },
    Plane {
        #[serde(default)]
        slope_x: f64,
        #[serde(default)]
        slope_y: f64,
    },
}

fn default_a() -> f64 {
    sim::BENCHMARK_SURFACE.a
}
fn default_omega() -> f64 {
    sim::BENCHMARK_SURFACE.omega
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        SurfaceConfig::Sinusoidal {
            a: default_a(),
            omega: default_omega(),
        }
    }
}

impl SurfaceConfig {
    pub fn to_surface(&self) -> Surface {
        match *self {
            SurfaceConfig::Sinusoidal { a, omega } => {
                Surface::Sinusoidal(SinusoidalParams { a, omega })
            }
            SurfaceConfig::Plane { slope_x, slope_y } => Surface::Plane { slope_x, slope_y },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotConfig {
    pub class: String,
    pub radius: f64,
    pub phi_max: f64,
}

impl Default for RobotConfig {
    fn default() -> Self {
        RobotConfig {
            class: RobotClass::ThreeR.to_string(),
            radius: sim::BENCHMARK_RADIUS,
            phi_max: sim::DEFAULT_PHI_MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainsConfig {
    pub k_theta: f64,
    pub k_theta1: f64,
    pub k_theta2: f64,
    pub k_phi1: f64,
    pub k_phi2: f64,
    pub k_psi: f64,
    pub k_alpha: f64,
    pub k_phi: f64,
    pub k_e: f64,
}

impl Default for GainsConfig {
    fn default() -> Self {
        Gains::default().into()
    }
}

impl From<Gains> for GainsConfig {
    fn from(g: Gains) -> Self {
        GainsConfig {
            k_theta: g.k_theta,
            k_theta1: g.k_theta1,
            k_theta2: g.k_theta2,
            k_phi1: g.k_phi1,
            k_phi2: g.k_phi2,
            k_psi: g.k_psi,
            k_alpha: g.k_alpha,
            k_phi: g.k_phi,
            k_e: g.k_e,
        }
    }
}

impl From<&GainsConfig> for Gains {
    fn from(g: &GainsConfig) -> Self {
        Gains {
            k_theta: g.k_theta,
            k_theta1: g.k_theta1,
            k_theta2: g.k_theta2,
            k_phi1: g.k_phi1,
            k_phi2: g.k_phi2,
            k_psi: g.k_psi,
            k_alpha: g.k_alpha,
            k_phi: g.k_phi,
            k_e: g.k_e,
        }
    }
}

fn default_benchmark_amplitude() -> f64 {
    BENCHMARK_AMPLITUDE
}
fn default_benchmark_rate() -> f64 {
    BENCHMARK_RATE
}
fn default_circle_radius() -> f64 {
    1.0
}
fn default_circle_rate() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", deny_unknown_fields)]
pub enum PathConfig {
    #[serde(rename = "paper-eq60-literal")]
    BenchmarkLiteral {
        #[serde(default = "default_benchmark_amplitude")]
        amplitude: f64,
        #[serde(default = "default_benchmark_rate")]
        rate: f64,
    },
    #[serde(rename = "paper-eq60-sine-corrected")]
    BenchmarkSineCorrected {
        #[serde(default = "default_benchmark_amplitude")]
        amplitude: f64,
        #[serde(default = "default_benchmark_rate")]
        rate: f64,
    },
    #[serde(rename = "circle")]
    Circle {
        #[serde(default)]
        center_x: f64,
        #[serde(default)]
        center_y: f64,
        #[serde(default = "default_circle_radius")]
        radius: f64,
        #[serde(default = "default_circle_rate")]
        rate: f64,
        #[serde(default)]
        phase: f64,
    },
    #[serde(rename = "line")]
    Line {
        #[serde(default)]
        start_x: f64,
        #[serde(default)]
        start_y: f64,
        #[serde(default)]
        velocity_x: f64,
        #[serde(default)]
        velocity_y: f64,
    },
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig::BenchmarkSineCorrected {
            amplitude: BENCHMARK_AMPLITUDE,
            rate: BENCHMARK_RATE,
        }
    }
}

impl PathConfig {
    pub fn to_kind(&self) -> PathKind {
        match *self {
            PathConfig::BenchmarkLiteral { amplitude, rate } => PathKind::Benchmark {
                variant: PathVariant::Literal,
                amplitude,
                rate,
            },
            PathConfig::BenchmarkSineCorrected { amplitude, rate } => PathKind::Benchmark {
                variant: PathVariant::SineCorrected,
                amplitude,
                rate,
            },
            PathConfig::Circle {
                center_x,
                center_y,
                radius,
                rate,
                phase,
            } => PathKind::Circle {
                center: [center_x, center_y],
                radius,
                rate,
                phase,
            },
            PathConfig::Line {
                start_x,
                start_y,
                velocity_x,
                velocity_y,
            } => PathKind::Line {
                start: [start_x, start_y],
                velocity: [velocity_x, velocity_y],
            },
        }
    }

    /// Switches between the two benchmark variants, keeping their parameters.
    /// Other path kinds are replaced by the benchmark path.
    pub fn with_benchmark_variant(&self, variant: PathVariant) -> PathConfig {
        let (amplitude, rate) = match *self {
            PathConfig::BenchmarkLiteral { amplitude, rate }
            | PathConfig::BenchmarkSineCorrected { amplitude, rate } => (amplitude, rate),
            _ => (BENCHMARK_AMPLITUDE, BENCHMARK_RATE),
        };
        match variant {
            PathVariant::Literal => PathConfig::BenchmarkLiteral { amplitude, rate },
            PathVariant::SineCorrected => PathConfig::BenchmarkSineCorrected { amplitude, rate },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialStateConfig {
    pub x: f64,
    pub y: f64,
    /// Defaults to the surface height at `(x, y)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
    pub alpha: f64,
}

impl Default for InitialStateConfig {
    fn default() -> Self {
        InitialStateConfig {
            x: sim::DEFAULT_START[0],
            y: sim::DEFAULT_START[1],
            z: None,
            theta: 0.0,
            phi: 0.0,
            psi: 0.0,
            alpha: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub z_tol: f64,
    pub initial_state: InitialStateConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: sim::DEFAULT_DT,
            t_end: sim::DEFAULT_T_END,
            z_tol: sim::DEFAULT_Z_TOL,
            initial_state: InitialStateConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory; falls back to `$SPHEREKIN_OUT`, then `out`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    pub emit_plot_script: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub surface: SurfaceConfig,
    pub robot: RobotConfig,
    pub gains: GainsConfig,
    pub path: PathConfig,
    pub sim: SimConfig,
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn from_toml_str(src: &str) -> Result<Self, ConfigError> {
        toml::from_str(src).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let src = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&src)
    }

    /// Fully-defaulted serialization; parsing it yields an equal config.
    pub fn to_canonical_string(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// Builds and validates the scenario. `source` (the file text) is used
    /// only to attach line numbers to errors.
    pub fn to_scenario(&self, source: Option<&str>) -> Result<Scenario, ConfigError> {
        let err = |field: &str, reason: String| ConfigError::Invalid {
            line: source.and_then(|s| locate_key(s, field)),
            field: field.to_string(),
            reason,
        };

        let surface = self.surface.to_surface();
        surface.validate().map_err(|e| {
            let field = match e {
                crate::terrain::TerrainError::Amplitude(_) => "surface.a",
                crate::terrain::TerrainError::Frequency(_) => "surface.omega",
                crate::terrain::TerrainError::Slope(..) => "surface.slope_x",
            };
            err(field, e.to_string())
        })?;

        let class: RobotClass = self
            .robot
            .class
            .parse()
            .map_err(|e: crate::robots::RobotError| err("robot.class", e.to_string()))?;

        let gains = Gains::from(&self.gains);
        gains.validate().map_err(|e| {
            let crate::control::GainError::NonPositive { name, .. } = e;
            err(&format!("gains.{name}"), e.to_string())
        })?;

        let path = DesiredPath::new(self.path.to_kind(), surface)
            .map_err(|e| err("path", e.to_string()))?;

        let init = &self.sim.initial_state;
        let initial_state = RobotState {
            p0: [
                init.x,
                init.y,
                init.z.unwrap_or_else(|| surface.height(init.x, init.y)),
            ],
            theta: init.theta,
            phi: init.phi,
            psi: init.psi,
            alpha: init.alpha,
            t: 0.0,
        };

        let scenario = Scenario {
            surface,
            robot_class: class,
            radius: self.robot.radius,
            gains,
            path,
            t_end: self.sim.t_end,
            dt: self.sim.dt,
            initial_state,
            phi_max: self.robot.phi_max,
            z_tol: self.sim.z_tol,
        };
        scenario.validate().map_err(|e| match e {
            SimError::Invalid { field, reason } => {
                let path = match field {
                    "dt" | "t_end" | "z_tol" => format!("sim.{field}"),
                    "radius" | "phi_max" => format!("robot.{field}"),
                    f if f.starts_with("initial_state") => format!("sim.{f}"),
                    f => f.to_string(),
                };
                err(&path, reason)
            }
            other => err("scenario", other.to_string()),
        })?;
        Ok(scenario)
    }
}

/// Finds the 1-based line defining a dotted key such as `sim.dt` or
/// `sim.initial_state.psi`, following `[table]` headers and inline tables.
pub fn locate_key(source: &str, dotted: &str) -> Option<usize> {
    let parts: Vec<&str> = dotted.split('.').collect();
    let (key, tables) = parts.split_last()?;
    let mut current: Vec<String> = Vec::new();
    let mut fallback = None;
    for (i, raw) in source.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.starts_with('[') {
            let name = line.trim_matches(|c| c == '[' || c == ']').trim();
            current = name.split('.').map(|s| s.trim().to_string()).collect();
            continue;
        }
        let Some((lhs, rhs)) = line.split_once('=') else {
            continue;
        };
        let mut full = current.clone();
        full.extend(lhs.trim().split('.').map(|s| s.trim().to_string()));
        if full.len() == tables.len() + 1
            && full.last().map(String::as_str) == Some(*key)
            && full[..tables.len()]
                .iter()
                .map(String::as_str)
                .eq(tables.iter().copied())
        {
            return Some(i + 1);
        }
        // inline table: `initial_state = { psi = 1 }`
        let in_scope = full.len() <= tables.len()
            && full
                .iter()
                .map(String::as_str)
                .eq(tables[..full.len()].iter().copied());
        if in_scope && (rhs.contains(&format!("{key} ")) || rhs.contains(&format!("{key}="))) {
            fallback.get_or_insert(i + 1);
        }
    }
    fallback
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_benchmark() {
        let cfg = ScenarioConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        let sc = cfg.to_scenario(None).unwrap();
        assert_eq!(sc, Scenario::benchmark(RobotClass::ThreeR));
    }

    #[test]
    fn unknown_keys_rejected() {
        for src in [
            "bogus = 1",
            "[robot]\ncolour = \"red\"",
            "[surface]\nkind = \"plane\"\na = 0.2",
            "[path]\nname = \"circle\"\namplitude = 2.0",
            "[sim.initial_state]\nw = 1.0",
        ] {
            let err = ScenarioConfig::from_toml_str(src).unwrap_err();
            assert!(err.to_string().contains("line"), "{src}: {err}");
        }
    }

    #[test]
    fn canonical_round_trip() {
        let src = r#"
            [surface]
            kind = "plane"
            slope_x = 0.25
            [robot]
            class = "RS"
            [path]
            name = "circle"
            radius = 1.5
            [sim]
            initial_state = { x = 1.0, y = 2.0, z = 0.75 }
            [output]
            directory = "results"
        "#;
        let cfg = ScenarioConfig::from_toml_str(src).unwrap();
        let canon = cfg.to_canonical_string();
        let again = ScenarioConfig::from_toml_str(&canon).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(canon, again.to_canonical_string());
    }

    #[test]
    fn zero_dt_names_field_and_line() {
        let src = "[robot]\nclass = \"3R\"\n\n[sim]\ndt = 0.0\n";
        let cfg = ScenarioConfig::from_toml_str(src).unwrap();
        let err = cfg.to_scenario(Some(src)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sim.dt"), "{msg}");
        assert!(msg.starts_with("line 5:"), "{msg}");
    }

    #[test]
    fn two_r_with_heading_rejected() {
        let src = "[robot]\nclass = \"2R\"\n[sim.initial_state]\npsi = 0.5\n";
        let cfg = ScenarioConfig::from_toml_str(src).unwrap();
        let msg = cfg.to_scenario(Some(src)).unwrap_err().to_string();
        assert!(msg.contains("sim.initial_state.psi"), "{msg}");
        assert!(msg.starts_with("line 4:"), "{msg}");
    }

    #[test]
    fn bad_class_and_gain() {
        let cfg = ScenarioConfig::from_toml_str("[robot]\nclass = \"5R\"").unwrap();
        assert!(cfg
            .to_scenario(None)
            .unwrap_err()
            .to_string()
            .contains("robot.class"));
        let cfg = ScenarioConfig::from_toml_str("[gains]\nk_psi = -1.0").unwrap();
        assert!(cfg
            .to_scenario(None)
            .unwrap_err()
            .to_string()
            .contains("gains.k_psi"));
    }

    #[test]
    fn benchmark_variant_switch_keeps_parameters() {
        let p = PathConfig::BenchmarkSineCorrected {
            amplitude: 3.0,
            rate: 0.1,
        };
        assert_eq!(
            p.with_benchmark_variant(PathVariant::Literal),
            PathConfig::BenchmarkLiteral {
                amplitude: 3.0,
                rate: 0.1
            }
        );
    }

    #[test]
    fn locate_key_handles_tables() {
        let src = "[sim]\nt_end = 3\n[sim.initial_state]\nx = 1\npsi = 2\n";
        assert_eq!(locate_key(src, "sim.t_end"), Some(2));
        assert_eq!(locate_key(src, "sim.initial_state.psi"), Some(5));
        assert_eq!(locate_key(src, "sim.dt"), None);
    }
}
