//! Run configuration: TOML schema, defaults and load-time validation.

use std::fmt;
use std::path::{Path, PathBuf};

use gltr_core::elliptic::{ControlOperator, EllipticConfig};
use gltr_core::homotopy::{HomotopyParams, SubproblemMode};
use gltr_core::linsolve::SolverOptions;
use gltr_core::mesh::{MeshCG1, Rect};
use gltr_core::subproblem::{ConvexOptions, NonconvexOptions};
use gltr_core::wave::{InitialData, SourceSpec, WaveConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Elliptic,
    Wave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub mesh: MeshSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSection>,
    pub physics: Physics,
    pub objective: ObjectiveSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceSection>,
    pub algorithm: AlgorithmSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    /// `[x_min, x_max, y_min, y_max]`
    pub bounds: [f64; 4],
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(rename = "T")]
    pub t_final: f64,
    pub n_steps: usize,
}

/// Wave keys `c_sq, b, sigma` or elliptic keys `nu, B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Physics {
    Wave(WavePhysics),
    Elliptic(EllipticPhysics),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavePhysics {
    pub c_sq: f64,
    pub b: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipticPhysics {
    pub nu: f64,
    #[serde(rename = "B")]
    pub control_operator: OperatorSpec,
}

/// `B = "identity"` or `B = { mollifier = <radius> }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorSpec {
    Identity,
    Mollifier(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSection {
    pub gamma: f64,
    #[serde(default = "default_focal_region")]
    pub focal_region: Region,
    #[serde(default = "default_target")]
    pub target_spec: TargetSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Everywhere,
    Disk { center: [f64; 2], radius: f64 },
}

/// Time-constant desired state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSpec {
    Constant(f64),
    /// `amplitude · exp(−|x − center|² / (2 width²))`
    Gaussian {
        amplitude: f64,
        center: [f64; 2],
        width: f64,
    },
}

fn default_focal_region() -> Region {
    Region::Disk {
        center: [0.0, 1.25],
        radius: 0.3,
    }
}

fn default_target() -> TargetSpec {
    TargetSpec::Gaussian {
        amplitude: 0.5,
        center: [0.0, 1.25],
        width: 0.1,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub amplitude: f64,
    pub center: [f64; 2],
    pub spatial_width: f64,
    pub f0: f64,
    pub t0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    ConvexOnly,
    WithNonconvex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSection {
    pub delta0: f64,
    pub eps0: f64,
    pub r: f64,
    pub rho: f64,
    pub kappa0: f64,
    pub delta_floor0: f64,
    pub w0_value: f64,
    pub mode: Mode,
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    /// Relative residual target of the linear solves.
    pub tol: f64,
    pub max_iter: usize,
    pub subproblem_tol: f64,
    pub subproblem_max_iter: usize,
    pub n_starts: usize,
    pub seed: u64,
    pub pred_tol: f64,
    /// Seconds; unlimited when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_wall_time: Option<f64>,
}

impl Default for SolverSection {
    fn default() -> Self {
        let nc = NonconvexOptions::default();
        SolverSection {
            tol: 1e-12,
            max_iter: 20_000,
            subproblem_tol: ConvexOptions::default().tol,
            subproblem_max_iter: ConvexOptions::default().max_iter,
            n_starts: nc.n_starts,
            seed: 0,
            pred_tol: HomotopyParams::default().pred_tol,
            max_wall_time: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub dump_every_accept: bool,
    /// Write measured seconds into the `wall_time` column; off keeps the
    /// log byte-identical across reruns.
    pub record_wall_time: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("output"),
            dump_every_accept: true,
            record_wall_time: false,
        }
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io { path: PathBuf, source: std::io::Error },
    Parse { line: Option<usize>, message: String },
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => write!(f, "cannot read {}: {source}", path.display()),
            ConfigError::Parse {
                line: Some(line),
                message,
            } => write!(f, "parse error at line {line}: {message}"),
            ConfigError::Parse { line: None, message } => write!(f, "parse error: {message}"),
            ConfigError::Invalid(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ConfigError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e
            .span()
            .map(|s| 1 + text[..s.start.min(text.len())].matches('\n').count()),
        message: e.message().trim_end().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn to_toml(cfg: &RunConfig) -> String {
    toml::to_string(cfg).expect("every RunConfig serializes")
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.mesh().map_err(|e| invalid(e.to_string()))?;
        match (&self.problem, &self.physics) {
            (ProblemKind::Wave, Physics::Wave(_)) => {
                let wave = self.wave_config()?;
                wave.validate().map_err(|e| invalid(e.to_string()))?;
            }
            (ProblemKind::Elliptic, Physics::Elliptic(_)) => {
                if self.time.is_some() || self.source.is_some() {
                    return Err(invalid("[time] and [source] apply to wave problems only"));
                }
                self.elliptic_config()?.validate().map_err(|e| invalid(e.to_string()))?;
            }
            (ProblemKind::Wave, _) => return Err(invalid("wave physics needs c_sq, b and sigma")),
            (ProblemKind::Elliptic, _) => return Err(invalid("elliptic physics needs nu and B")),
        }
        let o = &self.objective;
        match o.focal_region {
            Region::Everywhere => {}
            Region::Disk { center, radius } => {
                if !(radius > 0.0) || !center.iter().all(|c| c.is_finite()) {
                    return Err(invalid("focal_region disk needs a finite center and positive radius"));
                }
            }
        }
        match o.target_spec {
            TargetSpec::Constant(v) if !v.is_finite() => return Err(invalid("target value must be finite")),
            TargetSpec::Gaussian {
                amplitude,
                center,
                width,
            } if !(width > 0.0) || !amplitude.is_finite() || !center.iter().all(|c| c.is_finite()) => {
                return Err(invalid(
                    "target gaussian needs finite amplitude and center and positive width",
                ));
            }
            _ => {}
        }
        let a = &self.algorithm;
        if !(0.0..=1.0).contains(&a.w0_value) {
            return Err(invalid("w0_value must lie in [0, 1]"));
        }
        let s = &self.solver;
        if s.n_starts < 2 {
            return Err(invalid("n_starts must be at least 2"));
        }
        if !(s.subproblem_tol > 0.0) || s.subproblem_max_iter == 0 {
            return Err(invalid("subproblem_tol and subproblem_max_iter must be positive"));
        }
        if !(s.pred_tol >= 0.0) {
            return Err(invalid("pred_tol must be non-negative"));
        }
        if let Some(t) = s.max_wall_time {
            if !(t > 0.0) {
                return Err(invalid("max_wall_time must be positive"));
            }
        }
        self.linear_solver().validate().map_err(|e| invalid(e.to_string()))?;
        self.homotopy_params().validate().map_err(|e| invalid(e.to_string()))?;
        Ok(())
    }

    pub fn bounds(&self) -> Rect {
        let [x0, x1, y0, y1] = self.mesh.bounds;
        Rect::new(x0, x1, y0, y1)
    }

    pub fn mesh(&self) -> gltr_core::Result<MeshCG1> {
        MeshCG1::build(self.bounds(), self.mesh.nx, self.mesh.ny)
    }

    pub fn linear_solver(&self) -> SolverOptions {
        SolverOptions {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
        }
    }

    pub fn wave_config(&self) -> Result<WaveConfig, ConfigError> {
        let Physics::Wave(p) = &self.physics else {
            return Err(invalid("not a wave configuration"));
        };
        let time = self
            .time
            .as_ref()
            .ok_or_else(|| invalid("wave problems need a [time] section"))?;
        let s = self
            .source
            .as_ref()
            .ok_or_else(|| invalid("wave problems need a [source] section"))?;
        Ok(WaveConfig {
            c_sq: p.c_sq,
            b: p.b,
            sigma: p.sigma,
            t_final: time.t_final,
            n_steps: time.n_steps,
            source: SourceSpec {
                amplitude: s.amplitude,
                center: s.center,
                spatial_width: s.spatial_width,
                f0: s.f0,
                t0: s.t0,
            },
            u0: InitialData::Zero,
            u1: InitialData::Zero,
        })
    }

    pub fn elliptic_config(&self) -> Result<EllipticConfig, ConfigError> {
        let Physics::Elliptic(p) = &self.physics else {
            return Err(invalid("not an elliptic configuration"));
        };
        Ok(EllipticConfig {
            nu: p.nu,
            source: None,
            operator: match p.control_operator {
                OperatorSpec::Identity => ControlOperator::Identity,
                OperatorSpec::Mollifier(radius) => ControlOperator::Mollifier { radius },
            },
        })
    }

    pub fn homotopy_params(&self) -> HomotopyParams {
        let a = &self.algorithm;
        let s = &self.solver;
        let convex = ConvexOptions {
            tol: s.subproblem_tol,
            max_iter: s.subproblem_max_iter,
        };
        HomotopyParams {
            delta0: a.delta0,
            eps0: a.eps0,
            r: a.r,
            rho: a.rho,
            kappa0: a.kappa0,
            delta_floor0: a.delta_floor0,
            gamma: self.objective.gamma,
            max_iter: a.max_iter,
            max_wall_time: s.max_wall_time,
            pred_tol: s.pred_tol,
            mode: match a.mode {
                Mode::ConvexOnly => SubproblemMode::ConvexOnly,
                Mode::WithNonconvex => SubproblemMode::WithNonconvex,
            },
            convex,
            nonconvex: NonconvexOptions {
                tol: s.subproblem_tol,
                max_iter: s.subproblem_max_iter,
                n_starts: s.n_starts,
                seed: s.seed,
                convex,
            },
        }
    }
}

impl Region {
    pub fn mask(&self, mesh: &MeshCG1) -> Vec<f64> {
        match *self {
            Region::Everywhere => vec![1.0; mesh.n_nodes()],
            Region::Disk { center, radius } => mesh.interpolate(|x, y| {
                let (dx, dy) = (x - center[0], y - center[1]);
                if dx * dx + dy * dy <= radius * radius {
                    1.0
                } else {
                    0.0
                }
            }),
        }
    }
}

impl TargetSpec {
    pub fn nodal(&self, mesh: &MeshCG1) -> Vec<f64> {
        match *self {
            TargetSpec::Constant(v) => vec![v; mesh.n_nodes()],
            TargetSpec::Gaussian {
                amplitude,
                center,
                width,
            } => mesh.interpolate(|x, y| {
                let (dx, dy) = (x - center[0], y - center[1]);
                amplitude * (-(dx * dx + dy * dy) / (2.0 * width * width)).exp()
            }),
        }
    }
}
