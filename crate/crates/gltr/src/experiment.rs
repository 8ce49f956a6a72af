//! Builds the configured problem, drives the homotopy and writes the outputs.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gltr_core::elliptic::EllipticSolver;
use gltr_core::homotopy::{self, Aborted, Clock, IterationRecord, Observer, PhaseSummary, RunResult};
use gltr_core::objective::Target;
use gltr_core::problem::{EllipticTracking, ReducedObjective, WaveTracking};
use gltr_core::wave::WaveSolver;
use gltr_core::{ControlField, MeshCG1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, ProblemKind, RunConfig};
use crate::io::{format_summary, save_field, write_iterations};

/// Overrides `output.dir` when set.
pub const OUTPUT_DIR_ENV: &str = "GLTR_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Solver(#[from] gltr_core::Error),
    #[error("{0}")]
    Aborted(Box<Aborted>),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl ExperimentError {
    /// 1 for configuration problems, 2 for everything that fails later.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 1,
            _ => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// The reduced objective described by `cfg`, borrowing `mesh`.
pub fn build_problem<'m>(
    cfg: &RunConfig,
    mesh: &'m MeshCG1,
) -> Result<Box<dyn ReducedObjective + 'm>, ExperimentError> {
    let opts = cfg.linear_solver();
    let target = cfg.objective.target_spec.nodal(mesh);
    Ok(match cfg.problem {
        ProblemKind::Wave => {
            let solver = WaveSolver::new(mesh, cfg.wave_config()?, opts)?;
            let mask = cfg.objective.focal_region.mask(mesh);
            Box::new(WaveTracking::new(solver, Target::Static(target), mask)?)
        }
        ProblemKind::Elliptic => {
            // The focal region restricts where the target is tracked.
            let mask = cfg.objective.focal_region.mask(mesh);
            let solver = EllipticSolver::new(mesh, cfg.elliptic_config()?, opts)?;
            let target = target.iter().zip(&mask).map(|(t, m)| t * m).collect();
            Box::new(EllipticTracking::new(solver, target)?)
        }
    })
}

/// Seconds since construction.
#[derive(Debug, Clone, Copy)]
pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        WallClock(Instant::now())
    }
}

impl Clock for WallClock {
    fn now(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

struct FieldWriter<'a> {
    mesh: &'a MeshCG1,
    dir: &'a Path,
    enabled: bool,
    error: Option<ExperimentError>,
    log: bool,
}

impl Observer for FieldWriter<'_> {
    fn accepted(&mut self, record: &IterationRecord, w: &[f64]) {
        if !self.enabled || self.error.is_some() {
            return;
        }
        let path = self.dir.join(format!("w_accept_{}.field", record.n));
        if let Err(e) = save_field(&path, self.mesh, w) {
            self.error = Some(io_err(&path)(e));
        }
    }

    fn phase_finished(&mut self, p: &PhaseSummary) {
        if self.log {
            eprintln!(
                "eps {:.3e}: {} iterations, {} accepted, surrogate {:.3e} -> {:.3e}",
                p.eps, p.iterations, p.accepted, p.initial_surrogate, p.final_surrogate
            );
        }
    }
}

pub struct Outcome {
    pub result: RunResult,
    pub dir: PathBuf,
}

/// Output directory after applying the environment override.
pub fn output_dir(cfg: &RunConfig) -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| cfg.output.dir.clone())
}

fn write_logs(
    dir: &Path,
    records: &[IterationRecord],
    summary: &str,
    record_wall_time: bool,
) -> Result<(), ExperimentError> {
    let path = dir.join("iterations.csv");
    let file = fs::File::create(&path).map_err(io_err(&path))?;
    write_iterations(io::BufWriter::new(file), records, record_wall_time).map_err(io_err(&path))?;
    let path = dir.join("summary.txt");
    fs::write(&path, summary).map_err(io_err(&path))
}

/// Runs the homotopy for `cfg`, writing `iterations.csv`, `summary.txt`,
/// `w_final.field` and the accepted-iterate dumps into `dir`. A failed run
/// still writes its logs plus `w_postmortem.field` before returning the error.
pub fn run_experiment_in(cfg: &RunConfig, dir: &Path, verbose: bool) -> Result<Outcome, ExperimentError> {
    cfg.validate()?;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mesh = cfg.mesh()?;
    let problem = build_problem(cfg, &mesh)?;
    let params = cfg.homotopy_params();
    let w0 = ControlField::constant(mesh.n_nodes(), cfg.algorithm.w0_value);
    let mut observer = FieldWriter {
        mesh: &mesh,
        dir,
        enabled: cfg.output.dump_every_accept,
        error: None,
        log: verbose,
    };
    let clock = WallClock::start();
    let outcome = homotopy::run(&*problem, w0, &params, &clock, &mut observer);
    let wall = cfg.output.record_wall_time;
    match outcome {
        Ok(result) => {
            write_logs(
                dir,
                &result.records,
                &format_summary(&result.phases, Some(result.termination)),
                wall,
            )?;
            let path = dir.join("w_final.field");
            save_field(&path, &mesh, result.w()).map_err(io_err(&path))?;
            if let Some(e) = observer.error {
                return Err(e);
            }
            Ok(Outcome {
                result,
                dir: dir.to_path_buf(),
            })
        }
        Err(aborted) => {
            let mut summary = format_summary(&aborted.phases, None);
            summary.push_str(&format!("error: {aborted}\n"));
            write_logs(dir, &aborted.records, &summary, wall)?;
            let path = dir.join("w_postmortem.field");
            save_field(&path, &mesh, &aborted.state.w).map_err(io_err(&path))?;
            Err(ExperimentError::Aborted(aborted))
        }
    }
}

pub fn run_experiment(cfg: &RunConfig) -> Result<Outcome, ExperimentError> {
    run_experiment_in(cfg, &output_dir(cfg), false)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientReport {
    /// `|fd − ⟨j'(w), ξ⟩| / |⟨j'(w), ξ⟩|` per direction.
    pub relative_errors: Vec<f64>,
    pub step: f64,
}

impl GradientReport {
    pub fn max_error(&self) -> f64 {
        self.relative_errors.iter().copied().fold(0.0, f64::max)
    }
}

/// Default finite-difference step: the elliptic objective is quadratic, so a
/// larger step only reduces roundoff.
pub fn default_fd_step(kind: ProblemKind) -> f64 {
    match kind {
        ProblemKind::Elliptic => 1e-3,
        ProblemKind::Wave => 1e-4,
    }
}

/// Compares the adjoint gradient with central differences along
/// `n_directions` random directions at a random interior control.
pub fn check_gradient(
    cfg: &RunConfig,
    n_directions: usize,
    step: f64,
    seed: u64,
) -> Result<GradientReport, ExperimentError> {
    cfg.validate()?;
    let mesh = cfg.mesh()?;
    let problem = build_problem(cfg, &mesh)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = mesh.n_nodes();
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..0.8)).collect();
    let (_, g) = problem.value_and_gradient(&w)?;
    let d = problem.lumped();
    let mut relative_errors = Vec::with_capacity(n_directions);
    for _ in 0..n_directions {
        let xi: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let shifted = |s: f64| -> Vec<f64> { w.iter().zip(&xi).map(|(a, b)| a + s * b).collect() };
        let fd = (problem.value(&shifted(step))? - problem.value(&shifted(-step))?) / (2.0 * step);
        let adjoint: f64 = g.iter().zip(&xi).zip(d).map(|((gi, x), di)| di * gi * x).sum();
        relative_errors.push((fd - adjoint).abs() / adjoint.abs());
    }
    Ok(GradientReport { relative_errors, step })
}
