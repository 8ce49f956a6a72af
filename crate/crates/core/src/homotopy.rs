//! Homotopy trust-region driver: trust-region steps on `j + γE_ε` with the
//! interface width ε driven to zero whenever the radius collapses below its
//! floor in both the convex and the nonconvex round.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::field::ControlField;
use crate::objective::{gl_energy_with, nonbinary_fraction, GLParams};
use crate::problem::ReducedObjective;
use crate::subproblem::{
    solve_convex, solve_nonconvex, ConvexOptions, NonconvexOptions, SubproblemResult, SubproblemSpec,
    TrustRegionMetric, Variant,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubproblemMode {
    /// Only the linearized subproblem is ever solved, also in the round
    /// where the nonconvex one would be.
    ConvexOnly,
    WithNonconvex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyParams {
    pub delta0: f64,
    pub eps0: f64,
    pub r: f64,
    pub rho: f64,
    pub kappa0: f64,
    pub delta_floor0: f64,
    pub gamma: f64,
    pub max_iter: usize,
    /// Wall-clock budget in seconds, measured with the supplied [`Clock`].
    pub max_wall_time: Option<f64>,
    /// Steps whose predicted reduction does not exceed this are rejected.
    pub pred_tol: f64,
    pub mode: SubproblemMode,
    pub convex: ConvexOptions,
    pub nonconvex: NonconvexOptions,
}

impl Default for HomotopyParams {
    fn default() -> Self {
        HomotopyParams {
            delta0: 1.5,
            eps0: 1.0,
            r: 5.0,
            rho: 1e-4,
            kappa0: 1e-8,
            delta_floor0: 1.14e-5,
            gamma: 7.5e-6,
            max_iter: 1000,
            max_wall_time: None,
            pred_tol: 1e-14,
            mode: SubproblemMode::ConvexOnly,
            convex: ConvexOptions::default(),
            nonconvex: NonconvexOptions::default(),
        }
    }
}

impl HomotopyParams {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.delta0) {
            return Err(Error::InvalidParameter("delta0 must be positive"));
        }
        if !pos(self.eps0) {
            return Err(Error::InvalidParameter("eps0 must be positive"));
        }
        if !(self.r > 4.0) || !self.r.is_finite() {
            return Err(Error::InvalidParameter("r > 4 required"));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidParameter("rho must lie in (0, 1)"));
        }
        if !(self.kappa0 > 0.0 && self.kappa0 < self.rho) {
            return Err(Error::InvalidParameter("0 < kappa0 < rho required"));
        }
        if !(self.delta_floor0 > 0.0 && self.delta_floor0 < self.delta0) {
            return Err(Error::InvalidParameter("0 < delta_floor0 < delta0 required"));
        }
        if !pos(self.gamma) {
            return Err(Error::InvalidParameter("gamma must be positive"));
        }
        if !(self.pred_tol >= 0.0) {
            return Err(Error::InvalidParameter("pred_tol must be non-negative"));
        }
        if let Some(t) = self.max_wall_time {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter("max_wall_time must be positive"));
            }
        }
        if !(self.convex.tol > 0.0) || !(self.nonconvex.tol > 0.0) {
            return Err(Error::InvalidParameter("subproblem tolerances must be positive"));
        }
        if self.nonconvex.n_starts < 2 {
            return Err(Error::InvalidParameter("n_starts must be at least 2"));
        }
        Ok(())
    }

    fn gl(&self, eps: f64) -> GLParams {
        GLParams {
            epsilon: eps,
            gamma: self.gamma,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrustRegionState {
    pub n: usize,
    pub w: ControlField,
    pub delta: f64,
    pub delta_floor: f64,
    pub eps: f64,
    pub kappa: f64,
    pub cvxflag: bool,
    /// Lumped Riesz representative of `j'(w)`.
    pub grad_cache: Vec<f64>,
    pub j_value: f64,
    /// `E_ε(w)` at the current ε.
    pub gl_energy: f64,
    /// Number of ε reductions so far.
    pub reductions: u32,
    pub phase_accepted: usize,
}

impl TrustRegionState {
    pub fn total(&self, gamma: f64) -> f64 {
        self.j_value + gamma * self.gl_energy
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub cvxflag: bool,
    pub accepted: bool,
    /// Objective parts at the iterate after this step, with this step's ε.
    pub j_value: f64,
    pub gl_energy: f64,
    pub total: f64,
    pub ared: f64,
    pub pred: f64,
    /// `ared / pred`, NaN when `pred ≤ 0`.
    pub ratio: f64,
    pub nonbinary_fraction: f64,
    pub wall_time: f64,
}

/// What the radius logic did after a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleEvent {
    None,
    /// The convex round collapsed; the nonconvex round starts at Δ⁰.
    SwitchToNonconvex,
    /// Both rounds collapsed; ε, κ and Δ̲ were reduced.
    ReduceEpsilon,
}

/// Applies the acceptance and radius updates to `state` (everything except
/// replacing `w` and its cached values).
pub fn update_schedule(state: &mut TrustRegionState, accepted: bool, params: &HomotopyParams) -> ScheduleEvent {
    if accepted {
        state.delta = params.delta0.min(2.0 * state.delta);
        state.cvxflag = true;
        state.phase_accepted += 1;
    } else {
        state.delta *= 0.5;
    }
    if state.delta >= state.delta_floor {
        return ScheduleEvent::None;
    }
    state.delta = params.delta0;
    if state.cvxflag {
        state.cvxflag = false;
        ScheduleEvent::SwitchToNonconvex
    } else {
        state.cvxflag = true;
        state.delta_floor *= 0.5;
        state.eps /= params.r;
        state.kappa *= 0.5;
        state.reductions += 1;
        ScheduleEvent::ReduceEpsilon
    }
}

/// Acceptance test: sufficient decrease relative to the prediction and an
/// absolute floor `κΔ̲`.
pub fn accepts(ared: f64, pred: f64, kappa: f64, delta_floor: f64, params: &HomotopyParams) -> bool {
    pred > params.pred_tol && ared >= params.rho * pred && ared > kappa * delta_floor
}

/// `j(w) + γE_ε(w) − j(v) − γE_ε(v)` with fresh objective evaluations.
pub fn ared<P: ReducedObjective + ?Sized>(problem: &P, w: &[f64], v: &[f64], gl: GLParams) -> Result<f64> {
    let total = |x: &[f64]| -> Result<f64> {
        Ok(problem.value(x)? + gl.gamma * gl_energy_with(x, gl.epsilon, problem.lumped(), problem.laplacian())?)
    };
    Ok(total(w)? - total(v)?)
}

/// Predicted reduction of the convex subproblem at the reset radius Δ⁰.
pub fn instationarity_surrogate(
    state: &TrustRegionState,
    metric: &TrustRegionMetric<'_>,
    params: &HomotopyParams,
) -> Result<f64> {
    let spec = SubproblemSpec {
        metric,
        w_bar: &state.w,
        g: &state.grad_cache,
        delta: params.delta0,
        gl: params.gl(state.eps),
    };
    Ok(0.0 - solve_convex(&spec, &params.convex)?.objective_value)
}

/// Monotone time source in seconds.
pub trait Clock {
    fn now(&self) -> f64;
}

/// A clock that never advances; makes logs independent of timing.
#[derive(Debug, Clone, Copy, Default)]
pub struct FrozenClock;

impl Clock for FrozenClock {
    fn now(&self) -> f64 {
        0.0
    }
}

/// Hooks called by [`run`].
pub trait Observer {
    fn record(&mut self, _record: &IterationRecord) {}
    fn accepted(&mut self, _record: &IterationRecord, _w: &[f64]) {}
    fn phase_finished(&mut self, _summary: &PhaseSummary) {}
}

impl Observer for () {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSummary {
    pub eps: f64,
    pub iterations: usize,
    pub accepted: usize,
    pub initial_surrogate: f64,
    pub final_surrogate: f64,
    /// Of the last accepted iterate, `None` if nothing was accepted.
    pub final_nonbinary_fraction: Option<f64>,
    pub final_total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// ε was about to be reduced after a phase without accepted steps.
    NoProgress,
    MaxIterations,
    WallTime,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::NoProgress => "no progress",
            Termination::MaxIterations => "iteration limit",
            Termination::WallTime => "wall-time limit",
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub state: TrustRegionState,
    pub records: Vec<IterationRecord>,
    pub phases: Vec<PhaseSummary>,
    pub termination: Termination,
}

impl RunResult {
    pub fn w(&self) -> &ControlField {
        &self.state.w
    }
}

/// A run that failed after it started, with everything gathered so far.
#[derive(Debug, Clone)]
pub struct Aborted {
    pub error: Error,
    pub state: TrustRegionState,
    pub records: Vec<IterationRecord>,
    pub phases: Vec<PhaseSummary>,
}

impl fmt::Display for Aborted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "run aborted at iteration {}: {}", self.state.n, self.error)
    }
}

impl core::error::Error for Aborted {}

/// Evaluates `j`, its gradient and `E_ε` at `w0` and sets up the initial
/// state.
pub fn initial_state<P: ReducedObjective + ?Sized>(
    problem: &P,
    w0: ControlField,
    params: &HomotopyParams,
) -> Result<TrustRegionState> {
    params.validate()?;
    if let Some(index) = w0.iter().position(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Infeasible {
            index,
            value: w0[index],
        });
    }
    let (j_value, grad_cache) = problem.value_and_gradient(&w0)?;
    let gl_energy = gl_energy_with(&w0, params.eps0, problem.lumped(), problem.laplacian())?;
    Ok(TrustRegionState {
        n: 0,
        w: w0,
        delta: params.delta0,
        delta_floor: params.delta_floor0,
        eps: params.eps0,
        kappa: params.kappa0,
        cvxflag: true,
        grad_cache,
        j_value,
        gl_energy,
        reductions: 0,
        phase_accepted: 0,
    })
}

/// One trust-region iteration. `elapsed` is stored in the record.
pub fn step<P: ReducedObjective + ?Sized>(
    state: &mut TrustRegionState,
    problem: &P,
    metric: &TrustRegionMetric<'_>,
    params: &HomotopyParams,
    elapsed: f64,
) -> Result<(IterationRecord, ScheduleEvent)> {
    let gl = params.gl(state.eps);
    let variant = if state.cvxflag || params.mode == SubproblemMode::ConvexOnly {
        Variant::Convex
    } else {
        Variant::Nonconvex
    };
    let spec = SubproblemSpec {
        metric,
        w_bar: &state.w,
        g: &state.grad_cache,
        delta: state.delta,
        gl,
    };
    let SubproblemResult {
        w_star,
        objective_value,
        ..
    } = match variant {
        Variant::Convex => solve_convex(&spec, &params.convex)?,
        Variant::Nonconvex => {
            let mut opts = params.nonconvex;
            opts.seed = opts.seed.wrapping_add(state.n as u64);
            solve_nonconvex(&spec, &opts)?
        }
    };
    let pred = 0.0 - objective_value;

    let lumped = problem.lumped();
    let laplacian = problem.laplacian();
    let current_total = state.total(params.gamma);
    let (trial_e, ared) = if w_star[..] == state.w[..] {
        (state.gl_energy, 0.0)
    } else {
        let j = problem.value(&w_star)?;
        let e = gl_energy_with(&w_star, gl.epsilon, lumped, laplacian)?;
        (e, current_total - (j + params.gamma * e))
    };
    let accepted = accepts(ared, pred, state.kappa, state.delta_floor, params);

    let record_base = IterationRecord {
        n: state.n,
        eps: state.eps,
        delta: state.delta,
        cvxflag: state.cvxflag,
        accepted,
        j_value: state.j_value,
        gl_energy: state.gl_energy,
        total: current_total,
        ared,
        pred,
        ratio: if pred > 0.0 { ared / pred } else { f64::NAN },
        nonbinary_fraction: 0.0,
        wall_time: elapsed,
    };

    let record = if accepted {
        let (j, grad) = problem.value_and_gradient(&w_star)?;
        state.w = w_star;
        state.j_value = j;
        state.grad_cache = grad;
        state.gl_energy = trial_e;
        IterationRecord {
            j_value: j,
            gl_energy: trial_e,
            total: j + params.gamma * trial_e,
            ..record_base
        }
    } else {
        record_base
    };
    let record = IterationRecord {
        nonbinary_fraction: nonbinary_fraction(&state.w, lumped),
        ..record
    };

    let event = update_schedule(state, accepted, params);
    if event == ScheduleEvent::ReduceEpsilon {
        state.gl_energy = gl_energy_with(&state.w, state.eps, lumped, laplacian)?;
    }
    state.n += 1;
    Ok((record, event))
}

/// Runs the homotopy trust-region method from `w0`.
pub fn run<P, C, O>(
    problem: &P,
    w0: ControlField,
    params: &HomotopyParams,
    clock: &C,
    observer: &mut O,
) -> core::result::Result<RunResult, Box<Aborted>>
where
    P: ReducedObjective + ?Sized,
    C: Clock + ?Sized,
    O: Observer + ?Sized,
{
    let start = clock.now();
    let fallback = || TrustRegionState {
        n: 0,
        w: w0.clone(),
        delta: params.delta0,
        delta_floor: params.delta_floor0,
        eps: params.eps0,
        kappa: params.kappa0,
        cvxflag: true,
        grad_cache: Vec::new(),
        j_value: f64::NAN,
        gl_energy: f64::NAN,
        reductions: 0,
        phase_accepted: 0,
    };
    let abort_early = |error: Error| {
        Box::new(Aborted {
            error,
            state: fallback(),
            records: Vec::new(),
            phases: Vec::new(),
        })
    };

    let metric = TrustRegionMetric::new(problem.lumped(), problem.laplacian()).map_err(abort_early)?;
    let mut state = initial_state(problem, w0.clone(), params).map_err(abort_early)?;
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut phases: Vec<PhaseSummary> = Vec::new();

    macro_rules! bail {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(error) => {
                    return Err(Box::new(Aborted {
                        error,
                        state,
                        records,
                        phases,
                    }))
                }
            }
        };
    }

    let mut phase = PhaseSummary {
        eps: state.eps,
        iterations: 0,
        accepted: 0,
        initial_surrogate: bail!(instationarity_surrogate(&state, &metric, params)),
        final_surrogate: f64::NAN,
        final_nonbinary_fraction: None,
        final_total: state.total(params.gamma),
    };

    let termination = loop {
        if records.len() >= params.max_iter {
            break Termination::MaxIterations;
        }
        let elapsed = clock.now() - start;
        if params.max_wall_time.is_some_and(|t| elapsed > t) {
            break Termination::WallTime;
        }

        let eps_before = state.eps;
        let (record, event) = bail!(step(&mut state, problem, &metric, params, elapsed));
        observer.record(&record);
        if record.accepted {
            observer.accepted(&record, &state.w);
            phase.final_nonbinary_fraction = Some(record.nonbinary_fraction);
        }
        phase.iterations += 1;
        phase.accepted = state.phase_accepted;
        phase.final_total = record.total;
        records.push(record);

        if event == ScheduleEvent::ReduceEpsilon {
            // The surrogate closing this phase uses the phase's own ε.
            let closing = TrustRegionState {
                eps: eps_before,
                ..state.clone()
            };
            phase.final_surrogate = bail!(instationarity_surrogate(&closing, &metric, params));
            observer.phase_finished(&phase);
            phases.push(phase);
            if state.phase_accepted == 0 {
                // Undo the reduction so the returned state is the last one
                // the stopping rule looked at.
                state.eps = eps_before;
                state.delta_floor *= 2.0;
                state.kappa *= 2.0;
                state.reductions -= 1;
                state.gl_energy = bail!(gl_energy_with(
                    &state.w,
                    state.eps,
                    problem.lumped(),
                    problem.laplacian()
                ));
                return Ok(RunResult {
                    state,
                    records,
                    phases,
                    termination: Termination::NoProgress,
                });
            }
            state.phase_accepted = 0;
            phase = PhaseSummary {
                eps: state.eps,
                iterations: 0,
                accepted: 0,
                initial_surrogate: bail!(instationarity_surrogate(&state, &metric, params)),
                final_surrogate: f64::NAN,
                final_nonbinary_fraction: None,
                final_total: state.total(params.gamma),
            };
        }
    };

    phase.final_surrogate = bail!(instationarity_surrogate(&state, &metric, params));
    observer.phase_finished(&phase);
    phases.push(phase);
    Ok(RunResult {
        state,
        records,
        phases,
        termination,
    })
}
