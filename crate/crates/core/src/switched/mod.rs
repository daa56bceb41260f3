//! Continuous-time switched systems `ẋ = A(t)x` with `A(t)` in a matrix
//! polytope.
//!
//! Vertex indices are 0-based here; the CSV writers print them 1-based and
//! use `0` for a mixed (non-vertex) combination.

mod assess;
mod experiment;

pub use assess::{assess_switched_stabilizability, AssessConfig, StabilizabilityReport, Verdict, DECAY_MARGIN};
pub use experiment::{
    conjecture_experiment, rows_to_csv, ExperimentConfig, ExperimentError, ExperimentRow, Flag, EXPERIMENT_CSV_HEADER,
};

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::matrix::Matrix;
use crate::reductions::{convex_combination, MatrixPolytope};
use crate::simplex::SimplexPoint;

/// A run is stopped as divergent once `‖x‖` exceeds this.
pub const DIVERGENCE_NORM: f64 = 1e12;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("horizon {horizon} is shorter than the step {step}")]
    BadHorizon { horizon: f64, step: f64 },
    #[error("initial state has dimension {found}, expected {expected}")]
    BadInitialState { expected: usize, found: usize },
    #[error("state became non-finite at t = {time}")]
    NumericFailure { time: f64 },
}

/// How the active matrix is chosen along a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SwitchingPolicy {
    Constant(usize),
    /// `(index, duration)` segments, repeated cyclically.
    Periodic(Vec<(usize, f64)>),
    /// At each sample instant, the vertex minimizing `xᵀ(A_i + A_iᵀ)x`
    /// (lowest index on ties).
    MinProjection {
        sample_period: f64,
    },
    /// The fixed combination `Σ π_i A_i`.
    ConstantMix(SimplexPoint),
}

impl SwitchingPolicy {
    pub fn validate(&self, k: usize) -> Result<(), SimError> {
        let index_ok = |i: usize| {
            if i < k {
                Ok(())
            } else {
                Err(SimError::InvalidPolicy(format!(
                    "index {i} out of range for {k} matrices"
                )))
            }
        };
        match self {
            Self::Constant(i) => index_ok(*i),
            Self::Periodic(schedule) => {
                if schedule.is_empty() {
                    return Err(SimError::InvalidPolicy("empty schedule".into()));
                }
                for &(i, d) in schedule {
                    index_ok(i)?;
                    if !(d > 0.0 && d.is_finite()) {
                        return Err(SimError::InvalidPolicy(format!("duration {d} must be positive")));
                    }
                }
                Ok(())
            }
            Self::MinProjection { sample_period } => {
                if *sample_period > 0.0 && sample_period.is_finite() {
                    Ok(())
                } else {
                    Err(SimError::InvalidPolicy(format!(
                        "sample period {sample_period} must be positive"
                    )))
                }
            }
            Self::ConstantMix(pi) => {
                if pi.len() == k {
                    Ok(())
                } else {
                    Err(SimError::InvalidPolicy(format!(
                        "{} weights for {k} matrices",
                        pi.len()
                    )))
                }
            }
        }
    }
}

/// The matrix driving the dynamics: a vertex, or a mixed combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    Vertex(usize),
    Mix,
}

impl Mode {
    /// 1-based vertex index, `0` for a mix.
    pub fn csv_index(self) -> usize {
        match self {
            Self::Vertex(i) => i + 1,
            Self::Mix => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Termination {
    Completed,
    Diverged,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Mode in force on the step starting at each time (the last entry
    /// repeats the final mode).
    pub active: Vec<Mode>,
    /// `(time, mode)` at the start and at every change.
    pub switch_log: Vec<(f64, Mode)>,
    pub termination: Termination,
}

impl Trajectory {
    /// Rows `t,x_1..x_n,active_index`.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 1..=n {
            write!(out, ",x_{i}").unwrap();
        }
        out.push_str(",active_index\n");
        for ((t, x), mode) in self.times.iter().zip(&self.states).zip(&self.active) {
            write!(out, "{t:e}").unwrap();
            for v in x {
                write!(out, ",{v:e}").unwrap();
            }
            writeln!(out, ",{}", mode.csv_index()).unwrap();
        }
        out
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectories are nonempty")
    }

    /// Same estimate as [`assess_switched_stabilizability`] uses per run.
    pub fn decay_rate_estimate(&self) -> f64 {
        let end = *self.times.last().expect("trajectories are nonempty");
        let mid = self
            .times
            .iter()
            .position(|&t| t >= end / 2.0)
            .expect("the last time qualifies");
        rate_estimate(
            end,
            norm(self.final_state()),
            (self.times[mid], norm(&self.states[mid])),
            self.termination,
            norm(&self.states[0]),
        )
    }
}

/// Exponential rate over the second half of a run,
/// `(ln‖x(T)‖ − ln‖x(T/2)‖)/(T − T/2)`. Transients and neutral modes
/// therefore do not pass for decay. Divergent runs, which stop early, use
/// the whole run.
pub(crate) fn rate_estimate(
    final_time: f64,
    final_norm: f64,
    midpoint: (f64, f64),
    termination: Termination,
    x0_norm: f64,
) -> f64 {
    let (t0, n0) = match termination {
        Termination::Completed if final_time > midpoint.0 => midpoint,
        _ => (0.0, x0_norm),
    };
    (final_norm.ln() - n0.ln()) / (final_time - t0)
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Summary of a run that does not keep the states.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RunSummary {
    pub final_time: f64,
    pub final_norm: f64,
    /// `(time, ‖x‖)` at the first step reaching half the horizon.
    pub midpoint: (f64, f64),
    pub termination: Termination,
}

/// Observer of a run, called with each accepted state and its mode.
trait Recorder {
    fn record(&mut self, t: f64, x: &[f64], mode: Mode);
}

impl Recorder for Trajectory {
    fn record(&mut self, t: f64, x: &[f64], mode: Mode) {
        if self.switch_log.last().is_none_or(|&(_, m)| m != mode) {
            self.switch_log.push((t, mode));
        }
        self.times.push(t);
        self.states.push(x.to_vec());
        self.active.push(mode);
    }
}

struct NoRecord;

impl Recorder for NoRecord {
    fn record(&mut self, _: f64, _: &[f64], _: Mode) {}
}

struct Driver<'a> {
    polytope: &'a MatrixPolytope,
    policy: &'a SwitchingPolicy,
    /// `A_i + A_iᵀ` for the min-projection law.
    symmetric: Vec<Matrix>,
    mix: Option<Matrix>,
    period: f64,
}

impl<'a> Driver<'a> {
    fn new(polytope: &'a MatrixPolytope, policy: &'a SwitchingPolicy) -> Self {
        let symmetric = match policy {
            SwitchingPolicy::MinProjection { .. } => polytope
                .matrices()
                .iter()
                .map(|a| {
                    let mut s = a.transpose();
                    s.add_scaled(1.0, a);
                    s
                })
                .collect(),
            _ => Vec::new(),
        };
        let mix = match policy {
            SwitchingPolicy::ConstantMix(pi) => Some(convex_combination(polytope, pi).expect("validated length")),
            _ => None,
        };
        let period = match policy {
            SwitchingPolicy::Periodic(s) => s.iter().map(|&(_, d)| d).sum(),
            _ => 0.0,
        };
        Self {
            polytope,
            policy,
            symmetric,
            mix,
            period,
        }
    }

    fn matrix(&self, mode: Mode) -> &Matrix {
        match mode {
            Mode::Vertex(i) => &self.polytope.matrices()[i],
            Mode::Mix => self.mix.as_ref().expect("mix mode needs a mix matrix"),
        }
    }

    fn min_projection(&self, x: &[f64]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, s) in self.symmetric.iter().enumerate() {
            let v = s.quadratic_form(x);
            if v < best.0 {
                best = (v, i);
            }
        }
        best.1
    }

    /// Mode for the step starting at `t`; `resample` is true at sample
    /// instants of the min-projection law.
    fn mode(&self, t: f64, x: &[f64], current: Option<Mode>, resample: bool) -> Mode {
        match self.policy {
            SwitchingPolicy::Constant(i) => Mode::Vertex(*i),
            SwitchingPolicy::ConstantMix(_) => Mode::Mix,
            SwitchingPolicy::MinProjection { .. } => match current {
                Some(m) if !resample => m,
                _ => Mode::Vertex(self.min_projection(x)),
            },
            SwitchingPolicy::Periodic(schedule) => {
                let mut phase = t % self.period;
                for &(i, d) in schedule {
                    if phase < d {
                        return Mode::Vertex(i);
                    }
                    phase -= d;
                }
                Mode::Vertex(schedule.last().expect("nonempty").0)
            }
        }
    }
}

fn check_inputs(
    p: &MatrixPolytope,
    policy: &SwitchingPolicy,
    x0: &[f64],
    horizon: f64,
    step: f64,
) -> Result<(), SimError> {
    policy.validate(p.k())?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(SimError::BadStep(step));
    }
    if !(horizon >= step && horizon.is_finite()) {
        return Err(SimError::BadHorizon { horizon, step });
    }
    if x0.len() != p.n() {
        return Err(SimError::BadInitialState {
            expected: p.n(),
            found: x0.len(),
        });
    }
    if !x0.iter().all(|v| v.is_finite()) {
        return Err(SimError::NumericFailure { time: 0.0 });
    }
    Ok(())
}

/// Classical RK4 with fixed step. The final step is shortened to land on
/// `horizon` exactly.
fn run<R: Recorder>(
    p: &MatrixPolytope,
    policy: &SwitchingPolicy,
    x0: &[f64],
    horizon: f64,
    step: f64,
    recorder: &mut R,
) -> Result<RunSummary, SimError> {
    check_inputs(p, policy, x0, horizon, step)?;
    let driver = Driver::new(p, policy);
    let n = x0.len();
    let steps = ((horizon / step) - 1e-9).ceil().max(1.0) as usize;
    let sample_period = match policy {
        SwitchingPolicy::MinProjection { sample_period } => *sample_period,
        _ => f64::INFINITY,
    };

    let mut x = x0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut mode = None;
    let mut next_sample = 0.0;
    let mut samples = 0usize;
    let mut midpoint = None;
    let mut t = 0.0;
    for i in 0..steps {
        t = i as f64 * step;
        let resample = t >= next_sample - 1e-12 * sample_period.min(1.0);
        if resample {
            samples += 1;
            next_sample = samples as f64 * sample_period;
        }
        let m = driver.mode(t, &x, mode, resample);
        mode = Some(m);
        recorder.record(t, &x, m);
        if midpoint.is_none() && t >= horizon / 2.0 {
            midpoint = Some((t, norm(&x)));
        }

        let h = if i + 1 == steps { horizon - t } else { step };
        let a = driver.matrix(m);
        a.mul_vec_into(&x, &mut k1);
        for j in 0..n {
            tmp[j] = x[j] + 0.5 * h * k1[j];
        }
        a.mul_vec_into(&tmp, &mut k2);
        for j in 0..n {
            tmp[j] = x[j] + 0.5 * h * k2[j];
        }
        a.mul_vec_into(&tmp, &mut k3);
        for j in 0..n {
            tmp[j] = x[j] + h * k3[j];
        }
        a.mul_vec_into(&tmp, &mut k4);
        for j in 0..n {
            x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        t = if i + 1 == steps { horizon } else { (i + 1) as f64 * step };

        let size = norm(&x);
        if !size.is_finite() {
            return Err(SimError::NumericFailure { time: t });
        }
        if size > DIVERGENCE_NORM {
            recorder.record(t, &x, m);
            return Ok(RunSummary {
                final_time: t,
                final_norm: size,
                midpoint: midpoint.unwrap_or((0.0, norm(x0))),
                termination: Termination::Diverged,
            });
        }
    }
    recorder.record(t, &x, mode.expect("at least one step"));
    Ok(RunSummary {
        final_time: t,
        final_norm: norm(&x),
        midpoint: midpoint.unwrap_or((0.0, norm(x0))),
        termination: Termination::Completed,
    })
}

/// Integrates `ẋ = A(t)x` from `x0` over `[0, horizon]` under `policy`.
///
/// A run whose norm passes [`DIVERGENCE_NORM`] stops early with
/// [`Termination::Diverged`]; a non-finite state is an error.
pub fn integrate(
    p: &MatrixPolytope,
    policy: &SwitchingPolicy,
    x0: &[f64],
    horizon: f64,
    step: f64,
) -> Result<Trajectory, SimError> {
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        active: Vec::new(),
        switch_log: Vec::new(),
        termination: Termination::Completed,
    };
    traj.termination = run(p, policy, x0, horizon, step, &mut traj)?.termination;
    Ok(traj)
}

pub(crate) fn run_summary(
    p: &MatrixPolytope,
    policy: &SwitchingPolicy,
    x0: &[f64],
    horizon: f64,
    step: f64,
) -> Result<RunSummary, SimError> {
    run(p, policy, x0, horizon, step, &mut NoRecord)
}
