//! Norms, sampled time series, convergence-order estimates and run reports.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{integrate, Field};
use crate::model::{default_mass_tol, mass_envelope_check, theorem1_predicate, EnvelopeReport, ModelParams, Theorem1Verdict};
use crate::stepper::{Event, EventKind, Observer, SimState, StepPolicy, Stepper};

/// Target number of regularly spaced samples per run.
pub const TARGET_SAMPLES: u64 = 2000;

pub const DEFAULT_P_NORMS: [f64; 2] = [1.0, 2.0];

#[derive(Debug, Clone, PartialEq)]
pub struct Norms {
    pub max: f64,
    pub min: f64,
    /// `(dx dy Σ |f|^p)^(1/p)` for each requested `p`, in order.
    pub lp: Vec<f64>,
}

pub fn norms(f: &Field, p_list: &[f64]) -> Norms {
    let cell = f.grid().cell_area();
    let vals = f.values();
    let lp = p_list
        .iter()
        .map(|&p| {
            let sum: f64 = if p == 1.0 {
                vals.iter().map(|x| x.abs()).sum()
            } else if p == 2.0 {
                vals.iter().map(|x| x * x).sum()
            } else {
                vals.iter().map(|x| x.abs().powf(p)).sum()
            };
            let integral = cell * sum;
            if p == 1.0 {
                integral
            } else if p == 2.0 {
                integral.sqrt()
            } else {
                integral.powf(1.0 / p)
            }
        })
        .collect();
    Norms { max: f.max(), min: f.min(), lp }
}

/// Least-squares slope of `log(error)` against `log(h)`.
pub fn convergence_order(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::DegenerateInput(format!("need at least 2 samples, got {}", samples.len())));
    }
    if let Some(&(h, e)) = samples.iter().find(|&&(h, e)| !h.is_finite() || !e.is_finite() || h <= 0.0 || e <= 0.0) {
        let msg = if e == 0.0 {
            format!("zero error at h = {h:e}: the scheme is exact here (order +inf)")
        } else {
            format!("sample ({h:e}, {e:e}) is not positive and finite")
        };
        return Err(Error::DegenerateInput(msg));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("all step sizes are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    Ok(sxy / sxx)
}

/// One row of the recorded time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub step: u64,
    pub max_u: f64,
    pub min_u: f64,
    pub mass: f64,
    pub linf_diff: f64,
    /// `‖u‖_p` for the report's `p_norms`, in order.
    pub lp: Vec<f64>,
}

impl Sample {
    pub fn of(state: &SimState, p_list: &[f64]) -> Self {
        let n = norms(&state.u, p_list);
        Sample {
            t: state.t,
            step: state.step,
            max_u: n.max,
            min_u: n.min,
            mass: integrate(&state.u),
            linf_diff: state.last_linf_diff,
            lp: n.lp,
        }
    }
}

/// Records samples every `every` steps, at every mark and at the final step.
///
/// While the state is on a steady streak every step is kept as well, so the
/// series of a converged run ends with the full streak that triggered it.
#[derive(Debug, Clone)]
pub struct Recorder {
    p_list: Vec<f64>,
    every: u64,
    samples: Vec<Sample>,
    streak: VecDeque<Sample>,
    streak_cap: usize,
    max_dt: f64,
}

impl Recorder {
    pub fn new(p_list: &[f64], every: u64, steady_patience: usize) -> Self {
        Self {
            p_list: p_list.to_vec(),
            every: every.max(1),
            samples: Vec::new(),
            streak: VecDeque::new(),
            streak_cap: steady_patience.max(1),
            max_dt: 0.0,
        }
    }

    /// Cadence aiming at about [`TARGET_SAMPLES`] samples, estimated from the
    /// initial step size.
    pub fn cadence(t_span: f64, dt0: f64) -> u64 {
        let est = if dt0 > 0.0 { (t_span / dt0).floor() } else { 0.0 };
        if est.is_finite() && est > 0.0 {
            ((est as u64) / TARGET_SAMPLES).max(1)
        } else {
            1
        }
    }

    fn push(&mut self, state: &SimState) {
        if self.samples.last().is_some_and(|s| s.step >= state.step) {
            return;
        }
        self.samples.push(Sample::of(state, &self.p_list));
    }

    /// Largest accepted step seen.
    pub fn max_dt(&self) -> f64 {
        self.max_dt
    }

    /// Samples in step order, without duplicates.
    pub fn into_series(mut self) -> Vec<Sample> {
        self.samples.extend(self.streak.drain(..));
        self.samples.sort_by_key(|s| s.step);
        self.samples.dedup_by_key(|s| s.step);
        self.samples
    }
}

impl Observer for Recorder {
    fn observe(&mut self, state: &SimState) {
        self.max_dt = self.max_dt.max(state.last_dt);
        if state.step.is_multiple_of(self.every) {
            self.push(state);
        }
        if state.steady_streak > 0 {
            if self.streak.len() == self.streak_cap {
                self.streak.pop_front();
            }
            self.streak.push_back(Sample::of(state, &self.p_list));
        } else {
            self.streak.clear();
        }
    }

    fn at_mark(&mut self, state: &SimState, _index: usize) {
        self.push(state);
    }

    fn finish(&mut self, state: &SimState, _event: &Event) {
        if state.is_finite() && state.step > 0 {
            self.push(state);
        }
    }
}

/// Outcome of the mass-envelope check for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCheck {
    /// The bounds are only claimed for `μ > 0` runs that ended regularly.
    pub applicable: bool,
    pub report: EnvelopeReport,
}

impl EnvelopeCheck {
    /// Passed, or not applicable.
    pub fn ok(&self) -> bool {
        !self.applicable || self.report.passed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub event: Event,
    pub p_norms: Vec<f64>,
    pub series: Vec<Sample>,
    pub envelope_check: EnvelopeCheck,
    pub theorem1: Theorem1Verdict,
    pub config_echo: String,
}

/// Builds the report and runs the mass-envelope check on the series.
///
/// The bounds are stated for unit logistic rate; for other `μ > 0` the check
/// runs on the rescaled time `μ t`, under which the mass law is identical.
pub fn assemble_report(
    event: Event,
    series: Vec<Sample>,
    p_norms: &[f64],
    params: &ModelParams,
    m0: f64,
    max_dt: f64,
    config_echo: String,
) -> RunReport {
    let scale = if params.mu > 0.0 { params.mu } else { 1.0 };
    let masses: Vec<(f64, f64)> = series.iter().map(|s| (scale * s.t, s.mass)).collect();
    let tol = default_mass_tol(max_dt, m0);
    let report = mass_envelope_check(&masses, m0, params.m_exp, tol).expect("series always holds the initial sample");
    let applicable = params.mu > 0.0 && event.kind.is_regular();
    RunReport {
        event,
        p_norms: p_norms.to_vec(),
        series,
        envelope_check: EnvelopeCheck { applicable, report },
        theorem1: theorem1_predicate(2, params),
        config_echo,
    }
}

/// Output options of [`simulate`].
#[derive(Debug, Clone)]
pub struct SimulateOptions<'a> {
    pub p_norms: &'a [f64],
    /// Forwarded to [`Stepper::run_marked`]; every mark is also sampled, so
    /// observers writing output at marks see states that appear in the series.
    pub marks: &'a [f64],
    /// Series cadence in steps; 0 picks one from the initial step size.
    pub series_every: u64,
    pub config_echo: String,
}

impl Default for SimulateOptions<'_> {
    fn default() -> Self {
        Self { p_norms: &DEFAULT_P_NORMS, marks: &[], series_every: 0, config_echo: String::new() }
    }
}

/// Runs `state` to `t_end` and assembles its report; also returns the final state.
pub fn simulate(
    mut state: SimState,
    params: &ModelParams,
    policy: &StepPolicy,
    t_end: f64,
    opts: SimulateOptions<'_>,
    extra: &mut [&mut dyn Observer],
) -> (RunReport, SimState) {
    let mut stepper = Stepper::new(*params, *policy);
    let every = match opts.series_every {
        0 => Recorder::cadence(t_end - state.t, stepper.stable_dt(&state)),
        n => n,
    };
    let mut recorder = Recorder::new(opts.p_norms, every, policy.steady_patience);
    let event = {
        let mut observers: Vec<&mut dyn Observer> = Vec::with_capacity(extra.len() + 1);
        observers.push(&mut recorder);
        for obs in extra.iter_mut() {
            observers.push(&mut **obs);
        }
        stepper.run_marked(&mut state, t_end, opts.marks, &mut observers)
    };
    let max_dt = recorder.max_dt();
    let series = recorder.into_series();
    let report = assemble_report(event, series, opts.p_norms, params, state.m0, max_dt, opts.config_echo);
    (report, state)
}

impl RunReport {
    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let ev = &self.event;
        let _ = writeln!(out, "event: {} at t = {:e} (step {})", ev.kind, ev.t_event, ev.step);
        let _ = writeln!(out, "detail: {}", ev.detail);
        if let (Some(first), Some(last)) = (self.series.first(), self.series.last()) {
            let _ = writeln!(out, "samples: {}", self.series.len());
            let _ = writeln!(out, "max u: {:e} -> {:e}", first.max_u, last.max_u);
            let _ = writeln!(out, "min u: {:e} -> {:e}", first.min_u, last.min_u);
            let _ = writeln!(out, "mass: {:?} -> {:?}", first.mass, last.mass);
            for (i, p) in self.p_norms.iter().enumerate() {
                let _ = writeln!(out, "L{p} norm: {:e} -> {:e}", first.lp[i], last.lp[i]);
            }
        }
        let env = &self.envelope_check;
        let verdict = match (env.applicable, env.report.passed) {
            (false, _) => "not applicable",
            (true, true) => "pass",
            (true, false) => "FAIL",
        };
        let _ = writeln!(
            out,
            "mass envelope: {verdict} ({} samples, tol {:e}, {} violations, worst {:e})",
            env.report.samples,
            env.report.tol,
            env.report.violations.len(),
            env.report.worst
        );
        let _ = write!(out, "boundedness conditions, {}", self.theorem1);
        let _ = writeln!(out, "\nresolved config:\n{}", self.config_echo);
        out
    }

    pub fn exit_code(&self) -> i32 {
        exit_code(self.event.kind)
    }
}

/// Process exit status for a terminal event.
pub fn exit_code(kind: EventKind) -> i32 {
    match kind {
        EventKind::Converged | EventKind::TimeLimit => 0,
        EventKind::Blowup => 10,
        EventKind::ImaginaryState => 11,
    }
}
