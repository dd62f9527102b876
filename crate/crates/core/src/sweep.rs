//! Parameter sweeps: one run per combination of exponents, logistic rate and
//! initial amplitude, collected into a phase table.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::diagnostics::{simulate, SimulateOptions};
use crate::grid::Grid;
use crate::model::theorem1_predicate;
use crate::scenarios::{self, Scenario};
use crate::stepper::{EventKind, StepPolicy};

/// Environment variable holding the number of sweep worker threads.
pub const WORKERS_ENV: &str = "CHEMOTAXIS_WORKERS";

pub const PHASE_FILE: &str = "phase.csv";

/// Values swept on each axis. `None` keeps the base scenario's value; an
/// empty list yields no combinations at all.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ranges {
    pub k: Option<Vec<f64>>,
    pub l: Option<Vec<f64>>,
    pub m: Option<Vec<f64>>,
    pub mu: Option<Vec<f64>>,
    pub amplitude: Option<Vec<f64>>,
}

/// One combination, in axis order `k, l, m, mu, amplitude`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub k: f64,
    pub l: f64,
    pub m: f64,
    pub mu: f64,
    pub amplitude: f64,
}

impl Ranges {
    /// Cartesian product in lexicographic order of the given value lists.
    pub fn points(&self, base: &Scenario) -> Vec<Point> {
        let p = &base.params;
        let axis = |r: &Option<Vec<f64>>, default: f64| r.clone().unwrap_or_else(|| vec![default]);
        let (ks, ls, ms) = (axis(&self.k, p.k_exp), axis(&self.l, p.l_exp), axis(&self.m, p.m_exp));
        let (mus, amps) = (axis(&self.mu, p.mu), axis(&self.amplitude, base.u0.amplitude));
        let mut out = Vec::new();
        for &k in &ks {
            for &l in &ls {
                for &m in &ms {
                    for &mu in &mus {
                        for &amplitude in &amps {
                            out.push(Point { k, l, m, mu, amplitude });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRow {
    pub point: Point,
    /// `Err` holds the reason the row could not run.
    pub outcome: Result<RowOutcome, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowOutcome {
    pub event: EventKind,
    pub t_event: f64,
    pub final_max_u: f64,
    pub bounded_regime: bool,
}

/// The base scenario moved to `point`; amplitudes of all three initial fields
/// scale together.
pub fn scenario_at(base: &Scenario, point: &Point) -> Scenario {
    let mut s = base.clone();
    s.params.k_exp = point.k;
    s.params.l_exp = point.l;
    s.params.m_exp = point.m;
    s.params.mu = point.mu;
    if s.u0.amplitude > 0.0 {
        s = s.with_amplitude(point.amplitude);
    } else {
        s.u0.amplitude = point.amplitude;
    }
    s.expected = None;
    s
}

pub fn run_point(base: &Scenario, grid: Grid, policy: &StepPolicy, point: &Point) -> PhaseRow {
    let s = scenario_at(base, point);
    let outcome = s.validate().map_err(|e| e.to_string()).map(|()| {
        let state = scenarios::build(&s, grid);
        let (report, last) = simulate(state, &s.params, policy, s.t_end, SimulateOptions::default(), &mut []);
        RowOutcome {
            event: report.event.kind,
            t_event: report.event.t_event,
            final_max_u: last.u.max(),
            bounded_regime: theorem1_predicate(2, &s.params).bounded,
        }
    });
    PhaseRow { point: *point, outcome }
}

/// Worker count from [`WORKERS_ENV`], defaulting to 1.
pub fn workers_from_env() -> Result<usize, String> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(format!("{WORKERS_ENV} must be a positive integer, got `{v}`")),
        },
    }
}

/// Runs every point with up to `workers` threads. Rows come back in point
/// order whatever order they finished in.
pub fn run_sweep(base: &Scenario, grid: Grid, policy: &StepPolicy, ranges: &Ranges, workers: usize) -> Vec<PhaseRow> {
    let points = ranges.points(base);
    let slots: Vec<Mutex<Option<PhaseRow>>> = points.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        let Some(point) = points.get(i) else { break };
        let row = run_point(base, grid, policy, point);
        *slots[i].lock().expect("no panics while holding the slot") = Some(row);
    };
    let n = workers.clamp(1, points.len().max(1));
    if n == 1 {
        work();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..n {
                scope.spawn(work);
            }
        });
    }
    slots.into_iter().map(|m| m.into_inner().expect("slot lock").expect("every point ran")).collect()
}

pub const PHASE_HEADER: &str = "k,l,m,mu,amplitude,event,t_event,final_max_u,theorem1_bounded,error";

pub fn phase_csv(rows: &[PhaseRow]) -> String {
    let mut out = String::from(PHASE_HEADER);
    out.push('\n');
    for r in rows {
        let p = &r.point;
        let _ = write!(out, "{:?},{:?},{:?},{:?},{:?},", p.k, p.l, p.m, p.mu, p.amplitude);
        match &r.outcome {
            Ok(o) => {
                let _ = writeln!(out, "{},{:?},{:?},{},", o.event, o.t_event, o.final_max_u, o.bounded_regime);
            }
            Err(e) => {
                // the message is quoted and its quotes doubled, as CSV requires
                let _ = writeln!(out, "error,,,,\"{}\"", e.replace('"', "\"\""));
            }
        }
    }
    out
}
