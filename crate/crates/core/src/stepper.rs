//! Adaptive forward-Euler time stepping and terminal-event detection.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ImaginaryState;
use crate::grid::{integrate, laplacian_row, Field, Grid};
#[cfg(doc)]
use crate::grid::{chemo_divergence_into, laplacian_into};
use crate::model::ModelParams;
use crate::power::Power;

/// Added to the face speed before dividing.
const SPEED_EPS: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub step: u64,
    pub u: Field,
    pub v: Field,
    pub w: Field,
    /// `∫u` at `t = 0`.
    pub m0: f64,
    /// `max |u_new − u_old|` over the last accepted step.
    pub last_linf_diff: f64,
    /// Consecutive steps with `last_linf_diff < steady_tol`.
    pub steady_streak: usize,
    /// Size of the last accepted step (0 before the first one).
    pub last_dt: f64,
}

impl SimState {
    pub fn new(u: Field, v: Field, w: Field) -> Self {
        assert_eq!(u.grid(), v.grid(), "u and v must share a grid");
        assert_eq!(u.grid(), w.grid(), "u and w must share a grid");
        let m0 = integrate(&u);
        Self { t: 0.0, step: 0, u, v, w, m0, last_linf_diff: 0.0, steady_streak: 0, last_dt: 0.0 }
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    pub fn mass(&self) -> f64 {
        integrate(&self.u)
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite() && self.w.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy {
    /// CFL safety factor in `(0, 1]`.
    pub safety: f64,
    pub dt_max: f64,
    /// `max |u|` above which the run is classified as blowup.
    pub blowup_threshold: f64,
    pub steady_tol: f64,
    pub steady_patience: usize,
    /// Zero out negative densities after each step. Exploration only.
    pub clip_negative: bool,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            safety: 0.4,
            dt_max: 1e-3,
            blowup_threshold: 1e10,
            steady_tol: 1e-8,
            steady_patience: 100,
            clip_negative: false,
        }
    }
}

impl StepPolicy {
    pub fn validate(&self) -> crate::Result<()> {
        let ok = self.safety > 0.0
            && self.safety <= 1.0
            && self.dt_max > 0.0
            && self.blowup_threshold > 0.0
            && self.steady_tol > 0.0
            && self.steady_patience >= 1;
        if ok {
            Ok(())
        } else {
            Err(crate::Error::InvalidParams(format!("invalid step policy {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventKind {
    Converged,
    Blowup,
    ImaginaryState,
    TimeLimit,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::Converged => "Converged",
            EventKind::Blowup => "Blowup",
            EventKind::ImaginaryState => "ImaginaryState",
            EventKind::TimeLimit => "TimeLimit",
        }
    }

    /// Neither blowup nor imaginary state.
    pub fn is_regular(&self) -> bool {
        matches!(self, EventKind::Converged | EventKind::TimeLimit)
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EventKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Converged" => Ok(EventKind::Converged),
            "Blowup" => Ok(EventKind::Blowup),
            "ImaginaryState" => Ok(EventKind::ImaginaryState),
            "TimeLimit" => Ok(EventKind::TimeLimit),
            other => Err(format!("unknown event kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub t_event: f64,
    pub step: u64,
    pub detail: String,
}

/// Time derivatives of the three unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub du: Field,
    pub dv: Field,
    pub dw: Field,
}

/// Extra source terms added to the right-hand side, used to verify the scheme
/// against manufactured solutions.
pub trait Forcing {
    /// Adds the forcing at time `t` into the three derivative buffers.
    fn add(&self, grid: &Grid, t: f64, du: &mut [f64], dv: &mut [f64], dw: &mut [f64]);
}

/// Hook invoked by [`Stepper::run`].
pub trait Observer {
    /// Called with the initial state and after every accepted step.
    fn observe(&mut self, state: &SimState);
    /// Called once the run reaches `marks[index]` (see [`Stepper::run_marked`]),
    /// right after [`Observer::observe`] for the same state.
    fn at_mark(&mut self, _state: &SimState, _index: usize) {}
    fn finish(&mut self, _state: &SimState, _event: &Event) {}
}

#[derive(Debug, Clone, Default)]
struct Workspace {
    phi: Vec<f64>,
    prod: Vec<f64>,
    du: Vec<f64>,
    dv: Vec<f64>,
    dw: Vec<f64>,
    rows: FaceRows,
}

/// Taxis fluxes through the x-faces of one row and the y-faces below and
/// above it.
#[derive(Debug, Clone, Default)]
struct FaceRows {
    fx: Vec<f64>,
    fy_lo: Vec<f64>,
    fy_hi: Vec<f64>,
    speed: Vec<f64>,
}

impl Workspace {
    fn resize(&mut self, grid: &Grid) {
        let n = grid.len();
        for buf in [&mut self.phi, &mut self.prod, &mut self.du, &mut self.dv, &mut self.dw] {
            buf.resize(n, 0.0);
        }
        self.rows.fx.resize(grid.nx() + 1, 0.0);
        self.rows.fy_lo.resize(grid.nx(), 0.0);
        self.rows.fy_hi.resize(grid.nx(), 0.0);
        self.rows.speed.resize(grid.nx(), 0.0);
    }
}

/// Forward-Euler integrator for one simulation.
pub struct Stepper<'a> {
    params: ModelParams,
    policy: StepPolicy,
    forcing: Option<&'a dyn Forcing>,
    k: Power,
    l: Power,
    m: Power,
    ws: Workspace,
}

impl<'a> Stepper<'a> {
    pub fn new(params: ModelParams, policy: StepPolicy) -> Self {
        Self {
            params,
            policy,
            forcing: None,
            k: params.taxis_power(),
            l: params.production_power(),
            m: params.source_power(),
            ws: Workspace::default(),
        }
    }

    pub fn with_forcing(mut self, forcing: &'a dyn Forcing) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn policy(&self) -> &StepPolicy {
        &self.policy
    }

    /// Evaluates the right-hand side into the workspace derivative buffers and
    /// returns the maximum taxis face speed of `state`.
    fn eval_rhs(&mut self, state: &SimState) -> Result<f64, ImaginaryState> {
        let p = self.params;
        let grid = *state.grid();
        self.ws.resize(&grid);
        let (u, v, w) = (state.u.values(), state.v.values(), state.w.values());

        let screen = |power: &Power, quantity| -> Result<(), ImaginaryState> {
            if power.is_fractional() {
                if let Some(idx) = u.iter().position(|&x| x < 0.0) {
                    return Err(imaginary_cell(&grid, idx, u[idx], quantity));
                }
            }
            Ok(())
        };
        screen(&self.l, "u^l")?;
        if p.mu != 0.0 {
            screen(&self.m, "u^m")?;
        }

        let Workspace { phi, prod, du, dv, dw, rows } = &mut self.ws;
        for (pr, &x) in prod.iter_mut().zip(u) {
            *pr = p.k_coef * self.l.apply(x);
        }
        for ((f, &a), &b) in phi.iter_mut().zip(w).zip(v) {
            *f = p.xi * a - p.chi * b;
        }
        // nonlocal source factor μ (1 − M); the power u^m is applied per cell below
        let source = (p.mu != 0.0).then(|| p.mu * (1.0 - integrate(&state.u)));

        let k = self.k;
        let speed = if k.exponent() == 1.0 {
            fused_rhs(&p, &grid, [u, v, w, phi, prod], source, &self.m, [du, dv, dw], rows, Some, |_| 1.0)?
        } else {
            let slope = Power::new(k.exponent() - 1.0);
            let kk = k.exponent();
            fused_rhs(
                &p,
                &grid,
                [u, v, w, phi, prod],
                source,
                &self.m,
                [du, dv, dw],
                rows,
                |m| k.checked(m),
                |m| kk * slope.apply(m.abs()),
            )?
        };

        if let Some(forcing) = self.forcing {
            forcing.add(&grid, state.t, du, dv, dw);
        }
        Ok(speed)
    }

    pub fn rhs(&mut self, state: &SimState) -> Result<Derivatives, ImaginaryState> {
        self.eval_rhs(state)?;
        let g = *state.grid();
        let field = |buf: &Vec<f64>| Field::from_values(g, buf.clone()).expect("workspace sized to grid");
        Ok(Derivatives { du: field(&self.ws.du), dv: field(&self.ws.dv), dw: field(&self.ws.dw) })
    }

    pub fn stable_dt(&self, state: &SimState) -> f64 {
        stable_dt(state, &self.params, &self.policy)
    }

    /// Advances one step, or reports the terminal event the new state exhibits.
    pub fn step(&mut self, state: &mut SimState) -> Option<Event> {
        self.step_until(state, f64::INFINITY)
    }

    /// Like [`Stepper::step`] but never steps past `t_limit`.
    pub fn step_until(&mut self, state: &mut SimState, t_limit: f64) -> Option<Event> {
        let speed = match self.eval_rhs(state) {
            Ok(speed) => speed,
            Err(err) => {
                return Some(Event {
                    kind: EventKind::ImaginaryState,
                    t_event: state.t,
                    step: state.step,
                    detail: err.to_string(),
                })
            }
        };
        let dt = dt_from_speed(state.grid(), &self.params, &self.policy, speed).min(t_limit - state.t);

        let (linf, peak, u_bad) = advance_tracked(state.u.values_mut(), &self.ws.du, dt);
        let v_bad = advance_tracked(state.v.values_mut(), &self.ws.dv, dt).2;
        let w_bad = advance_tracked(state.w.values_mut(), &self.ws.dw, dt).2;
        if self.policy.clip_negative {
            state.u.values_mut().iter_mut().for_each(|x| *x = x.max(0.0));
        }
        state.t += dt;
        state.step += 1;
        state.last_dt = dt;
        state.last_linf_diff = linf;

        let event = |kind, detail: String| Some(Event { kind, t_event: state.t, step: state.step, detail });
        if let Some(detail) = self.find_imaginary(&state.u) {
            return event(EventKind::ImaginaryState, detail);
        }
        if u_bad || v_bad || w_bad || peak > self.policy.blowup_threshold {
            if let Some(detail) = self.find_blowup(state) {
                return event(EventKind::Blowup, detail);
            }
        }
        if linf < self.policy.steady_tol {
            state.steady_streak += 1;
        } else {
            state.steady_streak = 0;
        }
        if state.steady_streak >= self.policy.steady_patience {
            let detail = format!(
                "linf_diff = {linf:e} < {:e} for {} consecutive steps",
                self.policy.steady_tol, state.steady_streak
            );
            return event(EventKind::Converged, detail);
        }
        None
    }

    /// Locates the first negative density that the next right-hand-side
    /// evaluation would raise to a fractional power.
    fn find_imaginary(&self, u: &Field) -> Option<String> {
        let grid = u.grid();
        let vals = u.values();
        let cellwise = self.l.is_fractional() || (self.params.mu != 0.0 && self.m.is_fractional());
        if cellwise {
            if let Some(idx) = vals.iter().position(|&x| x < 0.0) {
                let (i, j) = grid.cell(idx);
                let which = if self.l.is_fractional() { "u^l" } else { "u^m" };
                return Some(format!("{which}: u = {:e} < 0 at cell ({i}, {j})", vals[idx]));
            }
        }
        if self.k.is_fractional() {
            let (nx, ny) = (grid.nx(), grid.ny());
            for j in 0..ny {
                for i in 0..nx {
                    let c = vals[grid.index(i, j)];
                    if i + 1 < nx && c + vals[grid.index(i + 1, j)] < 0.0 {
                        return Some(format!("face u^k: mean density < 0 between cells ({i}, {j}) and ({}, {j})", i + 1));
                    }
                    if j + 1 < ny && c + vals[grid.index(i, j + 1)] < 0.0 {
                        return Some(format!("face u^k: mean density < 0 between cells ({i}, {j}) and ({i}, {})", j + 1));
                    }
                }
            }
        }
        None
    }

    fn find_blowup(&self, state: &SimState) -> Option<String> {
        for (name, f) in [("u", &state.u), ("v", &state.v), ("w", &state.w)] {
            if let Some(idx) = f.values().iter().position(|x| !x.is_finite()) {
                let (i, j) = f.grid().cell(idx);
                return Some(format!("non-finite {name} at cell ({i}, {j})"));
            }
        }
        let (idx, peak) = state
            .u
            .values()
            .iter()
            .map(|x| x.abs())
            .enumerate()
            .fold((0, 0.0), |best, (i, x)| if x > best.1 { (i, x) } else { best });
        if peak > self.policy.blowup_threshold {
            let (i, j) = state.grid().cell(idx);
            return Some(format!("max |u| = {peak:e} > {:e} at cell ({i}, {j})", self.policy.blowup_threshold));
        }
        None
    }

    /// Steps until a terminal event or `t >= t_end`.
    pub fn run(&mut self, state: &mut SimState, t_end: f64, observers: &mut [&mut dyn Observer]) -> Event {
        self.run_marked(state, t_end, &[], observers)
    }

    /// Like [`Stepper::run`], additionally landing exactly on each time in
    /// `marks` (ascending) and reporting it through [`Observer::at_mark`].
    ///
    /// Marks at or before the initial time are reported with the initial
    /// state; marks past `t_end` are never reached.
    pub fn run_marked(
        &mut self,
        state: &mut SimState,
        t_end: f64,
        marks: &[f64],
        observers: &mut [&mut dyn Observer],
    ) -> Event {
        // absorb accumulated roundoff in t so a target does not cost an extra sliver step
        let reached = |t: f64, target: f64| t >= target - 1e-12 * target.abs();
        let mut next_mark = 0;
        let report_marks = |state: &SimState, next_mark: &mut usize, observers: &mut [&mut dyn Observer]| {
            while *next_mark < marks.len() && reached(state.t, marks[*next_mark]) {
                for obs in observers.iter_mut() {
                    obs.at_mark(state, *next_mark);
                }
                *next_mark += 1;
            }
        };

        for obs in observers.iter_mut() {
            obs.observe(state);
        }
        report_marks(state, &mut next_mark, observers);
        let event = loop {
            if reached(state.t, t_end) {
                break Event {
                    kind: EventKind::TimeLimit,
                    t_event: state.t,
                    step: state.step,
                    detail: format!("reached t_end = {t_end:e}"),
                };
            }
            let limit = marks.get(next_mark).map_or(t_end, |&m| m.min(t_end));
            let before = state.step;
            let outcome = self.step_until(state, limit);
            if state.step > before && state.is_finite() {
                for obs in observers.iter_mut() {
                    obs.observe(state);
                }
                report_marks(state, &mut next_mark, observers);
            }
            if let Some(ev) = outcome {
                break ev;
            }
        };
        for obs in observers.iter_mut() {
            obs.finish(state, &event);
        }
        event
    }
}

/// One sweep over the grid evaluating all three right-hand sides.
///
/// The arithmetic mirrors [`laplacian_into`] and [`chemo_divergence_into`]
/// operation for operation, so the result equals the composition of those
/// operators exactly. Returns the maximum face speed used by [`stable_dt`].
#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn fused_rhs(
    p: &ModelParams,
    grid: &Grid,
    [u, v, w, phi, prod]: [&[f64]; 5],
    source: Option<f64>,
    m: &Power,
    [du, dv, dw]: [&mut Vec<f64>; 3],
    rows: &mut FaceRows,
    mobility: impl Fn(f64) -> Option<f64>,
    slope: impl Fn(f64) -> f64,
) -> Result<f64, ImaginaryState> {
    #[cold]
    fn face_error(a: f64, b: f64, i: usize, j: usize) -> ImaginaryState {
        ImaginaryState { i, j, value: 0.5 * (a + b), quantity: "face u^k" }
    }

    let (nx, ny) = (grid.nx(), grid.ny());
    let (rdx, rdy) = (1.0 / grid.dx(), 1.0 / grid.dy());
    let (chi, xi) = (p.chi.abs(), p.xi.abs());
    let FaceRows { fx, fy_lo: lo_buf, fy_hi: hi_buf, speed: sp } = rows;
    let fx = &mut fx[..=nx];
    let sp = &mut sp[..nx];
    fx[0] = 0.0;
    fx[nx] = 0.0;
    lo_buf.iter_mut().for_each(|f| *f = 0.0);
    let mut speed: f64 = 0.0;

    for j in 0..ny {
        let r = j * nx..(j + 1) * nx;
        let (uc, vc, wc, pc) = (&u[r.clone()], &v[r.clone()], &w[r.clone()], &phi[r.clone()]);
        let (fy_lo, fy_hi) = (&mut lo_buf[..nx], &mut hi_buf[..nx]);
        for i in 0..nx - 1 {
            let mean = 0.5 * (uc[i] + uc[i + 1]);
            let Some(mob) = mobility(mean) else { return Err(face_error(uc[i], uc[i + 1], i, j)) };
            fx[i + 1] = mob * (pc[i + 1] - pc[i]) * rdx;
            sp[i] = slope(mean) * ((chi * (vc[i + 1] - vc[i]).abs() + xi * (wc[i + 1] - wc[i]).abs()) * rdx);
        }
        speed = speed.max(max_lanes(&sp[..nx - 1]));
        if j + 1 < ny {
            let rn = r.end..r.end + nx;
            let (un, vn, wn, pn) = (&u[rn.clone()], &v[rn.clone()], &w[rn.clone()], &phi[rn]);
            for i in 0..nx {
                let mean = 0.5 * (uc[i] + un[i]);
                let Some(mob) = mobility(mean) else { return Err(face_error(uc[i], un[i], i, j)) };
                fy_hi[i] = mob * (pn[i] - pc[i]) * rdy;
                sp[i] = slope(mean) * ((chi * (vn[i] - vc[i]).abs() + xi * (wn[i] - wc[i]).abs()) * rdy);
            }
            speed = speed.max(max_lanes(&sp[..nx]));
        } else {
            fy_hi.iter_mut().for_each(|f| *f = 0.0);
        }

        let (du, dv, dw) = (&mut du[r.clone()], &mut dv[r.clone()], &mut dw[r.clone()]);
        laplacian_row(grid, u, j, du);
        laplacian_row(grid, v, j, dv);
        laplacian_row(grid, w, j, dw);
        for i in 0..nx {
            let taxis = (fx[i + 1] - fx[i]) * rdx + (fy_hi[i] - fy_lo[i]) * rdy;
            du[i] = p.d1 * du[i] + taxis;
        }
        if let Some(factor) = source {
            for (d, &x) in du.iter_mut().zip(uc) {
                *d += factor * m.apply(x);
            }
        }
        let pr = &prod[r.clone()];
        for ((d, &x), &q) in dv.iter_mut().zip(vc).zip(pr) {
            *d = p.d2 * *d - p.alpha * x + q;
        }
        for ((d, &x), &q) in dw.iter_mut().zip(wc).zip(pr) {
            *d = p.d3 * *d - p.beta * x + q;
        }
        std::mem::swap(lo_buf, hi_buf);
    }
    Ok(speed)
}

fn imaginary_cell(grid: &Grid, idx: usize, value: f64, quantity: &'static str) -> ImaginaryState {
    let (i, j) = grid.cell(idx);
    ImaginaryState { i, j, value, quantity }
}

/// Right-hand side of the system for `state`.
pub fn rhs(state: &SimState, params: &ModelParams) -> Result<Derivatives, ImaginaryState> {
    Stepper::new(*params, StepPolicy::default()).rhs(state)
}

/// Largest forward-Euler step allowed by diffusion and taxis speeds, after the
/// safety factor and the `dt_max` clamp.
pub fn stable_dt(state: &SimState, params: &ModelParams, policy: &StepPolicy) -> f64 {
    let g = state.grid();
    dt_from_speed(g, params, policy, max_face_speed(state, params))
}

fn dt_from_speed(g: &Grid, params: &ModelParams, policy: &StepPolicy, speed: f64) -> f64 {
    let (dx, dy) = (g.dx(), g.dy());
    let (dx2, dy2) = (dx * dx, dy * dy);
    let d_max = params.d1.max(params.d2).max(params.d3);
    let diffusive = dx2 * dy2 / (2.0 * (dx2 + dy2) * d_max);
    let advective = dx.min(dy) / (speed + SPEED_EPS);
    (policy.safety * diffusive.min(advective)).min(policy.dt_max)
}

/// `max_faces k |ū|^(k−1) (|χ ∂v/∂n| + |ξ ∂w/∂n|)`.
pub fn max_face_speed(state: &SimState, params: &ModelParams) -> f64 {
    let g = state.grid();
    let (u, v, w) = (state.u.values(), state.v.values(), state.w.values());
    let k = params.k_exp;
    let slope = Power::new(k - 1.0);
    let chi = params.chi.abs();
    let xi = params.xi.abs();
    let gradient = |a: usize, b: usize, rh: f64| (chi * (v[b] - v[a]).abs() + xi * (w[b] - w[a]).abs()) * rh;
    if k == 1.0 {
        max_over_faces(g, gradient)
    } else {
        max_over_faces(g, |a, b, h| k * slope.apply((0.5 * (u[a] + u[b])).abs()) * gradient(a, b, h))
    }
}

/// `x += dt * d` elementwise, returning the largest change, the largest new
/// magnitude and whether any new value is non-finite.
#[inline(always)]
fn advance_tracked(xs: &mut [f64], ds: &[f64], dt: f64) -> (f64, f64, bool) {
    let mut diff = [0.0f64; 4];
    let mut peak = [0.0f64; 4];
    // stays zero unless some value is infinite or NaN
    let mut poison = [0.0f64; 4];
    let mut lanes = |lane: usize, x: &mut f64, d: f64| {
        let new = *x + dt * d;
        let change = (new - *x).abs();
        diff[lane] = if change > diff[lane] { change } else { diff[lane] };
        peak[lane] = if new.abs() > peak[lane] { new.abs() } else { peak[lane] };
        poison[lane] += new * 0.0;
        *x = new;
    };
    let mut xc = xs.chunks_exact_mut(4);
    let mut dc = ds.chunks_exact(4);
    for (x, d) in (&mut xc).zip(&mut dc) {
        for lane in 0..4 {
            lanes(lane, &mut x[lane], d[lane]);
        }
    }
    for (x, &d) in xc.into_remainder().iter_mut().zip(dc.remainder()) {
        lanes(0, x, d);
    }
    let max4 = |a: [f64; 4]| a[0].max(a[1]).max(a[2].max(a[3]));
    (max4(diff), max4(peak), poison.iter().any(|p| *p != 0.0))
}

/// Maximum of non-negative values; written lane-wise so it vectorizes.
#[inline(always)]
fn max_lanes(xs: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = xs.chunks_exact(4);
    let tail = chunks.remainder();
    for c in chunks {
        for (a, &x) in acc.iter_mut().zip(c) {
            *a = if x > *a { x } else { *a };
        }
    }
    for &x in tail {
        acc[0] = acc[0].max(x);
    }
    acc[0].max(acc[1]).max(acc[2].max(acc[3]))
}

#[inline(always)]
fn max_over_faces(g: &Grid, face: impl Fn(usize, usize, f64) -> f64) -> f64 {
    let (nx, ny) = (g.nx(), g.ny());
    let (rdx, rdy) = (1.0 / g.dx(), 1.0 / g.dy());
    let mut speed: f64 = 0.0;
    for j in 0..ny {
        let row = j * nx;
        for c in row..row + nx - 1 {
            speed = speed.max(face(c, c + 1, rdx));
        }
        if j + 1 < ny {
            for c in row..row + nx {
                speed = speed.max(face(c, c + nx, rdy));
            }
        }
    }
    speed
}

/// One step of the reference integrator.
pub fn step(state: &mut SimState, params: &ModelParams, policy: &StepPolicy) -> Option<Event> {
    Stepper::new(*params, *policy).step(state)
}

/// Steps `initial` to `t_end`; see [`Stepper::run`].
pub fn run(
    state: &mut SimState,
    params: &ModelParams,
    policy: &StepPolicy,
    t_end: f64,
    observers: &mut [&mut dyn Observer],
) -> Event {
    Stepper::new(*params, *policy).run(state, t_end, observers)
}
