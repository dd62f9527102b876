//! Self-verification: operators against brute-force ghost-layer oracles,
//! manufactured-solution convergence orders, and the mass bounds on a
//! convergent reference run.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{convergence_order, simulate, SimulateOptions};
use crate::error::ImaginaryState;
use crate::grid::{self, Field, Grid};
use crate::mms::{Manufactured, DEFAULT_MODES};
use crate::model::ModelParams;
use crate::scenarios;
use crate::stepper::{SimState, StepPolicy, Stepper};

/// The discrete operators under test. Production code uses [`Standard`];
/// tests substitute broken implementations to check that verification fails.
pub trait SpatialOps {
    fn laplacian(&self, f: &Field) -> Field;
    fn chemo_divergence(&self, u: &Field, s: &Field, k: f64) -> Result<Field, ImaginaryState>;
    fn integrate(&self, f: &Field) -> f64;
}

/// The crate's own operators.
#[derive(Debug, Clone, Copy, Default)]
pub struct Standard;

impl SpatialOps for Standard {
    fn laplacian(&self, f: &Field) -> Field {
        grid::laplacian(f)
    }
    fn chemo_divergence(&self, u: &Field, s: &Field, k: f64) -> Result<Field, ImaginaryState> {
        grid::chemo_divergence(u, s, k)
    }
    fn integrate(&self, f: &Field) -> f64 {
        grid::integrate(f)
    }
}

/// Relative tolerance for operator-vs-oracle comparisons.
pub const ORACLE_RTOL: f64 = 1e-13;
/// Tolerance on `∫ op(f)` relative to `|Ω| max |op(f)|`.
pub const CONSERVATION_RTOL: f64 = 1e-12;
pub const SPATIAL_ORDER: (f64, f64) = (1.8, 2.2);
pub const TEMPORAL_ORDER: (f64, f64) = (0.8, 1.2);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: String) {
        self.checks.push(Check { name: name.into(), passed, detail });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        match self.first_failure() {
            None => writeln!(f, "all {} checks passed", self.checks.len()),
            Some(c) => writeln!(f, "first failing check: {}", c.name),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Operator oracles only.
    pub quick: bool,
    pub spatial_grids: Vec<usize>,
    pub temporal_grid: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { quick: false, spatial_grids: vec![32, 64, 128], temporal_grid: 64, seed: 20240917 }
    }
}

/// Field padded with one mirrored ghost cell on every side.
struct Ghosted {
    nx: usize,
    vals: Vec<f64>,
}

impl Ghosted {
    fn new(f: &Field) -> Self {
        let g = f.grid();
        let (nx, ny) = (g.nx(), g.ny());
        let mut vals = vec![0.0; (nx + 2) * (ny + 2)];
        for jj in 0..ny + 2 {
            for ii in 0..nx + 2 {
                // a ghost copies its interior neighbour, so the normal difference vanishes
                let i = ii.clamp(1, nx) - 1;
                let j = jj.clamp(1, ny) - 1;
                vals[jj * (nx + 2) + ii] = f.get(i, j);
            }
        }
        Self { nx, vals }
    }

    /// Value at interior index `(i, j)` offset by `(di, dj)`.
    fn at(&self, i: usize, j: usize, di: isize, dj: isize) -> f64 {
        let ii = (i as isize + 1 + di) as usize;
        let jj = (j as isize + 1 + dj) as usize;
        self.vals[jj * (self.nx + 2) + ii]
    }
}

/// Five-point Laplacian written directly on a ghost-padded copy.
pub fn oracle_laplacian(f: &Field) -> Field {
    let g = *f.grid();
    let gh = Ghosted::new(f);
    let mut out = Field::zeros(g);
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let c = gh.at(i, j, 0, 0);
            let lx = (gh.at(i, j, 1, 0) - 2.0 * c + gh.at(i, j, -1, 0)) / (g.dx() * g.dx());
            let ly = (gh.at(i, j, 0, 1) - 2.0 * c + gh.at(i, j, 0, -1)) / (g.dy() * g.dy());
            out.set(i, j, lx + ly);
        }
    }
    out
}

/// `div(((u_L+u_R)/2)^k grad s)` written directly on ghost-padded copies.
pub fn oracle_chemo_divergence(u: &Field, s: &Field, k: f64) -> Field {
    let g = *u.grid();
    let (gu, gs) = (Ghosted::new(u), Ghosted::new(s));
    let flux = |i: usize, j: usize, di: isize, dj: isize, h: f64| {
        let mob = (0.5 * (gu.at(i, j, 0, 0) + gu.at(i, j, di, dj))).powf(k);
        mob * (gs.at(i, j, di, dj) - gs.at(i, j, 0, 0)) / h
    };
    let mut out = Field::zeros(g);
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let div_x = (flux(i, j, 1, 0, g.dx()) + flux(i, j, -1, 0, g.dx())) / g.dx();
            let div_y = (flux(i, j, 0, 1, g.dy()) + flux(i, j, 0, -1, g.dy())) / g.dy();
            out.set(i, j, div_x + div_y);
        }
    }
    out
}

/// The full right-hand side assembled term by term from the oracles;
/// requires `u ≥ 0` wherever a fractional power is taken.
pub fn oracle_rhs(state: &SimState, p: &ModelParams) -> [Field; 3] {
    let g = *state.grid();
    let (u, v, w) = (&state.u, &state.v, &state.w);
    let lu = oracle_laplacian(u);
    let lv = oracle_laplacian(v);
    let lw = oracle_laplacian(w);
    let tv = oracle_chemo_divergence(u, v, p.k_exp);
    let tw = oracle_chemo_divergence(u, w, p.k_exp);
    let mass = g.cell_area() * u.values().iter().sum::<f64>();
    let mut du = Field::zeros(g);
    let mut dv = Field::zeros(g);
    let mut dw = Field::zeros(g);
    for idx in 0..g.len() {
        let (x, y, z) = (u.values()[idx], v.values()[idx], w.values()[idx]);
        let prod = p.k_coef * x.powf(p.l_exp);
        let source = if p.mu == 0.0 { 0.0 } else { p.mu * x.powf(p.m_exp) * (1.0 - mass) };
        du.values_mut()[idx] = p.d1 * lu.values()[idx] - p.chi * tv.values()[idx] + p.xi * tw.values()[idx] + source;
        dv.values_mut()[idx] = p.d2 * lv.values()[idx] - p.alpha * y + prod;
        dw.values_mut()[idx] = p.d3 * lw.values()[idx] - p.beta * z + prod;
    }
    [du, dv, dw]
}

fn random_field(grid: Grid, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Field {
    let vals = (0..grid.len()).map(|_| rng.gen_range(lo..hi)).collect();
    Field::from_values(grid, vals).expect("sized to grid")
}

/// `max |a − b| / max(|b|)`, guarding an all-zero reference.
fn rel_diff(a: &Field, b: &Field) -> f64 {
    let scale = b.values().iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    a.max_abs_diff(b) / scale
}

fn conservation_residual(ops: &dyn SpatialOps, f: &Field) -> f64 {
    let scale = f.grid().area() * f.values().iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    ops.integrate(f).abs() / scale
}

/// Operator oracle comparisons and discrete conservation on random fields.
pub fn check_operators(ops: &dyn SpatialOps, seed: u64, report: &mut VerifyReport) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_lap = 0.0f64;
    let mut worst_taxis = 0.0f64;
    let mut worst_cons = (0.0f64, 0.0f64);
    let mut taxis_err = None;
    for n in [8, 32] {
        let g = Grid::unit_square(n).expect("valid grid");
        for _ in 0..4 {
            let f = random_field(g, &mut rng, -1.0, 1.0);
            let lap = ops.laplacian(&f);
            worst_lap = worst_lap.max(rel_diff(&lap, &oracle_laplacian(&f)));
            worst_cons.0 = worst_cons.0.max(conservation_residual(ops, &lap));

            let u = random_field(g, &mut rng, 0.1, 2.0);
            let s = random_field(g, &mut rng, -1.0, 1.0);
            for k in [1.0, 1.5, 2.0] {
                match ops.chemo_divergence(&u, &s, k) {
                    Ok(t) => {
                        worst_taxis = worst_taxis.max(rel_diff(&t, &oracle_chemo_divergence(&u, &s, k)));
                        worst_cons.1 = worst_cons.1.max(conservation_residual(ops, &t));
                    }
                    Err(e) => taxis_err = Some(e),
                }
            }
        }
    }
    report.push(
        "laplacian oracle",
        worst_lap <= ORACLE_RTOL,
        format!("max relative deviation {worst_lap:e} (tol {ORACLE_RTOL:e}) on 8x8 and 32x32"),
    );
    let detail = match taxis_err {
        Some(e) => format!("unexpected error on positive density: {e}"),
        None => format!("max relative deviation {worst_taxis:e} (tol {ORACLE_RTOL:e}), k in {{1, 1.5, 2}}"),
    };
    report.push("chemo_divergence oracle", taxis_err.is_none() && worst_taxis <= ORACLE_RTOL, detail);
    report.push(
        "laplacian conservation",
        worst_cons.0 <= CONSERVATION_RTOL,
        format!("|integral| / scale = {:e} (tol {CONSERVATION_RTOL:e})", worst_cons.0),
    );
    report.push(
        "chemo_divergence conservation",
        worst_cons.1 <= CONSERVATION_RTOL,
        format!("|integral| / scale = {:e} (tol {CONSERVATION_RTOL:e})", worst_cons.1),
    );
}

/// The stepper's assembled right-hand side against [`oracle_rhs`].
pub fn check_rhs(seed: u64, report: &mut VerifyReport) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let g = Grid::unit_square(8).expect("valid grid");
    let mut worst = 0.0f64;
    for p in [ModelParams::with_exponents(1.0, 1.0, 1.0, 1.0), ModelParams::with_exponents(1.5, 0.4, 1.8, 1.0)] {
        let state = SimState::new(
            random_field(g, &mut rng, 0.1, 1.0),
            random_field(g, &mut rng, 0.0, 1.0),
            random_field(g, &mut rng, 0.0, 1.0),
        );
        match Stepper::new(p, StepPolicy::default()).rhs(&state) {
            Ok(d) => {
                let [du, dv, dw] = oracle_rhs(&state, &p);
                worst = worst.max(rel_diff(&d.du, &du)).max(rel_diff(&d.dv, &dv)).max(rel_diff(&d.dw, &dw));
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    report.push("rhs oracle", worst <= ORACLE_RTOL, format!("max relative deviation {worst:e} on 8x8"));
}

/// Exponents exercising every nonlinearity of the forced system.
pub fn mms_params() -> ModelParams {
    ModelParams::with_exponents(1.5, 0.5, 1.8, 1.0)
}

/// Horizon of the manufactured-solution runs.
pub const MMS_T_END: f64 = 0.02;

/// Terminal `max |u − u_exact|` of a forced run with the given policy.
pub fn mms_error(n: usize, policy: StepPolicy, t_end: f64) -> f64 {
    mms_final(n, policy, t_end).1
}

fn mms_final(n: usize, policy: StepPolicy, t_end: f64) -> (SimState, f64) {
    let g = Grid::unit_square(n).expect("valid grid");
    let mms = Manufactured::new(g, mms_params(), DEFAULT_MODES);
    let mut state = mms.initial_state();
    let mut stepper = Stepper::new(mms.params, policy).with_forcing(&mms);
    while state.t < t_end {
        if let Some(ev) = stepper.step_until(&mut state, t_end) {
            if !ev.kind.is_regular() {
                return (state, f64::INFINITY);
            }
        }
    }
    let err = mms.u_error(&state);
    (state, err)
}

/// Spatial order from forced runs at the default adaptive step (`dt ∝ h²`).
pub fn spatial_study(grids: &[usize]) -> Vec<(f64, f64)> {
    grids.iter().map(|&n| (1.0 / n as f64, mms_error(n, StepPolicy::default(), MMS_T_END))).collect()
}

/// Step sizes of the temporal study, and the reference step.
pub const TEMPORAL_DTS: [f64; 3] = [4e-5, 2e-5, 1e-5];
pub const TEMPORAL_REF_DT: f64 = 1.25e-6;

/// Temporal order at fixed grid: errors against a fine-step reference run on
/// the same grid, so the spatial error cancels.
pub fn temporal_study(n: usize) -> Vec<(f64, f64)> {
    let fixed = |dt: f64| StepPolicy { safety: 1.0, dt_max: dt, ..StepPolicy::default() };
    let (reference, _) = mms_final(n, fixed(TEMPORAL_REF_DT), MMS_T_END);
    TEMPORAL_DTS
        .iter()
        .map(|&dt| {
            let (state, _) = mms_final(n, fixed(dt), MMS_T_END);
            (dt, state.u.max_abs_diff(&reference.u))
        })
        .collect()
}

fn order_check(report: &mut VerifyReport, name: &str, samples: &[(f64, f64)], (lo, hi): (f64, f64)) {
    let listing: Vec<String> = samples.iter().map(|(h, e)| format!("({h:e}, {e:e})")).collect();
    match convergence_order(samples) {
        Ok(q) => report.push(name, (lo..=hi).contains(&q), format!("order {q:.4} in [{lo}, {hi}]? errors {}", listing.join(" "))),
        Err(e) => report.push(name, false, format!("{e}; errors {}", listing.join(" "))),
    }
}

/// Grid and horizon of the mass-envelope check on the designated scenario.
pub const ENVELOPE_SCENARIO: &str = "ex4_1_mu1";
pub const ENVELOPE_GRID: usize = 51;
pub const ENVELOPE_T_END: f64 = 1.0;

pub fn check_envelope(report: &mut VerifyReport) {
    let sc = scenarios::lookup(ENVELOPE_SCENARIO).expect("cataloged");
    let g = Grid::unit_square(ENVELOPE_GRID).expect("valid grid");
    let state = scenarios::build(&sc, g);
    let (run, _) = simulate(state, &sc.params, &StepPolicy::default(), ENVELOPE_T_END, SimulateOptions::default(), &mut []);
    let env = &run.envelope_check;
    report.push(
        "mass envelope",
        env.applicable && env.report.passed,
        format!(
            "{ENVELOPE_SCENARIO} on {ENVELOPE_GRID}^2 to t = {ENVELOPE_T_END}: event {}, {} samples, {} violations (tol {:e})",
            run.event.kind,
            env.report.samples,
            env.report.violations.len(),
            env.report.tol
        ),
    );
}

/// Runs every check, or only the operator oracles when `opts.quick`.
pub fn run_verification(ops: &dyn SpatialOps, opts: &VerifyOptions) -> VerifyReport {
    let mut report = VerifyReport::default();
    check_operators(ops, opts.seed, &mut report);
    check_rhs(opts.seed, &mut report);
    if opts.quick {
        return report;
    }
    order_check(&mut report, "mms spatial order", &spatial_study(&opts.spatial_grids), SPATIAL_ORDER);
    order_check(&mut report, "mms temporal order", &temporal_study(opts.temporal_grid), TEMPORAL_ORDER);
    check_envelope(&mut report);
    report
}
