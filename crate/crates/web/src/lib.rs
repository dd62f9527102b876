//! Browser bindings: an interactive run with a density heatmap, the
//! boundedness-region explorer and the mass-envelope curve.

use chemotaxis::diagnostics::DEFAULT_P_NORMS;
use chemotaxis::model::MassEnvelope;
use chemotaxis::scenarios::{self, Scenario};
use chemotaxis::stepper::{Event, Stepper};
use chemotaxis::{theorem1_predicate, Grid, ModelParams, SimState, StepPolicy};
use wasm_bindgen::prelude::*;

/// Largest grid the page offers; keeps a frame of steps interactive.
pub const MAX_GRID: usize = 201;

/// A running simulation of one catalog scenario.
#[wasm_bindgen]
pub struct Simulation {
    scenario: Scenario,
    stepper: Stepper<'static>,
    state: SimState,
    event: Option<Event>,
    /// `(t, M)` after every batch of steps.
    masses: Vec<f64>,
}

#[wasm_bindgen]
impl Simulation {
    /// Starts `scenario` (catalog name) on an `n × n` grid.
    #[wasm_bindgen(constructor)]
    pub fn new(scenario: &str, n: usize) -> Result<Simulation, JsError> {
        let scenario = scenarios::lookup(scenario).map_err(|e| JsError::new(&e.to_string()))?;
        if !(3..=MAX_GRID).contains(&n) {
            return Err(JsError::new(&format!("grid size must be in 3..={MAX_GRID}, got {n}")));
        }
        let grid = Grid::unit_square(n).map_err(|e| JsError::new(&e.to_string()))?;
        let state = scenarios::build(&scenario, grid);
        let masses = vec![0.0, state.m0];
        let stepper = Stepper::new(scenario.params, StepPolicy::default());
        Ok(Simulation { scenario, stepper, state, event: None, masses })
    }

    /// Advances up to `steps` steps without passing the scenario horizon;
    /// returns false once the run has ended.
    pub fn advance(&mut self, steps: u32) -> bool {
        if self.event.is_some() {
            return false;
        }
        let t_end = self.scenario.t_end;
        for _ in 0..steps {
            if self.state.t >= t_end {
                self.event = Some(Event {
                    kind: chemotaxis::EventKind::TimeLimit,
                    t_event: self.state.t,
                    step: self.state.step,
                    detail: format!("reached t_end = {t_end:e}"),
                });
                break;
            }
            if let Some(ev) = self.stepper.step_until(&mut self.state, t_end) {
                self.event = Some(ev);
                break;
            }
        }
        if self.state.is_finite() {
            self.masses.extend([self.state.t, self.state.mass()]);
        }
        self.event.is_none()
    }

    pub fn name(&self) -> String {
        self.scenario.name.clone()
    }
    pub fn t(&self) -> f64 {
        self.state.t
    }
    pub fn steps(&self) -> f64 {
        self.state.step as f64
    }
    pub fn n(&self) -> usize {
        self.state.grid().nx()
    }
    pub fn max_u(&self) -> f64 {
        self.state.u.max()
    }
    pub fn min_u(&self) -> f64 {
        self.state.u.min()
    }
    pub fn mass(&self) -> f64 {
        self.state.mass()
    }
    pub fn m0(&self) -> f64 {
        self.state.m0
    }
    pub fn mu(&self) -> f64 {
        self.scenario.params.mu
    }
    pub fn m_exp(&self) -> f64 {
        self.scenario.params.m_exp
    }

    /// Terminal event as text, or an empty string while running.
    pub fn event(&self) -> String {
        self.event.as_ref().map_or_else(String::new, |e| format!("{} at t = {:e}: {}", e.kind, e.t_event, e.detail))
    }

    /// Flattened `(t, M)` pairs recorded so far.
    pub fn mass_series(&self) -> Vec<f64> {
        self.masses.clone()
    }

    /// The density as RGBA pixels, top row first, on a logarithmic scale.
    pub fn u_rgba(&self) -> Vec<u8> {
        heatmap(&self.state)
    }

    /// Current L¹ and L² norms of u.
    pub fn norms(&self) -> Vec<f64> {
        chemotaxis::diagnostics::norms(&self.state.u, &DEFAULT_P_NORMS).lp
    }
}

/// Catalog names, newline separated.
#[wasm_bindgen]
pub fn scenario_names() -> String {
    scenarios::catalog().into_iter().map(|s| s.name).collect::<Vec<_>>().join("\n")
}

/// Verdict of the exponent conditions in dimension `n`, as text.
#[wasm_bindgen]
pub fn boundedness(n: u32, k: f64, l: f64, m: f64) -> String {
    theorem1_predicate(n.max(1), &ModelParams::with_exponents(k, l, m, 1.0)).to_string()
}

/// `res × res` RGBA map of the bounded region in the `(l, m)` plane at fixed
/// `k`, with `l` in `(0, l_max]` left to right and `m` in `[1, m_max]` bottom to top.
#[wasm_bindgen]
pub fn region_rgba(n: u32, k: f64, l_max: f64, m_max: f64, res: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(res * res * 4);
    for row in 0..res {
        let m = m_max - (m_max - 1.0) * (row as f64 + 0.5) / res as f64;
        for col in 0..res {
            let l = l_max * (col as f64 + 0.5) / res as f64;
            let inside = theorem1_predicate(n.max(1), &ModelParams::with_exponents(k, l, m, 1.0)).bounded;
            out.extend_from_slice(if inside { &[70, 160, 90, 255] } else { &[235, 235, 235, 255] });
        }
    }
    out
}

/// Samples of the mass bounds on `[0, t_max]`: rows of
/// `t, lower, upper, 1 − envelope, 1 + envelope`, flattened.
#[wasm_bindgen]
pub fn mass_envelope_curve(m0: f64, m_exp: f64, t_max: f64, samples: usize) -> Vec<f64> {
    let e = MassEnvelope::new(m0, m_exp);
    let n = samples.max(2);
    (0..n)
        .flat_map(|i| {
            let t = t_max * i as f64 / (n - 1) as f64;
            let d = e.envelope(t);
            [t, e.lower(), e.upper(), 1.0 - d, 1.0 + d]
        })
        .collect()
}

/// Log-scaled colour map of u; negative cells are drawn in blue.
fn heatmap(state: &SimState) -> Vec<u8> {
    let g = state.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let top = state.u.max().max(f64::MIN_POSITIVE);
    let floor = top * 1e-6;
    let span = (top / floor).ln();
    let mut out = Vec::with_capacity(nx * ny * 4);
    for j in (0..ny).rev() {
        for i in 0..nx {
            let u = state.u.get(i, j);
            let px = if u < 0.0 {
                [40, 90, 255, 255]
            } else {
                let s = ((u.max(floor) / floor).ln() / span).clamp(0.0, 1.0);
                ramp(s)
            };
            out.extend_from_slice(&px);
        }
    }
    out
}

/// Dark-to-bright colour ramp on `[0, 1]`.
fn ramp(s: f64) -> [u8; 4] {
    let c = |x: f64| (x.clamp(0.0, 1.0) * 255.0).round() as u8;
    [c(1.5 * s), c(1.5 * s - 0.5), c(3.0 * s - 2.0), 255]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simulation_advances_and_renders() {
        let mut sim = Simulation::new("ex4_1_mu1", 21).unwrap();
        assert!(sim.advance(50));
        assert_eq!(sim.steps(), 50.0);
        assert_eq!(sim.u_rgba().len(), 21 * 21 * 4);
        assert_eq!(sim.mass_series().len(), 4);
        assert!(sim.mass() < sim.m0());
    }

    #[test]
    fn simulation_reports_terminal_event() {
        let mut sim = Simulation::new("ex4_9_mu0", 61).unwrap();
        while sim.advance(100) {}
        assert!(sim.event().starts_with("ImaginaryState"), "{}", sim.event());
        assert!(!sim.advance(1));
    }

    #[test]
    fn region_and_envelope_shapes() {
        let img = region_rgba(2, 1.0, 1.5, 2.5, 8);
        assert_eq!(img.len(), 8 * 8 * 4);
        // l small, m just below 2 is bounded; l large is not
        assert!(boundedness(2, 1.0, 0.5, 1.8).contains("n = 2: bounded regime"));
        assert!(boundedness(2, 1.0, 1.2, 1.8).contains("outside"));
        let curve = mass_envelope_curve(31.4, 1.0, 5.0, 3);
        assert_eq!(curve.len(), 15);
        assert_eq!(&curve[..5], &[0.0, 1.0, 31.4, 1.0 - 30.4, 1.0 + 30.4]);
    }
}
