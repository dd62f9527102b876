//! Manufactured solutions: forcing terms that make a chosen smooth triple an
//! exact solution of the forced system, for measuring convergence orders.
//!
//! Each unknown has the form `a + b C(x, y) e^(−t)` with
//! `C = cos(2πx) cos(2πy)`, which satisfies the zero-flux boundary condition
//! on the centered unit square and has `∫C = 0` there.

use std::f64::consts::PI;

use crate::grid::{integrate, Field, Grid};
use crate::model::ModelParams;
use crate::stepper::{Forcing, SimState};

/// Offset and modal amplitude of one manufactured unknown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub offset: f64,
    pub amplitude: f64,
}

impl Mode {
    pub const fn new(offset: f64, amplitude: f64) -> Self {
        Self { offset, amplitude }
    }
}

/// Positive densities keep every fractional power real.
pub const DEFAULT_MODES: [Mode; 3] = [Mode::new(2.0, 1.0), Mode::new(1.0, 0.5), Mode::new(1.0, -0.5)];

#[derive(Debug, Clone)]
pub struct Manufactured {
    pub params: ModelParams,
    pub u: Mode,
    pub v: Mode,
    pub w: Mode,
    grid: Grid,
    /// `C` at cell centers.
    c: Vec<f64>,
    /// `|∇C|²` at cell centers.
    grad2: Vec<f64>,
}

const K2: f64 = 8.0 * PI * PI;

fn mode_c(x: f64, y: f64) -> f64 {
    (2.0 * PI * x).cos() * (2.0 * PI * y).cos()
}

impl Manufactured {
    pub fn new(grid: Grid, params: ModelParams, [u, v, w]: [Mode; 3]) -> Self {
        let c = Field::from_fn(grid, mode_c).into_values();
        let grad2 = Field::from_fn(grid, |x, y| {
            let (sx, cx) = (2.0 * PI * x).sin_cos();
            let (sy, cy) = (2.0 * PI * y).sin_cos();
            4.0 * PI * PI * ((sx * cy).powi(2) + (cx * sy).powi(2))
        })
        .into_values();
        Self { params, u, v, w, grid, c, grad2 }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// The exact triple at time `t`, sampled at cell centers.
    pub fn exact(&self, t: f64) -> [Field; 3] {
        let e = (-t).exp();
        [self.u, self.v, self.w].map(|m| {
            let vals = self.c.iter().map(|&c| m.offset + m.amplitude * c * e).collect();
            Field::from_values(self.grid, vals).expect("sized to grid")
        })
    }

    pub fn initial_state(&self) -> SimState {
        let [u, v, w] = self.exact(0.0);
        SimState::new(u, v, w)
    }

    /// `max |u − u_exact(t)|` over cells.
    pub fn u_error(&self, state: &SimState) -> f64 {
        let [u, _, _] = self.exact(state.t);
        state.u.max_abs_diff(&u)
    }

    /// Mass of the exact density, `∫u = offset` on the unit square.
    pub fn exact_mass(&self) -> f64 {
        self.u.offset * self.grid.area()
    }

    /// Discrete mass of the sampled density; equals [`Self::exact_mass`] up to
    /// roundoff because the midpoint rule integrates `C` exactly.
    pub fn sampled_mass(&self, t: f64) -> f64 {
        integrate(&self.exact(t)[0])
    }
}

impl Forcing for Manufactured {
    fn add(&self, grid: &Grid, t: f64, du: &mut [f64], dv: &mut [f64], dw: &mut [f64]) {
        assert_eq!(grid, &self.grid, "forcing was built for a different grid");
        let p = &self.params;
        let e = (-t).exp();
        let (k, l, m) = (p.k_exp, p.l_exp, p.m_exp);
        let (bu, bv, bw) = (self.u.amplitude, self.v.amplitude, self.w.amplitude);
        let source = p.mu * (1.0 - self.exact_mass());
        for idx in 0..grid.len() {
            let c = self.c[idx];
            let g2 = self.grad2[idx];
            let u = self.u.offset + bu * c * e;
            let v = self.v.offset + bv * c * e;
            let w = self.w.offset + bw * c * e;
            let lap = |b: f64| -K2 * b * c * e;
            // ∇·(u^k ∇s) = k u^(k−1) ∇u·∇s + u^k Δs
            let taxis = |b: f64| k * u.powf(k - 1.0) * bu * b * e * e * g2 + u.powf(k) * lap(b);
            let prod = p.k_coef * u.powf(l);

            let ut = -bu * c * e;
            let vt = -bv * c * e;
            let wt = -bw * c * e;
            du[idx] += ut - (p.d1 * lap(bu) - p.chi * taxis(bv) + p.xi * taxis(bw) + source * u.powf(m));
            dv[idx] += vt - (p.d2 * lap(bv) - p.alpha * v + prod);
            dw[idx] += wt - (p.d3 * lap(bw) - p.beta * w + prod);
        }
    }
}
