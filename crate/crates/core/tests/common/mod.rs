//! Brute-force reference implementations shared by the integration tests.
//! Each builds an explicit mirrored ghost layer and loops cell by cell.
#![allow(dead_code)]

use chemotaxis::{Field, Grid, ModelParams, SimState};

/// `(nx + 2) × (ny + 2)` copy of `f` whose ghost cells mirror their neighbours.
pub fn padded(f: &Field) -> Vec<Vec<f64>> {
    let g = f.grid();
    let (nx, ny) = (g.nx() as isize, g.ny() as isize);
    (-1..=ny)
        .map(|j| (-1..=nx).map(|i| f.get(i.clamp(0, nx - 1) as usize, j.clamp(0, ny - 1) as usize)).collect())
        .collect()
}

pub fn laplacian(f: &Field) -> Field {
    let g = *f.grid();
    let p = padded(f);
    let (dx2, dy2) = (g.dx() * g.dx(), g.dy() * g.dy());
    let mut out = Field::zeros(g);
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let (a, b) = (i + 1, j + 1);
            let lx = (p[b][a + 1] - 2.0 * p[b][a] + p[b][a - 1]) / dx2;
            let ly = (p[b + 1][a] - 2.0 * p[b][a] + p[b - 1][a]) / dy2;
            out.set(i, j, lx + ly);
        }
    }
    out
}

/// `∇·(ū^k ∇s)` with the face mobility taken from the arithmetic mean of `u`.
pub fn chemo_divergence(u: &Field, s: &Field, k: f64) -> Field {
    let g = *u.grid();
    let (pu, ps) = (padded(u), padded(s));
    let (dx, dy) = (g.dx(), g.dy());
    let flux = |ua: f64, ub: f64, sa: f64, sb: f64, h: f64| (0.5 * (ua + ub)).powf(k) * (sb - sa) / h;
    let mut out = Field::zeros(g);
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let (a, b) = (i + 1, j + 1);
            let east = flux(pu[b][a], pu[b][a + 1], ps[b][a], ps[b][a + 1], dx);
            let west = flux(pu[b][a - 1], pu[b][a], ps[b][a - 1], ps[b][a], dx);
            let north = flux(pu[b][a], pu[b + 1][a], ps[b][a], ps[b + 1][a], dy);
            let south = flux(pu[b - 1][a], pu[b][a], ps[b - 1][a], ps[b][a], dy);
            out.set(i, j, (east - west) / dx + (north - south) / dy);
        }
    }
    out
}

pub fn quadrature(f: &Field) -> f64 {
    let g = f.grid();
    f.values().iter().sum::<f64>() * g.dx() * g.dy()
}

/// Right-hand side assembled term by term.
pub fn rhs(s: &SimState, p: &ModelParams) -> [Field; 3] {
    let g = *s.u.grid();
    let (lu, lv, lw) = (laplacian(&s.u), laplacian(&s.v), laplacian(&s.w));
    let attract = chemo_divergence(&s.u, &s.v, p.k_exp);
    let repel = chemo_divergence(&s.u, &s.w, p.k_exp);
    let mass = quadrature(&s.u);
    let mut out = [Field::zeros(g), Field::zeros(g), Field::zeros(g)];
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let u = s.u.get(i, j);
            let f = p.k_coef * u.powf(p.l_exp);
            let du = p.d1 * lu.get(i, j) - p.chi * attract.get(i, j)
                + p.xi * repel.get(i, j)
                + p.mu * u.powf(p.m_exp) * (1.0 - mass);
            out[0].set(i, j, du);
            out[1].set(i, j, p.d2 * lv.get(i, j) - p.alpha * s.v.get(i, j) + f);
            out[2].set(i, j, p.d3 * lw.get(i, j) - p.beta * s.w.get(i, j) + f);
        }
    }
    out
}

/// `max |a − b| / max(1, max |b|)`.
pub fn rel_dev(a: &Field, b: &Field) -> f64 {
    let scale = b.values().iter().fold(1.0f64, |m, x| m.max(x.abs()));
    a.max_abs_diff(b) / scale
}

/// Midpoint quadrature of `f` on an `n × n` grid of the reference square.
pub fn fine_quadrature(n: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
    let g = Grid::unit_square(n).unwrap();
    let mut sum = 0.0;
    for j in 0..n {
        let y = g.y_center(j);
        for i in 0..n {
            sum += f(g.x_center(i), y);
        }
    }
    sum * g.dx() * g.dy()
}
