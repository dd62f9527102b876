//! Cell-centered rectangular grid, scalar fields, and the discrete operators
//! of the model: the Neumann Laplacian, the conservative taxis divergence and
//! midpoint quadrature.
//!
//! Fields are stored row-major with `x` fastest: cell `(i, j)` lives at
//! `j * nx + i`. Every boundary face is a zero-flux face, which is what the
//! mirror-ghost construction of a homogeneous Neumann condition reduces to.

use serde::{Deserialize, Serialize};

use crate::error::{Error, ImaginaryState, Result};
use crate::power::Power;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    nx: usize,
    ny: usize,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    dx: f64,
    dy: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidGrid(format!("cell counts must be positive, got {nx}x{ny}")));
        }
        if ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) || x_max <= x_min || y_max <= y_min {
            return Err(Error::InvalidGrid(format!(
                "bounds [{x_min}, {x_max}] x [{y_min}, {y_max}] are not a finite box"
            )));
        }
        Ok(Self {
            nx,
            ny,
            x_min,
            x_max,
            y_min,
            y_max,
            dx: (x_max - x_min) / nx as f64,
            dy: (y_max - y_min) / ny as f64,
        })
    }

    /// `n x n` cells on the centered unit square `[-1/2, 1/2]^2`.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(n, n, -0.5, 0.5, -0.5, 0.5)
    }

    /// The 201 x 201 grid used by all reference experiments.
    pub fn reference() -> Self {
        Self::unit_square(201).expect("valid grid")
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn dy(&self) -> f64 {
        self.dy
    }
    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn y_min(&self) -> f64 {
        self.y_min
    }
    pub fn y_max(&self) -> f64 {
        self.y_max
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }
    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Inverse of [`Grid::index`].
    #[inline]
    pub fn cell(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    // Centers are measured from the box midpoint so that mirrored cells get
    // exactly negated offsets.
    pub fn x_center(&self, i: usize) -> f64 {
        0.5 * (self.x_min + self.x_max) + (2.0 * i as f64 + 1.0 - self.nx as f64) * (0.5 * self.dx)
    }

    pub fn y_center(&self, j: usize) -> f64 {
        0.5 * (self.y_min + self.y_max) + (2.0 * j as f64 + 1.0 - self.ny as f64) * (0.5 * self.dy)
    }
}

/// Scalar unknown sampled at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x, y)` at every cell center.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            let y = grid.y_center(j);
            for i in 0..grid.nx {
                values.push(f(grid.x_center(i), y));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.grid.index(i, j);
        self.values[idx] = v;
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `max |self - other|`.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Mirror image `x -> -x` (about the box midpoint).
    pub fn reflect_x(&self) -> Field {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut out = self.clone();
        for j in 0..ny {
            for i in 0..nx {
                out.set(i, j, self.get(nx - 1 - i, j));
            }
        }
        out
    }

    /// Mirror image `y -> -y`.
    pub fn reflect_y(&self) -> Field {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut out = self.clone();
        for j in 0..ny {
            for i in 0..nx {
                out.set(i, j, self.get(i, ny - 1 - j));
            }
        }
        out
    }

    /// Swap `x <-> y`. Only meaningful on square grids.
    pub fn transpose(&self) -> Field {
        let g = self.grid;
        let tg = Grid::new(g.ny, g.nx, g.y_min, g.y_max, g.x_min, g.x_max).expect("transposed grid");
        let mut out = Field::zeros(tg);
        for j in 0..g.ny {
            for i in 0..g.nx {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }
}

/// Five-point Laplacian with mirror ghosts on every boundary face.
pub fn laplacian(f: &Field) -> Field {
    let mut out = Field::zeros(f.grid);
    laplacian_into(f, &mut out.values);
    out
}

/// [`laplacian`] into a caller-owned buffer of `nx * ny` values.
pub fn laplacian_into(f: &Field, out: &mut [f64]) {
    let g = &f.grid;
    assert_eq!(out.len(), f.values.len());
    for (j, orow) in out.chunks_exact_mut(g.nx).enumerate() {
        laplacian_row(g, &f.values, j, orow);
    }
}

/// Row `j` of the five-point Laplacian of the flat field `v`.
#[inline(always)]
pub(crate) fn laplacian_row(g: &Grid, v: &[f64], j: usize, orow: &mut [f64]) {
    let (nx, ny) = (g.nx, g.ny);
    let (idx2, idy2) = (1.0 / (g.dx * g.dx), 1.0 / (g.dy * g.dy));
    let c = &v[j * nx..(j + 1) * nx];
    let orow = &mut orow[..nx];

    // A ghost equal to the cell value makes that one-sided difference vanish,
    // so boundary cells only see their interior neighbours.
    if nx == 1 {
        orow[0] = 0.0;
    } else {
        orow[0] = (c[1] - c[0]) * idx2;
        for (o, w) in orow[1..nx - 1].iter_mut().zip(c.windows(3)) {
            *o = ((w[2] - w[1]) - (w[1] - w[0])) * idx2;
        }
        orow[nx - 1] = (0.0 - (c[nx - 1] - c[nx - 2])) * idx2;
    }
    if ny == 1 {
        return;
    }
    if j == 0 {
        let up = &v[nx..2 * nx];
        for ((o, &a), &b) in orow.iter_mut().zip(c).zip(up) {
            *o += (b - a) * idy2;
        }
    } else if j == ny - 1 {
        let down = &v[(j - 1) * nx..j * nx];
        for ((o, &a), &b) in orow.iter_mut().zip(c).zip(down) {
            *o += (0.0 - (a - b)) * idy2;
        }
    } else {
        let down = &v[(j - 1) * nx..j * nx];
        let up = &v[(j + 1) * nx..(j + 2) * nx];
        for (((o, &a), &b), &d) in orow.iter_mut().zip(c).zip(up).zip(down) {
            *o += ((b - a) - (a - d)) * idy2;
        }
    }
}

/// `div(u^k grad s)` in conservative flux form.
///
/// Face mobility is `((u_L + u_R) / 2)^k`; boundary faces carry no flux.
pub fn chemo_divergence(u: &Field, s: &Field, k: f64) -> Result<Field, ImaginaryState> {
    let mut out = Field::zeros(u.grid);
    chemo_divergence_into(u, s, Power::new(k), &mut out.values, &mut TaxisScratch::default())?;
    Ok(out)
}

/// Row buffers reused across calls of [`chemo_divergence_into`].
#[derive(Debug, Default, Clone)]
pub struct TaxisScratch {
    fx: Vec<f64>,
    fy_lo: Vec<f64>,
    fy_hi: Vec<f64>,
}

pub fn chemo_divergence_into(
    u: &Field,
    s: &Field,
    k: Power,
    out: &mut [f64],
    scratch: &mut TaxisScratch,
) -> Result<(), ImaginaryState> {
    let g = &u.grid;
    let (nx, ny) = (g.nx, g.ny);
    let (dx, dy) = (g.dx, g.dy);
    let (uv, sv) = (&u.values, &s.values);
    assert_eq!(sv.len(), uv.len());
    assert_eq!(out.len(), uv.len());

    scratch.fx.clear();
    scratch.fx.resize(nx + 1, 0.0);
    scratch.fy_lo.clear();
    scratch.fy_lo.resize(nx, 0.0);
    scratch.fy_hi.clear();
    scratch.fy_hi.resize(nx, 0.0);
    let TaxisScratch { fx, fy_lo, fy_hi } = scratch;

    if k.exponent() == 1.0 {
        taxis_rows(uv, sv, nx, ny, dx, dy, out, fx, fy_lo, fy_hi, |a, b| Some(0.5 * (a + b)))
    } else if k.is_fractional() {
        taxis_rows(uv, sv, nx, ny, dx, dy, out, fx, fy_lo, fy_hi, |a, b| k.checked(0.5 * (a + b)))
    } else {
        taxis_rows(uv, sv, nx, ny, dx, dy, out, fx, fy_lo, fy_hi, |a, b| Some(k.apply(0.5 * (a + b))))
    }
}

#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn taxis_rows(
    uv: &[f64],
    sv: &[f64],
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    out: &mut [f64],
    fx: &mut [f64],
    fy_lo: &mut Vec<f64>,
    fy_hi: &mut Vec<f64>,
    mobility: impl Fn(f64, f64) -> Option<f64>,
) -> Result<(), ImaginaryState> {
    #[cold]
    fn imaginary(a: f64, b: f64, i: usize, j: usize) -> ImaginaryState {
        ImaginaryState { i, j, value: 0.5 * (a + b), quantity: "face u^k" }
    }

    let (rdx, rdy) = (1.0 / dx, 1.0 / dy);
    for j in 0..ny {
        let row = &uv[j * nx..(j + 1) * nx];
        let srow = &sv[j * nx..(j + 1) * nx];
        // x-faces of this row; fx[0] and fx[nx] stay zero
        for i in 0..nx - 1 {
            let (a, b) = (row[i], row[i + 1]);
            let Some(mob) = mobility(a, b) else { return Err(imaginary(a, b, i, j)) };
            fx[i + 1] = mob * (srow[i + 1] - srow[i]) * rdx;
        }
        // y-faces above this row
        if j + 1 < ny {
            let up = &uv[(j + 1) * nx..(j + 2) * nx];
            let sup = &sv[(j + 1) * nx..(j + 2) * nx];
            for i in 0..nx {
                let (a, b) = (row[i], up[i]);
                let Some(mob) = mobility(a, b) else { return Err(imaginary(a, b, i, j)) };
                fy_hi[i] = mob * (sup[i] - srow[i]) * rdy;
            }
        } else {
            fy_hi.iter_mut().for_each(|f| *f = 0.0);
        }
        let orow = &mut out[j * nx..(j + 1) * nx];
        for i in 0..nx {
            orow[i] = (fx[i + 1] - fx[i]) * rdx + (fy_hi[i] - fy_lo[i]) * rdy;
        }
        std::mem::swap(fy_lo, fy_hi);
    }
    Ok(())
}

/// Midpoint rule: `dx * dy * sum(f)`.
///
/// Rows are summed first, then the row sums in order, so the result does not
/// depend on how the field was produced.
pub fn integrate(f: &Field) -> f64 {
    f.grid.cell_area() * sum_rows(&f.values, f.grid.nx)
}

pub(crate) fn sum_rows(values: &[f64], nx: usize) -> f64 {
    values.chunks_exact(nx).map(|row| row.iter().sum::<f64>()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = Grid::reference();
        assert_eq!(g.len(), 201 * 201);
        assert!((g.dx() - 1.0 / 201.0).abs() < 1e-17);
        assert!((g.x_center(0) - (-0.5 + 0.5 / 201.0)).abs() < 1e-15);
        assert_eq!(g.x_center(100), 0.0);
        for i in 0..201 {
            assert_eq!(g.x_center(i), -g.x_center(200 - i));
        }
        assert!(Grid::new(0, 4, 0.0, 1.0, 0.0, 1.0).is_err());
        assert!(Grid::new(4, 4, 1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let g = Grid::unit_square(13).unwrap();
        let lap = laplacian(&Field::constant(g, 3.7));
        assert!(lap.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn laplacian_exact_on_quadratics_in_interior() {
        let g = Grid::unit_square(64).unwrap();
        let f = Field::from_fn(g, |x, y| x * x + y * y);
        let lap = laplacian(&f);
        let mut worst: f64 = 0.0;
        for j in 1..63 {
            for i in 1..63 {
                worst = worst.max((lap.get(i, j) - 4.0).abs());
            }
        }
        assert!(worst < 1e-10, "interior error {worst}");
    }

    #[test]
    fn taxis_trivial_cases() {
        let g = Grid::unit_square(10).unwrap();
        let u = Field::from_fn(g, |x, y| 1.0 + x * y);
        let flat = Field::constant(g, 2.0);
        let d = chemo_divergence(&u, &flat, 1.5).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));

        let s = Field::from_fn(g, |x, y| (3.0 * x).sin() + y);
        let d = chemo_divergence(&Field::zeros(g), &s, 1.0).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn taxis_flags_negative_face_for_fractional_k() {
        let g = Grid::unit_square(4).unwrap();
        let mut u = Field::constant(g, 1.0);
        u.set(1, 2, -5.0);
        let s = Field::from_fn(g, |x, _| x);
        let err = chemo_divergence(&u, &s, 1.5).unwrap_err();
        assert!(err.value < 0.0);
        // integer exponents accept negative densities
        assert!(chemo_divergence(&u, &s, 1.0).is_ok());
    }

    #[test]
    fn integrate_examples() {
        let g = Grid::reference();
        let c = integrate(&Field::constant(g, 2.5));
        assert!((c - 2.5).abs() < 1e-12);

        let mut f = Field::zeros(g);
        f.set(7, 9, 4.0);
        assert_eq!(integrate(&f), 4.0 * g.cell_area());
    }

    #[test]
    fn symmetric_sampling() {
        let g = Grid::unit_square(9).unwrap();
        let f = Field::from_fn(g, |x, y| (-5.0 * (x * x + y * y)).exp() + x * x * y * y);
        assert_eq!(f.reflect_x(), f);
        assert_eq!(f.reflect_y(), f);
        assert_eq!(f.transpose(), f);
    }
}
