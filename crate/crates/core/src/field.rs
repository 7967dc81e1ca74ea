//! Uniform sampling grids and complex fields.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::kernel::Point2;
use crate::math::sqrt;
use crate::{Error, Result};

/// Relative slack when deciding that a coordinate sits on a lattice node.
const LATTICE_TOL: f64 = 1e-6;

/// Axis point `j` is `start + j * step`. Values are stored row-major with the
/// first axis as the row index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D {
    pub n1: usize,
    pub n2: usize,
    pub start1: f64,
    pub start2: f64,
    pub step1: f64,
    pub step2: f64,
}

impl Grid2D {
    pub fn new(n1: usize, n2: usize, start1: f64, start2: f64, step1: f64, step2: f64) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::EmptyGrid);
        }
        let ok = |s: f64| s.is_finite() && s > 0.0;
        if !ok(step1) || !ok(step2) || !start1.is_finite() || !start2.is_finite() {
            return Err(Error::InvalidGrid);
        }
        Ok(Grid2D { n1, n2, start1, start2, step1, step2 })
    }

    /// `n1 x n2` cell centers covering the rectangle `[lo, hi]`.
    pub fn from_interval(lo: Point2, hi: Point2, n1: usize, n2: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::EmptyGrid);
        }
        let h1 = (hi.p1 - lo.p1) / n1 as f64;
        let h2 = (hi.p2 - lo.p2) / n2 as f64;
        Grid2D::new(n1, n2, lo.p1 + 0.5 * h1, lo.p2 + 0.5 * h2, h1, h2)
    }

    /// Square grid of cell centers on `[lo, hi]^2`.
    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Grid2D::from_interval(Point2::new(lo, lo), Point2::new(hi, hi), n, n)
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.step1 * self.step2
    }

    pub fn coord1(&self, i: usize) -> f64 {
        self.start1 + i as f64 * self.step1
    }

    pub fn coord2(&self, j: usize) -> f64 {
        self.start2 + j as f64 * self.step2
    }

    pub fn point(&self, i: usize, j: usize) -> Point2 {
        Point2::new(self.coord1(i), self.coord2(j))
    }

    /// Row-major iteration over all nodes.
    pub fn points(&self) -> impl Iterator<Item = Point2> + '_ {
        (0..self.n1).flat_map(move |i| (0..self.n2).map(move |j| self.point(i, j)))
    }

    fn fractional_index(&self, p: Point2) -> (f64, f64) {
        ((p.p1 - self.start1) / self.step1, (p.p2 - self.start2) / self.step2)
    }

    /// Node index if `p` is a lattice node inside the grid.
    pub fn node_index(&self, p: Point2) -> Option<(usize, usize)> {
        let (r1, r2) = self.fractional_index(p);
        let (i, j) = (libm::round(r1), libm::round(r2));
        let tol = |r: f64| LATTICE_TOL * r.abs().max(1.0);
        if (r1 - i).abs() > tol(r1) || (r2 - j).abs() > tol(r2) {
            return None;
        }
        self.index_in_range(i, j)
    }

    /// Nearest node if `p` lies within half a step of one.
    pub fn nearest_node(&self, p: Point2) -> Option<(usize, usize)> {
        let (r1, r2) = self.fractional_index(p);
        self.index_in_range(libm::round(r1), libm::round(r2))
    }

    /// Signed lattice offset of `p` from the grid origin, if `p` is on the
    /// (unbounded) lattice.
    pub fn lattice_offset(&self, p: Point2) -> Option<(i64, i64)> {
        let (r1, r2) = self.fractional_index(p);
        let (i, j) = (libm::round(r1), libm::round(r2));
        let tol = |r: f64| LATTICE_TOL * r.abs().max(1.0);
        if (r1 - i).abs() > tol(r1) || (r2 - j).abs() > tol(r2) {
            return None;
        }
        Some((i as i64, j as i64))
    }

    fn index_in_range(&self, i: f64, j: f64) -> Option<(usize, usize)> {
        if i < 0.0 || j < 0.0 || i >= self.n1 as f64 || j >= self.n2 as f64 {
            None
        } else {
            Some((i as usize, j as usize))
        }
    }

    /// Same dimensions and steps, origin moved by `offset`.
    pub fn translated(&self, offset: Point2) -> Self {
        Grid2D { start1: self.start1 + offset.p1, start2: self.start2 + offset.p2, ..*self }
    }

    /// Equal to within a relative tolerance on every parameter.
    pub fn approx_eq(&self, o: &Grid2D) -> bool {
        let close = |a: f64, b: f64, scale: f64| (a - b).abs() <= 1e-9 * scale;
        self.n1 == o.n1
            && self.n2 == o.n2
            && close(self.step1, o.step1, self.step1)
            && close(self.step2, o.step2, self.step2)
            && close(self.start1, o.start1, self.step1)
            && close(self.start2, o.start2, self.step2)
    }

    /// Extent of the sampled cells: `[start - step/2, end + step/2]` per axis.
    pub fn cell_bounds(&self) -> (Point2, Point2) {
        (
            Point2::new(self.start1 - 0.5 * self.step1, self.start2 - 0.5 * self.step2),
            Point2::new(
                self.coord1(self.n1 - 1) + 0.5 * self.step1,
                self.coord2(self.n2 - 1) + 0.5 * self.step2,
            ),
        )
    }
}

/// Closed-form signal that can be evaluated anywhere in the plane.
pub trait Analytic: Send + Sync {
    fn eval(&self, x: Point2) -> Complex64;
}

/// Samples of a complex signal on a [`Grid2D`], optionally carrying the
/// analytic generator it was sampled from.
#[derive(Clone)]
pub struct ComplexField {
    grid: Grid2D,
    values: Vec<Complex64>,
    analytic: Option<Arc<dyn Analytic>>,
}

impl fmt::Debug for ComplexField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexField")
            .field("grid", &self.grid)
            .field("len", &self.values.len())
            .field("analytic", &self.analytic.is_some())
            .finish()
    }
}

impl PartialEq for ComplexField {
    fn eq(&self, o: &Self) -> bool {
        self.grid == o.grid && self.values == o.values
    }
}

impl ComplexField {
    pub fn new(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch);
        }
        Ok(ComplexField { grid, values, analytic: None })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        ComplexField { grid, values: alloc::vec![Complex64::new(0.0, 0.0); grid.len()], analytic: None }
    }

    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(Point2) -> Complex64) -> Self {
        let values = grid.points().map(&mut f).collect();
        ComplexField { grid, values, analytic: None }
    }

    /// Samples `source` on `grid` and keeps it as the analytic extension.
    pub fn from_analytic(grid: Grid2D, source: Arc<dyn Analytic>) -> Self {
        let values = grid.points().map(|p| source.eval(p)).collect();
        ComplexField { grid, values, analytic: Some(source) }
    }

    pub fn with_analytic(mut self, source: Arc<dyn Analytic>) -> Self {
        self.analytic = Some(source);
        self
    }

    pub fn without_analytic(mut self) -> Self {
        self.analytic = None;
        self
    }

    pub fn analytic(&self) -> Option<&Arc<dyn Analytic>> {
        self.analytic.as_ref()
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.n2 + j]
    }

    /// Sample at an exact lattice node, zero outside the grid.
    pub fn sample_at(&self, p: Point2) -> Option<Complex64> {
        let (i, j) = self.grid.lattice_offset(p)?;
        Some(self.sample_signed(i, j))
    }

    /// Sample at a signed lattice index, zero outside the grid.
    pub fn sample_signed(&self, i: i64, j: i64) -> Complex64 {
        if i < 0 || j < 0 || i >= self.grid.n1 as i64 || j >= self.grid.n2 as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.get(i as usize, j as usize)
        }
    }

    pub fn map(&self, mut f: impl FnMut(Point2, Complex64) -> Complex64) -> Self {
        let values = self.grid.points().zip(&self.values).map(|(p, &v)| f(p, v)).collect();
        ComplexField { grid: self.grid, values, analytic: None }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        self.map(|_, v| v * s)
    }

    /// Pointwise sum; grids must match.
    pub fn add(&self, o: &ComplexField) -> Result<Self> {
        if !self.grid.approx_eq(&o.grid) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect();
        Ok(ComplexField { grid: self.grid, values, analytic: None })
    }

    /// `sum |f|^2 dA`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn mean_power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }

    /// `sum f conj(g) dA` over a shared grid.
    pub fn inner(&self, g: &ComplexField) -> Result<Complex64> {
        if !self.grid.approx_eq(&g.grid) {
            return Err(Error::GridMismatch);
        }
        let s: Complex64 = self.values.iter().zip(&g.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.cell_area())
    }

    /// Same samples on a grid moved by `x0`: the field `f(. - x0)`.
    pub fn translated(&self, x0: Point2) -> Self {
        ComplexField { grid: self.grid.translated(x0), values: self.values.clone(), analytic: None }
    }

    /// `f(-.)`, sampled on the mirrored grid.
    pub fn reflected(&self) -> Self {
        let g = &self.grid;
        let grid = Grid2D {
            start1: -g.coord1(g.n1 - 1),
            start2: -g.coord2(g.n2 - 1),
            ..*g
        };
        let values = self.values.iter().rev().copied().collect();
        ComplexField { grid, values, analytic: None }
    }

    /// `sqrt(lam) f(lam .)`: same samples scaled by `sqrt(lam)` on a grid
    /// whose origin and steps are divided by `lam`.
    pub fn dilated(&self, lam: f64) -> Result<Self> {
        if !(lam.is_finite() && lam > 0.0) {
            return Err(Error::InvalidArgument("dilation factor must be positive"));
        }
        let g = &self.grid;
        let grid = Grid2D::new(g.n1, g.n2, g.start1 / lam, g.start2 / lam, g.step1 / lam, g.step2 / lam)?;
        let s = sqrt(lam);
        let values = self.values.iter().map(|v| v * s).collect();
        Ok(ComplexField { grid, values, analytic: None })
    }

    /// Full linear convolution `sum_z f(z) g(x - z) dA`; steps must match.
    pub fn convolve(&self, g: &ComplexField) -> Result<Self> {
        let (a, b) = (&self.grid, &g.grid);
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x;
        if !close(a.step1, b.step1) || !close(a.step2, b.step2) {
            return Err(Error::GridMismatch);
        }
        let (n1, n2) = (a.n1 + b.n1 - 1, a.n2 + b.n2 - 1);
        let grid = Grid2D::new(n1, n2, a.start1 + b.start1, a.start2 + b.start2, a.step1, a.step2)?;
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); n1 * n2];
        let area = a.cell_area();
        for i in 0..a.n1 {
            for j in 0..a.n2 {
                let fv = self.get(i, j) * area;
                if fv == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for p in 0..b.n1 {
                    let row = (i + p) * n2 + j;
                    for q in 0..b.n2 {
                        out[row + q] += fv * g.get(p, q);
                    }
                }
            }
        }
        Ok(ComplexField { grid, values: out, analytic: None })
    }
}
