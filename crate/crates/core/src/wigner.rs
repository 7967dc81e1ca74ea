//! The quadratic-phase Wigner distribution and its relatives.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::field::{ComplexField, Grid2D};
use crate::kernel::{ChirpVector, Point2};
use crate::math::{cis, Scratch, SeparableSum, TAU};
use crate::params::{quad_matrix, ParamTuple};
use crate::{Error, Result};

/// How the lag integral over `xi` is discretized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EvalMode {
    /// Lags cover `[-t/2, t/2]^2` with `samples` midpoints per axis, using
    /// the field's analytic generator.
    PaperRange { t: f64, samples: usize },
    /// Lags are twice the field step so that `x +- xi/2` are grid nodes;
    /// samples outside the grid count as zero.
    SupportClipped,
}

impl EvalMode {
    pub fn paper(t: f64, samples: usize) -> Self {
        EvalMode::PaperRange { t, samples }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WignerSlice {
    pub x: Point2,
    pub wgrid: Grid2D,
    pub values: Vec<Complex64>,
}

impl WignerSlice {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.wgrid.n2 + j]
    }

    /// `max |Im| / max |Re|` over the slice.
    pub fn imag_ratio(&self) -> f64 {
        let re = self.values.iter().fold(0.0f64, |m, v| m.max(v.re.abs()));
        let im = self.values.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
        if re == 0.0 {
            if im == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            im / re
        }
    }
}

/// Lag products `F(xi)` at one spatial point, ready to be evaluated at any
/// frequency.
pub(crate) struct LagPlan {
    pub x: Point2,
    sum: SeparableSum,
    weight: f64,
    /// Lag spacing per axis.
    spacing: (f64, f64),
}

impl LagPlan {
    /// Frequencies `nu` sampling one period cell of the lag sum, with as many
    /// samples per axis as there are lags, so that the cell sum is an exact
    /// discrete Fourier inversion.
    fn cell(&self) -> (Vec<f64>, Vec<f64>) {
        let axis = |n: usize, d: f64| {
            let step = TAU / d / n as f64;
            (0..n).map(|p| p as f64 * step).collect::<Vec<f64>>()
        };
        (axis(self.sum.a.len(), self.spacing.0), axis(self.sum.b.len(), self.spacing.1))
    }

    /// Area in `nu` of one cell sample.
    fn cell_area(&self) -> f64 {
        let (n1, n2) = (self.sum.a.len() as f64, self.sum.b.len() as f64);
        TAU * TAU / (self.spacing.0 * self.spacing.1 * n1 * n2)
    }

    /// `sum F(xi) exp(i nu . xi) dxi`.
    pub fn eval(&self, nu: Point2, scratch: &mut Scratch) -> Complex64 {
        self.sum.eval_with(nu.p1, nu.p2, scratch) * self.weight
    }

    /// Builds `f(x + xi/2) cm(x + xi/2) conj(g(x - xi/2) ck(x - xi/2))`.
    pub fn new(
        f: &ComplexField,
        g: &ComplexField,
        cm: &ChirpVector,
        ck: &ChirpVector,
        x: Point2,
        mode: EvalMode,
    ) -> Result<Self> {
        if !f.grid().approx_eq(g.grid()) {
            return Err(Error::GridMismatch);
        }
        match mode {
            EvalMode::SupportClipped => Self::clipped(f, g, cm, ck, x),
            EvalMode::PaperRange { t, samples } => Self::paper(f, g, cm, ck, x, t, samples),
        }
    }

    fn clipped(
        f: &ComplexField,
        g: &ComplexField,
        cm: &ChirpVector,
        ck: &ChirpVector,
        x: Point2,
    ) -> Result<Self> {
        let grid = f.grid();
        let (i0, j0) = grid.nearest_node(x).ok_or(Error::OffGridCenter)?;
        let r1 = i0.min(grid.n1 - 1 - i0) as i64;
        let r2 = j0.min(grid.n2 - 1 - j0) as i64;
        let x = grid.point(i0, j0);
        let (i0, j0) = (i0 as i64, j0 as i64);
        let chirped = |field: &ComplexField, c: &ChirpVector, i: i64, j: i64| {
            let (i, j) = (i as usize, j as usize);
            let v = field.get(i, j);
            if c.is_zero() { v } else { v * c.eval(grid.point(i, j)) }
        };
        let mut values = Vec::with_capacity(((2 * r1 + 1) * (2 * r2 + 1)) as usize);
        for p in -r1..=r1 {
            for q in -r2..=r2 {
                let a = chirped(f, cm, i0 + p, j0 + q);
                let b = chirped(g, ck, i0 - p, j0 - q);
                values.push(a * b.conj());
            }
        }
        let sum = SeparableSum {
            a: (-r1..=r1).map(|p| 2.0 * p as f64 * grid.step1).collect(),
            b: (-r2..=r2).map(|q| 2.0 * q as f64 * grid.step2).collect(),
            values,
        };
        Ok(LagPlan { x, sum, weight: 4.0 * grid.cell_area(), spacing: (2.0 * grid.step1, 2.0 * grid.step2) })
    }

    fn paper(
        f: &ComplexField,
        g: &ComplexField,
        cm: &ChirpVector,
        ck: &ChirpVector,
        x: Point2,
        t: f64,
        samples: usize,
    ) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) || samples == 0 {
            return Err(Error::InvalidArgument("paper range needs t > 0 and samples > 0"));
        }
        let fa = f.analytic().ok_or(Error::AnalyticExtensionUnavailable)?;
        let ga = g.analytic().ok_or(Error::AnalyticExtensionUnavailable)?;
        let d = t / samples as f64;
        let lags: Vec<f64> = (0..samples).map(|a| -0.5 * t + (a as f64 + 0.5) * d).collect();
        let mut values = Vec::with_capacity(samples * samples);
        for &tau in &lags {
            for &eta in &lags {
                let half = Point2::new(0.5 * tau, 0.5 * eta);
                let (p, m) = (x + half, x - half);
                let a = fa.eval(p) * cm.eval(p);
                let b = ga.eval(m) * ck.eval(m);
                values.push(a * b.conj());
            }
        }
        Ok(LagPlan { x, sum: SeparableSum { a: lags.clone(), b: lags, values }, weight: d * d, spacing: (d, d) })
    }
}

/// Distribution built from precomputed lag products of `(f, g)` at one point.
pub(crate) struct WdPlan {
    lag: LagPlan,
    omega: ParamTuple,
    dk: ChirpVector,
    scale: f64,
}

impl WdPlan {
    pub fn new(
        f: &ComplexField,
        g: &ComplexField,
        omega: &ParamTuple,
        x: Point2,
        mode: EvalMode,
    ) -> Result<Self> {
        omega.validate()?;
        let c = omega.coeffs();
        let lag = LagPlan::new(f, g, &c.m, &c.k, x, mode)?;
        let scale = omega.b.det().abs() / (TAU * TAU);
        Ok(WdPlan { lag, omega: *omega, dk: c.k - c.m, scale })
    }

    pub fn x(&self) -> Point2 {
        self.lag.x
    }

    /// `W(x, w) C_{m-k}(w)`: the distribution with its frequency chirp removed.
    pub fn dechirped(&self, w: Point2, scratch: &mut Scratch) -> Complex64 {
        self.lag.eval(self.omega.b.apply(w), scratch) * self.scale
    }

    pub fn eval(&self, w: Point2, scratch: &mut Scratch) -> Complex64 {
        let v = self.dechirped(w, scratch);
        if self.dk.is_zero() { v } else { v * self.dk.eval(w) }
    }

    pub fn cell(&self) -> Result<CellSlice> {
        let (nu1, nu2) = self.lag.cell();
        let raw = self.lag.sum.eval_grid(&nu1, &nu2);
        let k = self.lag.weight * self.scale;
        Ok(CellSlice {
            x: self.lag.x,
            binv: self.omega.b.inverse()?,
            dk: self.dk,
            values: raw.into_iter().map(|v| v * k).collect(),
            dw: self.lag.cell_area() / self.omega.b.det().abs(),
            nu1,
            nu2,
        })
    }
}

/// The distribution over one period cell of its frequency lattice.
///
/// With a finite lag step the discrete distribution is periodic in `B w`, so
/// integrals over frequency are taken over one cell. Samples are uniform in
/// `nu = B w`; `values` hold `W C_{m-k}` (the frequency chirp removed).
#[derive(Clone, Debug, PartialEq)]
pub struct CellSlice {
    pub x: Point2,
    pub nu1: Vec<f64>,
    pub nu2: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Frequency-plane area per sample.
    pub dw: f64,
    binv: crate::params::Mat2,
    dk: ChirpVector,
}

impl CellSlice {
    /// Frequency of sample `(p, q)`.
    pub fn omega_at(&self, p: usize, q: usize) -> Point2 {
        self.binv.apply(Point2::new(self.nu1[p], self.nu2[q]))
    }

    /// Distribution value at sample `(p, q)`, chirp restored.
    pub fn value(&self, p: usize, q: usize) -> Complex64 {
        let v = self.values[p * self.nu2.len() + q];
        if self.dk.is_zero() { v } else { v * self.dk.eval(self.omega_at(p, q)) }
    }
}

/// Distribution of `(f, g)` at `x` over one frequency period cell.
pub fn wd_cell(f: &ComplexField, g: &ComplexField, omega: &ParamTuple, x: Point2, mode: EvalMode) -> Result<CellSlice> {
    WdPlan::new(f, g, omega, x, mode)?.cell()
}

pub fn wd_point(f: &ComplexField, omega: &ParamTuple, x: Point2, w: Point2, mode: EvalMode) -> Result<Complex64> {
    cross_wd(f, f, omega, x, w, mode)
}

pub fn wd_slice(
    f: &ComplexField,
    omega: &ParamTuple,
    x: Point2,
    wgrid: &Grid2D,
    mode: EvalMode,
) -> Result<WignerSlice> {
    cross_slice(f, f, omega, x, wgrid, mode)
}

/// Cross distribution with the spatial chirp on `f` and the frequency chirp
/// on `g`.
pub fn cross_wd(
    f: &ComplexField,
    g: &ComplexField,
    omega: &ParamTuple,
    x: Point2,
    w: Point2,
    mode: EvalMode,
) -> Result<Complex64> {
    let plan = WdPlan::new(f, g, omega, x, mode)?;
    Ok(plan.eval(w, &mut Scratch::default()))
}

pub fn cross_slice(
    f: &ComplexField,
    g: &ComplexField,
    omega: &ParamTuple,
    x: Point2,
    wgrid: &Grid2D,
    mode: EvalMode,
) -> Result<WignerSlice> {
    let plan = WdPlan::new(f, g, omega, x, mode)?;
    let mut scratch = Scratch::default();
    let values = wgrid.points().map(|w| plan.eval(w, &mut scratch)).collect();
    Ok(WignerSlice { x: plan.x(), wgrid: *wgrid, values })
}

/// `sum f(x + xi/2) conj(f(x - xi/2)) exp(-i w . xi) dxi` on the field grid.
pub fn classical_wd(f: &ComplexField, x: Point2, w: Point2) -> Result<Complex64> {
    let z = ChirpVector::ZERO;
    let lag = LagPlan::new(f, f, &z, &z, x, EvalMode::SupportClipped)?;
    Ok(lag.eval(-w, &mut Scratch::default()))
}

/// Frequency marginal at `x`: `C_{k-m}(x) sum_w C_{m-k}(w) W(x, w) dw`.
///
/// Approximates `|f(x)|^2` when `wgrid` covers the slice support.
pub fn marginal_freq(
    f: &ComplexField,
    omega: &ParamTuple,
    x: Point2,
    wgrid: &Grid2D,
    mode: EvalMode,
) -> Result<f64> {
    let plan = WdPlan::new(f, f, omega, x, mode)?;
    let mut scratch = Scratch::default();
    let s: Complex64 = wgrid.points().map(|w| plan.dechirped(w, &mut scratch)).sum();
    let dk = plan.dk;
    Ok((s * wgrid.cell_area() * dk.eval(plan.x())).re)
}

/// Frequency marginal integrated over one period cell of the discrete
/// distribution. Exact (up to rounding) for the clipped mode and for paper
/// mode with an odd lag count, where the zero lag is a sample.
pub fn marginal_freq_cell(f: &ComplexField, omega: &ParamTuple, x: Point2, mode: EvalMode) -> Result<f64> {
    let cell = wd_cell(f, f, omega, x, mode)?;
    let s: Complex64 = cell.values.iter().sum();
    Ok((s * cell.dw * cell.dk.eval(cell.x)).re)
}

/// Time marginal at `w`: `sum_x W(x, w) dx` over the nodes of `xgrid`.
pub fn marginal_time(
    f: &ComplexField,
    omega: &ParamTuple,
    w: Point2,
    xgrid: &Grid2D,
    mode: EvalMode,
) -> Result<Complex64> {
    let mut scratch = Scratch::default();
    let mut s = Complex64::new(0.0, 0.0);
    for x in xgrid.points() {
        if mode == EvalMode::SupportClipped && f.grid().node_index(x).is_none() {
            return Err(Error::OffGridCenter);
        }
        s += WdPlan::new(f, f, omega, x, mode)?.eval(w, &mut scratch);
    }
    Ok(s * xgrid.cell_area())
}

/// `sum_xi f(xi) win(xi - x) exp(-i w . xi) dxi` over the nodes of `f`.
pub fn stft(f: &ComplexField, win: &ComplexField, x: Point2, w: Point2) -> Result<Complex64> {
    let (fg, wg) = (f.grid(), win.grid());
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a;
    if !close(fg.step1, wg.step1) || !close(fg.step2, wg.step2) {
        return Err(Error::GridMismatch);
    }
    let (o1, o2) = wg.lattice_offset(fg.point(0, 0) - x).ok_or(Error::OffGridCenter)?;
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..fg.n1 {
        for j in 0..fg.n2 {
            let v = f.get(i, j);
            let gv = win.sample_signed(i as i64 + o1, j as i64 + o2);
            s += v * gv * cis(-w.dot(fg.point(i, j)));
        }
    }
    Ok(s * fg.cell_area())
}

/// Window tying the distribution at `x/2` to the STFT at `(x, w)`:
/// `g(u) = conj(f_k(-u)) C_m(u) exp(2i u^T M x) exp(i (Bt w)^T B u)` with
/// `M` the quadratic-form matrix of `m` and `Bt = -B^-1`.
///
/// Sampled on the field grid moved by `-x`, so `x` must be twice a grid node.
pub fn assoc_window(f: &ComplexField, omega: &ParamTuple, x: Point2, w: Point2) -> Result<ComplexField> {
    omega.validate()?;
    let c = omega.coeffs();
    let mm = quad_matrix(&c.m);
    let mx = mm.apply(x);
    let bw = omega.b.apply(omega.b.inverse()?.apply(w));
    let grid = f.grid().translated(-x);
    let mut values = Vec::with_capacity(grid.len());
    for u in grid.points() {
        let fv = f.sample_at(-u).ok_or(Error::OffGridCenter)?;
        let fk = fv * c.k.eval(-u);
        let phase = 2.0 * u.dot(mx) - bw.dot(u);
        values.push(fk.conj() * c.m.eval(u) * cis(phase));
    }
    ComplexField::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{make_classical, omega0};

    fn gaussian(n: usize, half: f64) -> ComplexField {
        let g = Grid2D::square(-half, half, n).unwrap();
        ComplexField::from_fn(g, |p| Complex64::new(libm::exp(-0.5 * p.dot(p)) / libm::sqrt(core::f64::consts::PI), 0.0))
    }

    #[test]
    fn zero_field_and_scaling() {
        let f = gaussian(16, 4.0);
        let om = omega0();
        let x = f.grid().point(7, 9);
        let w = Point2::new(-1.0, 0.3);
        let zero = ComplexField::zeros(*f.grid());
        assert_eq!(wd_point(&zero, &om, x, w, EvalMode::SupportClipped).unwrap(), Complex64::new(0.0, 0.0));
        let a = wd_point(&f, &om, x, w, EvalMode::SupportClipped).unwrap();
        let b = wd_point(&f.scaled(Complex64::new(0.0, 3.0)), &om, x, w, EvalMode::SupportClipped).unwrap();
        assert!((b - a * 9.0).norm() <= 1e-13 * b.norm());
    }

    #[test]
    fn slice_matches_points() {
        let f = gaussian(12, 3.0);
        let om = omega0();
        let x = f.grid().point(5, 6);
        let wg = Grid2D::square(-2.0, 1.0, 5).unwrap();
        let s = wd_slice(&f, &om, x, &wg, EvalMode::SupportClipped).unwrap();
        for (w, v) in wg.points().zip(&s.values) {
            assert_eq!(*v, wd_point(&f, &om, x, w, EvalMode::SupportClipped).unwrap());
        }
    }

    #[test]
    fn classical_gaussian_is_real() {
        let f = gaussian(16, 4.0);
        let v = classical_wd(&f, f.grid().point(8, 8), Point2::new(0.7, -0.4)).unwrap();
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn classical_reduction_sign() {
        let f = gaussian(10, 3.0).map(|p, v| v * cis(p.p1 * 0.7 - p.p2 * p.p2 * 0.2));
        let x = f.grid().point(4, 6);
        let w = Point2::new(0.9, -1.3);
        let mut om = make_classical();
        let a = wd_point(&f, &om, x, w, EvalMode::SupportClipped).unwrap() * (TAU * TAU);
        assert!((a - classical_wd(&f, x, -w).unwrap()).norm() <= 1e-12 * a.norm());
        om.b = -om.b;
        let b = wd_point(&f, &om, x, w, EvalMode::SupportClipped).unwrap() * (TAU * TAU);
        assert!((b - classical_wd(&f, x, w).unwrap()).norm() <= 1e-12 * b.norm());
    }

    #[test]
    fn paper_mode_needs_analytic() {
        let f = gaussian(8, 2.0);
        let r = wd_point(&f, &omega0(), Point2::ORIGIN, Point2::ORIGIN, EvalMode::paper(4.0, 8));
        assert_eq!(r, Err(Error::AnalyticExtensionUnavailable));
    }

    #[test]
    fn off_grid_center() {
        let f = gaussian(8, 2.0);
        let r = wd_point(&f, &omega0(), Point2::new(5.0, 0.0), Point2::ORIGIN, EvalMode::SupportClipped);
        assert_eq!(r, Err(Error::OffGridCenter));
    }

    #[test]
    fn window_modulus() {
        let f = gaussian(16, 4.0);
        let x = f.grid().point(8, 8) * 2.0;
        let win = assoc_window(&f, &omega0(), x, Point2::new(0.4, 1.1)).unwrap();
        for u in win.grid().points() {
            let a = win.sample_at(u).unwrap().norm();
            let b = f.sample_at(-u).unwrap().norm();
            assert!((a - b).abs() < 1e-15);
        }
    }
}
