//! Brute-force reference evaluators and structural property checks.
//!
//! Nothing here uses the chirp factorization or the separable lag sums of
//! the `wigner` module, except where a check compares the library against
//! itself at transformed arguments.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use num_complex::Complex64;

use crate::field::{ComplexField, Grid2D};
use crate::kernel::{prefactor, Point2};
use crate::math::{cis, TAU};
use crate::params::{shift_geometry, ParamTuple};
use crate::wigner::{self, EvalMode, WdPlan};
use crate::math::Scratch;
use crate::{Error, Result};

const REL_FLOOR: f64 = 1e-300;

/// Kernel from the raw matrices: `Lambda exp(i (w^T A w + w^T B x + x^T C x
/// + 1^T D w + 1^T E x))`.
pub fn kernel_direct(omega: &ParamTuple, x: Point2, w: Point2) -> Complex64 {
    let quad = |m: &[[f64; 2]; 2], u: Point2, v: Point2| {
        u.p1 * (m[0][0] * v.p1 + m[0][1] * v.p2) + u.p2 * (m[1][0] * v.p1 + m[1][1] * v.p2)
    };
    let lin = |m: &[[f64; 2]; 2], v: Point2| {
        (m[0][0] * v.p1 + m[0][1] * v.p2) + (m[1][0] * v.p1 + m[1][1] * v.p2)
    };
    let phase = quad(&omega.a.0, w, w)
        + quad(&omega.b.0, w, x)
        + quad(&omega.c.0, x, x)
        + lin(&omega.d.0, w)
        + lin(&omega.e.0, x);
    prefactor(omega) * cis(phase)
}

/// Forward transform as a plain double sum of `f(x) K(x, w)`.
pub fn oracle_forward(f: &ComplexField, omega: &ParamTuple, wgrid: &Grid2D) -> Result<ComplexField> {
    omega.validate()?;
    let g = f.grid();
    let values = wgrid
        .points()
        .map(|w| {
            let mut s = Complex64::new(0.0, 0.0);
            for (x, v) in g.points().zip(f.values()) {
                s += v * kernel_direct(omega, x, w);
            }
            s * g.cell_area()
        })
        .collect();
    ComplexField::new(*wgrid, values)
}

/// Distribution from the double-kernel integrand
/// `f(x + xi/2) K(x + xi/2, w) conj(f(x - xi/2) K(w, x - xi/2))`.
pub fn oracle_wd(f: &ComplexField, omega: &ParamTuple, x: Point2, w: Point2, mode: EvalMode) -> Result<Complex64> {
    omega.validate()?;
    let term = |fp: Complex64, yp: Point2, fm: Complex64, ym: Point2| {
        fp * kernel_direct(omega, yp, w) * (fm * kernel_direct(omega, w, ym)).conj()
    };
    let mut s = Complex64::new(0.0, 0.0);
    match mode {
        EvalMode::SupportClipped => {
            let g = f.grid();
            let (i0, j0) = g.nearest_node(x).ok_or(Error::OffGridCenter)?;
            for i in 0..g.n1 {
                for j in 0..g.n2 {
                    let (mi, mj) = (2 * i0 as i64 - i as i64, 2 * j0 as i64 - j as i64);
                    if mi < 0 || mj < 0 || mi >= g.n1 as i64 || mj >= g.n2 as i64 {
                        continue;
                    }
                    let (mi, mj) = (mi as usize, mj as usize);
                    s += term(f.get(i, j), g.point(i, j), f.get(mi, mj), g.point(mi, mj));
                }
            }
            Ok(s * 4.0 * g.cell_area())
        }
        EvalMode::PaperRange { t, samples } => {
            let a = f.analytic().ok_or(Error::AnalyticExtensionUnavailable)?;
            let d = t / samples as f64;
            for p in 0..samples {
                for q in 0..samples {
                    let xi = Point2::new(-0.5 * t + (p as f64 + 0.5) * d, -0.5 * t + (q as f64 + 0.5) * d);
                    let (yp, ym) = (x + xi * 0.5, x - xi * 0.5);
                    s += term(a.eval(yp), yp, a.eval(ym), ym);
                }
            }
            Ok(s * d * d)
        }
    }
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckReport {
    pub fn new(name: &str, lhs: Complex64, rhs: Complex64, tol: f64) -> Self {
        let rel_err = (lhs - rhs).norm() / rhs.norm().max(REL_FLOOR);
        Self::with_error(name, lhs, rhs, rel_err, tol)
    }

    fn with_error(name: &str, lhs: Complex64, rhs: Complex64, rel_err: f64, tol: f64) -> Self {
        CheckReport { name: name.into(), lhs, rhs, rel_err, tol, pass: rel_err <= tol }
    }

    /// Applies a different tolerance to the same measurement.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.pass = self.rel_err <= tol;
        self
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<24} {:>+.6e}{:+.6e}i  {:>+.6e}{:+.6e}i  {:.3e}  {:.1e}  {}",
            self.name,
            self.lhs.re,
            self.lhs.im,
            self.rhs.re,
            self.rhs.im,
            self.rel_err,
            self.tol,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Line-oriented table with a header row.
pub fn report_table(reports: &[CheckReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<24} {:<28}  {:<28}  {:<9}  {:<7}  result", "check", "lhs", "rhs", "rel_err", "tol");
    for r in reports {
        let _ = writeln!(s, "{r}");
    }
    s
}

/// Worst pointwise discrepancy across a set of (lhs, rhs) pairs, relative to
/// the largest `|rhs|` in the set.
fn peak_normalized(name: &str, pairs: &[(Complex64, Complex64)], tol: f64) -> CheckReport {
    let scale = pairs.iter().fold(0.0f64, |m, p| m.max(p.1.norm()));
    let (mut worst, mut at) = (0.0f64, (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    for &(l, r) in pairs {
        let e = (l - r).norm();
        if e >= worst {
            worst = e;
            at = (l, r);
        }
    }
    let denom = scale.max(REL_FLOOR);
    let err = if scale == 0.0 && worst == 0.0 { 0.0 } else { worst / denom };
    CheckReport::with_error(name, at.0, at.1, err, tol)
}

/// Worst pointwise relative error.
fn pointwise(name: &str, pairs: &[(Complex64, Complex64)], floor: f64, tol: f64) -> CheckReport {
    let mut best = CheckReport::with_error(name, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0, tol);
    for &(l, r) in pairs {
        let e = if l == r { 0.0 } else { (l - r).norm() / r.norm().max(floor).max(REL_FLOOR) };
        if e >= best.rel_err {
            best = CheckReport::with_error(name, l, r, e, tol);
        }
    }
    best
}

/// Evaluation points for the pointwise identities. `xs` are nodes of the
/// field grid under test.
#[derive(Clone, Debug, PartialEq)]
pub struct Probes {
    pub xs: Vec<Point2>,
    pub ws: Vec<Point2>,
}

impl Probes {
    /// 3x3 interior nodes at the quarter points of `grid`.
    pub fn interior(grid: &Grid2D, ws: Vec<Point2>) -> Self {
        let q = |n: usize| [n / 4, n / 2, (3 * n) / 4];
        let mut xs = Vec::new();
        for i in q(grid.n1) {
            for j in q(grid.n2) {
                xs.push(grid.point(i, j));
            }
        }
        Probes { xs, ws }
    }

    fn pairs(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.xs.iter().flat_map(move |&x| self.ws.iter().map(move |&w| (x, w)))
    }
}

/// `sum_x sum_w W_f conj(W_g) dx dw`, frequencies over one period cell.
fn wd_product_sum(f: &ComplexField, g: &ComplexField, omega: &ParamTuple) -> Result<Complex64> {
    if !f.grid().approx_eq(g.grid()) {
        return Err(Error::GridMismatch);
    }
    let mut total = Complex64::new(0.0, 0.0);
    for x in f.grid().points() {
        let cf = wigner::wd_cell(f, f, omega, x, EvalMode::SupportClipped)?;
        let s: Complex64 = if f == g {
            Complex64::new(cf.values.iter().map(|v| v.norm_sqr()).sum(), 0.0)
        } else {
            let cg = wigner::wd_cell(g, g, omega, x, EvalMode::SupportClipped)?;
            cf.values.iter().zip(&cg.values).map(|(a, b)| a * b.conj()).sum()
        };
        total += s * cf.dw;
    }
    Ok(total * f.grid().cell_area())
}

fn moyal_rhs(omega: &ParamTuple, ip: Complex64) -> Complex64 {
    Complex64::new(omega.b.det().abs() / (TAU * TAU) * ip.norm_sqr(), 0.0)
}

/// `sum_x sum_w W_f conj(W_g) dx dw` against `|det B| / (2 pi)^2 |<f, g>|^2`.
/// The frequency sum covers one period cell at every `x`.
pub fn check_moyal(f: &ComplexField, g: &ComplexField, omega: &ParamTuple) -> Result<CheckReport> {
    let ip = f.inner(g)?;
    let lhs = wd_product_sum(f, g, omega)?;
    let rhs = moyal_rhs(omega, ip);
    let floor = 1e-3 * omega.b.det().abs() / (TAU * TAU) * f.energy() * g.energy();
    Ok(pointwise("moyal", &[(lhs, rhs)], floor, 2e-2))
}

/// `sum |W_f|^2` against `|det B| / (2 pi)^2 ||f||^4`.
pub fn check_energy(f: &ComplexField, omega: &ParamTuple) -> Result<CheckReport> {
    let lhs = wd_product_sum(f, f, omega)?;
    let e = f.energy();
    let rhs = Complex64::new(omega.b.det().abs() / (TAU * TAU) * e * e, 0.0);
    Ok(pointwise("energy", &[(lhs, rhs)], 1e-12 * rhs.norm(), 2e-2))
}

/// Time marginal at each of `ws` (summed over the field grid) against
/// `Q[f](w) conj(Q'[f](w))` with `Q'` the transform under `{C, B, A, E, D}`;
/// frequency marginal at each of `xs` (over one period cell) against
/// `|f(x)|^2`.
pub fn check_marginals(
    f: &ComplexField,
    omega: &ParamTuple,
    ws: &[Point2],
    xs: &[Point2],
    mode: EvalMode,
) -> Result<(CheckReport, CheckReport)> {
    let swapped = omega.swapped();
    let mut time = Vec::with_capacity(ws.len());
    for &w in ws {
        let lhs = wigner::marginal_time(f, omega, w, f.grid(), mode)?;
        let rhs = forward_at(f, omega, w) * forward_at(f, &swapped, w).conj();
        time.push((lhs, rhs));
    }
    let mut freq = Vec::with_capacity(xs.len());
    for &x in xs {
        let lhs = wigner::marginal_freq_cell(f, omega, x, mode)?;
        let fx = match mode {
            EvalMode::SupportClipped => {
                let (i, j) = f.grid().nearest_node(x).ok_or(Error::OffGridCenter)?;
                f.get(i, j)
            }
            EvalMode::PaperRange { .. } => f.analytic().ok_or(Error::AnalyticExtensionUnavailable)?.eval(x),
        };
        freq.push((Complex64::new(lhs, 0.0), Complex64::new(fx.norm_sqr(), 0.0)));
    }
    let tscale = time.iter().fold(0.0f64, |m, p| m.max(p.1.norm()));
    let fscale = freq.iter().fold(0.0f64, |m, p| m.max(p.1.norm()));
    Ok((
        pointwise("marginal_time", &time, 1e-3 * tscale, 2e-2),
        pointwise("marginal_freq", &freq, 1e-3 * fscale, 2e-2),
    ))
}

fn forward_at(f: &ComplexField, omega: &ParamTuple, w: Point2) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (x, v) in f.grid().points().zip(f.values()) {
        s += v * kernel_direct(omega, x, w);
    }
    s * f.grid().cell_area()
}

fn clipped(f: &ComplexField, omega: &ParamTuple, x: Point2, w: Point2) -> Result<Complex64> {
    wigner::wd_point(f, omega, x, w, EvalMode::SupportClipped)
}

/// Distribution of `f(. - x0)` at `(x + x0, w)` against
/// `nabla_1 W_f(x, w + P x0)`. `x0` must be a whole number of grid steps.
pub fn check_shift_covariance(f: &ComplexField, omega: &ParamTuple, x0: Point2, probes: &Probes) -> Result<CheckReport> {
    omega.validate()?;
    let grid = f.grid();
    grid.lattice_offset(grid.point(0, 0) + x0).ok_or(Error::OffGridCenter)?;
    let c = omega.coeffs();
    let geo = shift_geometry(&c, &omega.b)?;
    let rho = geo.p.apply(x0);
    let shifted = f.translated(x0);
    let dk = c.k - c.m;
    let mut pairs = Vec::new();
    for (x, w) in probes.pairs() {
        let xs = x + x0;
        let lhs = clipped(&shifted, omega, xs, w)?;
        let nabla = (-dk).eval(rho)
            * dk.eval(x0)
            * cis(-w.dot(geo.q.apply(rho)))
            * cis(-(xs.dot(geo.q.apply(x0)) + 2.0 * geo.lambda.dot(x0)));
        pairs.push((lhs, nabla * clipped(f, omega, x, w + rho)?));
    }
    Ok(peak_normalized("shift_covariance", &pairs, 1e-9))
}

/// Distribution of `f exp(i w0 . x)` against `C_{m-k}(t) exp(-i w^T Q t)
/// W_f(x, w + t)` with `B t = w0`.
pub fn check_mod_covariance(f: &ComplexField, omega: &ParamTuple, w0: Point2, probes: &Probes) -> Result<CheckReport> {
    omega.validate()?;
    let c = omega.coeffs();
    let geo = shift_geometry(&c, &omega.b)?;
    let t = geo.b_inverse().apply(w0);
    let modulated = f.map(|x, v| v * cis(w0.dot(x)));
    let dk = c.k - c.m;
    let mut pairs = Vec::new();
    for (x, w) in probes.pairs() {
        let lhs = clipped(&modulated, omega, x, w)?;
        let factor = (-dk).eval(t) * cis(-w.dot(geo.q.apply(t)));
        pairs.push((lhs, factor * clipped(f, omega, x, w + t)?));
    }
    Ok(peak_normalized("mod_covariance", &pairs, 1e-9))
}

/// Distribution of `sqrt(lam) f(lam .)` at `(x / lam, w)` against
/// `(1/lam) C_{k-m}(w) C_{m'-k'}(w/lam) W'_f(x, w/lam)`, where `'` marks the
/// tuple with chirps rescaled by `1/lam` (see [`ParamTuple::rescaled`]). The
/// chirp correction is 1 when `k = m = 0`.
pub fn check_dilation(f: &ComplexField, omega: &ParamTuple, lam: f64, probes: &Probes) -> Result<CheckReport> {
    omega.validate()?;
    let dilated = f.dilated(lam)?;
    let scaled = omega.rescaled(lam);
    let (c, cs) = (omega.coeffs(), scaled.coeffs());
    let mut pairs = Vec::new();
    for (x, w) in probes.pairs() {
        let lhs = clipped(&dilated, omega, x * (1.0 / lam), w)?;
        let wl = w * (1.0 / lam);
        let corr = (c.k - c.m).eval(w) * (cs.m - cs.k).eval(wl);
        pairs.push((lhs, corr * clipped(f, &scaled, x, wl)? * (1.0 / lam)));
    }
    Ok(peak_normalized("dilation", &pairs, 1e-9))
}

/// Property of the convolution `f * g`, evaluated under the tuple with its
/// quadratic chirps removed (`{0, B, 0, D, E}`), the setting in which the
/// identity holds. Probe points are nodes of the convolution grid.
pub fn check_convolution(f: &ComplexField, g: &ComplexField, omega: &ParamTuple, probes: &Probes) -> Result<CheckReport> {
    let om = omega.without_quadratic();
    om.validate()?;
    let h = f.convolve(g)?;
    let c = om.coeffs();
    let fg = f.grid();
    let gg = g.grid();
    let factor = TAU * TAU / om.b.det().abs();
    let mut scratch = Scratch::default();
    let fplans: Vec<WdPlan> = fg.points().map(|u| WdPlan::new(f, f, &om, u, EvalMode::SupportClipped)).collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for (x, w) in probes.pairs() {
        let lhs = clipped(&h, &om, x, w)?;
        let mut s = Complex64::new(0.0, 0.0);
        for (u, plan) in fg.points().zip(&fplans) {
            let v = x - u;
            if gg.node_index(v).is_none() {
                continue;
            }
            let wg = WdPlan::new(g, g, &om, v, EvalMode::SupportClipped)?.eval(w, &mut scratch);
            s += plan.eval(w, &mut scratch) * wg;
        }
        let rhs = s * fg.cell_area() * factor * (c.m - c.k).eval(w);
        pairs.push((lhs, rhs));
    }
    Ok(peak_normalized("convolution", &pairs, 5e-2))
}

/// Conjugate covariance, `conj(W) = W'` under `{C, B, A, E, D}`, and time
/// reversal, `W` of `f(-.)` at `x` against `W''` of `f` at `-x` under
/// `{A, -B, C, -D, -E}` (times `C_{k-m} C_{m''-k''}` at `w`, which is 1 when
/// the linear parts of `k - m` vanish).
pub fn check_conjugation(f: &ComplexField, omega: &ParamTuple, probes: &Probes) -> Result<CheckReport> {
    omega.validate()?;
    let swapped = omega.swapped();
    let refl = omega.reflected();
    let (c, cr) = (omega.coeffs(), refl.coeffs());
    let fr = f.reflected();
    let mut pairs = Vec::new();
    for (x, w) in probes.pairs() {
        pairs.push((clipped(f, omega, x, w)?.conj(), clipped(f, &swapped, x, w)?));
        let corr = (c.k - c.m).eval(w) * (cr.m - cr.k).eval(w);
        pairs.push((clipped(&fr, omega, -x, w)?, corr * clipped(f, &refl, x, w)?));
    }
    Ok(peak_normalized("conjugation", &pairs, 1e-9))
}

/// `W(x/2, Bt w) C_{m-k}(Bt w)` against
/// `4 |det B| C_m(x) / (2 pi)^2 S_{f,g}(x, w)` with `Bt = -B^-1` and
/// `g = assoc_window(f, omega, x, w)`. `x/2` must be a grid node.
pub fn check_stft_assoc(f: &ComplexField, omega: &ParamTuple, x: Point2, w: Point2) -> Result<CheckReport> {
    omega.validate()?;
    let half = x * 0.5;
    f.grid().node_index(half).ok_or(Error::OffGridCenter)?;
    let c = omega.coeffs();
    let wt = -omega.b.inverse()?.apply(w);
    let lhs = clipped(f, omega, half, wt)? * (c.m - c.k).eval(wt);
    let win = wigner::assoc_window(f, omega, x, w)?;
    let s = wigner::stft(f, &win, x, w)?;
    let rhs = s * c.m.eval(x) * (4.0 * omega.b.det().abs() / (TAU * TAU));
    let scale = rhs.norm().max(lhs.norm());
    Ok(pointwise("stft_assoc", &[(lhs, rhs)], 1e-12 * scale, 1e-6))
}

/// Inputs for [`run_suite`].
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub marginal_ws: Vec<Point2>,
    pub marginal_xs: Vec<Point2>,
    pub probes: Probes,
    pub x0: Point2,
    pub w0: Point2,
    pub lam: f64,
    /// Second factor of the convolution check and probe points on the
    /// convolution grid.
    pub conv_kernel: ComplexField,
    pub conv_probes: Probes,
    pub stft_points: Vec<(Point2, Point2)>,
    pub mode: EvalMode,
    /// Replaces every per-check tolerance when set.
    pub tolerance_override: Option<f64>,
}

/// The ten-check property suite on one signal.
pub fn run_suite(f: &ComplexField, omega: &ParamTuple, cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let (mt, mf) = check_marginals(f, omega, &cfg.marginal_ws, &cfg.marginal_xs, cfg.mode)?;
    let mut stft = Vec::new();
    for &(x, w) in &cfg.stft_points {
        let r = check_stft_assoc(f, omega, x, w)?;
        stft.push((r.lhs, r.rhs));
    }
    let sscale = stft.iter().fold(0.0f64, |m, p: &(Complex64, Complex64)| m.max(p.1.norm()));
    let stft = pointwise("stft_assoc", &stft, 1e-9 * sscale, 1e-6);
    let mut out = alloc::vec![
        check_moyal(f, f, omega)?,
        check_energy(f, omega)?,
        mt,
        mf,
        check_shift_covariance(f, omega, cfg.x0, &cfg.probes)?,
        check_mod_covariance(f, omega, cfg.w0, &cfg.probes)?,
        check_dilation(f, omega, cfg.lam, &cfg.probes)?,
        check_convolution(f, &cfg.conv_kernel, omega, &cfg.conv_probes)?,
        check_conjugation(f, omega, &cfg.probes)?,
        stft,
    ];
    if let Some(tol) = cfg.tolerance_override {
        out = out.into_iter().map(|r| r.with_tol(tol)).collect();
    }
    Ok(out)
}
