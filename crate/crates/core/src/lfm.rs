//! Linear frequency-modulated test signals and the closed-form distribution
//! of their components.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::field::{Analytic, ComplexField, Grid2D};
use crate::kernel::Point2;
use crate::math::{cis, sqrt, TAU};
use crate::params::{ParamTuple, PhaseCoeffs};
use crate::wigner::WignerSlice;
use crate::{Error, Result};

pub use crate::math::sinc;

/// `kappa exp(i (alpha x1 + beta x1^2 + mu x2 + lambda x2^2))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LfmComponent {
    pub kappa: Complex64,
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub lambda: f64,
}

impl LfmComponent {
    pub fn new(kappa: f64, alpha: f64, beta: f64, mu: f64, lambda: f64) -> Self {
        LfmComponent { kappa: Complex64::new(kappa, 0.0), alpha, beta, mu, lambda }
    }

    pub fn eval(&self, x: Point2) -> Complex64 {
        let phase = self.alpha * x.p1 + self.beta * x.p1 * x.p1 + self.mu * x.p2 + self.lambda * x.p2 * x.p2;
        self.kappa * cis(phase)
    }
}

/// Sum of LFM components supported on `[-t/2, t/2]^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalSpec {
    pub components: Vec<LfmComponent>,
    pub t: f64,
}

impl SignalSpec {
    pub fn new(components: Vec<LfmComponent>, t: f64) -> Result<Self> {
        let s = SignalSpec { components, t };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() || self.components.len() > 3 {
            return Err(Error::InvalidArgument("signal needs 1 to 3 components"));
        }
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(Error::InvalidArgument("support length must be positive"));
        }
        Ok(())
    }

    /// Single component used for the mono-component experiment, T = 40.
    pub fn mono() -> Self {
        SignalSpec { components: alloc::vec![LfmComponent::new(1.0, 0.3, 0.2, 0.1, 0.5)], t: 40.0 }
    }

    /// Two components with amplitudes 4 and 1, T = 40.
    pub fn bi() -> Self {
        SignalSpec {
            components: alloc::vec![
                LfmComponent::new(4.0, 0.2, 0.05, 0.15, 0.04),
                LfmComponent::new(1.0, 0.4, 0.05, 0.2, 0.04),
            ],
            t: 40.0,
        }
    }

    /// Three components with amplitudes 5, 1 and 11, T = 40.
    pub fn tri() -> Self {
        SignalSpec {
            components: alloc::vec![
                LfmComponent::new(5.0, 2.0, 0.05, 0.15, 0.04),
                LfmComponent::new(1.0, 4.0, 0.05, 6.0, 0.04),
                LfmComponent::new(11.0, 6.0, 0.05, 0.25, 0.04),
            ],
            t: 40.0,
        }
    }

    /// Closed form without the support restriction.
    pub fn eval(&self, x: Point2) -> Complex64 {
        self.components.iter().map(|c| c.eval(x)).sum()
    }

    fn contains(&self, x: Point2) -> bool {
        let h = 0.5 * self.t * (1.0 + 1e-12);
        x.p1.abs() <= h && x.p2.abs() <= h
    }
}

impl Analytic for SignalSpec {
    fn eval(&self, x: Point2) -> Complex64 {
        SignalSpec::eval(self, x)
    }
}

/// Samples the signal on `grid` (zero outside the support) and attaches the
/// unrestricted closed form as the analytic extension.
pub fn synthesize(spec: &SignalSpec, grid: &Grid2D) -> Result<ComplexField> {
    spec.validate()?;
    let (lo, hi) = grid.cell_bounds();
    let h = 0.5 * spec.t;
    let tol = 1e-9 * spec.t;
    if lo.p1 > -h + tol || lo.p2 > -h + tol || hi.p1 < h - tol || hi.p2 < h - tol {
        return Err(Error::GridTooSmall);
    }
    let f = ComplexField::from_fn(*grid, |x| {
        if spec.contains(x) { spec.eval(x) } else { Complex64::new(0.0, 0.0) }
    });
    Ok(f.with_analytic(Arc::new(spec.clone())))
}

/// Adds circular complex white Gaussian noise at the given SNR (dB, on mean
/// per-sample power). `f64::INFINITY` returns the field unchanged.
pub fn add_awgn(f: &ComplexField, snr_db: f64, seed: u64) -> Result<ComplexField> {
    if snr_db == f64::INFINITY {
        return Ok(f.clone());
    }
    if snr_db.is_nan() {
        return Err(Error::InvalidArgument("snr must be a number"));
    }
    let p = f.mean_power();
    if p == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let sigma = sqrt(p / libm::pow(10.0, snr_db / 10.0) / 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(f.map(|_, v| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        v + Complex64::new(re, im) * sigma
    }))
}

fn balanced(omega: &ParamTuple) -> Result<PhaseCoeffs> {
    omega.validate()?;
    let c = omega.coeffs();
    if !c.is_balanced() {
        return Err(Error::CoeffMismatch);
    }
    Ok(c)
}

/// Offsets `(rhs1, rhs2)` such that both sinc arguments are `rhs + B w`.
fn sinc_offset(c: &PhaseCoeffs, alpha: f64, beta: f64, mu: f64, lambda: f64, x: Point2) -> Point2 {
    let m = &c.m.0;
    Point2::new(
        m[3] + m[1] * x.p2 + alpha + 2.0 * x.p1 * (m[0] + beta),
        m[4] + m[1] * x.p1 + mu + 2.0 * x.p2 * (m[2] + lambda),
    )
}

fn double_sinc(omega: &ParamTuple, t: f64, offset: Point2, w: Point2) -> f64 {
    let a = offset + omega.b.apply(w);
    sinc(0.5 * t * a.p1) * sinc(0.5 * t * a.p2)
}

fn peak_scale(omega: &ParamTuple, t: f64) -> f64 {
    t * t * omega.b.det().abs() / (TAU * TAU)
}

/// Closed-form distribution of a single component over the paper range.
pub fn predict_mono(omega: &ParamTuple, comp: &LfmComponent, t: f64, x: Point2, w: Point2) -> Result<Complex64> {
    let c = balanced(omega)?;
    let off = sinc_offset(&c, comp.alpha, comp.beta, comp.mu, comp.lambda, x);
    let v = comp.kappa.norm_sqr() * peak_scale(omega, t) * double_sinc(omega, t, off, w);
    Ok(Complex64::new(v, 0.0))
}

fn solve_peak(omega: &ParamTuple, rhs: Point2) -> Result<Point2> {
    Ok(-omega.b.inverse()?.apply(rhs))
}

/// Frequency at which both sinc arguments of a component vanish.
pub fn predicted_peak(omega: &ParamTuple, comp: &LfmComponent, x: Point2) -> Result<Point2> {
    let c = balanced(omega)?;
    solve_peak(omega, sinc_offset(&c, comp.alpha, comp.beta, comp.mu, comp.lambda, x))
}

/// Location of the cross term between components `n` and `l`: the peak of a
/// component with the mean linear frequencies.
pub fn cross_peak(omega: &ParamTuple, spec: &SignalSpec, n: usize, l: usize, x: Point2) -> Result<Point2> {
    let c = balanced(omega)?;
    let (a, b) = pair(spec, n, l)?;
    let off = sinc_offset(&c, 0.5 * (a.alpha + b.alpha), a.beta, 0.5 * (a.mu + b.mu), a.lambda, x);
    solve_peak(omega, off)
}

fn pair(spec: &SignalSpec, n: usize, l: usize) -> Result<(&LfmComponent, &LfmComponent)> {
    let a = spec.components.get(n).ok_or(Error::InvalidArgument("component index"))?;
    let b = spec.components.get(l).ok_or(Error::InvalidArgument("component index"))?;
    if a.beta != b.beta || a.lambda != b.lambda {
        return Err(Error::ChirpRateMismatch);
    }
    Ok((a, b))
}

/// One summand of the multi-component closed form: the auto term when
/// `n == l`, otherwise the cross term of `(n, l)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PredictedTerm {
    pub n: usize,
    pub l: usize,
    pub value: Complex64,
}

/// Every ordered pair `(n, l)`, autos first in component order, then cross
/// terms in row-major pair order.
pub fn predict_terms(omega: &ParamTuple, spec: &SignalSpec, x: Point2, w: Point2) -> Result<Vec<PredictedTerm>> {
    let c = balanced(omega)?;
    spec.validate()?;
    let scale = peak_scale(omega, spec.t);
    let nc = spec.components.len();
    let order = (0..nc).map(|n| (n, n)).chain((0..nc).flat_map(|n| (0..nc).filter(move |&l| l != n).map(move |l| (n, l))));
    let mut out = Vec::with_capacity(nc * nc);
    for (n, l) in order {
        let (a, b) = pair(spec, n, l)?;
        let off = sinc_offset(&c, 0.5 * (a.alpha + b.alpha), a.beta, 0.5 * (a.mu + b.mu), a.lambda, x);
        let beat = cis((a.alpha - b.alpha) * x.p1 + (a.mu - b.mu) * x.p2);
        let value = a.kappa * b.kappa.conj() * beat * (scale * double_sinc(omega, spec.t, off, w));
        out.push(PredictedTerm { n, l, value });
    }
    Ok(out)
}

pub fn predict_multi(omega: &ParamTuple, spec: &SignalSpec, x: Point2, w: Point2) -> Result<Complex64> {
    Ok(predict_terms(omega, spec, x, w)?.iter().map(|t| t.value).sum())
}

fn local_maxima(slice: &WignerSlice) -> Vec<(usize, usize, f64)> {
    let g = &slice.wgrid;
    let mag = |i: usize, j: usize| slice.get(i, j).norm();
    let mut out = Vec::new();
    for i in 0..g.n1 {
        for j in 0..g.n2 {
            let v = mag(i, j);
            let mut is_max = true;
            'nb: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || a < 0 || b < 0 || a >= g.n1 as i64 || b >= g.n2 as i64 {
                        continue;
                    }
                    if mag(a as usize, b as usize) > v {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// The `count` largest 8-neighbour local maxima of `|W|`, descending, ties in
/// row-major order.
pub fn detect_peaks(slice: &WignerSlice, count: usize) -> Result<Vec<(Point2, f64)>> {
    if slice.values.is_empty() {
        return Err(Error::EmptySlice);
    }
    if count == 0 {
        return Err(Error::InvalidArgument("peak count must be at least 1"));
    }
    let mut peaks = local_maxima(slice);
    peaks.sort_by(|a, b| b.2.total_cmp(&a.2));
    Ok(peaks.into_iter().take(count).map(|(i, j, v)| (slice.wgrid.point(i, j), v)).collect())
}

/// Detected peak matched to the nearest closed-form prediction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakMatch {
    pub location: Point2,
    pub magnitude: f64,
    pub prediction: usize,
    pub predicted: Point2,
    /// `location - predicted`.
    pub deviation: Point2,
}

/// Labels each of the `count` strongest peaks with its nearest prediction.
pub fn match_peaks(slice: &WignerSlice, predictions: &[Point2], count: usize) -> Result<Vec<PeakMatch>> {
    if predictions.is_empty() {
        return Err(Error::InvalidArgument("no predictions"));
    }
    let peaks = detect_peaks(slice, count)?;
    Ok(peaks
        .into_iter()
        .map(|(location, magnitude)| {
            let (prediction, predicted) = nearest(predictions, location);
            PeakMatch { location, magnitude, prediction, predicted, deviation: location - predicted }
        })
        .collect())
}

fn nearest(points: &[Point2], p: Point2) -> (usize, Point2) {
    let mut best = (0, points[0]);
    for (k, &q) in points.iter().enumerate() {
        if (q - p).dot(q - p) < (best.1 - p).dot(best.1 - p) {
            best = (k, q);
        }
    }
    best
}

/// For each prediction, the strongest local maximum within `radius` grid
/// cells of it, if any.
pub fn locate_predicted(slice: &WignerSlice, predictions: &[Point2], radius: usize) -> Vec<Option<(Point2, f64)>> {
    let g = &slice.wgrid;
    let maxima = local_maxima(slice);
    predictions
        .iter()
        .map(|&p| {
            let ci = (p.p1 - g.start1) / g.step1;
            let cj = (p.p2 - g.start2) / g.step2;
            maxima
                .iter()
                .filter(|(i, j, _)| {
                    (*i as f64 - ci).abs() <= radius as f64 && (*j as f64 - cj).abs() <= radius as f64
                })
                .fold(None, |best: Option<(usize, usize, f64)>, &(i, j, v)| match best {
                    Some(b) if b.2 >= v => Some(b),
                    _ => Some((i, j, v)),
                })
                .map(|(i, j, v)| (g.point(i, j), v))
        })
        .collect()
}
