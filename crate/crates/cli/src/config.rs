//! JSON run configuration.
//!
//! ```json
//! {
//!   "omega": {"A": [[1, -5], [5, 1]], "B": [[2, 1], [1, 4]], "C": ..., "D": ..., "E": ...},
//!   "signal": {"components": [{"kappa_re": 1, "kappa_im": 0, "alpha": 0.3,
//!              "beta": 0.2, "mu": 0.1, "lambda": 0.5}], "T": 40},
//!   "x_grid": {"lo": [-20, -20], "hi": [20, 20], "n": [64, 64]},
//!   "w_grid": {"lo": [-3, -3], "hi": [-0.5, -0.5], "n": [96, 96]},
//!   "slice_points": [[0.4, 0.1]],
//!   "mode": "paper", "xi_samples": 255,
//!   "snr_db": 10, "seed": 7,
//!   "output": "out", "format": "csv"
//! }
//! ```
//!
//! `signal` is one of `{"components": [...], "T": t}`, `{"preset":
//! "mono"|"bi"|"tri"}`, `{"gaussian": {"center", "carrier", "width"}}` or
//! `{"file": path}` (`.csv` or `NSQW1`). Grids are cell-centred over
//! `[lo, hi]`.

use std::fs;
use std::path::{Path, PathBuf};

use nsqpwd_core::lfm::{add_awgn, predicted_peak, synthesize};
use nsqpwd_core::{Complex64, ComplexField, EvalMode, Grid2D, LfmComponent, Mat2, ParamTuple, Point2, SignalSpec};
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::formats::{read_grid, Format};

type Matrix = [[f64; 2]; 2];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    omega: Option<RawOmega>,
    signal: Option<RawSignal>,
    x_grid: Option<RawGrid>,
    w_grid: Option<RawGrid>,
    #[serde(default)]
    slice_points: Vec<[f64; 2]>,
    mode: Option<ModeName>,
    xi_samples: Option<usize>,
    snr_db: Option<f64>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    format: Option<Format>,
    peaks: Option<usize>,
    search_radius: Option<usize>,
    tolerance_override: Option<f64>,
    verify: Option<RawVerify>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawOmega {
    A: Matrix,
    B: Matrix,
    C: Matrix,
    D: Matrix,
    E: Matrix,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSignal {
    components: Option<Vec<RawComponent>>,
    #[serde(rename = "T")]
    t: Option<f64>,
    preset: Option<String>,
    gaussian: Option<RawGaussian>,
    file: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    kappa_re: f64,
    #[serde(default)]
    kappa_im: f64,
    alpha: f64,
    beta: f64,
    mu: f64,
    lambda: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGaussian {
    #[serde(default)]
    center: [f64; 2],
    #[serde(default)]
    carrier: [f64; 2],
    width: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    lo: [f64; 2],
    hi: [f64; 2],
    n: [usize; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVerify {
    x0: Option<[f64; 2]>,
    w0: Option<[f64; 2]>,
    lambda: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Paper,
    Clipped,
}

#[derive(Clone, Debug)]
pub enum SignalSource {
    Lfm(SignalSpec),
    Gaussian { center: Point2, carrier: Point2, width: f64 },
    File(PathBuf),
}

#[derive(Clone, Debug, Default)]
pub struct VerifyParams {
    pub x0: Option<Point2>,
    pub w0: Option<Point2>,
    pub lambda: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub omega: Option<ParamTuple>,
    pub signal: Option<SignalSource>,
    pub x_grid: Option<Grid2D>,
    pub w_grid: Option<Grid2D>,
    pub slice_points: Vec<Point2>,
    pub mode: ModeName,
    pub xi_samples: usize,
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub output: PathBuf,
    pub format: Format,
    pub peaks: usize,
    pub search_radius: usize,
    pub tolerance_override: Option<f64>,
    pub verify: VerifyParams,
}

/// Command-line values that replace config entries.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub mode: Option<ModeName>,
    pub seed: Option<u64>,
    pub snr_db: Option<f64>,
    pub slices: Vec<Point2>,
    pub format: Option<Format>,
}

fn point(p: [f64; 2]) -> Point2 {
    Point2::new(p[0], p[1])
}

fn mat(m: Matrix) -> Mat2 {
    Mat2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

fn grid(name: &str, g: RawGrid) -> Result<Grid2D> {
    Grid2D::from_interval(point(g.lo), point(g.hi), g.n[0], g.n[1])
        .map_err(|e| CliError::config(format!("{name}: {e}")))
}

fn preset(name: &str) -> Result<SignalSpec> {
    match name {
        "mono" => Ok(SignalSpec::mono()),
        "bi" => Ok(SignalSpec::bi()),
        "tri" => Ok(SignalSpec::tri()),
        other => Err(CliError::config(format!("signal.preset: unknown preset {other:?} (mono, bi, tri)"))),
    }
}

fn signal(raw: RawSignal, base: &Path) -> Result<SignalSource> {
    let given = [raw.components.is_some(), raw.preset.is_some(), raw.gaussian.is_some(), raw.file.is_some()];
    match given.iter().filter(|g| **g).count() {
        0 => return Err(CliError::config("signal: expected one of \"components\", \"preset\", \"gaussian\", \"file\"")),
        1 => {}
        _ => return Err(CliError::config("signal: \"components\", \"preset\", \"gaussian\" and \"file\" are exclusive")),
    }
    if let Some(comps) = raw.components {
        let t = raw.t.ok_or_else(|| CliError::config("signal: \"components\" needs \"T\""))?;
        let comps = comps
            .into_iter()
            .map(|c| LfmComponent {
                kappa: Complex64::new(c.kappa_re, c.kappa_im),
                alpha: c.alpha,
                beta: c.beta,
                mu: c.mu,
                lambda: c.lambda,
            })
            .collect();
        let spec = SignalSpec::new(comps, t).map_err(|e| CliError::config(format!("signal: {e}")))?;
        return Ok(SignalSource::Lfm(spec));
    }
    if raw.t.is_some() {
        return Err(CliError::config("signal: \"T\" only applies to \"components\""));
    }
    if let Some(name) = raw.preset {
        return Ok(SignalSource::Lfm(preset(&name)?));
    }
    if let Some(g) = raw.gaussian {
        let width = g.width.unwrap_or(1.0);
        if !(width.is_finite() && width > 0.0) {
            return Err(CliError::config("signal.gaussian.width must be positive"));
        }
        return Ok(SignalSource::Gaussian { center: point(g.center), carrier: point(g.carrier), width });
    }
    let file = raw.file.expect("one source is present");
    Ok(SignalSource::File(if file.is_relative() { base.join(file) } else { file }))
}

impl RunConfig {
    /// Parses a config document; relative file references resolve against
    /// `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        let omega = match raw.omega {
            Some(o) => {
                let t = ParamTuple::new(mat(o.A), mat(o.B), mat(o.C), mat(o.D), mat(o.E));
                t.validate().map_err(|e| CliError::config(format!("omega.B: {e}")))?;
                Some(t)
            }
            None => None,
        };
        let signal = raw.signal.map(|s| signal(s, base)).transpose()?;
        let x_grid = raw.x_grid.map(|g| grid("x_grid", g)).transpose()?;
        let w_grid = raw.w_grid.map(|g| grid("w_grid", g)).transpose()?;
        let xi_samples = raw.xi_samples.unwrap_or(255);
        if xi_samples == 0 {
            return Err(CliError::config("xi_samples must be positive"));
        }
        if let Some(t) = raw.tolerance_override {
            if t.is_nan() || t < 0.0 {
                return Err(CliError::config("tolerance_override must be non-negative"));
            }
        }
        let verify = raw
            .verify
            .map(|v| VerifyParams { x0: v.x0.map(point), w0: v.w0.map(point), lambda: v.lambda })
            .unwrap_or_default();
        Ok(RunConfig {
            omega,
            signal,
            x_grid,
            w_grid,
            slice_points: raw.slice_points.into_iter().map(point).collect(),
            mode: raw.mode.unwrap_or(ModeName::Clipped),
            xi_samples,
            snr_db: raw.snr_db,
            seed: raw.seed.unwrap_or(0),
            output: raw.output.unwrap_or_else(|| PathBuf::from("out")),
            format: raw.format.unwrap_or(Format::Csv),
            peaks: raw.peaks.unwrap_or(3),
            search_radius: raw.search_radius.unwrap_or(3),
            tolerance_override: raw.tolerance_override,
            verify,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        RunConfig::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(out) = o.out {
            self.output = out;
        }
        if let Some(m) = o.mode {
            self.mode = m;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(s) = o.snr_db {
            self.snr_db = Some(s);
        }
        if !o.slices.is_empty() {
            self.slice_points = o.slices;
        }
        if let Some(f) = o.format {
            self.format = f;
        }
    }

    pub fn omega(&self) -> Result<&ParamTuple> {
        self.omega.as_ref().ok_or_else(|| CliError::config("missing \"omega\""))
    }

    pub fn signal(&self) -> Result<&SignalSource> {
        self.signal.as_ref().ok_or_else(|| CliError::config("missing \"signal\""))
    }

    pub fn lfm_spec(&self) -> Result<&SignalSpec> {
        match self.signal()? {
            SignalSource::Lfm(s) => Ok(s),
            _ => Err(CliError::config("signal: this command needs LFM \"components\" or a \"preset\"")),
        }
    }

    pub fn eval_mode(&self) -> Result<EvalMode> {
        match self.mode {
            ModeName::Clipped => Ok(EvalMode::SupportClipped),
            ModeName::Paper => {
                let spec = match self.signal()? {
                    SignalSource::Lfm(s) => s,
                    _ => return Err(CliError::config("mode \"paper\" needs an LFM signal")),
                };
                if self.snr_db.is_some_and(|s| s.is_finite()) {
                    return Err(CliError::config("snr_db needs mode \"clipped\": paper mode reads the noiseless closed form"));
                }
                Ok(EvalMode::paper(spec.t, self.xi_samples))
            }
        }
    }

    /// The sampled signal, with noise added when `snr_db` is set.
    pub fn field(&self) -> Result<ComplexField> {
        let f = match self.signal()? {
            SignalSource::Lfm(spec) => {
                let g = match self.x_grid {
                    Some(g) => g,
                    None => {
                        let h = 0.5 * spec.t;
                        Grid2D::from_interval(Point2::new(-h, -h), Point2::new(h, h), 64, 64)?
                    }
                };
                synthesize(spec, &g).map_err(|e| CliError::config(format!("x_grid: {e}")))?
            }
            SignalSource::Gaussian { center, carrier, width } => {
                let g = match self.x_grid {
                    Some(g) => g,
                    None => Grid2D::from_interval(Point2::new(-4.0, -4.0), Point2::new(4.0, 4.0), 64, 64)?,
                };
                let (c, k, s) = (*center, *carrier, *width);
                ComplexField::from_fn(g, |x| {
                    let d = x - c;
                    Complex64::from_polar((-0.5 * d.dot(d) / (s * s)).exp(), k.dot(x))
                })
            }
            SignalSource::File(path) => read_grid(path)?,
        };
        match self.snr_db {
            Some(snr) => Ok(add_awgn(&f, snr, self.seed)?),
            None => Ok(f),
        }
    }

    /// Slice points, checked against the sample lattice in clipped mode.
    pub fn checked_slices(&self, field: &ComplexField) -> Result<Vec<Point2>> {
        if self.slice_points.is_empty() {
            return Err(CliError::config("slice_points: at least one point is required"));
        }
        if self.mode == ModeName::Clipped {
            for (k, p) in self.slice_points.iter().enumerate() {
                if field.grid().node_index(*p).is_none() {
                    return Err(CliError::config(format!(
                        "slice_points[{k}] = ({}, {}) is not a node of the x-grid",
                        p.p1, p.p2
                    )));
                }
            }
        }
        Ok(self.slice_points.clone())
    }

    /// The configured frequency grid, or for LFM signals the box around every
    /// predicted auto-peak padded by 0.5, at 96 x 96.
    pub fn w_grid_or_default(&self) -> Result<Grid2D> {
        if let Some(g) = self.w_grid {
            return Ok(g);
        }
        let missing = || CliError::config("missing \"w_grid\"");
        let spec = match self.signal()? {
            SignalSource::Lfm(s) => s,
            _ => return Err(missing()),
        };
        let omega = self.omega()?;
        let mut pts = Vec::new();
        for &x in &self.slice_points {
            for c in &spec.components {
                pts.push(predicted_peak(omega, c, x).map_err(|_| missing())?);
            }
        }
        let first = *pts.first().ok_or_else(missing)?;
        let (lo, hi) = pts.iter().fold((first, first), |(lo, hi), p| {
            (Point2::new(lo.p1.min(p.p1), lo.p2.min(p.p2)), Point2::new(hi.p1.max(p.p1), hi.p2.max(p.p2)))
        });
        let pad = Point2::new(0.5, 0.5);
        Ok(Grid2D::from_interval(lo - pad, hi + pad, 96, 96)?)
    }
}

/// Parses `x1,x2`.
pub fn parse_point(s: &str) -> std::result::Result<Point2, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected x1,x2, got {s:?}"))?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{e}: {v:?}"));
    Ok(Point2::new(p(a)?, p(b)?))
}
