//! The four subcommands. Each returns its report text; files go under the
//! configured output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nsqpwd_core::lfm::{cross_peak, detect_peaks, locate_predicted, predicted_peak, SignalSpec};
use nsqpwd_core::oracle::{report_table, run_suite, CheckReport, Probes, SuiteConfig};
use nsqpwd_core::wigner::wd_slice;
use nsqpwd_core::{qpft, Complex64, ComplexField, Grid2D, ParamTuple, Point2, WignerSlice};
use serde::Serialize;

use crate::config::{RunConfig, SignalSource};
use crate::error::{CliError, Result};
use crate::formats::{gnuplot_matrix, read_grid, slice_csv, slice_field, write_file, write_grid, encode_bin};

fn out_dir(cfg: &RunConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.output).map_err(|e| CliError::io(&cfg.output, e))?;
    Ok(&cfg.output)
}

fn write_slice(dir: &Path, stem: &str, s: &WignerSlice, cfg: &RunConfig) -> Result<()> {
    if cfg.format.csv() {
        write_file(&dir.join(format!("{stem}.csv")), slice_csv(s).as_bytes())?;
    }
    if cfg.format.bin() {
        write_file(&dir.join(format!("{stem}.bin")), &encode_bin(&slice_field(s)))?;
    }
    write_file(&dir.join(format!("{stem}.gnuplot")), gnuplot_matrix(s).as_bytes())
}

fn pt(p: Point2) -> [f64; 2] {
    [p.p1, p.p2]
}

/// Slices at every configured point, with a top-peak summary.
pub fn cmd_wd(cfg: &RunConfig) -> Result<String> {
    let omega = cfg.omega()?;
    let mode = cfg.eval_mode()?;
    let f = cfg.field()?;
    let xs = cfg.checked_slices(&f)?;
    let wgrid = cfg.w_grid_or_default()?;
    let dir = out_dir(cfg)?;
    let mut report = String::new();
    for (k, &x) in xs.iter().enumerate() {
        let s = wd_slice(&f, omega, x, &wgrid, mode)?;
        write_slice(dir, &format!("wd_{k}"), &s, cfg)?;
        let _ = writeln!(report, "slice {k} at x = ({}, {}), |Im|/|Re| = {:.3e}", x.p1, x.p2, s.imag_ratio());
        for (rank, (w, m)) in detect_peaks(&s, cfg.peaks)?.into_iter().enumerate() {
            let _ = writeln!(report, "  peak {}: omega = ({:.6}, {:.6}), |W| = {:.6}", rank + 1, w.p1, w.p2, m);
        }
    }
    Ok(report)
}

#[derive(Serialize)]
struct AutoPeak {
    component: usize,
    predicted: [f64; 2],
    found: Option<[f64; 2]>,
    magnitude: Option<f64>,
    deviation: Option<[f64; 2]>,
}

#[derive(Serialize)]
struct Peak {
    location: [f64; 2],
    magnitude: f64,
    nearest: Option<String>,
    predicted: Option<[f64; 2]>,
    deviation: Option<[f64; 2]>,
}

#[derive(Serialize)]
struct SliceReport {
    x: [f64; 2],
    auto_peaks: Vec<AutoPeak>,
    peaks: Vec<Peak>,
}

#[derive(Serialize)]
struct Detection {
    snr_db: Option<f64>,
    seed: Option<u64>,
    grid_step: [f64; 2],
    slices: Vec<SliceReport>,
}

/// Closed-form locations: autos first, then crosses for pairs that share
/// chirp rates. Empty when the tuple has no closed form (`k != m`).
fn predictions(omega: &ParamTuple, spec: &SignalSpec, x: Point2) -> Vec<(String, Point2)> {
    let mut out = Vec::new();
    for (n, c) in spec.components.iter().enumerate() {
        match predicted_peak(omega, c, x) {
            Ok(p) => out.push((format!("auto {n}"), p)),
            Err(_) => return Vec::new(),
        }
    }
    for n in 0..spec.components.len() {
        for l in n + 1..spec.components.len() {
            if let Ok(p) = cross_peak(omega, spec, n, l, x) {
                out.push((format!("cross {n}-{l}"), p));
            }
        }
    }
    out
}

/// LFM detection run: slices plus a report matching peaks to predictions.
pub fn cmd_lfm(cfg: &RunConfig) -> Result<String> {
    let omega = cfg.omega()?;
    let spec = cfg.lfm_spec()?;
    let mode = cfg.eval_mode()?;
    let f = cfg.field()?;
    let xs = cfg.checked_slices(&f)?;
    let wgrid = cfg.w_grid_or_default()?;
    let dir = out_dir(cfg)?;
    let mut text = String::new();
    let mut slices = Vec::new();
    for (k, &x) in xs.iter().enumerate() {
        let s = wd_slice(&f, omega, x, &wgrid, mode)?;
        write_slice(dir, &format!("lfm_{k}"), &s, cfg)?;
        let preds = predictions(omega, spec, x);
        let autos: Vec<Point2> = preds.iter().take(spec.components.len()).map(|p| p.1).collect();
        let located = if autos.is_empty() { Vec::new() } else { locate_predicted(&s, &autos, cfg.search_radius) };
        let auto_peaks: Vec<AutoPeak> = autos
            .iter()
            .zip(&located)
            .enumerate()
            .map(|(n, (&p, hit))| AutoPeak {
                component: n,
                predicted: pt(p),
                found: hit.map(|h| pt(h.0)),
                magnitude: hit.map(|h| h.1),
                deviation: hit.map(|h| pt(h.0 - p)),
            })
            .collect();
        let peaks: Vec<Peak> = detect_peaks(&s, cfg.peaks)?
            .into_iter()
            .map(|(w, m)| {
                let near = preds
                    .iter()
                    .min_by(|a, b| (a.1 - w).dot(a.1 - w).total_cmp(&(b.1 - w).dot(b.1 - w)));
                Peak {
                    location: pt(w),
                    magnitude: m,
                    nearest: near.map(|n| n.0.clone()),
                    predicted: near.map(|n| pt(n.1)),
                    deviation: near.map(|n| pt(w - n.1)),
                }
            })
            .collect();
        let _ = writeln!(text, "slice {k} at x = ({}, {})", x.p1, x.p2);
        for a in &auto_peaks {
            match (a.found, a.magnitude) {
                (Some(w), Some(m)) => {
                    let _ = writeln!(
                        text,
                        "  auto {}: found ({:.6}, {:.6}) |W| = {:.6}, predicted ({:.6}, {:.6})",
                        a.component, w[0], w[1], m, a.predicted[0], a.predicted[1]
                    );
                }
                _ => {
                    let _ = writeln!(text, "  auto {}: no local maximum within {} cells", a.component, cfg.search_radius);
                }
            }
        }
        for (rank, p) in peaks.iter().enumerate() {
            let _ = writeln!(
                text,
                "  peak {}: ({:.6}, {:.6}) |W| = {:.6}{}",
                rank + 1,
                p.location[0],
                p.location[1],
                p.magnitude,
                p.nearest.as_ref().map(|n| format!(", nearest {n}")).unwrap_or_default()
            );
        }
        slices.push(SliceReport { x: pt(x), auto_peaks, peaks });
    }
    let det = Detection {
        snr_db: cfg.snr_db,
        seed: cfg.snr_db.map(|_| cfg.seed),
        grid_step: [wgrid.step1, wgrid.step2],
        slices,
    };
    let json = serde_json::to_string_pretty(&det).expect("report serializes");
    write_file(&dir.join("detection.json"), json.as_bytes())?;
    Ok(text)
}

/// 3x3 nodes around the centre of `g`, `spread` steps apart.
fn centre_nodes(g: &Grid2D, spread: usize) -> Vec<Point2> {
    let (c1, c2) = (g.n1 / 2, g.n2 / 2);
    let (s1, s2) = (spread.min(c1), spread.min(c2));
    let mut xs = Vec::new();
    for i in [c1 - s1, c1, (c1 + s1).min(g.n1 - 1)] {
        for j in [c2 - s2, c2, (c2 + s2).min(g.n2 - 1)] {
            xs.push(g.point(i, j));
        }
    }
    xs
}

/// Frequency at which the lag phase of a signal with carrier `k` is
/// stationary at `x`.
fn bulk_frequency(omega: &ParamTuple, x: Point2, k: Point2) -> Result<Point2> {
    let c = omega.coeffs();
    let grad = |v: &[f64; 5]| Point2::new(2.0 * v[0] * x.p1 + v[1] * x.p2 + v[3], v[1] * x.p1 + 2.0 * v[2] * x.p2 + v[4]);
    let g = (grad(&c.m.0) + grad(&c.k.0)) * 0.5 + k;
    Ok(-omega.b.inverse()?.apply(g))
}

fn suite_config(cfg: &RunConfig, f: &ComplexField) -> Result<SuiteConfig> {
    let omega = cfg.omega()?;
    let g = *f.grid();
    let centre = g.point(g.n1 / 2, g.n2 / 2);
    let carrier = match cfg.signal()? {
        SignalSource::Gaussian { carrier, .. } => *carrier,
        _ => Point2::ORIGIN,
    };
    let wc = match cfg.w_grid {
        Some(w) => w.point(w.n1 / 2, w.n2 / 2),
        None => bulk_frequency(omega, centre, carrier)?,
    };
    let ws = vec![wc, wc + Point2::new(0.3, -0.2), wc + Point2::new(-0.4, 0.5)];
    let spread = (g.n1.min(g.n2) / 10).max(1);
    let probes = Probes { xs: centre_nodes(&g, spread), ws: ws.clone() };
    let mut marginal_ws = Vec::new();
    for a in [-0.6, 0.0, 0.6] {
        for b in [-0.6, 0.0, 0.6] {
            marginal_ws.push(wc + Point2::new(a, b));
        }
    }
    let x0 = match cfg.verify.x0 {
        Some(x0) => {
            if g.lattice_offset(g.point(0, 0) + x0).is_none() {
                return Err(CliError::config("verify.x0 must be a whole number of grid steps"));
            }
            x0
        }
        None => Point2::new((g.n1 / 8).max(1) as f64 * g.step1, 0.0),
    };
    let lam = cfg.verify.lambda.unwrap_or(2.0);
    if !(lam.is_finite() && lam > 0.0) {
        return Err(CliError::config("verify.lambda must be positive"));
    }
    // Second convolution factor: a compact bump on 16 x 16 nodes of the same
    // step, centred on the origin.
    let kg = Grid2D::new(16, 16, -7.5 * g.step1, -7.5 * g.step2, g.step1, g.step2)?;
    let r2 = (6.0 * g.step1).powi(2).max((6.0 * g.step2).powi(2));
    let conv_kernel = ComplexField::from_fn(kg, |x| {
        let q = 1.0 - x.dot(x) / r2;
        Complex64::new(if q > 0.0 { q * q } else { 0.0 }, 0.0)
    });
    let hg = *f.convolve(&conv_kernel)?.grid();
    let conv_probes = Probes { xs: centre_nodes(&hg, (spread / 2).max(1)), ws };
    let mut stft_points = Vec::new();
    for (di, dj) in [(0i64, 0i64), (-2, 3), (3, -1)] {
        let i = (g.n1 as i64 / 2 + di).clamp(0, g.n1 as i64 - 1) as usize;
        let j = (g.n2 as i64 / 2 + dj).clamp(0, g.n2 as i64 - 1) as usize;
        let half = g.point(i, j);
        let wt = bulk_frequency(omega, half, carrier)?;
        stft_points.push((half * 2.0, -omega.b.apply(wt)));
    }
    Ok(SuiteConfig {
        marginal_ws,
        marginal_xs: probes.xs.clone(),
        probes,
        x0,
        w0: cfg.verify.w0.unwrap_or(Point2::new(1.0, 0.0)),
        lam,
        conv_kernel,
        conv_probes,
        stft_points,
        mode: cfg.eval_mode()?,
        tolerance_override: cfg.tolerance_override,
    })
}

#[derive(Serialize)]
struct JsonCheck<'a> {
    name: &'a str,
    lhs: [f64; 2],
    rhs: [f64; 2],
    rel_err: f64,
    tol: f64,
    pass: bool,
}

/// The property suite; fails with exit status 1 if any check fails.
pub fn cmd_verify(cfg: &RunConfig) -> Result<String> {
    let omega = cfg.omega()?;
    let f = cfg.field()?;
    let suite = suite_config(cfg, &f)?;
    let reports: Vec<CheckReport> = run_suite(&f, omega, &suite)?;
    let table = report_table(&reports);
    let dir = out_dir(cfg)?;
    write_file(&dir.join("verify.txt"), table.as_bytes())?;
    let json: Vec<JsonCheck> = reports
        .iter()
        .map(|r| JsonCheck {
            name: &r.name,
            lhs: [r.lhs.re, r.lhs.im],
            rhs: [r.rhs.re, r.rhs.im],
            rel_err: r.rel_err,
            tol: r.tol,
            pass: r.pass,
        })
        .collect();
    write_file(&dir.join("verify.json"), serde_json::to_string_pretty(&json).expect("report serializes").as_bytes())?;
    let failed = reports.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        print!("{table}");
        return Err(CliError::VerifyFailed(failed, reports.len()));
    }
    Ok(table)
}

/// Forward transform onto `w_grid`, or with `inverse` back onto `x_grid`.
pub fn cmd_qpft(cfg: &RunConfig, input: Option<&Path>, inverse: bool) -> Result<String> {
    let omega = cfg.omega()?;
    let input: PathBuf = match (input, &cfg.signal) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(SignalSource::File(p))) => p.clone(),
        _ => return Err(CliError::config("qpft needs --input or a \"file\" signal")),
    };
    let f = read_grid(&input)?;
    let (out, stem) = if inverse {
        let g = cfg.x_grid.ok_or_else(|| CliError::config("inverse transform needs \"x_grid\""))?;
        (qpft::inverse(&f, omega, &g)?, "qpft_inverse")
    } else {
        let g = cfg.w_grid.ok_or_else(|| CliError::config("forward transform needs \"w_grid\""))?;
        (qpft::forward(&f, omega, &g)?, "qpft_forward")
    };
    let dir = out_dir(cfg)?;
    let paths = write_grid(&out, dir, stem, cfg.format)?;
    let mut s = String::new();
    for p in paths {
        let _ = writeln!(s, "wrote {}", p.display());
    }
    Ok(s)
}
