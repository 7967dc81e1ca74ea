#![allow(dead_code)]

use nsqpwd_core::oracle::Probes;
use nsqpwd_core::{Complex64, ComplexField, Grid2D, ParamTuple, Point2};

/// `exp(-|x - c|^2 / 2 + i k . x)`.
pub fn gaussian(grid: Grid2D, c: Point2, k: Point2) -> ComplexField {
    ComplexField::from_fn(grid, |x| {
        let d = x - c;
        Complex64::from_polar((-0.5 * d.dot(d)).exp(), k.dot(x))
    })
}

/// [`gaussian`] scaled to unit discrete energy.
pub fn unit_gaussian(grid: Grid2D, c: Point2, k: Point2) -> ComplexField {
    let g = gaussian(grid, c, k);
    let s = 1.0 / g.energy().sqrt();
    g.scaled(Complex64::new(s, 0.0))
}

/// `(1 - |x - c|^2 / r^2)^2` inside the disc, zero outside.
pub fn bump(c: Point2, r: f64) -> impl Fn(Point2) -> Complex64 {
    move |x| {
        let d = x - c;
        let q = 1.0 - d.dot(d) / (r * r);
        Complex64::new(if q > 0.0 { q * q } else { 0.0 }, 0.0)
    }
}

/// Frequency where the distribution of a Gaussian with carrier `k`
/// concentrates at `x`: the lag phase is stationary there.
pub fn bulk_frequency(omega: &ParamTuple, x: Point2, k: Point2) -> Point2 {
    let c = omega.coeffs();
    let grad = |v: &[f64; 5]| Point2::new(2.0 * v[0] * x.p1 + v[1] * x.p2 + v[3], v[1] * x.p1 + 2.0 * v[2] * x.p2 + v[4]);
    let g = (grad(&c.m.0) + grad(&c.k.0)) * 0.5 + k;
    -omega.b.inverse().unwrap().apply(g)
}

/// 3x3 nodes around the grid centre, `spread` steps apart.
pub fn interior_nodes(grid: &Grid2D, spread: usize) -> Vec<Point2> {
    let (c1, c2) = (grid.n1 / 2, grid.n2 / 2);
    let mut xs = Vec::new();
    for i in [c1 - spread, c1, c1 + spread] {
        for j in [c2 - spread, c2, c2 + spread] {
            xs.push(grid.point(i, j));
        }
    }
    xs
}

/// Interior nodes with frequencies around the bulk at the origin.
pub fn bulk_probes(omega: &ParamTuple, grid: &Grid2D, k: Point2) -> Probes {
    let wc = bulk_frequency(omega, Point2::ORIGIN, k);
    let ws = vec![wc, wc + Point2::new(0.3, -0.2), wc + Point2::new(-0.4, 0.5)];
    Probes { xs: interior_nodes(grid, 6), ws }
}
