//! Forward and inverse transform by midpoint quadrature.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::kernel::{prefactor, Point2};
use crate::math::{Scratch, SeparableSum};
use crate::params::ParamTuple;
use crate::Result;

pub use crate::field::{ComplexField, Grid2D};

/// `Q[f](w) = sum_x f(x) K(x, w) dx` for every node of `wgrid`.
pub fn forward(f: &ComplexField, omega: &ParamTuple, wgrid: &Grid2D) -> Result<ComplexField> {
    omega.validate()?;
    let c = omega.coeffs();
    let g = f.grid();
    let sum = SeparableSum {
        a: (0..g.n1).map(|i| g.coord1(i)).collect(),
        b: (0..g.n2).map(|j| g.coord2(j)).collect(),
        values: g.points().zip(f.values()).map(|(x, v)| v * c.m.eval(x)).collect(),
    };
    let lam = prefactor(omega) * g.cell_area();
    let mut scratch = Scratch::default();
    let values: Vec<Complex64> = wgrid
        .points()
        .map(|w| {
            let nu = omega.b.apply(w);
            lam * c.k.eval(w) * sum.eval_with(nu.p1, nu.p2, &mut scratch)
        })
        .collect();
    ComplexField::new(*wgrid, values)
}

/// `f(x) = sum_w F(w) conj(K(x, w)) dw`, written as `conj(Lambda)` times the
/// sum against the conjugated unit-modulus part of the kernel.
pub fn inverse(big_f: &ComplexField, omega: &ParamTuple, xgrid: &Grid2D) -> Result<ComplexField> {
    omega.validate()?;
    let c = omega.coeffs();
    let g = big_f.grid();
    let sum = SeparableSum {
        a: (0..g.n1).map(|i| g.coord1(i)).collect(),
        b: (0..g.n2).map(|j| g.coord2(j)).collect(),
        values: g.points().zip(big_f.values()).map(|(w, v)| v * c.k.eval(w).conj()).collect(),
    };
    let lam = prefactor(omega).conj() * g.cell_area();
    let mut scratch = Scratch::default();
    let values: Vec<Complex64> = xgrid
        .points()
        .map(|x: Point2| {
            let mu = omega.b.apply(x);
            lam * c.m.eval(x).conj() * sum.eval_with(-mu.p1, -mu.p2, &mut scratch)
        })
        .collect();
    ComplexField::new(*xgrid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::kernel_eval;
    use crate::params::omega0;

    #[test]
    fn zero_and_single_sample() {
        let om = omega0();
        let xg = Grid2D::new(3, 3, -1.0, -1.0, 1.0, 1.0).unwrap();
        let wg = Grid2D::new(4, 2, -0.5, 0.3, 0.4, 0.7).unwrap();
        let z = forward(&ComplexField::zeros(xg), &om, &wg).unwrap();
        assert!(z.values().iter().all(|v| v.norm() == 0.0));

        let mut f = ComplexField::zeros(xg);
        let v = Complex64::new(1.5, -0.5);
        f.values_mut()[5] = v;
        let xj = xg.point(1, 2);
        let out = forward(&f, &om, &wg).unwrap();
        for (w, got) in wg.points().zip(out.values()) {
            let want = v * kernel_eval(&om, xj, w).unwrap();
            assert!((got - want).norm() < 1e-14);
        }
    }

    #[test]
    fn inverse_is_linear() {
        let om = omega0();
        let wg = Grid2D::new(5, 4, -1.0, -1.0, 0.5, 0.5).unwrap();
        let xg = Grid2D::new(3, 3, -1.0, -1.0, 1.0, 1.0).unwrap();
        let big = ComplexField::from_fn(wg, |p| Complex64::new(p.p1.sin(), p.p2 * p.p1));
        let alpha = Complex64::new(2.0, 3.0);
        let a = inverse(&big.scaled(alpha), &om, &xg).unwrap();
        let b = inverse(&big, &om, &xg).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y * alpha).norm() < 1e-12);
        }
        assert!(inverse(&ComplexField::zeros(wg), &om, &xg).unwrap().values().iter().all(|v| v.norm() == 0.0));
    }
}
