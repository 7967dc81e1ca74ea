//! Chirp factors and the transform kernel.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::math::{cis, csqrt_real, TAU};
use crate::params::ParamTuple;
use crate::Result;

/// A point in the spatial or frequency plane.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point2 {
    pub p1: f64,
    pub p2: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { p1: 0.0, p2: 0.0 };

    pub const fn new(p1: f64, p2: f64) -> Self {
        Point2 { p1, p2 }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.p1 * o.p1 + self.p2 * o.p2
    }

    pub fn is_finite(self) -> bool {
        self.p1.is_finite() && self.p2.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.p1 + o.p1, self.p2 + o.p2)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.p1 - o.p1, self.p2 - o.p2)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.p1, -self.p2)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.p1 * s, self.p2 * s)
    }
}

/// Coefficients of `c1 p1^2 + c2 p1 p2 + c3 p2^2 + c4 p1 + c5 p2`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ChirpVector(pub [f64; 5]);

impl ChirpVector {
    pub const ZERO: ChirpVector = ChirpVector([0.0; 5]);

    pub fn phase(&self, p: Point2) -> f64 {
        let c = &self.0;
        c[0] * p.p1 * p.p1 + c[1] * p.p1 * p.p2 + c[2] * p.p2 * p.p2 + c[3] * p.p1 + c[4] * p.p2
    }

    pub fn eval(&self, p: Point2) -> Complex64 {
        cis(self.phase(p))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }
}

impl Add for ChirpVector {
    type Output = ChirpVector;
    fn add(self, o: ChirpVector) -> ChirpVector {
        let mut r = self.0;
        for (a, b) in r.iter_mut().zip(o.0) {
            *a += b;
        }
        ChirpVector(r)
    }
}

impl Sub for ChirpVector {
    type Output = ChirpVector;
    fn sub(self, o: ChirpVector) -> ChirpVector {
        self + (-o)
    }
}

impl Neg for ChirpVector {
    type Output = ChirpVector;
    fn neg(self) -> ChirpVector {
        ChirpVector(self.0.map(|v| -v))
    }
}

pub fn chirp_eval(c: &ChirpVector, p: Point2) -> Complex64 {
    c.eval(p)
}

/// `i sqrt(det B) / (2 pi)` with the principal square root.
pub fn prefactor(omega: &ParamTuple) -> Complex64 {
    Complex64::i() * csqrt_real(omega.b.det()) / TAU
}

/// `x^T B w` for symmetric B.
#[inline]
pub(crate) fn coupling(omega: &ParamTuple, x: Point2, w: Point2) -> f64 {
    let b = &omega.b.0;
    x.p1 * (w.p1 * b[0][0] + w.p2 * b[0][1]) + x.p2 * (w.p1 * b[0][1] + w.p2 * b[1][1])
}

/// Kernel value at spatial point `x` and frequency `w`, chirp-factorized.
pub fn kernel_eval(omega: &ParamTuple, x: Point2, w: Point2) -> Result<Complex64> {
    omega.validate()?;
    let c = omega.coeffs();
    Ok(prefactor(omega) * c.k.eval(w) * c.m.eval(x) * cis(coupling(omega, x, w)))
}
