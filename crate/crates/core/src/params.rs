//! The parameter tuple `{A, B, C, D, E}` and quantities derived from it.

use core::ops::{Add, Mul, Neg, Sub};

use crate::kernel::{ChirpVector, Point2};
use crate::{Error, Result};

const EPS_DET: f64 = 1e-12;
const EPS_SYM: f64 = 1e-12;
const EPS_ANG: f64 = 1e-9;

/// Real 2x2 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[0.0, 0.0], [0.0, 0.0]]);
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2([[a11, a12], [a21, a22]])
    }

    pub const fn diag(d1: f64, d2: f64) -> Self {
        Mat2([[d1, 0.0], [0.0, d2]])
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let m = &self.0;
        (m[0][0].abs() + m[0][1].abs()).max(m[1][0].abs() + m[1][1].abs())
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        let m = &self.0;
        Point2::new(m[0][0] * p.p1 + m[0][1] * p.p2, m[1][0] * p.p1 + m[1][1] * p.p2)
    }

    pub fn scale(&self, s: f64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det.abs() <= EPS_DET * (self.norm_inf() * self.norm_inf()).max(1.0) {
            return Err(Error::SingularB);
        }
        let m = &self.0;
        Ok(Mat2([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]))
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        d
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        let mut r = [[0.0; 2]; 2];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(r)
    }
}

/// `{A, B, C, D, E}`: A and D act on the frequency variable, C and E on the
/// spatial one, B couples the two.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamTuple {
    pub a: Mat2,
    pub b: Mat2,
    pub c: Mat2,
    pub d: Mat2,
    pub e: Mat2,
}

impl ParamTuple {
    pub const fn new(a: Mat2, b: Mat2, c: Mat2, d: Mat2, e: Mat2) -> Self {
        ParamTuple { a, b, c, d, e }
    }

    /// Checks symmetry and invertibility of B.
    pub fn validate(&self) -> Result<()> {
        let b = &self.b;
        let norm = b.norm_inf();
        if !(b.0.iter().flatten().all(|v| v.is_finite())) {
            return Err(Error::SingularB);
        }
        if (b.0[0][1] - b.0[1][0]).abs() > EPS_SYM * norm {
            return Err(Error::AsymmetricB);
        }
        if b.det().abs() <= EPS_DET * (norm * norm).max(1.0) {
            return Err(Error::SingularB);
        }
        Ok(())
    }

    pub fn coeffs(&self) -> PhaseCoeffs {
        derive_coeffs(self)
    }

    /// `{C, B, A, E, D}`: swaps the roles of k and m.
    pub fn swapped(&self) -> Self {
        ParamTuple::new(self.c, self.b, self.a, self.e, self.d)
    }

    /// `{A, -B, C, -D, -E}`, the tuple under which a reflected signal's
    /// distribution matches the original at `-x`.
    pub fn reflected(&self) -> Self {
        ParamTuple::new(self.a, -self.b, self.c, -self.d, -self.e)
    }

    /// `{0, B, 0, D, E}`: drops every quadratic chirp.
    pub fn without_quadratic(&self) -> Self {
        ParamTuple::new(Mat2::ZERO, self.b, Mat2::ZERO, self.d, self.e)
    }

    /// `{A/s^2, B, C/s^2, D/s, E/s}`. Rescaling the chirp variables by `1/s`.
    pub fn rescaled(&self, s: f64) -> Self {
        ParamTuple::new(
            self.a.scale(1.0 / (s * s)),
            self.b,
            self.c.scale(1.0 / (s * s)),
            self.d.scale(1.0 / s),
            self.e.scale(1.0 / s),
        )
    }
}

/// Chirp coefficient vectors: `k` from (A, D), `m` from (C, E).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseCoeffs {
    pub k: ChirpVector,
    pub m: ChirpVector,
}

impl PhaseCoeffs {
    pub fn is_balanced(&self) -> bool {
        self.k == self.m
    }
}

fn chirp_from(quad: &Mat2, lin: &Mat2) -> ChirpVector {
    let (q, l) = (&quad.0, &lin.0);
    ChirpVector([
        q[0][0],
        q[0][1] + q[1][0],
        q[1][1],
        l[0][0] + l[1][0],
        l[0][1] + l[1][1],
    ])
}

pub fn derive_coeffs(omega: &ParamTuple) -> PhaseCoeffs {
    PhaseCoeffs { k: chirp_from(&omega.a, &omega.d), m: chirp_from(&omega.c, &omega.e) }
}

pub fn validate(omega: &ParamTuple) -> Result<()> {
    omega.validate()
}

/// B = I, everything else zero.
pub fn make_classical() -> ParamTuple {
    ParamTuple::new(Mat2::ZERO, Mat2::IDENTITY, Mat2::ZERO, Mat2::ZERO, Mat2::ZERO)
}

fn checked_sin(theta: f64) -> Result<f64> {
    let s = libm::sin(theta);
    if s.abs() <= EPS_ANG {
        Err(Error::DegenerateAngle)
    } else {
        Ok(s)
    }
}

pub fn make_gyrator(theta: f64) -> Result<ParamTuple> {
    let s = checked_sin(theta)?;
    let half_cot = 0.5 * libm::cos(theta) / s;
    let ac = Mat2::new(0.0, half_cot, half_cot, 0.0);
    let b = Mat2::new(0.0, -1.0 / s, -1.0 / s, 0.0);
    Ok(ParamTuple::new(ac, b, ac, Mat2::ZERO, Mat2::ZERO))
}

pub fn make_fractional(theta1: f64, theta2: f64) -> Result<ParamTuple> {
    let s1 = checked_sin(theta1)?;
    let s2 = checked_sin(theta2)?;
    let ac = Mat2::diag(0.5 * libm::cos(theta1) / s1, 0.5 * libm::cos(theta2) / s2);
    let b = Mat2::diag(-1.0 / s1, -1.0 / s2);
    Ok(ParamTuple::new(ac, b, ac, Mat2::ZERO, Mat2::ZERO))
}

/// Matrices governing the shift and modulation covariance of the distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftGeometry {
    /// `[[b11, b12], [b12, b22]] / det B`. Its adjugate arrangement is `B^-1`,
    /// see [`ShiftGeometry::b_inverse`].
    pub btilde: Mat2,
    /// Time-shift to frequency-displacement map, `rho = P x0`.
    pub p: Mat2,
    /// `2 (K - M)` where K, M are the symmetric quadratic-form matrices of k, m.
    pub q: Mat2,
    /// `(k4 - m4, k5 - m5)`.
    pub lambda: Point2,
}

impl ShiftGeometry {
    /// `[[bt22, -bt12], [-bt12, bt11]]`, equal to `B^-1`.
    pub fn b_inverse(&self) -> Mat2 {
        let t = &self.btilde.0;
        Mat2::new(t[1][1], -t[0][1], -t[1][0], t[0][0])
    }
}

pub(crate) fn quad_matrix(c: &ChirpVector) -> Mat2 {
    let v = &c.0;
    Mat2::new(v[0], 0.5 * v[1], 0.5 * v[1], v[2])
}

pub fn shift_geometry(coeffs: &PhaseCoeffs, b: &Mat2) -> Result<ShiftGeometry> {
    let delta = b.0[0][0] * b.0[1][1] - b.0[0][1] * b.0[0][1];
    let norm = b.norm_inf();
    if delta.abs() <= EPS_DET * (norm * norm).max(1.0) {
        return Err(Error::SingularB);
    }
    let (b11, b12, b22) = (b.0[0][0], b.0[0][1], b.0[1][1]);
    let btilde = Mat2::new(b11 / delta, b12 / delta, b12 / delta, b22 / delta);
    let binv = Mat2::new(b22 / delta, -b12 / delta, -b12 / delta, b11 / delta);
    let km = quad_matrix(&coeffs.k);
    let mm = quad_matrix(&coeffs.m);
    let p = binv * (mm + km);
    let q = (km - mm).scale(2.0);
    let (k, m) = (&coeffs.k.0, &coeffs.m.0);
    let lambda = Point2::new(k[3] - m[3], k[4] - m[4]);
    Ok(ShiftGeometry { btilde, p, q, lambda })
}

/// Parameter set used for the mono- and bi-component experiments.
pub fn omega0() -> ParamTuple {
    ParamTuple::new(
        Mat2::new(1.0, -5.0, 5.0, 1.0),
        Mat2::new(2.0, 1.0, 1.0, 4.0),
        Mat2::new(1.0, -13.0 / 7.0, 13.0 / 7.0, 1.0),
        Mat2::new(2.0, 1.0, 2.0, 5.0),
        Mat2::new(1.0, 2.0, 3.0, 4.0),
    )
}

/// Parameter set used for the tri-component experiment.
pub fn omega1() -> ParamTuple {
    ParamTuple::new(
        Mat2::new(1.0, -1.0 / 7.0, 1.0 / 7.0, 1.0),
        Mat2::new(2.0, 1.0, 1.0, 4.0),
        Mat2::new(1.0, -19.0 / 5.0, 19.0 / 5.0, 1.0),
        Mat2::new(4.0, 5.0, 0.0, 7.0),
        Mat2::new(2.0, 7.0, 2.0, 5.0),
    )
}
