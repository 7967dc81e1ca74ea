use alloc::vec::Vec;

use num_complex::Complex64;

pub(crate) const TAU: f64 = core::f64::consts::TAU;

#[inline]
pub(crate) fn cis(phase: f64) -> Complex64 {
    let (s, c) = libm::sincos(phase);
    Complex64::new(c, s)
}

#[inline]
pub(crate) fn sqrt(v: f64) -> f64 {
    libm::sqrt(v)
}

/// Unnormalized cardinal sine, `sin(z) / z` with `sinc(0) = 1`.
pub fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        libm::sin(z) / z
    }
}

/// Principal square root of a real number as a complex value.
pub(crate) fn csqrt_real(v: f64) -> Complex64 {
    if v >= 0.0 {
        Complex64::new(sqrt(v), 0.0)
    } else {
        Complex64::new(0.0, sqrt(-v))
    }
}

/// `sum_ij v[i][j] exp(i (nu1 a_i + nu2 b_j))` for a fixed tensor of samples.
///
/// Rows are summed first, then combined in row order, so the result does not
/// depend on how calls are distributed.
pub(crate) struct SeparableSum {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub values: Vec<Complex64>,
}

#[derive(Default)]
pub(crate) struct Scratch {
    ea: Vec<Complex64>,
    eb: Vec<Complex64>,
}

impl SeparableSum {
    pub fn eval_with(&self, nu1: f64, nu2: f64, s: &mut Scratch) -> Complex64 {
        s.ea.clear();
        s.ea.extend(self.a.iter().map(|&t| cis(nu1 * t)));
        s.eb.clear();
        s.eb.extend(self.b.iter().map(|&t| cis(nu2 * t)));
        let nb = self.b.len();
        let mut total = Complex64::new(0.0, 0.0);
        for (row, ea) in self.values.chunks_exact(nb).zip(&s.ea) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (v, eb) in row.iter().zip(&s.eb) {
                acc += v * eb;
            }
            total += ea * acc;
        }
        total
    }

    /// Values on the tensor grid `nu1s x nu2s`, row-major, in two separable
    /// passes.
    pub fn eval_grid(&self, nu1s: &[f64], nu2s: &[f64]) -> Vec<Complex64> {
        let (na, nb) = (self.a.len(), self.b.len());
        let zero = Complex64::new(0.0, 0.0);
        // partial[a][q] = sum_b v[a][b] exp(i nu2_q b_b)
        let mut partial = alloc::vec![zero; na * nu2s.len()];
        let mut e = Vec::with_capacity(nb.max(na));
        for (q, &nu2) in nu2s.iter().enumerate() {
            e.clear();
            e.extend(self.b.iter().map(|&t| cis(nu2 * t)));
            for (a, row) in self.values.chunks_exact(nb).enumerate() {
                let mut acc = zero;
                for (v, eb) in row.iter().zip(&e) {
                    acc += v * eb;
                }
                partial[a * nu2s.len() + q] = acc;
            }
        }
        let mut out = alloc::vec![zero; nu1s.len() * nu2s.len()];
        for (p, &nu1) in nu1s.iter().enumerate() {
            e.clear();
            e.extend(self.a.iter().map(|&t| cis(nu1 * t)));
            let row = &mut out[p * nu2s.len()..(p + 1) * nu2s.len()];
            for (a, ea) in e.iter().enumerate() {
                let prow = &partial[a * nu2s.len()..(a + 1) * nu2s.len()];
                for (o, v) in row.iter_mut().zip(prow) {
                    *o += ea * v;
                }
            }
        }
        out
    }
}
