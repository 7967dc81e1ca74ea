//! Two-dimensional non-separable quadratic-phase Fourier transform (NSQPFT)
//! and the associated Wigner distribution (NSQPWD), evaluated by quadrature
//! on uniform grids.
//!
//! The crate is `no_std` (it needs `alloc`). Transcendental functions come
//! from `libm` in every build so results do not depend on the platform math
//! library.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod field;
mod math;

pub mod kernel;
pub mod lfm;
pub mod oracle;
pub mod params;
pub mod qpft;
pub mod wigner;

pub use error::Error;
pub use field::{Analytic, ComplexField, Grid2D};
pub use kernel::{ChirpVector, Point2};
pub use lfm::{LfmComponent, SignalSpec};
pub use num_complex::Complex64;
pub use params::{Mat2, ParamTuple, PhaseCoeffs, ShiftGeometry};
pub use wigner::{EvalMode, WignerSlice};

pub type Result<T> = core::result::Result<T, Error>;
