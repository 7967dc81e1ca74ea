use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Error {
    /// `det B` is zero within tolerance.
    SingularB,
    /// `b12 != b21` beyond tolerance.
    AsymmetricB,
    /// `sin(theta)` is zero within tolerance.
    DegenerateAngle,
    EmptyGrid,
    /// Grid with a non-positive or non-finite step or origin.
    InvalidGrid,
    /// Value array length does not match the grid.
    LengthMismatch,
    /// The evaluation point does not fall on the field's sample lattice.
    OffGridCenter,
    /// `PaperRange` requested on a field without an analytic generator.
    AnalyticExtensionUnavailable,
    GridMismatch,
    GridTooSmall,
    ZeroSignal,
    /// Closed forms need `k == m`.
    CoeffMismatch,
    /// Cross-term closed forms need a shared chirp rate.
    ChirpRateMismatch,
    EmptySlice,
    InvalidArgument(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SingularB => f.write_str("matrix B is singular"),
            Error::AsymmetricB => f.write_str("matrix B is not symmetric"),
            Error::DegenerateAngle => f.write_str("angle is a multiple of pi"),
            Error::EmptyGrid => f.write_str("grid has no samples"),
            Error::InvalidGrid => f.write_str("grid steps must be positive and finite"),
            Error::LengthMismatch => f.write_str("value count does not match grid"),
            Error::OffGridCenter => f.write_str("point is not on the sample lattice"),
            Error::AnalyticExtensionUnavailable => {
                f.write_str("paper-range mode needs an analytic signal")
            }
            Error::GridMismatch => f.write_str("fields are sampled on different grids"),
            Error::GridTooSmall => f.write_str("grid does not cover the signal support"),
            Error::ZeroSignal => f.write_str("signal has zero power"),
            Error::CoeffMismatch => f.write_str("closed form requires k == m"),
            Error::ChirpRateMismatch => f.write_str("components must share chirp rates"),
            Error::EmptySlice => f.write_str("slice is empty"),
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
