use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    /// `k^2` sits within the cutoff guard of a mode eigenvalue, so the
    /// corresponding axial wavenumber is (numerically) zero.
    #[error("wavenumber {k} is at the cutoff of mode {mode}")]
    CutoffResonance { k: f64, mode: usize },

    #[error("range separation {separation:e} is below the minimum {min_sep:e} of the mode set")]
    SeparationTooSmall { separation: f64, min_sep: f64 },

    #[error("source and observation points coincide")]
    CoincidentPoints,

    /// Every propagating mode has a node at the search point.
    #[error("test function normalizer vanishes at the search point")]
    DegenerateNormalizer,

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("collocation matrix condition estimate {0:e} exceeds the limit")]
    IllConditioned(f64),

    #[error("boundary residual {residual:e} exceeds the tolerance {limit:e}")]
    ResidualTooLarge { residual: f64, limit: f64 },

    #[error("source {index}: {cause}")]
    SourceFailed { index: usize, cause: Box<Error> },

    #[error("aperture fraction {0} is partial; use complete_partial_aperture")]
    PartialAperture(f64),

    #[error("{sensors} sensors (numerical rank {rank}) cannot resolve {modes} propagating modes")]
    UnderdeterminedAperture { sensors: usize, rank: usize, modes: usize },

    /// The discrepancy equation has no positive root: the part of the
    /// right-hand side outside the range of the operator already exceeds the
    /// noise level.
    #[error("no positive regularization parameter satisfies the discrepancy principle")]
    NoRoot,

    #[error("image is identically zero")]
    DegenerateImage,

    #[error("grid mismatch: {0}")]
    GridMismatch(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0} did not converge")]
    DecompositionFailure(&'static str),
}
