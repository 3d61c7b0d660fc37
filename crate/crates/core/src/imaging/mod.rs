//! Qualitative imaging from projected array data.
//!
//! Pipeline per frequency: [`build_far_field`] turns the projected response
//! into the mode-space far-field matrix, [`sharpen`] forms the Hermitian
//! positive semidefinite `F_#`, and the grid functions evaluate
//! - [`factorization_image`]: `1 / |g_z|` with `g_z` regularized by the
//!   discrepancy principle;
//! - [`migration_sharp_image`]: the quadratic form `a_z* F_# a_z`;
//! - [`migration_image`]: `|Im(phi_z^T U phi_z)|` directly on sensor data.

pub mod diagnostics;
pub mod farfield;
pub mod grid;
pub mod methods;
pub mod metrics;
pub mod regularize;
pub mod vectors;

pub use diagnostics::{svd_diagnostics, Subspaces};
pub use farfield::{
    build_far_field, hermitian_parts, passivity_min_eigenvalue, sharpen, sharpen_with, spectral_abs, FarFieldMatrix,
    SharpOperator, SharpVariant,
};
pub use grid::{GridSpec, ImageGrid, Method};
pub use methods::{
    default_epsilon, factorization_image, kernel_grids, migration_image, migration_mode_space_image,
    migration_sharp_image, multifrequency_combine, threshold_support, FactorizationImage, MigSign,
};
pub use metrics::{argmax_distance, jaccard, mask_centroid, pearson, peak_to_sidelobe, SIDELOBE_RADIUS};
pub use regularize::{morozov_alpha, picard_indicator, MorozovSolution, PicardValue, DEFAULT_RANK_TOL};
pub use vectors::{rhs_vector, test_vector};
