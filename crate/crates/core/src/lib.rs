//! Time-harmonic scattering from sound-soft obstacles in a two-dimensional
//! acoustic waveguide closed by a rigid end wall, and qualitative imaging of
//! the obstacle support from active array data.
//!
//! The crate is `no_std` (it needs `alloc`). Coordinates are `(x, xp)`:
//! `x <= 0` is range, with the end wall at `x = 0`, and `xp` in
//! `[0, width]` is cross-range. The harmonic factor `exp(-i omega t)` is
//! implied throughout.
//!
//! Layout:
//! - [`modes`] and [`green`]: Neumann mode basis, axial wavenumbers, the
//!   waveguide Green's function, backpropagation test functions and kernels.
//! - [`obstacle`] and [`forward`]: obstacle boundaries and a method of
//!   fundamental solutions solver producing array response matrices.
//! - [`array`] and [`response`]: array geometry, projection onto propagating
//!   modes and partial-aperture completion.
//! - [`imaging`]: the factorization method and the two migration imaging
//!   functions, with the diagnostics built on them.
#![no_std]

extern crate alloc;

pub mod array;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod green;
pub mod imaging;
pub mod modes;
pub mod obstacle;
mod par;
mod polylog;
pub mod response;

pub use num_complex::Complex64;

/// Dense complex matrix used for all array and mode-space operators.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<Complex64>;

pub use array::{make_array, ArrayGeometry, Quadrature};
pub use error::{Error, Result};
pub use forward::{
    assemble_response_matrix, evaluate_scattered, solve_scattered, MfsSolver, ScatteringSolution,
    SolverOptions,
};
pub use geometry::{Point, WaveguideGeometry};
pub use green::{
    greens_function, greens_function_near, greens_propagating, kernel_k, kernel_k0,
    test_function_phi,
};
pub use modes::{make_mode_set, mode_eigenfunction, ModeSet};
pub use obstacle::{make_obstacle, make_obstacle_with, ObstacleBoundary, ObstacleOptions, Shape};
pub use response::{complete_partial_aperture, project_to_modes, ProjectedResponse, ResponseMatrix};
