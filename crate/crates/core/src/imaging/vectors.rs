//! Closed-form mode coefficients of the probing functions over the array.

use alloc::vec::Vec;

use crate::error::Result;
use crate::geometry::Point;
use crate::green::phi_coefficients;
use crate::modes::ModeSet;
use crate::Complex64;

/// `b_j = int_A conj(G_P(x, z)) psi_j dS
///      = -(i / beta_j) psi_j(z.xp) exp(i beta_j x_A) cos(beta_j z.x)`.
pub fn rhs_vector(z: Point, modes: &ModeSet, x_a: f64) -> Vec<Complex64> {
    modes
        .propagating_betas()
        .iter()
        .enumerate()
        .map(|(j, &beta)| {
            let amp = modes.eigenfunction(j, z.xp) * libm::cos(beta * z.x) / beta;
            Complex64::new(0.0, -amp) * Complex64::from_polar(1.0, beta * x_a)
        })
        .collect()
}

/// Mode coefficients `a_j` of the backpropagation test function `phi_z`.
/// Fails with `DegenerateNormalizer` where every propagating mode vanishes.
pub fn test_vector(z: Point, modes: &ModeSet, x_a: f64) -> Result<Vec<Complex64>> {
    phi_coefficients(z, x_a, modes)
}

/// Values `sum_j c_j psi_j(xp)` of a mode expansion at the given cross-ranges.
pub fn synthesize(coefficients: &[Complex64], modes: &ModeSet, xp: &[f64]) -> Vec<Complex64> {
    xp.iter()
        .map(|&y| coefficients.iter().enumerate().map(|(j, c)| c * modes.eigenfunction(j, y)).sum())
        .collect()
}
