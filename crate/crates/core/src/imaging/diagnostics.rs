//! Singular subspaces of the projected data.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::response::ProjectedResponse;
use crate::{CMatrix, Complex64};

#[derive(Debug, Clone, PartialEq)]
pub struct Subspaces {
    /// Singular values above `rank_tol` times the largest.
    pub rank: usize,
    /// Decreasing.
    pub singular_values: Vec<f64>,
    /// Orthonormal basis of the null space `P_0`, one column per vector.
    pub null_basis: CMatrix,
    /// Orthonormal basis of its complement within the propagating span.
    pub range_basis: CMatrix,
}

impl Subspaces {
    /// Orthogonal projector onto the complement of the null space.
    pub fn range_projector(&self) -> CMatrix {
        &self.range_basis * self.range_basis.adjoint()
    }

    pub fn null_projector(&self) -> CMatrix {
        &self.null_basis * self.null_basis.adjoint()
    }
}

/// Rank and null space of `U^P`.
///
/// The matrix is symmetrized as `(M + M^T)/2` first; for reciprocal data this
/// changes nothing, for noisy data it removes the antisymmetric part. With
/// the SVD `M = L S R*` of a symmetric matrix, `R` plays the role of the
/// conjugated Takagi vectors, so its trailing columns span the null space.
pub fn svd_diagnostics(p: &ProjectedResponse, rank_tol: f64) -> Result<Subspaces> {
    let n = p.entries.nrows();
    let sym = (&p.entries + p.entries.transpose()) * Complex64::new(0.5, 0.0);
    if n == 0 {
        return Ok(Subspaces { rank: 0, singular_values: Vec::new(), null_basis: sym.clone(), range_basis: sym });
    }
    let svd = sym.svd(false, true);
    let v_t = svd.v_t.ok_or(Error::DecompositionFailure("response SVD"))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let s_max = singular_values[0];
    let rank = if s_max > 0.0 { singular_values.iter().filter(|&&s| s > rank_tol * s_max).count() } else { 0 };
    let column = |i: usize| v_t.row(order[i]).adjoint();
    let mut range_basis = CMatrix::zeros(n, rank);
    for c in 0..rank {
        range_basis.set_column(c, &column(c));
    }
    let mut null_basis = CMatrix::zeros(n, n - rank);
    for c in rank..n {
        null_basis.set_column(c - rank, &column(c));
    }
    Ok(Subspaces { rank, singular_values, null_basis, range_basis })
}
