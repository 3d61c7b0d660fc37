//! Mode-space far-field matrix and its sharpened Hermitian counterpart.

use alloc::vec::Vec;

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::modes::ModeSet;
use crate::response::ProjectedResponse;
use crate::{CMatrix, Complex64};

/// `F^P[j][l] = -conj(U^P[j][l]) exp(-2i beta_l x_A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldMatrix {
    pub entries: CMatrix,
    pub modes: ModeSet,
    pub x_a: f64,
}

pub fn build_far_field(p: &ProjectedResponse) -> FarFieldMatrix {
    let betas = p.modes.propagating_betas();
    let entries = CMatrix::from_fn(p.entries.nrows(), p.entries.ncols(), |j, l| {
        -p.entries[(j, l)].conj() * Complex64::from_polar(1.0, -2.0 * betas[l] * p.x_a)
    });
    FarFieldMatrix { entries, modes: p.modes.clone(), x_a: p.x_a }
}

/// Hermitian parts `Re F = (F + F*)/2` and `Im F = (F - F*)/(2i)`.
pub fn hermitian_parts(f: &CMatrix) -> (CMatrix, CMatrix) {
    let adj = f.adjoint();
    let re = (f + &adj) * Complex64::new(0.5, 0.0);
    let im = (f - &adj) * Complex64::new(0.0, -0.5);
    (re, im)
}

/// How the imaginary part enters the sharpened operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SharpVariant {
    /// `|Re F| + |Im F|`, the form used by the imaging algorithms.
    #[default]
    AbsIm,
    /// `|Re F| - Im F`.
    MinusIm,
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues in decreasing order.
pub fn hermitian_eigen(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = h.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    // Exact symmetrization so the solver sees a Hermitian input.
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 100_000).ok_or(Error::DecompositionFailure("Hermitian eigensolver"))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        vectors.set_column(c, &eig.eigenvectors.column(i));
    }
    Ok((values, vectors))
}

/// Spectral absolute value of a Hermitian matrix.
pub fn spectral_abs(h: &CMatrix) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(h)?;
    Ok(recompose(&values.iter().map(|v| libm::fabs(*v)).collect::<Vec<_>>(), &vectors))
}

fn recompose(values: &[f64], vectors: &CMatrix) -> CMatrix {
    let mut scaled = vectors.clone();
    for (c, v) in values.iter().enumerate() {
        scaled.column_mut(c).scale_mut(*v);
    }
    scaled * vectors.adjoint()
}

/// Sharpened operator `F_#^P` with its eigendecomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpOperator {
    pub entries: CMatrix,
    /// Decreasing. Nonnegative up to rounding for [`SharpVariant::AbsIm`].
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, column `j` for `eigenvalues[j]`.
    pub eigenvectors: CMatrix,
    pub modes: ModeSet,
    pub x_a: f64,
}

impl SharpOperator {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Hermitian form `a* F_# a`.
    pub fn quadratic_form(&self, a: &[Complex64]) -> f64 {
        quadratic_form(&self.entries, a).re
    }
}

/// `a* M a`.
pub fn quadratic_form(m: &CMatrix, a: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, aj) in a.iter().enumerate() {
        let mut row = Complex64::new(0.0, 0.0);
        for (l, al) in a.iter().enumerate() {
            row += m[(j, l)] * al;
        }
        acc += aj.conj() * row;
    }
    acc
}

pub fn sharpen(f: &FarFieldMatrix) -> Result<SharpOperator> {
    sharpen_with(f, SharpVariant::AbsIm)
}

pub fn sharpen_with(f: &FarFieldMatrix, variant: SharpVariant) -> Result<SharpOperator> {
    let (re, im) = hermitian_parts(&f.entries);
    let entries = match variant {
        SharpVariant::AbsIm => spectral_abs(&re)? + spectral_abs(&im)?,
        SharpVariant::MinusIm => spectral_abs(&re)? - im,
    };
    let (eigenvalues, eigenvectors) = hermitian_eigen(&entries)?;
    Ok(SharpOperator { entries, eigenvalues, eigenvectors, modes: f.modes.clone(), x_a: f.x_a })
}

/// Smallest eigenvalue of `-Im F`. Nonnegative for data from a passive
/// scatterer.
pub fn passivity_min_eigenvalue(f: &FarFieldMatrix) -> Result<f64> {
    let (_, im) = hermitian_parts(&f.entries);
    let (values, _) = hermitian_eigen(&-im)?;
    Ok(values.last().copied().unwrap_or(0.0))
}
