//! Array response matrices and their projection onto the propagating modes.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::array::{ArrayGeometry, Quadrature};
use crate::error::{Error, Result};
use crate::modes::ModeSet;
use crate::{CMatrix, Complex64};

/// Relative singular-value cutoff of the mode sampling matrix in
/// [`complete_partial_aperture`].
pub const APERTURE_SV_CUTOFF: f64 = 1e-6;

/// Scattered-field measurements `U[r][s]`: receiver `r`, source `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix {
    pub entries: CMatrix,
    pub array: ArrayGeometry,
    pub k: f64,
    pub noise_sigma_pct: f64,
    pub seed: Option<u64>,
}

impl ResponseMatrix {
    pub fn new(entries: CMatrix, array: ArrayGeometry, k: f64) -> Result<Self> {
        let n = array.len();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: entries.nrows().max(entries.ncols()) });
        }
        Ok(ResponseMatrix { entries, array, k, noise_sigma_pct: 0.0, seed: None })
    }

    pub fn zeros(array: ArrayGeometry, k: f64) -> Self {
        let n = array.len();
        ResponseMatrix { entries: CMatrix::zeros(n, n), array, k, noise_sigma_pct: 0.0, seed: None }
    }

    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `||U - U^T||_F / ||U||_F`, zero for the zero matrix.
    pub fn reciprocity_defect(&self) -> f64 {
        symmetry_defect(&self.entries)
    }

    /// Keeps the sensors of the smaller aperture `fraction`.
    pub fn restrict_aperture(&self, fraction: f64) -> Result<ResponseMatrix> {
        let (array, idx) = self.array.restrict(fraction)?;
        let n = idx.len();
        let entries = CMatrix::from_fn(n, n, |r, s| self.entries[(idx[r], idx[s])]);
        Ok(ResponseMatrix { entries, array, k: self.k, noise_sigma_pct: self.noise_sigma_pct, seed: self.seed })
    }
}

pub(crate) fn symmetry_defect(m: &CMatrix) -> f64 {
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (m - m.transpose()).norm() / norm
}

/// `(J+1) x (J+1)` matrix of the response in the propagating-mode basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedResponse {
    pub entries: CMatrix,
    pub modes: ModeSet,
    pub x_a: f64,
}

impl ProjectedResponse {
    pub fn new(entries: CMatrix, modes: ModeSet, x_a: f64) -> Result<Self> {
        let n = modes.propagating_count();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: entries.nrows().max(entries.ncols()) });
        }
        Ok(ProjectedResponse { entries, modes, x_a })
    }

    pub fn reciprocity_defect(&self) -> f64 {
        symmetry_defect(&self.entries)
    }
}

fn check_wavenumber(u: &ResponseMatrix, modes: &ModeSet) -> Result<()> {
    if libm::fabs(u.k - modes.k()) > 1e-12 * modes.k() {
        return Err(Error::InvalidParameter("response matrix wavenumber differs from the mode set"));
    }
    if libm::fabs(u.array.width() - modes.width()) > 1e-12 * modes.width() {
        return Err(Error::InvalidParameter("array width differs from the mode set"));
    }
    Ok(())
}

/// Sensors-by-modes matrix `psi_j(xp_r)`.
fn sampling_matrix(array: &ArrayGeometry, modes: &ModeSet) -> DMatrix<f64> {
    let xp = array.sensor_xp();
    DMatrix::from_fn(xp.len(), modes.propagating_count(), |r, j| modes.eigenfunction(j, xp[r]))
}

/// Quadrature of `int int U(xp, yp) psi_j(xp) psi_l(yp)` over the full
/// aperture with the trapezoid rule.
pub fn project_to_modes(u: &ResponseMatrix, modes: &ModeSet) -> Result<ProjectedResponse> {
    project_to_modes_with(u, modes, Quadrature::Trapezoid)
}

pub fn project_to_modes_with(u: &ResponseMatrix, modes: &ModeSet, rule: Quadrature) -> Result<ProjectedResponse> {
    if !u.array.is_full_aperture() {
        return Err(Error::PartialAperture(u.array.aperture_fraction()));
    }
    check_wavenumber(u, modes)?;
    let w = u.array.weights(rule);
    let psi = sampling_matrix(&u.array, modes);
    let weighted = DMatrix::from_fn(psi.nrows(), psi.ncols(), |r, j| psi[(r, j)] * w[r]).map(Complex64::from);
    let entries = weighted.transpose() * &u.entries * &weighted;
    ProjectedResponse::new(entries, modes.clone(), u.array.x_a())
}

/// Least-squares mode coefficients from a partial aperture.
///
/// With `A = W^(1/2) Psi` (trapezoid weights `W`) and `V = W^(1/2) U W^(1/2)`
/// this returns `A^+ V (A^+)^T`, the minimum-norm solution of
/// `A M A^T = V`. Singular values of `A` below [`APERTURE_SV_CUTOFF`] times
/// the largest are discarded; over a partial aperture the highest modes are
/// nearly indistinguishable, so `A` is typically rank deficient by a few
/// modes. On a full aperture `A` has orthonormal columns and the result is
/// [`project_to_modes`].
pub fn complete_partial_aperture(u: &ResponseMatrix, modes: &ModeSet) -> Result<ProjectedResponse> {
    check_wavenumber(u, modes)?;
    let n_modes = modes.propagating_count();
    let n = u.array.len();
    if n < n_modes {
        return Err(Error::UnderdeterminedAperture { sensors: n, rank: n, modes: n_modes });
    }
    let sqrt_w: Vec<f64> = u.array.weights(Quadrature::Trapezoid).iter().map(|w| libm::sqrt(*w)).collect();
    let psi = sampling_matrix(&u.array, modes);
    let a = DMatrix::from_fn(n, n_modes, |r, j| psi[(r, j)] * sqrt_w[r]);
    let svd = a.svd(true, true);
    let s_max = svd.singular_values.max();
    if s_max == 0.0 {
        return Err(Error::UnderdeterminedAperture { sensors: n, rank: 0, modes: n_modes });
    }
    let (uu, vt) = match (svd.u, svd.v_t) {
        (Some(uu), Some(vt)) => (uu, vt),
        _ => return Err(Error::DecompositionFailure("aperture SVD")),
    };
    // A^+ = V S^-1 U^T, keeping the retained singular triplets.
    let mut pinv = DMatrix::<f64>::zeros(n_modes, n);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > APERTURE_SV_CUTOFF * s_max {
            pinv += (vt.row(i).transpose() / s) * uu.column(i).transpose();
        }
    }
    let pinv = pinv.map(Complex64::from);
    let v = CMatrix::from_fn(n, n, |r, s| u.entries[(r, s)] * (sqrt_w[r] * sqrt_w[s]));
    let entries = &pinv * v * pinv.transpose();
    ProjectedResponse::new(entries, modes.clone(), u.array.x_a())
}

/// Numerical rank of the weighted mode sampling matrix of `array`.
pub fn aperture_rank(array: &ArrayGeometry, modes: &ModeSet) -> usize {
    let sqrt_w: Vec<f64> = array.weights(Quadrature::Trapezoid).iter().map(|w| libm::sqrt(*w)).collect();
    let psi = sampling_matrix(array, modes);
    let a = DMatrix::from_fn(psi.nrows(), psi.ncols(), |r, j| psi[(r, j)] * sqrt_w[r]);
    let s = a.singular_values();
    let s_max = s.max();
    s.iter().filter(|&&v| v > APERTURE_SV_CUTOFF * s_max).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::make_array;
    use crate::modes::DEFAULT_TOL;
    use core::f64::consts::PI;

    fn setup(fraction: f64) -> (ArrayGeometry, ModeSet) {
        (make_array(-2.0, 1.0, 1.0 / 60.0, fraction).unwrap(), ModeSet::new(29.15 * PI, 1.0, DEFAULT_TOL, 0.1).unwrap())
    }

    fn outer_mode(array: &ArrayGeometry, modes: &ModeSet, j: usize, l: usize) -> CMatrix {
        let xp = array.sensor_xp();
        CMatrix::from_fn(xp.len(), xp.len(), |r, s| {
            Complex64::from(modes.eigenfunction(j, xp[r]) * modes.eigenfunction(l, xp[s]))
        })
    }

    #[test]
    fn trapezoid_projection_of_a_mode_product_is_exact() {
        let (array, modes) = setup(1.0);
        let u = ResponseMatrix::new(outer_mode(&array, &modes, 0, 0), array, modes.k()).unwrap();
        let p = project_to_modes(&u, &modes).unwrap();
        assert!((p.entries[(0, 0)].re - 1.0).abs() < 1e-13);
        let off = p.entries.iter().skip(1).map(|z| z.norm()).fold(0.0, f64::max);
        assert!(off < 1e-13);
    }

    #[test]
    fn riemann_projection_of_a_mode_product() {
        let (array, modes) = setup(1.0);
        let u = ResponseMatrix::new(outer_mode(&array, &modes, 0, 0), array, modes.k()).unwrap();
        let p = project_to_modes_with(&u, &modes, Quadrature::Riemann).unwrap();
        // Endpoint overweighting gives an O(spacing) error.
        assert!((p.entries[(0, 0)].re - 1.0).abs() < 0.04);
    }

    #[test]
    fn partial_aperture_is_rejected_by_plain_projection() {
        let (array, modes) = setup(0.75);
        let u = ResponseMatrix::zeros(array, modes.k());
        assert_eq!(project_to_modes(&u, &modes), Err(Error::PartialAperture(0.75)));
    }

    #[test]
    fn completion_reproduces_full_aperture_projection() {
        let (array, modes) = setup(1.0);
        let xp = array.sensor_xp().to_vec();
        let u = CMatrix::from_fn(xp.len(), xp.len(), |r, s| {
            Complex64::new(libm::cos(3.0 * xp[r] + xp[s]), libm::sin(xp[r] * xp[s]))
        });
        let u = ResponseMatrix::new(u, array, modes.k()).unwrap();
        let a = project_to_modes(&u, &modes).unwrap();
        let b = complete_partial_aperture(&u, &modes).unwrap();
        assert!((a.entries.clone() - b.entries).norm() < 1e-12 * a.entries.norm());
    }

    #[test]
    fn completion_recovers_band_limited_data_on_partial_aperture() {
        let (full, modes) = setup(1.0);
        let n = modes.propagating_count();
        // Mode coefficients supported on the lower modes are recoverable.
        let m = CMatrix::from_fn(n, n, |j, l| {
            if j < 20 && l < 20 {
                Complex64::new(1.0 / (1.0 + (j + l) as f64), 0.3 * (j as f64 - l as f64).abs())
            } else {
                Complex64::from(0.0)
            }
        });
        let xp = full.sensor_xp().to_vec();
        let psi = CMatrix::from_fn(xp.len(), n, |r, j| Complex64::from(modes.eigenfunction(j, xp[r])));
        let u = ResponseMatrix::new(&psi * &m * psi.transpose(), full, modes.k()).unwrap();
        let part = u.restrict_aperture(0.75).unwrap();
        assert!(aperture_rank(&part.array, &modes) < n);
        let rec = complete_partial_aperture(&part, &modes).unwrap();
        let err = (rec.entries - &m).norm() / m.norm();
        assert!(err < 0.2, "{err}");
    }

    #[test]
    fn too_few_sensors() {
        let modes = ModeSet::new(1.5 * PI, 1.0, DEFAULT_TOL, 0.1).unwrap();
        let array = make_array(-2.0, 1.0, 1.0, 0.5).unwrap();
        assert_eq!(array.len(), 1);
        let u = ResponseMatrix::zeros(array, modes.k());
        assert!(matches!(complete_partial_aperture(&u, &modes), Err(Error::UnderdeterminedAperture { .. })));
    }

    #[test]
    fn dimension_and_wavenumber_checks() {
        let (array, modes) = setup(1.0);
        assert!(ResponseMatrix::new(CMatrix::zeros(3, 3), array.clone(), modes.k()).is_err());
        let u = ResponseMatrix::zeros(array, modes.k() * 1.01);
        assert!(project_to_modes(&u, &modes).is_err());
    }
}
