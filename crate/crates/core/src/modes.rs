//! Neumann mode basis of the cross-section `(0, width)` and the axial
//! wavenumbers of the propagating and evanescent modes.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::Complex64;

/// Relative distance of `k^2` to a mode eigenvalue below which the wavenumber
/// is rejected as a cutoff resonance.
pub const CUTOFF_GUARD: f64 = 1e-10;

/// Default truncation tolerance for the evanescent tail.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_TRUNCATION: usize = 10_000_000;

/// Mode data for a fixed wavenumber and cross-section width.
///
/// Modes `0..=J` propagate (`beta_j` real, positive); modes `J+1..=J_max`
/// are the evanescent modes kept by the full Green's function series.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    k: f64,
    width: f64,
    /// `|beta_j|` for `j = 0..=J_max`.
    beta_abs: Vec<f64>,
    last_propagating: usize,
    min_sep: f64,
    tol: f64,
}

/// `psi_j(xp) = sqrt((2 - delta_j0) / width) cos(j pi xp / width)`.
pub fn mode_eigenfunction(j: usize, xp: f64, width: f64) -> f64 {
    let norm = if j == 0 { 1.0 / width } else { 2.0 / width };
    libm::sqrt(norm) * libm::cos(j as f64 * PI * xp / width)
}

/// Builds the mode set, see [`ModeSet::new`].
pub fn make_mode_set(k: f64, width: f64, tol: f64, min_sep: f64) -> Result<ModeSet> {
    ModeSet::new(k, width, tol, min_sep)
}

impl ModeSet {
    /// `min_sep` is the smallest range separation at which
    /// [`crate::greens_function`] will be evaluated; the evanescent series is
    /// truncated at the first `J_max > J` with `exp(-|beta| min_sep) < tol`.
    pub fn new(k: f64, width: f64, tol: f64, min_sep: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter("wavenumber must be positive"));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter("width must be positive"));
        }
        if !(min_sep > 0.0 && min_sep.is_finite()) {
            return Err(Error::InvalidParameter("min_sep must be positive"));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidParameter("tol must lie in (0, 1)"));
        }

        let unit = PI / width;
        let mut last = libm::floor(k / unit) as usize;
        while ((last + 1) as f64 * unit) <= k {
            last += 1;
        }
        while last > 0 && (last as f64 * unit) > k {
            last -= 1;
        }

        for j in [last, last + 1] {
            let a = j as f64 * unit;
            if libm::fabs((k - a) * (k + a)) < CUTOFF_GUARD * k * k {
                return Err(Error::CutoffResonance { k, mode: j });
            }
        }

        // exp(-|beta| min_sep) < tol  <=>  |beta| > ln(1/tol) / min_sep.
        let decay = -libm::log(tol) / min_sep;
        let threshold = libm::sqrt(k * k + decay * decay) / unit;
        if !(threshold < MAX_TRUNCATION as f64) {
            return Err(Error::InvalidParameter("evanescent truncation too large; raise min_sep"));
        }
        let mut truncation = (libm::floor(threshold) as usize + 1).max(last + 1);
        while libm::exp(-beta_abs_of(truncation, k, unit) * min_sep) >= tol {
            truncation += 1;
        }

        let beta_abs = (0..=truncation).map(|j| beta_abs_of(j, k, unit)).collect();
        Ok(ModeSet { k, width, beta_abs, last_propagating: last, min_sep, tol })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Index `J` of the last propagating mode.
    pub fn last_propagating(&self) -> usize {
        self.last_propagating
    }

    /// Number `J + 1` of propagating modes.
    pub fn propagating_count(&self) -> usize {
        self.last_propagating + 1
    }

    /// Index `J_max` of the last evanescent mode kept by the full series.
    pub fn truncation(&self) -> usize {
        self.beta_abs.len() - 1
    }

    pub fn min_sep(&self) -> f64 {
        self.min_sep
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn is_propagating(&self, j: usize) -> bool {
        j <= self.last_propagating
    }

    /// `lambda_j = (j pi / width)^2`.
    pub fn lambda(&self, j: usize) -> f64 {
        let a = j as f64 * PI / self.width;
        a * a
    }

    /// `|beta_j|` for any `j`, including indices past the stored truncation.
    pub fn beta_abs(&self, j: usize) -> f64 {
        match self.beta_abs.get(j) {
            Some(&b) => b,
            None => beta_abs_of(j, self.k, PI / self.width),
        }
    }

    /// Axial wavenumber on the physical branch: real positive for
    /// propagating modes, positive imaginary for evanescent ones.
    pub fn beta(&self, j: usize) -> Complex64 {
        let b = self.beta_abs(j);
        if self.is_propagating(j) {
            Complex64::new(b, 0.0)
        } else {
            Complex64::new(0.0, b)
        }
    }

    /// Real axial wavenumbers `beta_0..=beta_J`.
    pub fn propagating_betas(&self) -> &[f64] {
        &self.beta_abs[..=self.last_propagating]
    }

    pub fn eigenfunction(&self, j: usize, xp: f64) -> f64 {
        mode_eigenfunction(j, xp, self.width)
    }

    /// `psi_0(xp), ..., psi_J(xp)`.
    pub fn propagating_eigenfunctions(&self, xp: f64) -> Vec<f64> {
        (0..=self.last_propagating).map(|j| self.eigenfunction(j, xp)).collect()
    }

    /// Same wavenumber and width, different truncation controls.
    pub fn with_truncation(&self, tol: f64, min_sep: f64) -> Result<ModeSet> {
        ModeSet::new(self.k, self.width, tol, min_sep)
    }
}

fn beta_abs_of(j: usize, k: f64, unit: f64) -> f64 {
    let a = j as f64 * unit;
    libm::sqrt(libm::fabs((k - a) * (k + a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = 0.5 * (f(a) + f(b));
        for i in 1..n {
            s += f(a + i as f64 * h);
        }
        s * h
    }

    #[test]
    fn propagating_counts_at_reference_wavenumbers() {
        let m30 = ModeSet::new(29.15 * PI, 1.0, DEFAULT_TOL, 0.1).unwrap();
        assert_eq!(m30.propagating_count(), 30);
        let m50 = ModeSet::new(49.15 * PI, 1.0, DEFAULT_TOL, 0.1).unwrap();
        assert_eq!(m50.propagating_count(), 50);
        let m1 = ModeSet::new(0.5 * PI, 1.0, DEFAULT_TOL, 0.1).unwrap();
        assert_eq!(m1.propagating_count(), 1);
    }

    #[test]
    fn counts_scale_with_width() {
        let m = ModeSet::new(29.15 * PI / 2.0, 2.0, DEFAULT_TOL, 0.2).unwrap();
        assert_eq!(m.propagating_count(), 30);
    }

    #[test]
    fn eigenfunction_values() {
        assert_eq!(mode_eigenfunction(0, 0.37, 1.0), 1.0);
        assert!(mode_eigenfunction(1, 0.5, 1.0).abs() < 1e-15);
        assert!((mode_eigenfunction(0, 0.2, 4.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eigenfunctions_are_orthonormal_under_quadrature() {
        for j in 0..=6 {
            for l in 0..=6 {
                let g = trapezoid(
                    |x| mode_eigenfunction(j, x, 1.0) * mode_eigenfunction(l, x, 1.0),
                    0.0,
                    1.0,
                    2000,
                );
                let expected = if j == l { 1.0 } else { 0.0 };
                assert!((g - expected).abs() < 1e-10, "({j},{l}): {g}");
            }
        }
    }

    #[test]
    fn gram_matrix_of_propagating_modes() {
        let modes = ModeSet::new(29.15 * PI, 1.0, DEFAULT_TOL, 0.1).unwrap();
        let jj = modes.last_propagating();
        let panels = 8 * jj.max(1);
        for j in 0..=jj {
            for l in 0..=jj {
                let g = trapezoid(|x| modes.eigenfunction(j, x) * modes.eigenfunction(l, x), 0.0, 1.0, panels);
                let expected = if j == l { 1.0 } else { 0.0 };
                assert!((g - expected).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn branch_of_axial_wavenumbers() {
        let modes = ModeSet::new(29.15 * PI, 1.0, DEFAULT_TOL, 0.05).unwrap();
        assert!(modes.truncation() > modes.last_propagating());
        for j in 0..=modes.truncation() {
            let b = modes.beta(j);
            if j <= modes.last_propagating() {
                assert!(b.im == 0.0 && b.re > 0.0);
            } else {
                assert!(b.re == 0.0 && b.im > 0.0);
            }
            let lhs = b * b;
            assert!((lhs.re - (modes.k() * modes.k() - modes.lambda(j))).abs() < 1e-9 * modes.lambda(j).max(1.0));
        }
    }

    #[test]
    fn truncation_meets_tail_bound() {
        let modes = ModeSet::new(29.15 * PI, 1.0, 1e-12, 0.05).unwrap();
        let jm = modes.truncation();
        assert!(libm::exp(-modes.beta_abs(jm) * 0.05) < 1e-12);
        if jm > modes.last_propagating() + 1 {
            assert!(libm::exp(-modes.beta_abs(jm - 1) * 0.05) >= 1e-12);
        }
    }

    #[test]
    fn cutoff_is_rejected() {
        let err = ModeSet::new(3.0 * PI, 1.0, DEFAULT_TOL, 0.1).unwrap_err();
        assert_eq!(err, Error::CutoffResonance { k: 3.0 * PI, mode: 3 });
        assert!(ModeSet::new(3.0 * PI * (1.0 + 1e-13), 1.0, DEFAULT_TOL, 0.1).is_err());
    }

    #[test]
    fn invalid_parameters() {
        assert!(ModeSet::new(-1.0, 1.0, DEFAULT_TOL, 0.1).is_err());
        assert!(ModeSet::new(1.0, 0.0, DEFAULT_TOL, 0.1).is_err());
        assert!(ModeSet::new(1.0, 1.0, DEFAULT_TOL, 0.0).is_err());
        assert!(ModeSet::new(1.0, 1.0, 2.0, 0.1).is_err());
    }
}
