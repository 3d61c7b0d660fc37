//! Tikhonov regularization of `(F_#)^(1/2) g = b` with the discrepancy
//! principle, and the unregularized Picard sum.
//!
//! In the eigenbasis of `F_# = V D V*` with `c = V* b`, the Tikhonov solution
//! for parameter `alpha` has
//! `|g|^2 = sum |c_j|^2 d_j / (d_j + alpha)^2` and residual
//! `|(F_#)^(1/2) g - b|^2 = sum |c_j|^2 alpha^2 / (d_j + alpha)^2`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::imaging::farfield::SharpOperator;
use crate::Complex64;

/// Relative bisection tolerance on `alpha`.
pub const MOROZOV_RTOL: f64 = 1e-12;

/// Default relative cutoff on eigenvalues for the Picard sum and the
/// subspace diagnostics.
pub const DEFAULT_RANK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorozovSolution {
    pub alpha: f64,
    pub g_norm: f64,
    /// `|(F_#)^(1/2) g - b|` at `alpha`.
    pub residual: f64,
}

/// `c = V* b`.
pub fn spectral_coefficients(sharp: &SharpOperator, b: &[Complex64]) -> Result<Vec<Complex64>> {
    if b.len() != sharp.dim() {
        return Err(Error::DimensionMismatch { expected: sharp.dim(), found: b.len() });
    }
    Ok((0..sharp.dim())
        .map(|j| sharp.eigenvectors.column(j).iter().zip(b).map(|(v, bi)| v.conj() * bi).sum())
        .collect())
}

/// Squared solution norm and squared residual at `alpha`.
fn tikhonov(d: &[f64], c2: &[f64], alpha: f64) -> (f64, f64) {
    let mut g2 = 0.0;
    let mut r2 = 0.0;
    for (&dj, &cj) in d.iter().zip(c2) {
        let den = dj + alpha;
        g2 += cj * dj / (den * den);
        r2 += cj * alpha * alpha / (den * den);
    }
    (g2, r2)
}

/// Regularization parameter solving `|(F_#)^(1/2) g - b| = eps |g|`.
///
/// The discrepancy `r^2 - eps^2 |g|^2` increases with `alpha`, so the root
/// is bracketed and found by bisection on `log alpha`. Eigenvalues at the
/// rounding level of the eigensolver, `n * EPSILON * d_max`, count as zero.
pub fn morozov_alpha(sharp: &SharpOperator, b: &[Complex64], eps: f64) -> Result<MorozovSolution> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("noise level must be positive"));
    }
    let c = spectral_coefficients(sharp, b)?;
    let d_max = sharp.max_eigenvalue();
    if !(d_max > 0.0) {
        return Err(Error::InvalidParameter("sharpened operator has no positive eigenvalue"));
    }
    let floor = sharp.dim() as f64 * f64::EPSILON * d_max;
    let d: Vec<f64> = sharp.eigenvalues.iter().map(|&v| if v > floor { v } else { 0.0 }).collect();
    let c2: Vec<f64> = c.iter().map(|z| z.norm_sqr()).collect();
    if c2.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidParameter("right-hand side vanishes"));
    }
    // Limit alpha -> 0+: null-space mass minus eps^2 times the Picard sum.
    let null_mass: f64 = d.iter().zip(&c2).filter(|(dj, _)| **dj == 0.0).map(|(_, c)| c).sum();
    let picard: f64 = d.iter().zip(&c2).filter(|(dj, _)| **dj > 0.0).map(|(dj, c)| c / dj).sum();
    if null_mass >= eps * eps * picard {
        return Err(Error::NoRoot);
    }
    let f = |alpha: f64| {
        let (g2, r2) = tikhonov(&d, &c2, alpha);
        r2 - eps * eps * g2
    };
    let mut lo = 1e-16 * d_max;
    let mut hi = 1e4 * d_max;
    while f(lo) > 0.0 {
        lo *= 1e-4;
        if lo < f64::MIN_POSITIVE {
            return Err(Error::NoRoot);
        }
    }
    while f(hi) < 0.0 {
        hi *= 1e4;
        if !hi.is_finite() {
            return Err(Error::NoRoot);
        }
    }
    while hi - lo > MOROZOV_RTOL * hi {
        let mid = libm::sqrt(lo * hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = libm::sqrt(lo * hi);
    let (g2, r2) = tikhonov(&d, &c2, alpha);
    Ok(MorozovSolution { alpha, g_norm: libm::sqrt(g2), residual: libm::sqrt(r2) })
}

/// Regularized solution `g = V diag(sqrt(d) / (d + alpha)) V* b`, for
/// checking the discrepancy identity independently of the closed forms.
pub fn tikhonov_solution(sharp: &SharpOperator, b: &[Complex64], alpha: f64) -> Result<Vec<Complex64>> {
    let c = spectral_coefficients(sharp, b)?;
    let n = sharp.dim();
    let mut g = alloc::vec![Complex64::new(0.0, 0.0); n];
    for (j, cj) in c.iter().enumerate() {
        let d = sharp.eigenvalues[j].max(0.0);
        let scale = *cj * (libm::sqrt(d) / (d + alpha));
        for (i, gi) in g.iter_mut().enumerate() {
            *gi += sharp.eigenvectors[(i, j)] * scale;
        }
    }
    Ok(g)
}

/// `(F_#)^(1/2) g` through the eigendecomposition.
pub fn apply_sqrt(sharp: &SharpOperator, g: &[Complex64]) -> Result<Vec<Complex64>> {
    let c = spectral_coefficients(sharp, g)?;
    let n = sharp.dim();
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); n];
    for (j, cj) in c.iter().enumerate() {
        let scale = *cj * libm::sqrt(sharp.eigenvalues[j].max(0.0));
        for (i, oi) in out.iter_mut().enumerate() {
            *oi += sharp.eigenvectors[(i, j)] * scale;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardValue {
    /// `sum |c_j|^2 / d_j` over retained eigenvalues.
    pub sum: f64,
    /// `1 / sum`; the minimum of `phi* F_# phi` subject to `b* phi = 1`
    /// over the retained eigenspace. Zero when `sum` is infinite.
    pub reciprocal: f64,
}

/// Picard sum over eigenvalues above `rank_tol` times the largest. Returns
/// an infinite sum when every retained coefficient vanishes.
pub fn picard_indicator(sharp: &SharpOperator, b: &[Complex64], rank_tol: f64) -> Result<PicardValue> {
    let c = spectral_coefficients(sharp, b)?;
    let d_max = sharp.max_eigenvalue();
    if !(d_max > 0.0) {
        return Err(Error::InvalidParameter("sharpened operator has no positive eigenvalue"));
    }
    let mut sum = 0.0;
    let mut any = false;
    for (cj, &dj) in c.iter().zip(&sharp.eigenvalues) {
        if dj > rank_tol * d_max {
            sum += cj.norm_sqr() / dj;
            any |= cj.norm_sqr() > 0.0;
        }
    }
    if !any {
        return Ok(PicardValue { sum: f64::INFINITY, reciprocal: 0.0 });
    }
    Ok(PicardValue { sum, reciprocal: 1.0 / sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::farfield::{sharpen, FarFieldMatrix};
    use crate::modes::ModeSet;
    use crate::CMatrix;

    fn diag_sharp(d: &[f64]) -> SharpOperator {
        let n = d.len();
        let modes = ModeSet::new((n as f64 - 0.85) * core::f64::consts::PI, 1.0, 1e-12, 0.1).unwrap();
        let f = CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(d[i], 0.0) } else { Complex64::new(0.0, 0.0) });
        sharpen(&FarFieldMatrix { entries: f, modes, x_a: -2.0 }).unwrap()
    }

    fn unit(n: usize, j: usize, scale: f64) -> Vec<Complex64> {
        (0..n).map(|i| Complex64::new(if i == j { scale } else { 0.0 }, 0.0)).collect()
    }

    #[test]
    fn single_eigenvector_closed_form() {
        let s = diag_sharp(&[4.0, 1.0, 0.25]);
        let eps = 1e-2;
        for (j, d) in [(0, 4.0), (1, 1.0), (2, 0.25)] {
            let b = unit(3, j, 0.7);
            let sol = morozov_alpha(&s, &b, eps).unwrap();
            let alpha = eps * libm::sqrt(d);
            assert!((sol.alpha - alpha).abs() < 1e-10 * alpha);
            let g = 0.7 * libm::sqrt(d) / (d + alpha);
            assert!((sol.g_norm - g).abs() < 1e-10 * g);
        }
    }

    #[test]
    fn discrepancy_identity() {
        let s = diag_sharp(&[3.0, 1.0, 0.1, 1e-3]);
        let b: Vec<Complex64> = (0..4).map(|i| Complex64::new(1.0 / (1.0 + i as f64), 0.3 * i as f64)).collect();
        let sol = morozov_alpha(&s, &b, 1e-2).unwrap();
        let g = tikhonov_solution(&s, &b, sol.alpha).unwrap();
        let fg = apply_sqrt(&s, &g).unwrap();
        let res: f64 = fg.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        let gn: f64 = g.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let bn: f64 = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert!((res - 1e-2 * gn).abs() < 1e-8 * bn);
        assert!((gn - sol.g_norm).abs() < 1e-12 * gn);
    }

    #[test]
    fn vanishing_noise_gives_the_picard_sum() {
        let s = diag_sharp(&[2.0, 0.5]);
        let b = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5)];
        let sol = morozov_alpha(&s, &b, 1e-9).unwrap();
        let picard = 1.0 / 2.0 + 0.25 / 0.5;
        assert!(sol.alpha < 1e-8);
        assert!((sol.g_norm * sol.g_norm - picard).abs() < 1e-6 * picard);
    }

    #[test]
    fn null_space_rhs_has_no_root() {
        let s = diag_sharp(&[2.0, 0.0]);
        assert_eq!(morozov_alpha(&s, &unit(2, 1, 1.0), 1e-3), Err(Error::NoRoot));
    }

    #[test]
    fn picard_single_term() {
        let s = diag_sharp(&[5.0, 2.0, 1.0]);
        let b = unit(3, 1, 3.0);
        let p = picard_indicator(&s, &b, DEFAULT_RANK_TOL).unwrap();
        assert!((p.sum - 9.0 / 2.0).abs() < 1e-14);
        assert!((p.reciprocal - 2.0 / 9.0).abs() < 1e-14);
        let outside = picard_indicator(&diag_sharp(&[5.0, 0.0]), &unit(2, 1, 1.0), DEFAULT_RANK_TOL).unwrap();
        assert!(outside.sum.is_infinite() && outside.reciprocal == 0.0);
    }
}
