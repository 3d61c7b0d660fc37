//! Green's function of the terminated waveguide and the quantities built
//! from its propagating part: the backpropagation test function `phi_z` and
//! the point-spread kernels `K_0` and `K`.
//!
//! For points `p`, `q` with ranges `x_< <= x_>` the Green's function is
//!
//! ```text
//! G(p, q) = sum_{j<=J} (i/beta_j) psi_j(p) psi_j(q) exp(-i beta_j x_<) cos(beta_j x_>)
//!         + sum_{j>J} (1/|beta_j|) psi_j(p) psi_j(q) exp(|beta_j| x_<) cosh(|beta_j| x_>)
//! ```
//!
//! The evanescent factor is evaluated as
//! `(exp(-|beta| d) + exp(-|beta| d')) / 2` with `d = x_> - x_<` and
//! `d' = -(x_< + x_>)`, which never overflows.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::modes::ModeSet;
use crate::polylog;
use crate::Complex64;

/// Truncation target for the remainder series of [`greens_function_near`].
/// The attained accuracy is closer to `1e-10`: the subtracted asymptotic
/// coefficients grow like `(k width / pi)^4` and cancel against the
/// closed-form sums.
const NEAR_TOL: f64 = 1e-13;

/// Above this value of `pi d / width` the evanescent series is summed
/// directly; below it the static asymptotics are subtracted first. The
/// asymptotic coefficients grow like `(k d)^4`, so the subtraction loses
/// digits to cancellation when used at large separations.
const DIRECT_SUM_THRESHOLD: f64 = 0.1;

const MAX_TERMS: usize = 2_000_000;

/// Reciprocal normalizers below this are treated as degenerate.
const NORMALIZER_FLOOR: f64 = 1e-14;

fn ordered_ranges(p: &Point, q: &Point) -> (f64, f64) {
    if p.x <= q.x {
        (p.x, q.x)
    } else {
        (q.x, p.x)
    }
}

fn propagating_sum(p: &Point, q: &Point, modes: &ModeSet) -> Complex64 {
    let (x_lo, x_hi) = ordered_ranges(p, q);
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, &beta) in modes.propagating_betas().iter().enumerate() {
        let amp = modes.eigenfunction(j, p.xp) * modes.eigenfunction(j, q.xp) / beta;
        let phase = Complex64::from_polar(1.0, -beta * x_lo);
        // i/beta * psi psi * e^{-i beta x_<} cos(beta x_>)
        sum += Complex64::new(0.0, amp * libm::cos(beta * x_hi)) * phase;
    }
    sum
}

/// Full Green's function with the evanescent series truncated at the
/// mode set's `J_max`. Requires `|p.x - q.x| >= modes.min_sep()`.
pub fn greens_function(p: Point, q: Point, modes: &ModeSet) -> Result<Complex64> {
    let (x_lo, x_hi) = ordered_ranges(&p, &q);
    let d = x_hi - x_lo;
    if d < modes.min_sep() {
        return Err(Error::SeparationTooSmall { separation: d, min_sep: modes.min_sep() });
    }
    let d_img = -(x_lo + x_hi);
    let mut evanescent = 0.0;
    for j in modes.propagating_count()..=modes.truncation() {
        let b = modes.beta_abs(j);
        let amp = modes.eigenfunction(j, p.xp) * modes.eigenfunction(j, q.xp) / b;
        evanescent += 0.5 * amp * (libm::exp(-b * d) + libm::exp(-b * d_img));
    }
    Ok(propagating_sum(&p, &q, modes) + evanescent)
}

/// Green's function at any pair of distinct points, including equal ranges.
///
/// The evanescent series converges only like the logarithmic singularity of
/// the free-space kernel when `p.x` is close to `q.x`. There the terms are
/// split into their large-index asymptotics, summed in closed form through
/// polylogarithms, plus a remainder that decays like `j^-6`.
pub fn greens_function_near(p: Point, q: Point, modes: &ModeSet) -> Result<Complex64> {
    let (x_lo, x_hi) = ordered_ranges(&p, &q);
    let d = x_hi - x_lo;
    let d_img = -(x_lo + x_hi);
    let evanescent = evanescent_part(modes, p.xp, q.xp, d)? + evanescent_part(modes, p.xp, q.xp, d_img)?;
    Ok(propagating_sum(&p, &q, modes) + evanescent)
}

/// `sum_{j>J} psi_j(a) psi_j(b) exp(-|beta_j| dist) / (2 |beta_j|)`.
fn evanescent_part(modes: &ModeSet, xp_a: f64, xp_b: f64, dist: f64) -> Result<f64> {
    let width = modes.width();
    let c = PI / width;
    if c * dist >= DIRECT_SUM_THRESHOLD {
        Ok(evanescent_direct(modes, xp_a, xp_b, dist))
    } else {
        evanescent_subtracted(modes, xp_a, xp_b, dist)
    }
}

fn evanescent_direct(modes: &ModeSet, xp_a: f64, xp_b: f64, dist: f64) -> f64 {
    let width = modes.width();
    let ratio = 1.0 - libm::exp(-PI * dist / width);
    let mut sum = 0.0;
    for j in modes.propagating_count()..MAX_TERMS {
        let b = modes.beta_abs(j);
        let t = libm::exp(-b * dist) / (2.0 * b);
        sum += modes.eigenfunction(j, xp_a) * modes.eigenfunction(j, xp_b) * t;
        if 2.0 / width * t / ratio < NEAR_TOL {
            break;
        }
    }
    sum
}

/// Coefficients of `j^-n`, `n = 1..=5`, in the large-`j` expansion of
/// `exp(-|beta_j| d) / (2 |beta_j|) * exp(j pi d / width)`.
fn static_coefficients(k: f64, c: f64, d: f64) -> [f64; 5] {
    let k2 = k * k;
    let k4 = k2 * k2;
    let dk2 = d * d * k2;
    let c2 = c * c;
    [
        1.0 / (2.0 * c),
        k2 * d / (4.0 * c2),
        k2 * (dk2 + 4.0) / (16.0 * c2 * c),
        d * k4 * (dk2 + 18.0) / (96.0 * c2 * c2),
        k4 * (dk2 * dk2 + 48.0 * dk2 + 144.0) / (768.0 * c2 * c2 * c),
    ]
}

fn evanescent_subtracted(modes: &ModeSet, xp_a: f64, xp_b: f64, dist: f64) -> Result<f64> {
    let width = modes.width();
    let c = PI / width;
    let s = c * dist;
    let theta_minus = c * (xp_a - xp_b);
    let theta_plus = c * (xp_a + xp_b);
    if s < 1e-14
        && (libm::fabs(polylog::wrap_angle(theta_minus)) < 1e-12
            || libm::fabs(polylog::wrap_angle(theta_plus)) < 1e-12)
    {
        return Err(Error::CoincidentPoints);
    }

    let coef = static_coefficients(modes.k(), c, dist);
    let asymptotic = |j: usize| -> f64 {
        let jf = j as f64;
        let mut inv = 1.0 / jf;
        let mut acc = 0.0;
        for a in coef {
            acc += a * inv;
            inv /= jf;
        }
        acc * libm::exp(-s * jf)
    };

    // Closed form of sum_{j>=1} psi_j psi_j T3_j with psi_j psi_j =
    // (cos j theta_- + cos j theta_+) / width.
    let mut closed = 0.0;
    for theta in [theta_minus, theta_plus] {
        closed += coef[0] * polylog::re_li1(s, theta);
        for (n, a) in coef.iter().enumerate().skip(1) {
            closed += a * polylog::li(n + 1, s, theta).re;
        }
    }
    let mut sum = closed / width;

    let first_evanescent = modes.propagating_count();
    for j in 1..first_evanescent {
        sum -= modes.eigenfunction(j, xp_a) * modes.eigenfunction(j, xp_b) * asymptotic(j);
    }

    let geometric = 1.0 / (-libm::expm1(-s)).max(f64::MIN_POSITIVE);
    let mut quiet = 0;
    for j in first_evanescent..MAX_TERMS {
        let b = modes.beta_abs(j);
        let diff = libm::exp(-b * dist) / (2.0 * b) - asymptotic(j);
        sum += modes.eigenfunction(j, xp_a) * modes.eigenfunction(j, xp_b) * diff;
        let tail = 2.0 / width * libm::fabs(diff) * (j as f64 / 5.0).min(geometric);
        if j > first_evanescent + 2 && tail < NEAR_TOL {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Ok(sum)
}

/// Propagating part `G_P(p, z)` of the Green's function.
pub fn greens_propagating(p: Point, z: Point, modes: &ModeSet) -> Complex64 {
    propagating_sum(&p, &z, modes)
}

/// `C_z = 1 / sum_j psi_j(z.xp)^2 cos^2(beta_j z.x)`, the normalizer that
/// makes `(conj G(., z), phi_z)_A = 1`.
pub fn phi_normalizer(z: Point, modes: &ModeSet) -> Result<f64> {
    let denom: f64 = modes
        .propagating_betas()
        .iter()
        .enumerate()
        .map(|(j, &beta)| {
            let v = modes.eigenfunction(j, z.xp) * libm::cos(beta * z.x);
            v * v
        })
        .sum();
    if denom * modes.width() < NORMALIZER_FLOOR {
        return Err(Error::DegenerateNormalizer);
    }
    Ok(1.0 / denom)
}

/// Mode coefficients `a_j` of the backpropagation test function:
/// `phi_z = sum_j a_j psi_j` with
/// `a_j = C_z (beta_j / i) psi_j(z.xp) exp(i beta_j x_a) cos(beta_j z.x)`.
pub fn phi_coefficients(z: Point, x_a: f64, modes: &ModeSet) -> Result<Vec<Complex64>> {
    let cz = phi_normalizer(z, modes)?;
    Ok(modes
        .propagating_betas()
        .iter()
        .enumerate()
        .map(|(j, &beta)| {
            let amp = cz * beta * modes.eigenfunction(j, z.xp) * libm::cos(beta * z.x);
            // beta / i = -i beta
            Complex64::new(0.0, -amp) * Complex64::from_polar(1.0, beta * x_a)
        })
        .collect())
}

/// Backpropagation test function `phi_z` at cross-range `xp` on the array.
pub fn test_function_phi(z: Point, xp: f64, x_a: f64, modes: &ModeSet) -> Result<Complex64> {
    if !(z.x > x_a && z.x < 0.0) {
        return Err(Error::InvalidParameter("search point must lie between the array and the end wall"));
    }
    let coeffs = phi_coefficients(z, x_a, modes)?;
    Ok(coeffs
        .iter()
        .enumerate()
        .map(|(j, a)| a * modes.eigenfunction(j, xp))
        .sum())
}

/// `K_0(p, z) = sum_j psi_j(p) psi_j(z) cos(beta_j p.x) cos(beta_j z.x) / beta_j^2`.
/// Real for the propagating modes.
pub fn kernel_k0(p: Point, z: Point, modes: &ModeSet) -> f64 {
    modes
        .propagating_betas()
        .iter()
        .enumerate()
        .map(|(j, &beta)| {
            modes.eigenfunction(j, p.xp) * modes.eigenfunction(j, z.xp) * libm::cos(beta * p.x) * libm::cos(beta * z.x)
                / (beta * beta)
        })
        .sum()
}

/// `K(p, z) = C_z sum_j psi_j(p) psi_j(z) cos(beta_j p.x) cos(beta_j z.x)`.
pub fn kernel_k(p: Point, z: Point, modes: &ModeSet) -> Result<f64> {
    let cz = phi_normalizer(z, modes)?;
    let sum: f64 = modes
        .propagating_betas()
        .iter()
        .enumerate()
        .map(|(j, &beta)| {
            modes.eigenfunction(j, p.xp) * modes.eigenfunction(j, z.xp) * libm::cos(beta * p.x) * libm::cos(beta * z.x)
        })
        .sum();
    Ok(cz * sum)
}
