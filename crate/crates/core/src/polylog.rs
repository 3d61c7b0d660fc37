//! Polylogarithms `Li_n(z)` on the closed unit disk, `z = exp(-s + i theta)`
//! with `s >= 0`. They sum the static asymptotic parts of the evanescent mode
//! series in closed form.

use core::f64::consts::PI;

use crate::Complex64;

/// `zeta(2), ..., zeta(5)`.
const ZETA_POS: [f64; 4] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_369_9,
];

/// `zeta(1 - 2p)` for `p = 1..=40`; `zeta` vanishes at the negative even
/// integers.
const ZETA_NEG_ODD: [f64; 40] = [
    -8.3333333333333329e-02,
    8.3333333333333332e-03,
    -3.9682539682539680e-03,
    4.1666666666666666e-03,
    -7.5757575757575760e-03,
    2.1092796092796094e-02,
    -8.3333333333333329e-02,
    4.4325980392156861e-01,
    -3.0539543302701198e+00,
    2.6456212121212122e+01,
    -2.8146014492753625e+02,
    3.6075105463980462e+03,
    -5.4827583333333336e+04,
    9.7493682385057467e+05,
    -2.0052695796688080e+07,
    4.7238486772162992e+08,
    -1.2635724795916666e+10,
    3.8087931125245367e+11,
    -1.2850850499305084e+13,
    4.8241448354850169e+14,
    -2.0040310656516252e+16,
    9.1677436031953306e+17,
    -4.5979888343656505e+19,
    2.5180471921451095e+21,
    -1.5001733492153928e+23,
    9.6899578874635944e+24,
    -6.7645882379292815e+26,
    5.0890659468662290e+28,
    -4.1147288792557979e+30,
    3.5666582095375557e+32,
    -3.3066089876577578e+34,
    3.2715634236478718e+36,
    -3.4473782558278057e+38,
    3.8614279832705260e+40,
    -4.5892974432454331e+42,
    5.7775386342770428e+44,
    -7.6919858759507139e+46,
    1.0813635449971654e+49,
    -1.6029364522008964e+51,
    2.5019479041560463e+53,
];

/// Below `|z| = 1/2` the defining power series converges fast enough.
const DIRECT_SERIES_S: f64 = core::f64::consts::LN_2;

/// Reduces an angle to `(-pi, pi]`.
pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut t = theta - two_pi * libm::round(theta / two_pi);
    if t <= -PI {
        t += two_pi;
    }
    t
}

/// `Re Li_1(z) = -ln|1 - z|`. Infinite at `z = 1`.
pub(crate) fn re_li1(s: f64, theta: f64) -> f64 {
    let t = wrap_angle(theta);
    let e = libm::expm1(-s);
    let sh = libm::sin(0.5 * t);
    let mod2 = e * e + 4.0 * libm::exp(-s) * sh * sh;
    -0.5 * libm::log(mod2)
}

/// `Li_n(z)` for `n` in `2..=5`.
pub(crate) fn li(n: usize, s: f64, theta: f64) -> Complex64 {
    debug_assert!((2..=5).contains(&n) && s >= 0.0);
    let t = wrap_angle(theta);
    if s > DIRECT_SERIES_S {
        direct_series(n, s, t)
    } else {
        log_series(n, s, t)
    }
}

fn direct_series(n: usize, s: f64, theta: f64) -> Complex64 {
    let z = Complex64::from_polar(libm::exp(-s), theta);
    let mut zj = z;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 1..200usize {
        let term = zj / powi(j as f64, n);
        sum += term;
        if term.norm() < 1e-18 * (1.0 + sum.norm()) {
            break;
        }
        zj *= z;
    }
    sum
}

/// Expansion about `z = 1` in `mu = ln z`, valid for `|mu| < 2 pi`:
/// `Li_n(e^mu) = sum_{k != n-1} zeta(n-k) mu^k / k!
///               + mu^(n-1) / (n-1)! (H_(n-1) - ln(-mu))`.
fn log_series(n: usize, s: f64, theta: f64) -> Complex64 {
    let mu = Complex64::new(-s, theta);
    let mut sum = Complex64::new(0.0, 0.0);
    // power = mu^k / k!
    let mut power = Complex64::new(1.0, 0.0);
    for k in 0..n + 80 {
        if k > 0 {
            power = power * mu / k as f64;
        }
        if k + 1 == n {
            if mu.norm() > 0.0 {
                let harmonic: f64 = (1..n).map(|i| 1.0 / i as f64).sum();
                sum += power * (Complex64::new(harmonic, 0.0) - (-mu).ln());
            }
            continue;
        }
        let zeta = if k + 1 < n {
            ZETA_POS[n - k - 2]
        } else if k == n {
            -0.5
        } else {
            let m = k - n;
            if m % 2 == 0 {
                continue;
            }
            ZETA_NEG_ODD[(m - 1) / 2]
        };
        let term = power * zeta;
        sum += term;
        if k > n + 8 && term.norm() < 1e-18 * (1.0 + sum.norm()) {
            break;
        }
    }
    sum
}

fn powi(x: f64, n: usize) -> f64 {
    let mut p = 1.0;
    for _ in 0..n {
        p *= x;
    }
    p
}
