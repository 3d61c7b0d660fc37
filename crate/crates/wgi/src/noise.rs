//! Additive complex Gaussian noise on sensor data.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use wgi_core::{Complex64, ResponseMatrix};

/// Adds iid complex Gaussian noise with standard deviation
/// `sigma = sigma_pct / 100 * max |U|` in modulus: real and imaginary parts
/// are each `N(0, sigma^2 / 2)`. Entries are drawn in column-major order
/// from ChaCha20 seeded with `seed`, so results are portable across
/// platforms. `sigma_pct = 0` returns the input unchanged.
pub fn add_noise(u: &ResponseMatrix, sigma_pct: f64, seed: u64) -> ResponseMatrix {
    assert!(sigma_pct >= 0.0 && sigma_pct.is_finite(), "noise level must be nonnegative");
    let mut out = u.clone();
    if sigma_pct == 0.0 {
        return out;
    }
    let max = u.entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sigma = sigma_pct / 100.0 * max;
    out.noise_sigma_pct = sigma_pct;
    out.seed = Some(seed);
    if sigma == 0.0 {
        return out;
    }
    let normal = Normal::new(0.0, sigma / std::f64::consts::SQRT_2).expect("finite positive deviation");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for z in out.entries.iter_mut() {
        *z += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
    }
    out
}
