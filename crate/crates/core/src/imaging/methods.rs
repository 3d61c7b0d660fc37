//! Imaging functions evaluated over a search grid.

use alloc::vec::Vec;

use crate::array::Quadrature;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::green::{kernel_k, kernel_k0};
use crate::imaging::farfield::{quadratic_form, FarFieldMatrix, SharpOperator};
use crate::imaging::grid::{GridSpec, ImageGrid, Method};
use crate::imaging::regularize::{morozov_alpha, MorozovSolution};
use crate::imaging::vectors::{rhs_vector, synthesize, test_vector};
use crate::modes::ModeSet;
use crate::par::map_indexed;
use crate::response::ResponseMatrix;
use crate::{CMatrix, Complex64};

/// Floor of the Morozov noise level for noiseless data.
pub const NOISELESS_EPSILON: f64 = 1e-3;

/// `max(1e-3, sigma_pct / 100)`.
pub fn default_epsilon(sigma_pct: f64) -> f64 {
    NOISELESS_EPSILON.max(sigma_pct / 100.0)
}

/// Sign convention of the migration function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MigSign {
    /// `|Im(.)|`.
    #[default]
    Abs,
    /// `-Im(.)`, clipped at zero.
    Neg,
}

impl MigSign {
    fn apply(self, im: f64) -> f64 {
        match self {
            MigSign::Abs => libm::fabs(im),
            MigSign::Neg => (-im).max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationImage {
    pub image: ImageGrid,
    /// Discrepancy solution per grid point; `None` where no root exists and
    /// the image records 0.
    pub solutions: Vec<Option<MorozovSolution>>,
}

impl FactorizationImage {
    pub fn no_root_count(&self) -> usize {
        self.solutions.iter().filter(|s| s.is_none()).count()
    }
}

/// `1 / |g_z|` with `g_z` the discrepancy-regularized solution of
/// `(F_#)^(1/2) g = b_z`.
pub fn factorization_image(sharp: &SharpOperator, spec: &GridSpec, eps: f64) -> Result<FactorizationImage> {
    spec.check_inside(sharp.x_a, sharp.modes.width())?;
    if !(sharp.max_eigenvalue() > 0.0) {
        return Err(Error::DegenerateImage);
    }
    let results = map_indexed(spec.len(), |i| {
        let b = rhs_vector(spec.point(i), &sharp.modes, sharp.x_a);
        match morozov_alpha(sharp, &b, eps) {
            Ok(sol) => Ok(Some(sol)),
            Err(Error::NoRoot) => Ok(None),
            Err(Error::InvalidParameter(_)) if b.iter().all(|c| c.norm_sqr() == 0.0) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let solutions = results.into_iter().collect::<Result<Vec<_>>>()?;
    let raw = solutions
        .iter()
        .map(|s| match s {
            Some(sol) if sol.g_norm > 0.0 => 1.0 / sol.g_norm,
            _ => 0.0,
        })
        .collect();
    let image = ImageGrid::from_raw(*spec, Method::Factorization, raw)?.nondegenerate()?;
    Ok(FactorizationImage { image, solutions })
}

/// `a_z* F_# a_z`, optionally with `a_z` first projected by `projector`
/// (for example onto the complement of the data null space).
pub fn migration_sharp_image(sharp: &SharpOperator, spec: &GridSpec, projector: Option<&CMatrix>) -> Result<ImageGrid> {
    spec.check_inside(sharp.x_a, sharp.modes.width())?;
    let raw = map_indexed(spec.len(), |i| {
        let a = match test_vector(spec.point(i), &sharp.modes, sharp.x_a) {
            Ok(a) => a,
            Err(_) => return 0.0,
        };
        let a = match projector {
            Some(p) => project(p, &a),
            None => a,
        };
        // PSD up to rounding.
        sharp.quadratic_form(&a).max(0.0)
    });
    ImageGrid::from_raw(*spec, Method::MigSharp, raw)?.nondegenerate()
}

fn project(p: &CMatrix, a: &[Complex64]) -> Vec<Complex64> {
    (0..p.nrows()).map(|i| a.iter().enumerate().map(|(j, aj)| p[(i, j)] * aj).sum()).collect()
}

/// Migration on sensor data: `phi_z` sampled at the sensors and
/// `|Im(phi^T W U W phi)|`, with `W` the trapezoid weights of the array.
/// Works on any aperture.
pub fn migration_image(u: &ResponseMatrix, spec: &GridSpec, modes: &ModeSet, sign: MigSign) -> Result<ImageGrid> {
    if libm::fabs(u.k - modes.k()) > 1e-12 * modes.k() {
        return Err(Error::InvalidParameter("response matrix and mode set have different wavenumbers"));
    }
    if libm::fabs(u.array.width() - modes.width()) > 1e-12 * modes.width() {
        return Err(Error::InvalidParameter("response matrix and mode set have different widths"));
    }
    let x_a = u.array.x_a();
    spec.check_inside(x_a, modes.width())?;
    let w = u.array.weights(Quadrature::Trapezoid);
    let xp = u.array.sensor_xp();
    let raw = map_indexed(spec.len(), |i| {
        let a = match test_vector(spec.point(i), modes, x_a) {
            Ok(a) => a,
            Err(_) => return 0.0,
        };
        let phi: Vec<Complex64> = synthesize(&a, modes, xp).iter().zip(&w).map(|(p, wr)| p * *wr).collect();
        let mut form = Complex64::new(0.0, 0.0);
        for (r, pr) in phi.iter().enumerate() {
            let mut row = Complex64::new(0.0, 0.0);
            for (s, ps) in phi.iter().enumerate() {
                row += u.entries[(r, s)] * ps;
            }
            form += pr * row;
        }
        sign.apply(form.im)
    });
    ImageGrid::from_raw(*spec, Method::Mig, raw)?.nondegenerate()
}

/// Mode-space migration `|Im(a_z* F a_z)|`. On full-aperture data it equals
/// [`migration_image`].
pub fn migration_mode_space_image(far: &FarFieldMatrix, spec: &GridSpec, sign: MigSign) -> Result<ImageGrid> {
    spec.check_inside(far.x_a, far.modes.width())?;
    let raw = map_indexed(spec.len(), |i| match test_vector(spec.point(i), &far.modes, far.x_a) {
        Ok(a) => sign.apply(quadratic_form(&far.entries, &a).im),
        Err(_) => 0.0,
    });
    ImageGrid::from_raw(*spec, Method::Mig, raw)?.nondegenerate()
}

/// Sum of raw values over frequencies, renormalized. Only migration images
/// can be combined.
pub fn multifrequency_combine(images: &[ImageGrid]) -> Result<ImageGrid> {
    let first = images.first().ok_or(Error::GridMismatch("no images to combine"))?;
    if images.len() > 1 && first.method.multi() == first.method {
        return Err(Error::InvalidParameter("only single-frequency migration images can be combined"));
    }
    let mut raw = first.raw();
    for img in &images[1..] {
        if img.spec != first.spec {
            return Err(Error::GridMismatch("grids differ"));
        }
        if img.method != first.method {
            return Err(Error::GridMismatch("methods differ"));
        }
        for (r, v) in raw.iter_mut().zip(img.raw()) {
            *r += v;
        }
    }
    let method = if images.len() > 1 { first.method.multi() } else { first.method };
    ImageGrid::from_raw(first.spec, method, raw)
}

/// Normalized `|K_0(., z)|` and `|K(., z)|` over the grid.
pub fn kernel_grids(z: Point, spec: &GridSpec, modes: &ModeSet) -> Result<(ImageGrid, ImageGrid)> {
    // Fails early where the normalizer at z vanishes.
    kernel_k(z, z, modes)?;
    let k0 = map_indexed(spec.len(), |i| libm::fabs(kernel_k0(spec.point(i), z, modes)));
    let k = map_indexed(spec.len(), |i| kernel_k(spec.point(i), z, modes).map(libm::fabs));
    let k = k.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((ImageGrid::from_raw(*spec, Method::KernelK0, k0)?, ImageGrid::from_raw(*spec, Method::KernelK, k)?))
}

/// `values >= tau`.
pub fn threshold_support(img: &ImageGrid, tau: f64) -> Vec<bool> {
    img.values.iter().map(|&v| v >= tau).collect()
}
