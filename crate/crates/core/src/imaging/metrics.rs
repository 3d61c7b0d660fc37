//! Scalar scores for comparing images.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::imaging::grid::{GridSpec, ImageGrid};

/// Sidelobe exclusion radius relative to the waveguide width.
pub const SIDELOBE_RADIUS: f64 = 0.2;

/// Image maximum over the largest value farther than `radius` from the
/// argmax. Infinite when nothing lies outside the disk or the outside is
/// zero.
pub fn peak_to_sidelobe(img: &ImageGrid, radius: f64) -> f64 {
    let peak_idx = img.argmax_index();
    let peak = img.spec.point(peak_idx);
    let mut side = 0.0_f64;
    for (i, v) in img.values.iter().enumerate() {
        if img.spec.point(i).distance(&peak) > radius {
            side = side.max(*v);
        }
    }
    if side > 0.0 {
        img.values[peak_idx] / side
    } else {
        f64::INFINITY
    }
}

/// Mean of the grid points selected by `mask`.
pub fn mask_centroid(spec: &GridSpec, mask: &[bool]) -> Option<Point> {
    let mut n = 0usize;
    let (mut x, mut xp) = (0.0, 0.0);
    for (i, _) in mask.iter().enumerate().filter(|(_, m)| **m) {
        let p = spec.point(i);
        x += p.x;
        xp += p.xp;
        n += 1;
    }
    (n > 0).then(|| Point::new(x / n as f64, xp / n as f64))
}

/// Pearson correlation of the value arrays. Zero when either image is
/// constant.
pub fn pearson(a: &ImageGrid, b: &ImageGrid) -> Result<f64> {
    if a.spec != b.spec {
        return Err(Error::GridMismatch("grids differ"));
    }
    let n = a.values.len() as f64;
    let ma = a.values.iter().sum::<f64>() / n;
    let mb = b.values.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.values.iter().zip(&b.values) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Ok(0.0);
    }
    Ok(sab / libm::sqrt(saa * sbb))
}

/// `|A and B| / |A or B|`; 1 for two empty masks.
pub fn jaccard(a: &[bool], b: &[bool]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch("mask sizes differ"));
    }
    let inter = a.iter().zip(b).filter(|(x, y)| **x && **y).count();
    let union = a.iter().zip(b).filter(|(x, y)| **x || **y).count();
    Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
}

pub fn argmax_distance(a: &ImageGrid, b: &ImageGrid) -> Result<f64> {
    if a.spec != b.spec {
        return Err(Error::GridMismatch("grids differ"));
    }
    Ok(a.argmax().distance(&b.argmax()))
}
