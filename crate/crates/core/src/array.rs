//! Active array of equispaced sensors on the range line `x = x_A`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Cross-range quadrature rule on the sensor grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quadrature {
    /// Half weight for sensors on the side walls. With both walls sampled it
    /// integrates the propagating cosine products exactly.
    #[default]
    Trapezoid,
    /// Uniform weight `spacing`.
    Riemann,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    x_a: f64,
    width: f64,
    spacing: f64,
    aperture_fraction: f64,
    include_endpoints: bool,
    sensor_xp: Vec<f64>,
}

/// Sensors at `xp = i spacing`, `i = 0..=floor(aperture_fraction width / spacing)`,
/// both side walls included.
pub fn make_array(x_a: f64, width: f64, spacing: f64, aperture_fraction: f64) -> Result<ArrayGeometry> {
    ArrayGeometry::new(x_a, width, spacing, aperture_fraction, true)
}

impl ArrayGeometry {
    /// With `include_endpoints = false` sensors lying on the side walls
    /// `xp = 0` and `xp = width` are dropped.
    pub fn new(x_a: f64, width: f64, spacing: f64, aperture_fraction: f64, include_endpoints: bool) -> Result<Self> {
        if !(x_a < 0.0 && x_a.is_finite()) {
            return Err(Error::InvalidParameter("array range must be negative"));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter("width must be positive"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidParameter("sensor spacing must be positive"));
        }
        if !(aperture_fraction > 0.0 && aperture_fraction <= 1.0) {
            return Err(Error::InvalidParameter("aperture fraction must lie in (0, 1]"));
        }
        let span = aperture_fraction * width;
        // Tolerate rounding in span / spacing, e.g. 1 / (1/60).
        let last = libm::floor(span / spacing * (1.0 + 1e-12)) as usize;
        let sensor_xp: Vec<f64> = (0..=last)
            .map(|i| (i as f64 * spacing).min(width))
            .filter(|&xp| include_endpoints || !on_wall(xp, width, spacing))
            .collect();
        if sensor_xp.is_empty() {
            return Err(Error::InvalidParameter("array has no sensors"));
        }
        Ok(ArrayGeometry { x_a, width, spacing, aperture_fraction, include_endpoints, sensor_xp })
    }

    pub fn x_a(&self) -> f64 {
        self.x_a
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn aperture_fraction(&self) -> f64 {
        self.aperture_fraction
    }

    pub fn include_endpoints(&self) -> bool {
        self.include_endpoints
    }

    pub fn is_full_aperture(&self) -> bool {
        self.aperture_fraction >= 1.0
    }

    pub fn len(&self) -> usize {
        self.sensor_xp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensor_xp.is_empty()
    }

    pub fn sensor_xp(&self) -> &[f64] {
        &self.sensor_xp
    }

    pub fn sensors(&self) -> Vec<Point> {
        self.sensor_xp.iter().map(|&xp| Point::new(self.x_a, xp)).collect()
    }

    /// Quadrature weights of the cross-range integral over the aperture.
    pub fn weights(&self, rule: Quadrature) -> Vec<f64> {
        self.sensor_xp
            .iter()
            .map(|&xp| match rule {
                Quadrature::Riemann => self.spacing,
                Quadrature::Trapezoid if on_wall(xp, self.width, self.spacing) => 0.5 * self.spacing,
                Quadrature::Trapezoid => self.spacing,
            })
            .collect()
    }

    /// Same array with a different range.
    pub fn at_range(&self, x_a: f64) -> Result<Self> {
        ArrayGeometry::new(x_a, self.width, self.spacing, self.aperture_fraction, self.include_endpoints)
    }

    /// Indices of the sensors kept when the aperture shrinks to `fraction`.
    pub fn restrict(&self, fraction: f64) -> Result<(ArrayGeometry, Vec<usize>)> {
        if fraction > self.aperture_fraction {
            return Err(Error::InvalidParameter("cannot widen the aperture of recorded data"));
        }
        let sub = ArrayGeometry::new(self.x_a, self.width, self.spacing, fraction, self.include_endpoints)?;
        let idx = sub
            .sensor_xp
            .iter()
            .map(|xp| self.sensor_xp.iter().position(|y| y == xp).expect("sub-array sensors are a prefix"))
            .collect();
        Ok((sub, idx))
    }
}

fn on_wall(xp: f64, width: f64, spacing: f64) -> bool {
    let eps = 1e-9 * spacing;
    xp <= eps || xp >= width - eps
}
