use crate::error::{Error, Result};

/// A point `(x, xp)` in the waveguide: `x` is range, `xp` cross-range.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub xp: f64,
}

impl Point {
    pub const fn new(x: f64, xp: f64) -> Self {
        Point { x, xp }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        libm::hypot(self.x - other.x, self.xp - other.xp)
    }
}

impl core::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.xp + rhs.xp)
    }
}

impl core::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.xp - rhs.xp)
    }
}

impl core::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.xp * rhs)
    }
}

/// Semi-infinite strip `(-inf, 0] x [0, width]` with sound-hard walls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideGeometry {
    width: f64,
}

impl WaveguideGeometry {
    pub fn new(width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter("waveguide width must be positive"));
        }
        Ok(WaveguideGeometry { width })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x <= 0.0 && p.xp >= 0.0 && p.xp <= self.width
    }

    /// Strict interior: away from the side walls and the end wall.
    pub fn contains_strictly(&self, p: &Point) -> bool {
        p.x < 0.0 && p.xp > 0.0 && p.xp < self.width
    }
}
