//! Rectangular search grids and normalized images over them.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Lattice with inclusive endpoints: `nx` range samples by `nxp` cross-range
/// samples. Points are stored row-major with cross-range as the row index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_range: (f64, f64),
    pub xp_range: (f64, f64),
    pub nx: usize,
    pub nxp: usize,
}

impl GridSpec {
    pub fn new(x_range: (f64, f64), xp_range: (f64, f64), nx: usize, nxp: usize) -> Result<Self> {
        let ok = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.0 <= r.1;
        if !ok(x_range) || !ok(xp_range) {
            return Err(Error::InvalidParameter("grid ranges must be finite and ordered"));
        }
        if nx == 0 || nxp == 0 {
            return Err(Error::InvalidParameter("grid counts must be positive"));
        }
        if (nx == 1) != (x_range.0 == x_range.1) || (nxp == 1) != (xp_range.0 == xp_range.1) {
            return Err(Error::InvalidParameter("a single sample needs a degenerate range and vice versa"));
        }
        Ok(GridSpec { x_range, xp_range, nx, nxp })
    }

    pub fn len(&self) -> usize {
        self.nx * self.nxp
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn sample(range: (f64, f64), n: usize, i: usize) -> f64 {
        if n == 1 {
            range.0
        } else {
            range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
        }
    }

    pub fn x(&self, col: usize) -> f64 {
        Self::sample(self.x_range, self.nx, col)
    }

    pub fn xp(&self, row: usize) -> f64 {
        Self::sample(self.xp_range, self.nxp, row)
    }

    /// Point of flat index `idx = row * nx + col`.
    pub fn point(&self, idx: usize) -> Point {
        Point::new(self.x(idx % self.nx), self.xp(idx / self.nx))
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Rejects grids that are not strictly between the array and the end
    /// wall or that leave the cross-section.
    pub fn check_inside(&self, x_a: f64, width: f64) -> Result<()> {
        if !(self.x_range.0 > x_a && self.x_range.1 < 0.0) {
            return Err(Error::InvalidParameter("imaging grid must lie strictly between the array and the end wall"));
        }
        if !(self.xp_range.0 >= 0.0 && self.xp_range.1 <= width) {
            return Err(Error::InvalidParameter("imaging grid leaves the cross-section"));
        }
        Ok(())
    }
}

/// Which imaging function or kernel a grid holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Factorization,
    MigSharp,
    Mig,
    MigSharpMulti,
    MigMulti,
    KernelK0,
    KernelK,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Factorization,
        Method::MigSharp,
        Method::Mig,
        Method::MigSharpMulti,
        Method::MigMulti,
        Method::KernelK0,
        Method::KernelK,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Factorization => "factorization",
            Method::MigSharp => "mig_sharp",
            Method::Mig => "mig",
            Method::MigSharpMulti => "mig_sharp_multi",
            Method::MigMulti => "mig_multi",
            Method::KernelK0 => "kernel_k0",
            Method::KernelK => "kernel_k",
        }
    }

    /// Tag of the superposition over frequencies. Only the migration
    /// functions have one.
    pub fn multi(self) -> Method {
        match self {
            Method::MigSharp => Method::MigSharpMulti,
            Method::Mig => Method::MigMulti,
            other => other,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL.iter().copied().find(|m| m.tag() == s).ok_or(Error::InvalidParameter("unknown method tag"))
    }
}

/// Image normalized to maximum 1. `normalization` is the maximum of the raw
/// values, so `values * normalization` recovers them; it is 0 for a
/// degenerate (identically zero) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    pub spec: GridSpec,
    pub method: Method,
    pub values: Vec<f64>,
    pub normalization: f64,
    pub degenerate: bool,
}

impl ImageGrid {
    /// Normalizes nonnegative raw values. Negative or non-finite values are
    /// rejected.
    pub fn from_raw(spec: GridSpec, method: Method, raw: Vec<f64>) -> Result<Self> {
        if raw.len() != spec.len() {
            return Err(Error::DimensionMismatch { expected: spec.len(), found: raw.len() });
        }
        if raw.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter("raw image values must be finite and nonnegative"));
        }
        let max = raw.iter().cloned().fold(0.0, f64::max);
        if max == 0.0 {
            return Ok(ImageGrid { spec, method, values: raw, normalization: 0.0, degenerate: true });
        }
        let values = raw.iter().map(|v| v / max).collect();
        Ok(ImageGrid { spec, method, values, normalization: max, degenerate: false })
    }

    pub fn raw(&self) -> Vec<f64> {
        self.values.iter().map(|v| v * self.normalization).collect()
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.spec.nx + col]
    }

    /// Flat index of the first maximum.
    pub fn argmax_index(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn argmax(&self) -> Point {
        self.spec.point(self.argmax_index())
    }

    /// Error form of the degenerate flag.
    pub fn nondegenerate(self) -> Result<Self> {
        if self.degenerate {
            Err(Error::DegenerateImage)
        } else {
            Ok(self)
        }
    }
}
