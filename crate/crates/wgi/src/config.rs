//! Scenario configuration: flat `key = value` text, `#` comments, lists
//! separated by commas.
//!
//! Numbers accept a `pi` suffix (`29.15pi`) and simple fractions (`1/60`).
//! Obstacles are written as `circle(x, xp, r)`, `square(x, xp, side)` or
//! `rhombus(x, xp, a, b)` with `a` the range and `b` the cross-range
//! half-diagonal; `none` gives the empty obstacle.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use wgi_core::imaging::{GridSpec, Method, MigSign, SharpVariant};
use wgi_core::modes::DEFAULT_TOL;
use wgi_core::obstacle::DEFAULT_CORNER_ROUNDING;
use wgi_core::{ModeSet, ObstacleOptions, Point, Shape};

use crate::error::{Result, WgiError};

/// Range separation below which the modal series is not evaluated, relative
/// to the width.
pub const MIN_SEP_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub width: f64,
    pub wavenumbers: Vec<f64>,
    pub x_a: f64,
    pub spacing: f64,
    pub aperture_fraction: f64,
    pub include_endpoints: bool,
    pub obstacles: Vec<Shape>,
    /// `None` picks [`ObstacleOptions::recommended`].
    pub n_boundary: Option<usize>,
    pub n_source: Option<usize>,
    pub delta_src: Option<f64>,
    pub corner_rounding: f64,
    pub sigma_pct: f64,
    pub seed: u64,
    pub grid: GridSpec,
    pub methods: Vec<Method>,
    /// `None` is `max(1e-3, sigma_pct / 100)`.
    pub epsilon: Option<f64>,
    pub thresholds: Vec<f64>,
    pub sharp_variant: SharpVariant,
    pub mig_sign: MigSign,
    /// Project test vectors onto the complement of the data null space in
    /// `mig_sharp`.
    pub project_null_space: bool,
    pub rank_tol: f64,
    pub kernel_point: Point,
    pub output_dir: PathBuf,
}

impl Default for ScenarioConfig {
    /// Rhombus at 30 modes, full aperture, 61 sensors at `x_A = -2`.
    fn default() -> Self {
        ScenarioConfig {
            width: 1.0,
            wavenumbers: vec![29.15 * std::f64::consts::PI],
            x_a: -2.0,
            spacing: 1.0 / 60.0,
            aperture_fraction: 1.0,
            include_endpoints: true,
            obstacles: vec![Shape::Rhombus { center: Point::new(-1.0, 0.5), half_diagonals: [0.15, 0.1] }],
            n_boundary: None,
            n_source: None,
            delta_src: None,
            corner_rounding: DEFAULT_CORNER_ROUNDING,
            sigma_pct: 0.0,
            seed: 0,
            grid: GridSpec { x_range: (-1.9, -0.1), xp_range: (0.1, 0.9), nx: 100, nxp: 100 },
            methods: vec![Method::Factorization, Method::MigSharp, Method::Mig],
            epsilon: None,
            thresholds: vec![0.5, 0.7],
            sharp_variant: SharpVariant::AbsIm,
            mig_sign: MigSign::Abs,
            project_null_space: false,
            rank_tol: 1e-6,
            kernel_point: Point::new(-1.0, 0.5),
            output_dir: PathBuf::from("out"),
        }
    }
}

const KEYS: &[&str] = &[
    "width",
    "wavenumbers",
    "x_a",
    "spacing",
    "aperture_fraction",
    "include_endpoints",
    "obstacles",
    "n_boundary",
    "n_source",
    "delta_src",
    "corner_rounding",
    "sigma_pct",
    "seed",
    "grid_x_range",
    "grid_xp_range",
    "grid_nx",
    "grid_nxp",
    "methods",
    "epsilon",
    "thresholds",
    "sharp_variant",
    "mig_sign",
    "project_null_space",
    "rank_tol",
    "kernel_point",
    "output_dir",
];

fn bad(key: &str, msg: impl std::fmt::Display) -> WgiError {
    WgiError::Config(format!("{key}: {msg}"))
}

/// Number with optional `pi` factor or `p/q` form.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some(head) = s.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let factor = if head.is_empty() { 1.0 } else { parse_number(head)? };
        return Some(factor * std::f64::consts::PI);
    }
    if let Some((p, q)) = s.split_once('/') {
        let (p, q) = (parse_number(p)?, parse_number(q)?);
        return (q != 0.0).then_some(p / q);
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Splits on commas outside parentheses.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out.into_iter().filter(|t| !t.is_empty()).collect()
}

fn numbers(key: &str, s: &str) -> Result<Vec<f64>> {
    split_top(s).iter().map(|t| parse_number(t).ok_or_else(|| bad(key, format!("`{t}` is not a number")))).collect()
}

fn pair(key: &str, s: &str) -> Result<(f64, f64)> {
    match numbers(key, s)?[..] {
        [a, b] => Ok((a, b)),
        _ => Err(bad(key, "expected two numbers")),
    }
}

fn parse_shape(s: &str) -> Result<Shape> {
    let key = "obstacles";
    let open = s.find('(').ok_or_else(|| bad(key, format!("`{s}` lacks an argument list")))?;
    let args = s[open..].strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(|| bad(key, format!("unbalanced `{s}`")))?;
    let v = numbers(key, args)?;
    let shape = match (s[..open].trim(), &v[..]) {
        ("circle", &[x, xp, r]) => Shape::Circle { center: Point::new(x, xp), radius: r },
        ("square", &[x, xp, side]) => Shape::Square { center: Point::new(x, xp), side },
        ("rhombus", &[x, xp, a, b]) => Shape::Rhombus { center: Point::new(x, xp), half_diagonals: [a, b] },
        (name, _) => return Err(bad(key, format!("cannot read shape `{name}` with {} arguments", v.len()))),
    };
    Ok(shape)
}

fn format_shape(s: &Shape) -> String {
    match s {
        Shape::Circle { center, radius } => format!("circle({}, {}, {})", center.x, center.xp, radius),
        Shape::Square { center, side } => format!("square({}, {}, {})", center.x, center.xp, side),
        Shape::Rhombus { center, half_diagonals: [a, b] } => format!("rhombus({}, {}, {}, {})", center.x, center.xp, a, b),
    }
}

fn parse_bool(key: &str, s: &str) -> Result<bool> {
    s.parse().map_err(|_| bad(key, "expected true or false"))
}

fn parse_count(key: &str, s: &str) -> Result<usize> {
    s.parse().map_err(|_| bad(key, "expected a nonnegative integer"))
}

fn optional<T>(s: &str, f: impl FnOnce(&str) -> Result<T>) -> Result<Option<T>> {
    if s == "auto" {
        Ok(None)
    } else {
        f(s).map(Some)
    }
}

fn list<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

impl ScenarioConfig {
    /// Parses and validates. Keys not present keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| WgiError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(WgiError::Config(format!("line {}: unknown key `{k}`", i + 1)));
            }
            if seen.insert(k.to_string(), v.to_string()).is_some() {
                return Err(WgiError::Config(format!("line {}: duplicate key `{k}`", i + 1)));
            }
        }
        let mut c = ScenarioConfig::default();
        for (k, v) in &seen {
            let (k, v) = (k.as_str(), v.as_str());
            let number = || parse_number(v).ok_or_else(|| bad(k, format!("`{v}` is not a number")));
            match k {
                "width" => c.width = number()?,
                "wavenumbers" => c.wavenumbers = numbers(k, v)?,
                "x_a" => c.x_a = number()?,
                "spacing" => c.spacing = number()?,
                "aperture_fraction" => c.aperture_fraction = number()?,
                "include_endpoints" => c.include_endpoints = parse_bool(k, v)?,
                "obstacles" => {
                    c.obstacles = if v == "none" { Vec::new() } else { split_top(v).into_iter().map(parse_shape).collect::<Result<_>>()? }
                }
                "n_boundary" => c.n_boundary = optional(v, |s| parse_count(k, s))?,
                "n_source" => c.n_source = optional(v, |s| parse_count(k, s))?,
                "delta_src" => c.delta_src = optional(v, |_| number())?,
                "corner_rounding" => c.corner_rounding = number()?,
                "sigma_pct" => c.sigma_pct = number()?,
                "seed" => c.seed = v.parse().map_err(|_| bad(k, "expected an unsigned integer"))?,
                "grid_x_range" => c.grid.x_range = pair(k, v)?,
                "grid_xp_range" => c.grid.xp_range = pair(k, v)?,
                "grid_nx" => c.grid.nx = parse_count(k, v)?,
                "grid_nxp" => c.grid.nxp = parse_count(k, v)?,
                "methods" => c.methods = parse_methods(v)?,
                "epsilon" => c.epsilon = optional(v, |_| number())?,
                "thresholds" => c.thresholds = numbers(k, v)?,
                "sharp_variant" => {
                    c.sharp_variant = match v {
                        "abs_im" => SharpVariant::AbsIm,
                        "minus_im" => SharpVariant::MinusIm,
                        _ => return Err(bad(k, "expected abs_im or minus_im")),
                    }
                }
                "mig_sign" => {
                    c.mig_sign = match v {
                        "abs" => MigSign::Abs,
                        "neg" => MigSign::Neg,
                        _ => return Err(bad(k, "expected abs or neg")),
                    }
                }
                "project_null_space" => c.project_null_space = parse_bool(k, v)?,
                "rank_tol" => c.rank_tol = number()?,
                "kernel_point" => {
                    let (x, xp) = pair(k, v)?;
                    c.kernel_point = Point::new(x, xp);
                }
                "output_dir" => c.output_dir = PathBuf::from(v),
                _ => unreachable!("key list and match arms disagree"),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| WgiError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Every key, in a fixed order; parses back to an equal config.
    pub fn serialize(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "auto".into());
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("width", self.width.to_string());
        put("wavenumbers", list(&self.wavenumbers));
        put("x_a", self.x_a.to_string());
        put("spacing", self.spacing.to_string());
        put("aperture_fraction", self.aperture_fraction.to_string());
        put("include_endpoints", self.include_endpoints.to_string());
        put(
            "obstacles",
            if self.obstacles.is_empty() { "none".into() } else { self.obstacles.iter().map(format_shape).collect::<Vec<_>>().join(", ") },
        );
        put("n_boundary", opt(self.n_boundary.map(|v| v.to_string())));
        put("n_source", opt(self.n_source.map(|v| v.to_string())));
        put("delta_src", opt(self.delta_src.map(|v| v.to_string())));
        put("corner_rounding", self.corner_rounding.to_string());
        put("sigma_pct", self.sigma_pct.to_string());
        put("seed", self.seed.to_string());
        put("grid_x_range", format!("{}, {}", self.grid.x_range.0, self.grid.x_range.1));
        put("grid_xp_range", format!("{}, {}", self.grid.xp_range.0, self.grid.xp_range.1));
        put("grid_nx", self.grid.nx.to_string());
        put("grid_nxp", self.grid.nxp.to_string());
        put("methods", list(&self.methods));
        put("epsilon", opt(self.epsilon.map(|v| v.to_string())));
        put("thresholds", list(&self.thresholds));
        put(
            "sharp_variant",
            match self.sharp_variant {
                SharpVariant::AbsIm => "abs_im",
                SharpVariant::MinusIm => "minus_im",
            }
            .into(),
        );
        put(
            "mig_sign",
            match self.mig_sign {
                MigSign::Abs => "abs",
                MigSign::Neg => "neg",
            }
            .into(),
        );
        put("project_null_space", self.project_null_space.to_string());
        put("rank_tol", self.rank_tol.to_string());
        put("kernel_point", format!("{}, {}", self.kernel_point.x, self.kernel_point.xp));
        put("output_dir", self.output_dir.display().to_string());
        s
    }

    /// SHA-256 of [`serialize`](Self::serialize) without the output
    /// directory, hex encoded. Runs that differ only in where they write
    /// produce identical files.
    pub fn hash(&self) -> String {
        let text: String = self.serialize().lines().filter(|l| !l.starts_with("output_dir ")).map(|l| format!("{l}\n")).collect();
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) {
            return Err(bad("width", "must be positive"));
        }
        if self.wavenumbers.is_empty() {
            return Err(bad("wavenumbers", "at least one is required"));
        }
        for &k in &self.wavenumbers {
            self.modes(k).map_err(|e| bad("wavenumbers", e))?;
        }
        if !(self.x_a < 0.0) {
            return Err(bad("x_a", "the array must sit at negative range"));
        }
        if !(self.spacing > 0.0) {
            return Err(bad("spacing", "must be positive"));
        }
        if !(self.aperture_fraction > 0.0 && self.aperture_fraction <= 1.0) {
            return Err(bad("aperture_fraction", "must lie in (0, 1]"));
        }
        let g = GridSpec::new(self.grid.x_range, self.grid.xp_range, self.grid.nx, self.grid.nxp).map_err(|e| bad("grid", e))?;
        g.check_inside(self.x_a, self.width).map_err(|e| bad("grid", e))?;
        if self.methods.iter().any(|m| !matches!(m, Method::Factorization | Method::MigSharp | Method::Mig)) {
            return Err(bad("methods", "expected a subset of factorization, mig_sharp, mig"));
        }
        if self.thresholds.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(bad("thresholds", "must lie in [0, 1]"));
        }
        if self.sigma_pct < 0.0 {
            return Err(bad("sigma_pct", "must be nonnegative"));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0) {
                return Err(bad("epsilon", "must be positive"));
            }
        }
        if !(self.rank_tol > 0.0 && self.rank_tol < 1.0) {
            return Err(bad("rank_tol", "must lie in (0, 1)"));
        }
        if !(self.corner_rounding > 0.0 && self.corner_rounding < 0.5) {
            return Err(bad("corner_rounding", "must lie in (0, 1/2)"));
        }
        Ok(())
    }

    pub fn modes(&self, k: f64) -> wgi_core::Result<ModeSet> {
        ModeSet::new(k, self.width, DEFAULT_TOL, MIN_SEP_FRACTION * self.width)
    }

    pub fn obstacle_options(&self) -> ObstacleOptions {
        let mut o = ObstacleOptions::recommended(&self.obstacles);
        if let Some(n) = self.n_boundary {
            o.n_boundary = n;
        }
        if let Some(n) = self.n_source {
            o.n_source = n;
        }
        o.delta_src = self.delta_src;
        o.corner_rounding = self.corner_rounding;
        o
    }

    pub fn epsilon_or_default(&self) -> f64 {
        self.epsilon.unwrap_or_else(|| wgi_core::imaging::default_epsilon(self.sigma_pct))
    }
}

pub fn parse_methods(v: &str) -> Result<Vec<Method>> {
    split_top(v).iter().map(|t| t.parse::<Method>().map_err(|_| bad("methods", format!("unknown method `{t}`")))).collect()
}
