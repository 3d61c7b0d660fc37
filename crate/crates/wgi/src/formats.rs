//! Line-oriented text formats for response matrices, projected responses and
//! image grids, plus 8-bit PGM export.
//!
//! Every file starts with a magic line and a `key=value` header line. Lines
//! starting with `#` after the header are comments; writers put the config
//! hash there. Floats are written with 17 significant digits, which round
//! trips every `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use wgi_core::imaging::{GridSpec, ImageGrid, Method};
use wgi_core::{ArrayGeometry, CMatrix, Complex64, ModeSet, ProjectedResponse, ResponseMatrix};

use crate::error::{Result, WgiError};

const RESPONSE_MAGIC: &str = "WGRM v1";
const PROJECTED_MAGIC: &str = "WGPM v1";
const IMAGE_MAGIC: &str = "WGIG v1";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `contents` to a temporary sibling and renames it over `path`, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| WgiError::Config(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(WgiError::io(path))
}

fn header_lines(magic: &str, fields: &[(&str, String)], hash: Option<&str>) -> String {
    let mut s = String::new();
    s.push_str(magic);
    s.push('\n');
    let line: Vec<String> = fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
    s.push_str(&line.join(" "));
    s.push('\n');
    if let Some(h) = hash {
        let _ = writeln!(s, "# config={h}");
    }
    s
}

fn complex_rows(m: &CMatrix) -> String {
    let mut s = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format!("{}:{}", num(m[(r, c)].re), num(m[(r, c)].im))).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn save_response(path: &Path, u: &ResponseMatrix, hash: Option<&str>) -> Result<()> {
    let a = &u.array;
    let fields = [
        ("k", num(u.k)),
        ("width", num(a.width())),
        ("xA", num(a.x_a())),
        ("nA", a.len().to_string()),
        ("spacing", num(a.spacing())),
        ("aperture", num(a.aperture_fraction())),
        ("sigma_pct", num(u.noise_sigma_pct)),
        ("seed", u.seed.map_or("none".to_string(), |s| s.to_string())),
    ];
    let mut s = header_lines(RESPONSE_MAGIC, &fields, hash);
    s.push_str(&complex_rows(&u.entries));
    write_atomic(path, s.as_bytes())
}

pub fn save_projected(path: &Path, p: &ProjectedResponse, hash: Option<&str>) -> Result<()> {
    let fields = [
        ("k", num(p.modes.k())),
        ("width", num(p.modes.width())),
        ("xA", num(p.x_a)),
        ("J", p.modes.last_propagating().to_string()),
    ];
    let mut s = header_lines(PROJECTED_MAGIC, &fields, hash);
    s.push_str(&complex_rows(&p.entries));
    write_atomic(path, s.as_bytes())
}

pub fn save_image(path: &Path, img: &ImageGrid, hash: Option<&str>) -> Result<()> {
    let g = &img.spec;
    let fields = [
        ("method", img.method.tag().to_string()),
        ("x_min", num(g.x_range.0)),
        ("x_max", num(g.x_range.1)),
        ("xp_min", num(g.xp_range.0)),
        ("xp_max", num(g.xp_range.1)),
        ("nx", g.nx.to_string()),
        ("nxp", g.nxp.to_string()),
        ("normalization", num(img.normalization)),
        ("degenerate", img.degenerate.to_string()),
    ];
    let mut s = header_lines(IMAGE_MAGIC, &fields, hash);
    for row in img.values.chunks(g.nx) {
        let line: Vec<String> = row.iter().map(|v| num(*v)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    write_atomic(path, s.as_bytes())
}

/// Plain (P2) PGM, values min-max scaled to 0..=255. The top row is the
/// largest cross-range.
pub fn save_pgm(path: &Path, img: &ImageGrid) -> Result<()> {
    let g = &img.spec;
    let lo = img.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = img.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut s = format!("P2\n# {}\n{} {}\n255\n", img.method.tag(), g.nx, g.nxp);
    for row in img.values.chunks(g.nx).rev() {
        let line: Vec<String> = row.iter().map(|v| (((v - lo) / span) * 255.0).round().clamp(0.0, 255.0).to_string()).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    write_atomic(path, s.as_bytes())
}

/// Parsed header and data lines of one file.
struct Parsed {
    path: PathBuf,
    fields: Vec<(String, String)>,
    /// (1-based line number, content)
    rows: Vec<(usize, String)>,
}

impl Parsed {
    fn read(path: &Path, magic: &str) -> Result<Parsed> {
        let text = fs::read_to_string(path).map_err(WgiError::io(path))?;
        let err = |line: usize, msg: &str| WgiError::Format { path: path.to_path_buf(), line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, l)) if l.trim_end() == magic => {}
            _ => return Err(err(1, &format!("expected `{magic}`"))),
        }
        let (n, header) = lines.next().ok_or_else(|| err(2, "missing header line"))?;
        let mut fields = Vec::new();
        for tok in header.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| err(n, &format!("malformed header field `{tok}`")))?;
            fields.push((k.to_string(), v.to_string()));
        }
        let rows = lines.filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty()).map(|(i, l)| (i, l.to_string())).collect();
        Ok(Parsed { path: path.to_path_buf(), fields, rows })
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> WgiError {
        WgiError::Format { path: self.path.clone(), line, msg: msg.into() }
    }

    fn raw(&self, key: &str) -> Result<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str()).ok_or_else(|| self.err(2, format!("missing header field `{key}`")))
    }

    fn float(&self, key: &str) -> Result<f64> {
        let v = self.raw(key)?;
        v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| self.err(2, format!("`{key}` is not a finite number")))
    }

    fn count(&self, key: &str) -> Result<usize> {
        self.raw(key)?.parse().map_err(|_| self.err(2, format!("`{key}` is not a count")))
    }

    fn complex_matrix(&self, n: usize) -> Result<CMatrix> {
        if self.rows.len() != n {
            return Err(self.err(self.rows.last().map_or(2, |r| r.0), format!("expected {n} rows, found {}", self.rows.len())));
        }
        let mut m = CMatrix::zeros(n, n);
        for (r, (line, text)) in self.rows.iter().enumerate() {
            let cells: Vec<&str> = text.split(',').collect();
            if cells.len() != n {
                return Err(self.err(*line, format!("expected {n} entries, found {}", cells.len())));
            }
            for (c, cell) in cells.iter().enumerate() {
                let (re, im) = cell.split_once(':').ok_or_else(|| self.err(*line, format!("entry {c} is not `re:im`")))?;
                let parse = |s: &str| s.trim().parse::<f64>().ok().filter(|x| x.is_finite());
                match (parse(re), parse(im)) {
                    (Some(re), Some(im)) => m[(r, c)] = Complex64::new(re, im),
                    _ => return Err(self.err(*line, format!("entry {c} is not a finite complex number"))),
                }
            }
        }
        Ok(m)
    }
}

pub fn load_response(path: &Path) -> Result<ResponseMatrix> {
    let p = Parsed::read(path, RESPONSE_MAGIC)?;
    let (k, width, x_a, spacing, aperture, sigma) =
        (p.float("k")?, p.float("width")?, p.float("xA")?, p.float("spacing")?, p.float("aperture")?, p.float("sigma_pct")?);
    let n = p.count("nA")?;
    let seed = match p.raw("seed")? {
        "none" => None,
        s => Some(s.parse::<u64>().map_err(|_| p.err(2, "`seed` is neither an integer nor `none`"))?),
    };
    // The sensor count tells whether the wall sensors were kept.
    let array = [true, false]
        .iter()
        .filter_map(|&ends| ArrayGeometry::new(x_a, width, spacing, aperture, ends).ok())
        .find(|a| a.len() == n)
        .ok_or_else(|| p.err(2, format!("no array with {n} sensors matches the header geometry")))?;
    let entries = p.complex_matrix(n)?;
    let mut u = ResponseMatrix::new(entries, array, k).map_err(|e| p.err(2, e.to_string()))?;
    u.noise_sigma_pct = sigma;
    u.seed = seed;
    Ok(u)
}

/// The mode set is rebuilt from the header with the given truncation
/// parameters.
pub fn load_projected(path: &Path, tol: f64, min_sep: f64) -> Result<ProjectedResponse> {
    let p = Parsed::read(path, PROJECTED_MAGIC)?;
    let (k, width, x_a) = (p.float("k")?, p.float("width")?, p.float("xA")?);
    let j = p.count("J")?;
    let modes = ModeSet::new(k, width, tol, min_sep).map_err(|e| p.err(2, e.to_string()))?;
    if modes.last_propagating() != j {
        return Err(p.err(2, format!("J={j} but k={k} supports J={}", modes.last_propagating())));
    }
    let entries = p.complex_matrix(j + 1)?;
    ProjectedResponse::new(entries, modes, x_a).map_err(|e| p.err(2, e.to_string()))
}

pub fn load_image(path: &Path) -> Result<ImageGrid> {
    let p = Parsed::read(path, IMAGE_MAGIC)?;
    let method: Method = p.raw("method")?.parse().map_err(|_| p.err(2, "unknown method tag"))?;
    let spec = GridSpec::new(
        (p.float("x_min")?, p.float("x_max")?),
        (p.float("xp_min")?, p.float("xp_max")?),
        p.count("nx")?,
        p.count("nxp")?,
    )
    .map_err(|e| p.err(2, e.to_string()))?;
    let normalization = p.float("normalization")?;
    let degenerate = p.raw("degenerate")?.parse::<bool>().map_err(|_| p.err(2, "`degenerate` is not a boolean"))?;
    if p.rows.len() != spec.nxp {
        return Err(p.err(p.rows.last().map_or(2, |r| r.0), format!("expected {} rows, found {}", spec.nxp, p.rows.len())));
    }
    let mut values = Vec::with_capacity(spec.len());
    for (line, text) in &p.rows {
        let row: Vec<f64> = text
            .split(',')
            .map(|c| c.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<_>>()
            .ok_or_else(|| p.err(*line, "non-numeric or non-finite value"))?;
        if row.len() != spec.nx {
            return Err(p.err(*line, format!("expected {} values, found {}", spec.nx, row.len())));
        }
        values.extend(row);
    }
    Ok(ImageGrid { spec, method, values, normalization, degenerate })
}

/// Rejects data recorded at a different wavenumber than `k`.
pub fn expect_wavenumber(u: &ResponseMatrix, k: f64, what: &Path) -> Result<()> {
    if (u.k - k).abs() > 1e-12 * k {
        return Err(WgiError::Mismatch(format!("{} holds k={} but k={} was requested", what.display(), u.k, k)));
    }
    Ok(())
}
