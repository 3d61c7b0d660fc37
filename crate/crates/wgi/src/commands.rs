//! The four scenario commands. Each returns a report value; the binary only
//! prints it.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use wgi_core::imaging::{
    argmax_distance, build_far_field, factorization_image, jaccard, kernel_grids, mask_centroid, migration_image,
    migration_sharp_image, multifrequency_combine, pearson, peak_to_sidelobe, sharpen_with, svd_diagnostics,
    threshold_support, ImageGrid, Method, SIDELOBE_RADIUS,
};
use wgi_core::{
    complete_partial_aperture, make_obstacle_with, project_to_modes, ArrayGeometry, MfsSolver, Point, ResponseMatrix,
    SolverOptions, WaveguideGeometry,
};

use crate::config::ScenarioConfig;
use crate::error::{Result, WgiError};
use crate::formats::{expect_wavenumber, load_image, load_response, save_image, save_pgm, save_response, write_atomic};
use crate::noise::add_noise;

pub const SIMULATE_REPORT: &str = "simulate_report.txt";
pub const IMAGE_SUMMARY: &str = "summary.txt";

pub fn response_file_name(index: usize) -> String {
    format!("response_k{index:02}.wgrm")
}

fn image_file_name(method: Method, index: Option<usize>) -> String {
    match index {
        Some(i) => format!("{method}_k{i:02}.wgig"),
        None => format!("{method}.wgig"),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(WgiError::io(dir))
}

fn config_array(cfg: &ScenarioConfig, fraction: f64) -> Result<ArrayGeometry> {
    ArrayGeometry::new(cfg.x_a, cfg.width, cfg.spacing, fraction, cfg.include_endpoints).map_err(|e| WgiError::Config(format!("array: {e}")))
}

/// Solver certificate of one simulated wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedFile {
    pub path: PathBuf,
    pub k: f64,
    pub sensors: usize,
    pub max_residual: f64,
    pub reciprocity: f64,
    pub condition: f64,
    pub resonance_warning: bool,
}

/// One WGRM file per wavenumber over the full aperture, plus a sidecar with
/// the solver certificates. Partial apertures are cut at image time.
pub fn simulate(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<SimulatedFile>> {
    create_dir(out)?;
    let hash = cfg.hash();
    let geometry = WaveguideGeometry::new(cfg.width).map_err(|e| WgiError::Config(format!("width: {e}")))?;
    let obstacle =
        make_obstacle_with(&cfg.obstacles, &cfg.obstacle_options(), &geometry).map_err(WgiError::solver("building the obstacle"))?;
    let array = config_array(cfg, 1.0)?;
    let mut files = Vec::with_capacity(cfg.wavenumbers.len());
    for (i, &k) in cfg.wavenumbers.iter().enumerate() {
        let context = || format!("simulating k={k}");
        let modes = cfg.modes(k).map_err(WgiError::solver(context()))?;
        let solver = MfsSolver::new(&obstacle, &modes, SolverOptions::default()).map_err(WgiError::solver(context()))?;
        let (u, report) = solver.response_matrix(&array).map_err(WgiError::solver(context()))?;
        let path = out.join(response_file_name(i));
        save_response(&path, &u, Some(&hash))?;
        files.push(SimulatedFile {
            path,
            k,
            sensors: u.len(),
            max_residual: report.max_residual,
            reciprocity: u.reciprocity_defect(),
            condition: report.condition,
            resonance_warning: report.resonance_warning,
        });
    }
    let mut text = format!("# config={hash}\n");
    for f in &files {
        let name = f.path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let _ = writeln!(
            text,
            "{name} k={:.16e} sensors={} max_residual={:.3e} reciprocity={:.3e} condition={:.3e} resonance_warning={}",
            f.k, f.sensors, f.max_residual, f.reciprocity, f.condition, f.resonance_warning
        );
    }
    write_atomic(&out.join(SIMULATE_REPORT), text.as_bytes())?;
    Ok(files)
}

/// Adapts loaded data to the configured array: the geometry must agree, and
/// full-aperture data is cut down to a smaller configured aperture.
fn match_array(u: ResponseMatrix, cfg: &ScenarioConfig, path: &Path) -> Result<ResponseMatrix> {
    let a = &u.array;
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * y.abs().max(1.0);
    if !close(a.x_a(), cfg.x_a) || !close(a.width(), cfg.width) || !close(a.spacing(), cfg.spacing) {
        return Err(WgiError::Mismatch(format!("{}: array geometry differs from the config", path.display())));
    }
    if a.include_endpoints() != cfg.include_endpoints {
        return Err(WgiError::Mismatch(format!("{}: wall sensor setting differs from the config", path.display())));
    }
    if close(a.aperture_fraction(), cfg.aperture_fraction) {
        return Ok(u);
    }
    if a.aperture_fraction() > cfg.aperture_fraction {
        return u.restrict_aperture(cfg.aperture_fraction).map_err(WgiError::solver("restricting the aperture"));
    }
    Err(WgiError::Mismatch(format!(
        "{}: aperture {} is smaller than the configured {}",
        path.display(),
        a.aperture_fraction(),
        cfg.aperture_fraction
    )))
}

/// Scores of one written image.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRecord {
    pub path: PathBuf,
    pub image: ImageGrid,
    /// `None` for multifrequency images.
    pub wavenumber: Option<f64>,
    pub argmax: Point,
    pub peak_to_sidelobe: f64,
    /// `(threshold, centroid of the mask)`.
    pub centroids: Vec<(f64, Option<Point>)>,
    /// Grid points without a discrepancy root; factorization only.
    pub no_root: usize,
}

fn record(cfg: &ScenarioConfig, path: PathBuf, image: ImageGrid, wavenumber: Option<f64>, no_root: usize) -> ImageRecord {
    let centroids = cfg.thresholds.iter().map(|&t| (t, mask_centroid(&image.spec, &threshold_support(&image, t)))).collect();
    ImageRecord {
        path,
        argmax: image.argmax(),
        peak_to_sidelobe: peak_to_sidelobe(&image, SIDELOBE_RADIUS * cfg.width),
        image,
        wavenumber,
        centroids,
        no_root,
    }
}

/// Images every configured method at every wavenumber, then the
/// multifrequency migration images when there is more than one wavenumber.
///
/// `data` lists one response file per configured wavenumber; when empty the
/// files written by [`simulate`] into `out` are used. Noise, when
/// configured, is seeded with `seed + index` for the index-th wavenumber.
pub fn image(cfg: &ScenarioConfig, data: &[PathBuf], out: &Path, pgm: bool) -> Result<Vec<ImageRecord>> {
    create_dir(out)?;
    let hash = cfg.hash();
    let data: Vec<PathBuf> =
        if data.is_empty() { (0..cfg.wavenumbers.len()).map(|i| out.join(response_file_name(i))).collect() } else { data.to_vec() };
    if data.len() != cfg.wavenumbers.len() {
        return Err(WgiError::Mismatch(format!("{} data files for {} wavenumbers", data.len(), cfg.wavenumbers.len())));
    }
    let eps = cfg.epsilon_or_default();
    let mut records = Vec::new();
    let mut per_method: Vec<(Method, Vec<ImageGrid>)> = cfg.methods.iter().map(|&m| (m, Vec::new())).collect();
    let write = |img: &ImageGrid, name: String| -> Result<PathBuf> {
        let path = out.join(name);
        save_image(&path, img, Some(&hash))?;
        if pgm {
            save_pgm(&path.with_extension("pgm"), img)?;
        }
        Ok(path)
    };

    for (i, (&k, path)) in cfg.wavenumbers.iter().zip(&data).enumerate() {
        let u = load_response(path)?;
        expect_wavenumber(&u, k, path)?;
        let u = match_array(u, cfg, path)?;
        let u = add_noise(&u, cfg.sigma_pct, cfg.seed.wrapping_add(i as u64));
        let context = || format!("imaging k={k}");
        let modes = cfg.modes(k).map_err(WgiError::solver(context()))?;
        let needs_modes = cfg.methods.iter().any(|m| matches!(m, Method::Factorization | Method::MigSharp));
        let mode_data = if !needs_modes {
            None
        } else {
            let p = if u.array.is_full_aperture() { project_to_modes(&u, &modes) } else { complete_partial_aperture(&u, &modes) }
                .map_err(WgiError::solver(context()))?;
            let sharp = sharpen_with(&build_far_field(&p), cfg.sharp_variant).map_err(WgiError::solver(context()))?;
            let projector = if cfg.project_null_space {
                Some(svd_diagnostics(&p, cfg.rank_tol).map_err(WgiError::solver(context()))?.range_projector())
            } else {
                None
            };
            Some((sharp, projector))
        };
        for (method, images) in per_method.iter_mut() {
            let (img, no_root) = match (*method, &mode_data) {
                (Method::Factorization, Some((sharp, _))) => {
                    let f = factorization_image(sharp, &cfg.grid, eps).map_err(WgiError::solver(context()))?;
                    let n = f.no_root_count();
                    (f.image, n)
                }
                (Method::MigSharp, Some((sharp, projector))) => {
                    (migration_sharp_image(sharp, &cfg.grid, projector.as_ref()).map_err(WgiError::solver(context()))?, 0)
                }
                (Method::Mig, _) => (migration_image(&u, &cfg.grid, &modes, cfg.mig_sign).map_err(WgiError::solver(context()))?, 0),
                (m, _) => return Err(WgiError::Config(format!("methods: `{m}` cannot be imaged from data"))),
            };
            let path = write(&img, image_file_name(*method, Some(i)))?;
            records.push(record(cfg, path, img.clone(), Some(k), no_root));
            images.push(img);
        }
    }

    if cfg.wavenumbers.len() > 1 {
        for (method, images) in &per_method {
            if method.multi() == *method {
                continue;
            }
            let img = multifrequency_combine(images).map_err(WgiError::solver("combining frequencies"))?;
            let path = write(&img, image_file_name(img.method, None))?;
            records.push(record(cfg, path, img, None, 0));
        }
    }

    let mut text = format!("# config={hash}\n");
    for r in &records {
        let name = r.path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let _ = write!(text, "{name} method={} argmax=({}, {}) psr={:.6}", r.image.method, r.argmax.x, r.argmax.xp, r.peak_to_sidelobe);
        for (t, c) in &r.centroids {
            match c {
                Some(c) => {
                    let _ = write!(text, " centroid@{t}=({}, {})", c.x, c.xp);
                }
                None => {
                    let _ = write!(text, " centroid@{t}=none");
                }
            }
        }
        if r.image.method == Method::Factorization {
            let _ = write!(text, " no_root={}", r.no_root);
        }
        text.push('\n');
    }
    write_atomic(&out.join(IMAGE_SUMMARY), text.as_bytes())?;
    Ok(records)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelReport {
    pub k0_path: PathBuf,
    pub k_path: PathBuf,
    pub z: Point,
    pub k0_argmax: Point,
    pub k_argmax: Point,
    /// Grid points with normalized value above one half.
    pub k0_above_half: usize,
    pub k_above_half: usize,
}

/// `|K_0(., z)|` and `|K(., z)|` over the configured grid at the first
/// wavenumber.
pub fn kernels(cfg: &ScenarioConfig, z: Point, out: &Path) -> Result<KernelReport> {
    create_dir(out)?;
    let hash = cfg.hash();
    let g = &cfg.grid;
    if !(z.x >= g.x_range.0 && z.x <= g.x_range.1 && z.xp >= g.xp_range.0 && z.xp <= g.xp_range.1) {
        return Err(WgiError::Config(format!("kernel_point: ({}, {}) lies outside the imaging grid", z.x, z.xp)));
    }
    let k = cfg.wavenumbers[0];
    let context = format!("kernels at ({}, {}), k={k}", z.x, z.xp);
    let modes = cfg.modes(k).map_err(WgiError::solver(context.clone()))?;
    let (k0, kk) = kernel_grids(z, g, &modes).map_err(WgiError::solver(context))?;
    let above = |img: &ImageGrid| img.values.iter().filter(|&&v| v > 0.5).count();
    let k0_path = out.join(image_file_name(Method::KernelK0, None));
    let k_path = out.join(image_file_name(Method::KernelK, None));
    save_image(&k0_path, &k0, Some(&hash))?;
    save_image(&k_path, &kk, Some(&hash))?;
    Ok(KernelReport {
        k0_path,
        k_path,
        z,
        k0_argmax: k0.argmax(),
        k_argmax: kk.argmax(),
        k0_above_half: above(&k0),
        k_above_half: above(&kk),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub pearson: f64,
    pub argmax_distance: f64,
    /// `(threshold, Jaccard index)`.
    pub jaccard: Vec<(f64, f64)>,
}

impl std::fmt::Display for CompareReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "pearson={:.6} argmax_distance={:.6}", self.pearson, self.argmax_distance)?;
        for (t, j) in &self.jaccard {
            write!(f, " jaccard@{t}={j:.6}")?;
        }
        Ok(())
    }
}

pub fn compare_images(cfg: &ScenarioConfig, a: &ImageGrid, b: &ImageGrid) -> Result<CompareReport> {
    let mismatch = |e: wgi_core::Error| WgiError::Mismatch(e.to_string());
    let jaccard = cfg
        .thresholds
        .iter()
        .map(|&t| Ok((t, jaccard(&threshold_support(a, t), &threshold_support(b, t)).map_err(mismatch)?)))
        .collect::<Result<_>>()?;
    Ok(CompareReport { pearson: pearson(a, b).map_err(mismatch)?, argmax_distance: argmax_distance(a, b).map_err(mismatch)?, jaccard })
}

pub fn compare(cfg: &ScenarioConfig, a: &Path, b: &Path) -> Result<CompareReport> {
    compare_images(cfg, &load_image(a)?, &load_image(b)?)
}
