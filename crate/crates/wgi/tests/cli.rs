//! The `wgi` binary on a small scenario: outputs, determinism and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use wgi::formats::load_response;
use wgi::ScenarioConfig;

/// One circle, ten modes, 21 sensors, coarse grid: seconds per run.
const SMALL: &str = "\
# small smoke-test scenario
wavenumbers = 9.15pi
spacing = 1/20
obstacles = circle(-1, 0.5, 0.1)
grid_nx = 20
grid_nxp = 15
sigma_pct = 10
seed = 5
thresholds = 0.5, 0.8
";

fn wgi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgi")).args(args).output().expect("run wgi")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.cfg");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn run_ok(args: &[&str]) -> String {
    let out = wgi(args);
    assert!(out.status.success(), "wgi {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn simulate_and_image(dir: &Path, config: &str) {
    let out = dir.to_str().unwrap();
    run_ok(&["simulate", "--config", config, "--out", out]);
    run_ok(&["image", "--config", config, "--out", out]);
}

#[test]
fn runs_are_bit_identical_and_carry_the_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    simulate_and_image(&a, &config);
    simulate_and_image(&b, &config);

    let hash = ScenarioConfig::parse(SMALL).unwrap().hash();
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let expected = ["factorization_k00.wgig", "mig_k00.wgig", "mig_sharp_k00.wgig", "response_k00.wgrm", "simulate_report.txt", "summary.txt"];
    assert_eq!(names.iter().map(|n| n.to_str().unwrap()).collect::<Vec<_>>(), expected);
    for name in &names {
        let (x, y) = (fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
        assert!(x == y, "{name:?} differs between runs");
        let text = String::from_utf8(x).unwrap();
        assert!(text.lines().any(|l| l == format!("# config={hash}")), "{name:?} lacks the config hash");
    }
    let report = fs::read_to_string(a.join("simulate_report.txt")).unwrap();
    let residual: f64 = report.split("max_residual=").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!(residual < 1e-6);
    let summary = fs::read_to_string(a.join("summary.txt")).unwrap();
    assert!(summary.contains("centroid@0.8=") && summary.contains("psr="));
}

#[test]
fn seed_override_changes_noisy_images_only() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    simulate_and_image(&a, &config);
    fs::create_dir_all(&b).unwrap();
    fs::copy(a.join("response_k00.wgrm"), b.join("response_k00.wgrm")).unwrap();
    run_ok(&["image", "--config", &config, "--out", b.to_str().unwrap(), "--seed", "6", "--method", "mig"]);
    assert!(!b.join("factorization_k00.wgig").exists());
    assert_ne!(fs::read(a.join("mig_k00.wgig")).unwrap(), fs::read(b.join("mig_k00.wgig")).unwrap());
}

#[test]
fn compare_against_itself() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SMALL);
    simulate_and_image(tmp.path(), &config);
    let img = tmp.path().join("mig_k00.wgig");
    let img = img.to_str().unwrap();
    let line = run_ok(&["compare", "--config", &config, img, img]);
    assert_eq!(line.trim(), "pearson=1.000000 argmax_distance=0.000000 jaccard@0.5=1.000000 jaccard@0.8=1.000000");
    let line = run_ok(&["compare", "--config", &config, "--threshold", "0.3", img, img]);
    assert!(line.trim().ends_with("jaccard@0.3=1.000000"));
}

#[test]
fn empty_obstacle_gives_a_zero_matrix() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), &SMALL.replace("circle(-1, 0.5, 0.1)", "none"));
    run_ok(&["simulate", "--config", &config, "--out", tmp.path().to_str().unwrap()]);
    let u = load_response(&tmp.path().join("response_k00.wgrm")).unwrap();
    assert_eq!(u.len(), 21);
    assert!(u.entries.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn kernels_peak_at_the_point() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "wavenumbers = 9.15pi\ngrid_x_range = -1.5, -0.5\ngrid_xp_range = 0, 1\ngrid_nx = 21\ngrid_nxp = 21\n");
    let out = run_ok(&["kernels", "--config", &config, "--out", tmp.path().to_str().unwrap(), "--z", "-1,0.5"]);
    assert_eq!(out.matches("argmax=(-1.0000, 0.5000)").count(), 2, "{out}");
    assert!(tmp.path().join("kernel_k0.wgig").exists() && tmp.path().join("kernel_k.wgig").exists());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| wgi(args).status.code();

    let bad = write_config(tmp.path(), "colour = red\n");
    assert_eq!(code(&["simulate", "--config", &bad]), Some(2));
    assert_eq!(code(&["image", "--method", "music"]), Some(2));

    // A circle poking through the side wall cannot be discretized.
    let outside = write_config(tmp.path(), &SMALL.replace("circle(-1, 0.5, 0.1)", "circle(-1, 0.05, 0.1)"));
    assert_eq!(code(&["simulate", "--config", &outside, "--out", tmp.path().to_str().unwrap()]), Some(3));

    let config = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("run");
    run_ok(&["simulate", "--config", &config, "--out", out.to_str().unwrap()]);
    let other_k = write_config(tmp.path(), &SMALL.replace("9.15pi", "9.3pi"));
    assert_eq!(code(&["image", "--config", &other_k, "--out", out.to_str().unwrap()]), Some(4));
    let missing = tmp.path().join("nowhere.wgrm");
    assert_eq!(code(&["image", "--config", &config, "--out", out.to_str().unwrap(), missing.to_str().unwrap()]), Some(4));
}

#[test]
fn shipped_scenarios_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ScenarioConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 6);
}
