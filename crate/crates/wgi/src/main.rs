use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wgi::commands;
use wgi::config::{parse_methods, parse_number};
use wgi::{Result, ScenarioConfig, WgiError};
use wgi_core::Point;

/// Simulate array data in a terminated waveguide and image the scatterers.
#[derive(Parser)]
#[command(name = "wgi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Noise seed, overriding `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated method tags, overriding `methods`.
    #[arg(long)]
    method: Option<String>,
    /// Comma-separated mask thresholds, overriding `thresholds`.
    #[arg(long)]
    threshold: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the forward problem and write one response file per wavenumber.
    Simulate(Common),
    /// Image from response files (those in the output directory by default).
    Image {
        #[command(flatten)]
        common: Common,
        /// Also write PGM previews.
        #[arg(long)]
        pgm: bool,
        /// Response files, one per configured wavenumber in order.
        data: Vec<PathBuf>,
    },
    /// Write the backpropagation kernel grids around one point.
    Kernels {
        #[command(flatten)]
        common: Common,
        /// `x,xp`, overriding `kernel_point`.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
    },
    /// Compare two image files.
    Compare {
        #[command(flatten)]
        common: Common,
        a: PathBuf,
        b: PathBuf,
    },
}

fn load(c: &Common) -> Result<ScenarioConfig> {
    let mut cfg = match &c.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(out) = &c.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(m) = &c.method {
        cfg.methods = parse_methods(m)?;
    }
    if let Some(t) = &c.threshold {
        cfg.thresholds = t
            .split(',')
            .map(|s| parse_number(s).ok_or_else(|| WgiError::Config(format!("--threshold: `{s}` is not a number"))))
            .collect::<Result<_>>()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(c) => {
            let cfg = load(&c)?;
            for f in commands::simulate(&cfg, &cfg.output_dir)? {
                println!(
                    "{} k={} max_residual={:.3e} reciprocity={:.3e}{}",
                    f.path.display(),
                    f.k,
                    f.max_residual,
                    f.reciprocity,
                    if f.resonance_warning { " (near resonance)" } else { "" }
                );
            }
        }
        Command::Image { common, pgm, data } => {
            let cfg = load(&common)?;
            for r in commands::image(&cfg, &data, &cfg.output_dir, pgm)? {
                println!("{} argmax=({:.4}, {:.4}) psr={:.3}", r.path.display(), r.argmax.x, r.argmax.xp, r.peak_to_sidelobe);
            }
        }
        Command::Kernels { common, z } => {
            let cfg = load(&common)?;
            let z = match z {
                Some(s) => match s.split(',').map(parse_number).collect::<Option<Vec<_>>>().as_deref() {
                    Some(&[x, xp]) => Point::new(x, xp),
                    _ => return Err(WgiError::Config(format!("--z: expected `x,xp`, found `{s}`"))),
                },
                None => cfg.kernel_point,
            };
            let r = commands::kernels(&cfg, z, &cfg.output_dir)?;
            println!("{} argmax=({:.4}, {:.4}) above_half={}", r.k0_path.display(), r.k0_argmax.x, r.k0_argmax.xp, r.k0_above_half);
            println!("{} argmax=({:.4}, {:.4}) above_half={}", r.k_path.display(), r.k_argmax.x, r.k_argmax.xp, r.k_above_half);
        }
        Command::Compare { common, a, b } => {
            let cfg = load(&common)?;
            println!("{}", commands::compare(&cfg, &a, &b)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wgi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
