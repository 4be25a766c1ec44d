//! `fixscan`: scans, construction checks, planar tables and closedness probes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fixscan_core::analysis::{alpha_sequence, fr_closedness_probe};
use fixscan_core::construction::{verify_construction, CoefficientRule, ConstructedScene, FSigmaSpec, VerifyGrid};
use fixscan_core::dynamics::IterationConfig;
use fixscan_core::report::{json_report, planar_csv, planar_table, run_scan, ScanConfig};

#[derive(Parser)]
#[command(name = "fixscan", version, about = "Fixed points of relaxed-projection compositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a grid of relaxation coefficients for the scene built from a spec.
    Scan {
        #[arg(long)]
        spec: PathBuf,
        /// Number of relaxed projections in the composition (at least 3).
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long, default_value_t = 0.0)]
        alpha_min: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha_max: f64,
        #[arg(long, default_value_t = 0.01)]
        alpha_step: f64,
        #[arg(long, default_value_t = 1e-9)]
        eps_fix: f64,
        #[arg(long, default_value_t = 200_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e6)]
        z_max: f64,
        #[arg(long, default_value_t = 50)]
        drift_window: usize,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Worker threads (default: one per core).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Grid-check the series function of the scene: lower bound, convexity,
    /// derivatives against finite differences, and decrease in z.
    VerifyConstruction {
        #[arg(long)]
        spec: PathBuf,
        /// Grid spacing in x over [-1.5, 2.5] (default: 200 points).
        #[arg(long)]
        grid_x: Option<f64>,
        /// Grid spacing in z over [0, 5] (default: 100 points).
        #[arg(long)]
        grid_z: Option<f64>,
        #[arg(long, default_value_t = 1e-15)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true, default_value_t = 1.0)]
        coefficient_scale: f64,
    },
    /// Table of the planar fixed points with beta = 1.
    Planar {
        #[arg(long, default_value_t = 0.05)]
        alpha_step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Follow alpha_n = alpha0 + rate/n and check that the limit keeps a
    /// fixed point of norm at most r.
    ClosednessProbe {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        alpha0: f64,
        #[arg(long, allow_negative_numbers = true)]
        rate: f64,
        #[arg(long, default_value_t = 10)]
        terms: usize,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_spec(path: &Path) -> Result<FSigmaSpec, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read spec {}: {e}", path.display()))?;
    FSigmaSpec::from_json(&text).map_err(|e| format!("spec {}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Scan {
            spec,
            k,
            alpha_min,
            alpha_max,
            alpha_step,
            eps_fix,
            max_iters,
            z_max,
            drift_window,
            out,
            format,
            workers,
        } => {
            let scene = ConstructedScene::new(load_spec(&spec)?).map_err(|e| e.to_string())?;
            let cfg = ScanConfig {
                k,
                alpha_min,
                alpha_max,
                alpha_step,
                iteration: IterationConfig {
                    max_iters,
                    eps_fix,
                    z_max,
                    drift_window,
                    ..IterationConfig::default()
                },
                workers,
            };
            let report = run_scan(&scene, &cfg).map_err(|e| e.to_string())?;
            let text = match format {
                Format::Csv => report.to_csv(),
                Format::Json => report.to_json(),
            };
            emit(out.as_deref(), &text)?;
            for r in report.disagreements() {
                eprintln!("disagreement at alpha={}: class {}, expected member {}", r.alpha, r.class, r.expected_member);
            }
            Ok(report.exit_code() as u8)
        }
        Command::VerifyConstruction {
            spec,
            grid_x,
            grid_z,
            tol,
            out,
            coefficient_scale,
        } => {
            let rule = CoefficientRule::scaled(coefficient_scale);
            let scene = ConstructedScene::with_rule(load_spec(&spec)?, rule).map_err(|e| e.to_string())?;
            let d = VerifyGrid::default();
            let grid = VerifyGrid::from_steps(
                grid_x.unwrap_or((d.x_max - d.x_min) / (d.nx - 1) as f64),
                grid_z.unwrap_or(d.z_max / (d.nz - 1) as f64),
            )
            .map_err(|e| e.to_string())?;
            let report = verify_construction(&scene, &grid, tol).map_err(|e| e.to_string())?;
            emit(out.as_deref(), &json_report(&scene, &report))?;
            if let Some([x, z]) = report.failing_point {
                eprintln!("verification failed at x={x}, z={z}");
            }
            Ok(if report.passed { 0 } else { 2 })
        }
        Command::Planar { alpha_step, out } => {
            let rows = planar_table(alpha_step).map_err(|e| e.to_string())?;
            emit(out.as_deref(), &planar_csv(&rows))?;
            Ok(0)
        }
        Command::ClosednessProbe {
            spec,
            alpha0,
            rate,
            terms,
            r,
            k,
            out,
        } => {
            let scene = ConstructedScene::new(load_spec(&spec)?).map_err(|e| e.to_string())?;
            if !(0.0..=1.0).contains(&alpha0) || terms == 0 {
                return Err("alpha0 must lie in [0, 1] and terms must be positive".into());
            }
            let alphas = alpha_sequence(alpha0, rate, terms);
            let report = fr_closedness_probe(&scene, &alphas, alpha0, k, r, &IterationConfig::default())
                .map_err(|e| e.to_string())?;
            emit(out.as_deref(), &json_report(&scene, &report))?;
            if !report.precondition_ok {
                eprintln!("precondition failed at sequence indices {:?}", report.precondition_failures);
            }
            Ok(if report.confirmed { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
