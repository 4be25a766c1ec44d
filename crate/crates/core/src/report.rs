//! Parameter scans and planar tables, with their CSV and JSON encodings.
//!
//! Floats are written with 17 significant digits and rows are ordered by α,
//! so equal inputs give byte-identical files whatever the worker count.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::ConstructedScene;
use crate::dynamics::{classify_alpha, reduced_beta, IterationConfig};
use crate::error::{Error, Result};
use crate::planar::{phi, planar_fixed_point_closed_form, planar_residual};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SCAN_COLUMNS: [&str; 10] = [
    "alpha",
    "beta",
    "class",
    "residual",
    "iterations",
    "x",
    "y",
    "z",
    "expected_member",
    "agree",
];

pub const PLANAR_COLUMNS: [&str; 7] = ["alpha", "beta", "phi", "u_x", "u_y", "residual", "note"];

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// `lo, lo + step, …` up to `hi`, with each value snapped to 12 decimals so
/// that grid points such as 0.4 are the nearest doubles to their decimal
/// form.
pub fn alpha_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(Error::contract(format!("alpha range [{lo}, {hi}] must lie in [0, 1]")));
    }
    if !(step > 0.0) {
        return Err(Error::contract("alpha step must be positive"));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
        .map(|a| a.clamp(0.0, 1.0))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub k: u32,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
    pub iteration: IterationConfig,
    /// Worker threads; `None` uses the global pool.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            k: 3,
            alpha_min: 0.0,
            alpha_max: 1.0,
            alpha_step: 0.01,
            iteration: IterationConfig::default(),
            workers: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanMeta {
    pub spec_hash: String,
    pub k: u32,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
    pub config: IterationConfig,
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub beta: f64,
    pub class: String,
    pub residual: f64,
    pub iterations: usize,
    pub point: Option<[f64; 3]>,
    pub expected_member: bool,
    pub agree: bool,
    /// Within one grid step of a level boundary; ignored by the exit code.
    pub in_collar: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub meta: ScanMeta,
    pub rows: Vec<ScanRow>,
}

fn in_collar(alpha: f64, boundary: &[f64], step: f64) -> bool {
    boundary.iter().any(|b| (alpha - b).abs() <= step * (1.0 + 1e-9))
}

/// Classifies every α of the grid, in parallel.
pub fn run_scan(scene: &ConstructedScene, cfg: &ScanConfig) -> Result<ScanReport> {
    cfg.iteration.validate()?;
    reduced_beta(0.0, cfg.k)?;
    let alphas = alpha_grid(cfg.alpha_min, cfg.alpha_max, cfg.alpha_step)?;
    let boundary = scene.spec().boundary_points();

    let classify = |alpha: f64| -> Result<ScanRow> {
        let beta = reduced_beta(alpha, cfg.k)?;
        let out = classify_alpha(scene, alpha, cfg.k, &cfg.iteration)?;
        let expected_member = scene.spec().contains(alpha);
        let point = out.class.point().map(|p| [p[0], p[1], p[2]]);
        Ok(ScanRow {
            alpha,
            beta,
            class: out.class.label().to_string(),
            residual: out.class.residual(),
            iterations: out.class.iterations(),
            point,
            expected_member,
            agree: out.class.is_exists() == expected_member,
            in_collar: in_collar(alpha, &boundary, cfg.alpha_step),
        })
    };

    let rows: Result<Vec<ScanRow>> = match cfg.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::contract(format!("cannot start worker pool: {e}")))?;
            pool.install(|| alphas.par_iter().map(|&a| classify(a)).collect())
        }
        None => alphas.par_iter().map(|&a| classify(a)).collect(),
    };
    let mut rows = rows?;
    rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));

    Ok(ScanReport {
        meta: ScanMeta {
            spec_hash: scene.spec().hash(),
            k: cfg.k,
            alpha_min: cfg.alpha_min,
            alpha_max: cfg.alpha_max,
            alpha_step: cfg.alpha_step,
            config: cfg.iteration,
            tool_version: TOOL_VERSION.to_string(),
        },
        rows,
    })
}

impl ScanReport {
    /// Rows outside the collar whose class disagrees with membership.
    pub fn disagreements(&self) -> Vec<&ScanRow> {
        self.rows.iter().filter(|r| !r.agree && !r.in_collar).collect()
    }

    /// 0 when every row outside the collar agrees, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.disagreements().is_empty() {
            0
        } else {
            2
        }
    }

    pub fn to_csv(&self) -> String {
        let m = &self.meta;
        let mut out = String::new();
        let _ = writeln!(out, "# tool_version={}", m.tool_version);
        let _ = writeln!(out, "# spec_hash={}", m.spec_hash);
        let _ = writeln!(out, "# k={}", m.k);
        let _ = writeln!(
            out,
            "# grid=alpha_min:{},alpha_max:{},alpha_step:{}",
            fmt_f64(m.alpha_min),
            fmt_f64(m.alpha_max),
            fmt_f64(m.alpha_step)
        );
        let _ = writeln!(
            out,
            "# config=max_iters:{},eps_fix:{},z_max:{},drift_window:{}",
            m.config.max_iters,
            fmt_f64(m.config.eps_fix),
            fmt_f64(m.config.z_max),
            m.config.drift_window
        );
        out.push_str(&SCAN_COLUMNS.join(","));
        out.push('\n');
        for r in &self.rows {
            let (x, y, z) = match r.point {
                Some([x, y, z]) => (fmt_f64(x), fmt_f64(y), fmt_f64(z)),
                None => Default::default(),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                fmt_f64(r.alpha),
                fmt_f64(r.beta),
                r.class,
                fmt_f64(r.residual),
                r.iterations,
                x,
                y,
                z,
                r.expected_member,
                r.agree
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable") + "\n"
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool_version: &'a str,
    spec_hash: String,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON of `body` with the tool version and spec hash added at the top level.
pub fn json_report<T: Serialize>(scene: &ConstructedScene, body: &T) -> String {
    let env = Envelope {
        tool_version: TOOL_VERSION,
        spec_hash: scene.spec().hash(),
        body,
    };
    serde_json::to_string_pretty(&env).expect("report is always serializable") + "\n"
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarRow {
    pub alpha: f64,
    pub beta: f64,
    pub phi: f64,
    pub u: Option<[f64; 2]>,
    pub residual: Option<f64>,
    pub note: String,
}

/// One row per grid α with `β = 1`. At `α = 0` the composition is the
/// identity and `u` is left blank.
pub fn planar_table(alpha_step: f64) -> Result<Vec<PlanarRow>> {
    alpha_grid(0.0, 1.0, alpha_step)?
        .into_iter()
        .map(|alpha| {
            let phi = phi(alpha)?;
            if alpha == 0.0 {
                return Ok(PlanarRow {
                    alpha,
                    beta: 1.0,
                    phi,
                    u: None,
                    residual: None,
                    note: "identity map; every point is fixed".into(),
                });
            }
            let fp = planar_fixed_point_closed_form(alpha, 1.0)?;
            Ok(PlanarRow {
                alpha,
                beta: 1.0,
                phi,
                u: Some([fp.u[0], fp.u[1]]),
                residual: Some(planar_residual(alpha, 1.0, &fp.u)?),
                note: String::new(),
            })
        })
        .collect()
}

pub fn planar_csv(rows: &[PlanarRow]) -> String {
    let mut out = PLANAR_COLUMNS.join(",") + "\n";
    for r in rows {
        let (ux, uy) = match r.u {
            Some([x, y]) => (fmt_f64(x), fmt_f64(y)),
            None => Default::default(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(r.alpha),
            fmt_f64(r.beta),
            fmt_f64(r.phi),
            ux,
            uy,
            r.residual.map(fmt_f64).unwrap_or_default(),
            r.note
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{FSigmaSpec, IntervalUnion};

    #[test]
    fn grid_hits_decimal_points() {
        let g = alpha_grid(0.0, 1.0, 0.01).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[40], 0.4);
        assert_eq!(g[100], 1.0);
        assert!(alpha_grid(0.5, 0.2, 0.1).is_err());
        assert!(alpha_grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn scan_is_worker_independent() {
        let spec = FSigmaSpec::closed(IntervalUnion::new(vec![(0.0, 0.0), (0.2, 0.4)]).unwrap()).unwrap();
        let scene = ConstructedScene::new(spec).unwrap();
        let mut cfg = ScanConfig {
            alpha_step: 0.05,
            workers: Some(1),
            ..ScanConfig::default()
        };
        let one = run_scan(&scene, &cfg).unwrap();
        cfg.workers = Some(4);
        let four = run_scan(&scene, &cfg).unwrap();
        assert_eq!(one.to_csv(), four.to_csv());
        assert_eq!(one.exit_code(), 0);
        assert!(one.rows.iter().find(|r| r.alpha == 0.3).unwrap().point.is_some());
    }

    #[test]
    fn planar_rows() {
        let rows = planar_table(0.5).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].u.is_none() && !rows[0].note.is_empty());
        assert_eq!(rows[2].phi, 0.0);
        assert_eq!(rows[2].u, Some([0.0, 0.0]));
        let csv = planar_csv(&rows);
        assert!(csv.starts_with("alpha,beta,phi,u_x,u_y,residual,note\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
