//! Grid checks of the four properties the construction relies on:
//! `f >= x²`, convexity, agreement of the analytic derivatives with finite
//! differences, and `∂f/∂z < 0` away from the graph of `x²`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ConstructedScene;
use crate::error::{Error, Result};
use crate::geometry::Jet;

pub const LOWER_BOUND_TOL: f64 = 1e-12;
pub const EIGEN_TOL: f64 = 1e-9;
pub const FD_REL_TOL: f64 = 1e-5;
pub const EXCESS_THRESHOLD: f64 = 1e-6;
const FD_STEP: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub z_max: f64,
    pub nz: usize,
}

impl Default for VerifyGrid {
    fn default() -> Self {
        Self {
            x_min: -1.5,
            x_max: 2.5,
            nx: 200,
            z_max: 5.0,
            nz: 100,
        }
    }
}

impl VerifyGrid {
    /// Grid over the default box with the given spacings.
    pub fn from_steps(dx: f64, dz: f64) -> Result<Self> {
        if !(dx > 0.0 && dz > 0.0) {
            return Err(Error::contract("grid steps must be positive"));
        }
        let d = Self::default();
        Ok(Self {
            nx: ((d.x_max - d.x_min) / dx).round() as usize + 1,
            nz: (d.z_max / dz).round() as usize + 1,
            ..d
        })
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.nz < 2 || !(self.x_min < self.x_max) || !(self.z_max > 0.0) {
            return Err(Error::contract("verification grid needs at least 2x2 points over a non-empty box"));
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * i as f64 / (self.nx - 1) as f64
    }

    pub fn z(&self, j: usize) -> f64 {
        self.z_max * j as f64 / (self.nz - 1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub threshold: f64,
    /// `(x, z)` where the worst value occurred.
    pub at: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub grid: VerifyGrid,
    pub tol: f64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    /// First sample point of the first failed check.
    pub failing_point: Option<[f64; 2]>,
}

impl ConstructionReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Sample {
    at: [f64; 2],
    excess: f64,
    min_eig: f64,
    fd_err: f64,
    /// `∂f/∂z` where the excess is above the threshold.
    fz: Option<f64>,
}

fn min_eigenvalue(h: &[[f64; 2]; 2]) -> f64 {
    let mean = 0.5 * (h[0][0] + h[1][1]);
    let half = 0.5 * (h[0][0] - h[1][1]);
    mean - half.hypot(h[0][1])
}

fn rel(fd: f64, an: f64) -> f64 {
    (fd - an).abs() / an.abs().max(1.0)
}

/// Derivative along one coordinate; one-sided second order at the `z = 0` edge.
fn diff<T>(eval: impl Fn(f64) -> T, t: f64, one_sided: bool, pick: impl Fn(&T) -> f64) -> f64 {
    let h = FD_STEP;
    if one_sided {
        (-3.0 * pick(&eval(t)) + 4.0 * pick(&eval(t + h)) - pick(&eval(t + 2.0 * h))) / (2.0 * h)
    } else {
        (pick(&eval(t + h)) - pick(&eval(t - h))) / (2.0 * h)
    }
}

fn sample(scene: &ConstructedScene, x: f64, z: f64, tol: f64) -> Sample {
    let f = scene.function();
    let jet_at = |x: f64, z: f64| -> Jet { f.eval(x, z, tol).jet };
    let jet = jet_at(x, z);
    let excess = jet.value - x * x;
    let edge = z < FD_STEP;

    let fd_fx = diff(|t| jet_at(t, z), x, false, |j| j.value);
    let fd_fz = diff(|t| jet_at(x, t), z, edge, |j| j.value);
    let fd_xx = diff(|t| jet_at(t, z), x, false, |j| j.grad[0]);
    let fd_zx = diff(|t| jet_at(t, z), x, false, |j| j.grad[1]);
    let fd_xz = diff(|t| jet_at(x, t), z, edge, |j| j.grad[0]);
    let fd_zz = diff(|t| jet_at(x, t), z, edge, |j| j.grad[1]);

    let fd_err = [
        rel(fd_fx, jet.grad[0]),
        rel(fd_fz, jet.grad[1]),
        rel(fd_xx, jet.hess[0][0]),
        rel(fd_zx, jet.hess[1][0]),
        rel(fd_xz, jet.hess[0][1]),
        rel(fd_zz, jet.hess[1][1]),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    Sample {
        at: [x, z],
        excess,
        min_eig: min_eigenvalue(&jet.hess),
        fd_err,
        fz: (excess > EXCESS_THRESHOLD).then_some(jet.grad[1]),
    }
}

fn worst_by(samples: &[Sample], key: impl Fn(&Sample) -> Option<f64>, larger_is_worse: bool) -> (f64, Option<[f64; 2]>) {
    let mut best: Option<(f64, [f64; 2])> = None;
    for s in samples {
        if let Some(v) = key(s) {
            let worse = match best {
                None => true,
                Some((b, _)) => {
                    if larger_is_worse {
                        v > b
                    } else {
                        v < b
                    }
                }
            };
            if worse {
                best = Some((v, s.at));
            }
        }
    }
    match best {
        Some((v, at)) => (v, Some(at)),
        None => (f64::NAN, None),
    }
}

/// Runs every check on the grid. Failures are reported, not raised.
pub fn verify_construction(scene: &ConstructedScene, grid: &VerifyGrid, tol: f64) -> Result<ConstructionReport> {
    grid.validate()?;
    if !(tol > 0.0) {
        return Err(Error::contract("truncation tolerance must be positive"));
    }
    let samples: Vec<Sample> = (0..grid.nx * grid.nz)
        .into_par_iter()
        .map(|k| sample(scene, grid.x(k / grid.nz), grid.z(k % grid.nz), tol))
        .collect();

    let mut checks = Vec::new();

    let (worst, at) = worst_by(&samples, |s| Some(s.excess), false);
    checks.push(CheckResult {
        name: "lower_bound".into(),
        passed: worst >= -LOWER_BOUND_TOL,
        worst,
        threshold: -LOWER_BOUND_TOL,
        at,
    });

    let (worst, at) = worst_by(&samples, |s| Some(s.min_eig), false);
    checks.push(CheckResult {
        name: "convexity".into(),
        passed: worst >= -EIGEN_TOL,
        worst,
        threshold: -EIGEN_TOL,
        at,
    });

    let (worst, at) = worst_by(&samples, |s| Some(s.fd_err), true);
    checks.push(CheckResult {
        name: "finite_differences".into(),
        passed: worst <= FD_REL_TOL,
        worst,
        threshold: FD_REL_TOL,
        at,
    });

    let (worst, at) = worst_by(&samples, |s| s.fz, true);
    checks.push(CheckResult {
        name: "z_decreasing".into(),
        // Vacuous when no sample lies above the threshold.
        passed: at.is_none() || worst < 0.0,
        worst,
        threshold: 0.0,
        at,
    });

    let failing_point = checks.iter().find(|c| !c.passed).and_then(|c| c.at);
    Ok(ConstructionReport {
        grid: *grid,
        tol,
        passed: checks.iter().all(|c| c.passed),
        checks,
        failing_point,
    })
}
