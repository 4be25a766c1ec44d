//! Projection onto `{(x, y, z) : z >= 0, y >= f(x, z)}` for a convex C² `f`.
//!
//! A point outside the set projects onto the graph `y = f(x, z)`, and the
//! foot `(x, z)` solves the stationarity system
//!
//! ```text
//! x = x_p - s ∂f/∂x,   z = z_p - s ∂f/∂z,   s = f(x, z) - y_p >= 0.
//! ```
//!
//! Its Jacobian is `I + ∇f ∇fᵀ + s ∇²f`, symmetric positive definite for
//! convex `f`, so damped Newton is well behaved. The constraint `z >= 0`
//! is handled with an explicit face solve on `z = 0` plus a multiplier check.

use super::cubic::parabola_foot;
use super::sets::{ConvexFunction, Jet};
use super::PointN;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpigraphSolverConfig {
    /// Accept when the stationarity residual norm is at most this.
    pub tol: f64,
    pub max_iters: usize,
    /// Keep iterating (cheaply, quadratic convergence) down to this residual.
    pub polish: f64,
}

impl Default for EpigraphSolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 100,
            polish: 1e-15,
        }
    }
}

/// Nearest point of the epigraph of `f` (over `z >= 0`) to `p`.
pub fn project_smooth_epigraph(f: &dyn ConvexFunction, p: &PointN) -> Result<PointN> {
    project_smooth_epigraph_with(f, p, &EpigraphSolverConfig::default())
}

pub fn project_smooth_epigraph_with(
    f: &dyn ConvexFunction,
    p: &PointN,
    cfg: &EpigraphSolverConfig,
) -> Result<PointN> {
    p.ensure_dim(3)?;
    let (xp, yp, zp) = (p[0], p[1], p[2]);

    if zp >= 0.0 && yp >= f.value(xp, zp) {
        return Ok(p.clone());
    }
    if zp < 0.0 && yp >= f.value(xp, 0.0) {
        return Ok(PointN::from([xp, yp, 0.0]));
    }

    // Warm start from the parabola foot: every function we project onto is
    // a perturbation of x².
    let x0 = parabola_foot(xp, yp);

    if zp < 0.0 {
        let (x, jet) = solve_face(f, xp, yp, x0, cfg)?;
        let s = (jet.value - yp).max(0.0);
        // Multiplier of z >= 0 must be non-negative.
        if s * jet.grad[1] - zp >= 0.0 {
            return Ok(PointN::from([x, jet.value, 0.0]));
        }
        let (x, z) = solve_interior(f, xp, yp, zp, x, 0.0, cfg)?;
        return Ok(finish(f, x, z, yp, zp));
    }

    let (x, z) = solve_interior(f, xp, yp, zp, x0, zp, cfg)?;
    Ok(finish(f, x, z, yp, zp))
}

/// Rebuilds the foot from the converged `x` so that `z` is given by the
/// stationarity formula itself. For `zp >= 0` and `∂f/∂z <= 0` this makes
/// the returned `z` never smaller than `zp` in floating point.
fn finish(f: &dyn ConvexFunction, x: f64, z: f64, yp: f64, zp: f64) -> PointN {
    let jet = f.jet(x, z);
    let s = (jet.value - yp).max(0.0);
    let z_out = (zp - s * jet.grad[1]).max(0.0);
    PointN::from([x, f.value(x, z_out), z_out])
}

fn interior_residual(jet: &Jet, x: f64, z: f64, xp: f64, yp: f64, zp: f64) -> [f64; 2] {
    let s = jet.value - yp;
    [x - xp + s * jet.grad[0], z - zp + s * jet.grad[1]]
}

fn norm2(r: [f64; 2]) -> f64 {
    r[0].hypot(r[1])
}

fn solve_interior(
    f: &dyn ConvexFunction,
    xp: f64,
    yp: f64,
    zp: f64,
    mut x: f64,
    mut z: f64,
    cfg: &EpigraphSolverConfig,
) -> Result<(f64, f64)> {
    let scale = 1.0 + xp.abs().max(zp.abs());
    let mut jet = f.jet(x, z);
    let mut r = interior_residual(&jet, x, z, xp, yp, zp);
    let mut rn = norm2(r);

    for _ in 0..cfg.max_iters {
        if rn <= cfg.polish * scale {
            break;
        }
        let s = jet.value - yp;
        let [fx, fz] = jet.grad;
        let h = jet.hess;
        let a = 1.0 + fx * fx + s * h[0][0];
        let b = fx * fz + s * h[0][1];
        let d = 1.0 + fz * fz + s * h[1][1];
        let det = a * d - b * b;
        if !(det.is_finite() && det > 0.0) {
            break;
        }
        let dx = -(d * r[0] - b * r[1]) / det;
        let dz = -(a * r[1] - b * r[0]) / det;

        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let xn = x + t * dx;
            let zn = z + t * dz;
            if zn >= 0.0 {
                let jn = f.jet(xn, zn);
                let rnew = interior_residual(&jn, xn, zn, xp, yp, zp);
                let rnn = norm2(rnew);
                if rnn < rn {
                    x = xn;
                    z = zn;
                    jet = jn;
                    r = rnew;
                    rn = rnn;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    if rn <= cfg.tol * scale {
        Ok((x, z))
    } else {
        Err(Error::SolverFailure {
            last: PointN::from([x, jet.value, z]),
            residual: rn,
        })
    }
}

fn solve_face(
    f: &dyn ConvexFunction,
    xp: f64,
    yp: f64,
    mut x: f64,
    cfg: &EpigraphSolverConfig,
) -> Result<(f64, Jet)> {
    let scale = 1.0 + xp.abs();
    let mut jet = f.jet(x, 0.0);
    let res = |j: &Jet, x: f64| x - xp + (j.value - yp) * j.grad[0];
    let mut r = res(&jet, x);

    for _ in 0..cfg.max_iters {
        if r.abs() <= cfg.polish * scale {
            break;
        }
        let s = jet.value - yp;
        let dr = 1.0 + jet.grad[0] * jet.grad[0] + s * jet.hess[0][0];
        if !(dr.is_finite() && dr > 0.0) {
            break;
        }
        let dx = -r / dr;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let xn = x + t * dx;
            let jn = f.jet(xn, 0.0);
            let rn = res(&jn, xn);
            if rn.abs() < r.abs() {
                x = xn;
                jet = jn;
                r = rn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    if r.abs() <= cfg.tol * scale {
        Ok((x, jet))
    } else {
        Err(Error::SolverFailure {
            last: PointN::from([x, jet.value, 0.0]),
            residual: r.abs(),
        })
    }
}
