//! Fixed points of `T = P_{B₃}^α P_{B₂}^α P_{B₁}^β` in the plane, with
//! `B₁ = {y ≥ x²}`, `B₂ = {(1, 0)}` and `B₃ = {(0, 0)}`.
//!
//! The projection of the fixed point onto `B₁` is `(φ(α), φ(α)²)` where
//! `φ(α)` solves `2x³ + x = ψ(α) = (1 - α)/(2 - α)`. It does not depend on `β`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{iterate_to_fixed_point, FixedPointClass, IterationConfig, RelaxedProjection};
use crate::error::{Error, Result};
use crate::geometry::{monotone_cubic_root, ConvexSetDescriptor, PointN};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarFixedPoint {
    pub alpha: f64,
    pub beta: f64,
    pub u: PointN,
    /// `P_{B₁}(u)`.
    pub x_proj: PointN,
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::contract(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::contract(format!("{name} = {v} outside (0, 1]")));
    }
    Ok(())
}

pub fn psi(alpha: f64) -> Result<f64> {
    check_unit("alpha", alpha)?;
    Ok((1.0 - alpha) / (2.0 - alpha))
}

/// Root of `2x³ + x = ψ(α)`. At `α = 0` this is the continuous extension.
pub fn phi(alpha: f64) -> Result<f64> {
    monotone_cubic_root(2.0, 1.0, psi(alpha)?)
}

/// The chain `(B₁, β), (B₂, α), (B₃, α)`, applied in that order.
pub fn planar_chain(alpha: f64, beta: f64) -> Result<Vec<RelaxedProjection>> {
    Ok(vec![
        RelaxedProjection::new(ConvexSetDescriptor::ParabolaEpigraph, beta)?,
        RelaxedProjection::new(ConvexSetDescriptor::singleton(vec![1.0, 0.0])?, alpha)?,
        RelaxedProjection::new(ConvexSetDescriptor::singleton(vec![0.0, 0.0])?, alpha)?,
    ])
}

pub fn planar_fixed_point_closed_form(alpha: f64, beta: f64) -> Result<PlanarFixedPoint> {
    check_open_unit("alpha", alpha)?;
    check_open_unit("beta", beta)?;
    let x1 = phi(alpha)?;
    let x2 = x1 * x1;
    let q = 1.0 - alpha;
    let scale = alpha / (1.0 - q * q * (1.0 - beta));
    let u = PointN::from([
        x1 + scale * ((alpha - 2.0) * x1 + (1.0 - alpha)),
        x2 + scale * ((alpha - 2.0) * x2),
    ]);
    Ok(PlanarFixedPoint {
        alpha,
        beta,
        u,
        x_proj: PointN::from([x1, x2]),
    })
}

/// Banach iteration of `T` from `start` until `‖T(u) - u‖ <= config.eps_fix`.
/// Only `max_iters` and `eps_fix` of the config are used.
pub fn planar_fixed_point_iterative(
    alpha: f64,
    beta: f64,
    start: &PointN,
    config: &IterationConfig,
) -> Result<PlanarFixedPoint> {
    check_open_unit("alpha", alpha)?;
    check_open_unit("beta", beta)?;
    let chain = planar_chain(alpha, beta)?;
    let cfg = IterationConfig {
        drift_axis: None,
        ..*config
    };
    let out = iterate_to_fixed_point(&chain, start, &cfg)?;
    match out.class {
        FixedPointClass::Exists { point, .. } => {
            let x_proj = ConvexSetDescriptor::ParabolaEpigraph.project(&point)?;
            Ok(PlanarFixedPoint {
                alpha,
                beta,
                u: point,
                x_proj,
            })
        }
        other => Err(Error::Inconclusive {
            iterations: other.iterations(),
            residual: other.residual(),
        }),
    }
}

/// `‖T(u) - u‖` for the planar chain.
pub fn planar_residual(alpha: f64, beta: f64, u: &PointN) -> Result<f64> {
    let chain = planar_chain(alpha, beta)?;
    Ok(crate::dynamics::compose_apply(&chain, u)?.dist(u))
}
