//! Relaxed projections, their compositions, and fixed-point detection.
//!
//! The detector is built around the structure of the three-set scene: the
//! last coordinate (`z`) can only move through the projection onto the
//! epigraph set, and there it never decreases. A fixed point therefore shows
//! up as an iterate whose `z` has stopped moving while the residual is small,
//! and the absence of one as `z` that keeps creeping upward after the other
//! coordinates have settled.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::construction::ConstructedScene;
use crate::error::{Error, Result};
use crate::geometry::{ConvexSetDescriptor, PointN};

/// `x ↦ α P_A(x) + (1 - α) x`.
#[derive(Clone, Debug)]
pub struct RelaxedProjection {
    set: ConvexSetDescriptor,
    alpha: f64,
}

impl RelaxedProjection {
    pub fn new(set: ConvexSetDescriptor, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::contract(format!("relaxation coefficient {alpha} outside [0, 1]")));
        }
        Ok(Self { set, alpha })
    }

    pub fn set(&self) -> &ConvexSetDescriptor {
        &self.set
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn apply(&self, x: &PointN) -> Result<PointN> {
        relax(self, x)
    }
}

/// Applies one relaxed projection. `α = 0` is the identity and `α = 1` the
/// plain projection, both exactly.
pub fn relax(rp: &RelaxedProjection, x: &PointN) -> Result<PointN> {
    x.ensure_dim(rp.set.dim())?;
    if rp.alpha == 0.0 {
        return Ok(x.clone());
    }
    let p = rp.set.project(x)?;
    if rp.alpha == 1.0 {
        return Ok(p);
    }
    Ok(x.toward(&p, rp.alpha))
}

/// Applies `chain[0]` first and `chain[k-1]` last.
pub fn compose_apply(chain: &[RelaxedProjection], x: &PointN) -> Result<PointN> {
    if chain.is_empty() {
        return Err(Error::contract("empty relaxed-projection chain"));
    }
    chain.iter().try_fold(x.clone(), |acc, rp| relax(rp, &acc))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationConfig {
    pub max_iters: usize,
    /// Residual threshold `‖T(x) - x‖` for accepting a fixed point.
    pub eps_fix: f64,
    /// Any monotone drift of the drift coordinate beyond this is conclusive.
    pub z_max: f64,
    /// Number of consecutive steps inspected by the detectors.
    pub drift_window: usize,
    /// Coordinate that carries the drift; `None` disables the drift detectors.
    pub drift_axis: Option<usize>,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            max_iters: 200_000,
            eps_fix: 1e-9,
            z_max: 1e6,
            drift_window: 50,
            drift_axis: Some(2),
        }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || self.drift_window == 0 {
            return Err(Error::contract("max_iters and drift_window must be positive"));
        }
        if !(self.eps_fix > 0.0 && self.eps_fix < 1.0) {
            return Err(Error::contract("eps_fix must lie in (0, 1)"));
        }
        if !(self.z_max > 0.0) {
            return Err(Error::contract("z_max must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonExistence {
    /// The drift coordinate kept increasing after the others converged.
    Drift,
    /// The residual stalled above the threshold with converged coordinates.
    ResidualFloor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum FixedPointClass {
    Exists {
        point: PointN,
        residual: f64,
        iterations: usize,
    },
    NotExists {
        reason: NonExistence,
        residual: f64,
        iterations: usize,
    },
    Inconclusive {
        residual: f64,
        iterations: usize,
    },
}

impl FixedPointClass {
    pub fn is_exists(&self) -> bool {
        matches!(self, Self::Exists { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Exists { .. } => "exists",
            Self::NotExists { .. } => "not_exists",
            Self::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn residual(&self) -> f64 {
        match self {
            Self::Exists { residual, .. }
            | Self::NotExists { residual, .. }
            | Self::Inconclusive { residual, .. } => *residual,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            Self::Exists { iterations, .. }
            | Self::NotExists { iterations, .. }
            | Self::Inconclusive { iterations, .. } => *iterations,
        }
    }

    pub fn point(&self) -> Option<&PointN> {
        match self {
            Self::Exists { point, .. } => Some(point),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub first: PointN,
    pub last: PointN,
    /// `(iteration, residual)` at iterations 1, 2, 4, 8, … and at the end.
    pub residuals: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationOutcome {
    pub class: FixedPointClass,
    pub trace: TraceSummary,
}

#[derive(Clone, Copy)]
struct Step {
    residual: f64,
    drift: f64,
    /// Largest move among the coordinates other than the drift axis.
    other: f64,
}

/// Iterates `x ← T(x)` for the composition `T` of `chain`.
///
/// - `Exists` when `T(x) == x` exactly, or when the residual is at most
///   `eps_fix` and the drift coordinate has not moved for `drift_window` steps.
/// - `NotExists(Drift)` when the drift coordinate increased on every step of
///   the window, and either exceeds `z_max` or keeps a non-collapsing pace
///   (last increment at least half the first) while every other coordinate
///   moves by at most `eps_fix` per step.
/// - `NotExists(ResidualFloor)` when the residual stays above `10·eps_fix`
///   with relative variation below 1e-12 across the window while the other
///   coordinates have converged.
/// - `Inconclusive` after `max_iters`.
pub fn iterate_to_fixed_point(
    chain: &[RelaxedProjection],
    start: &PointN,
    config: &IterationConfig,
) -> Result<IterationOutcome> {
    config.validate()?;
    let axis = config.drift_axis.filter(|a| *a < start.dim());
    let window = config.drift_window;

    let mut x = start.clone();
    let mut history: VecDeque<Step> = VecDeque::with_capacity(window + 1);
    let mut residuals = Vec::new();
    let mut next_record = 1usize;
    let mut still = 0usize;
    let mut last_residual = f64::NAN;

    let finish = |class: FixedPointClass, last: PointN, mut residuals: Vec<(usize, f64)>| {
        let it = class.iterations();
        if residuals.last().map(|r| r.0) != Some(it) && it > 0 {
            residuals.push((it, class.residual()));
        }
        IterationOutcome {
            class,
            trace: TraceSummary {
                first: start.clone(),
                last,
                residuals,
            },
        }
    };

    for it in 1..=config.max_iters {
        let tx = compose_apply(chain, &x)?;
        let residual = tx.dist(&x);
        last_residual = residual;
        if it == next_record {
            residuals.push((it, residual));
            next_record *= 2;
        }

        if residual == 0.0 {
            let class = FixedPointClass::Exists {
                point: x.clone(),
                residual,
                iterations: it,
            };
            return Ok(finish(class, x, residuals));
        }

        let step = match axis {
            Some(a) => Step {
                residual,
                drift: tx[a] - x[a],
                other: (0..x.dim())
                    .filter(|i| *i != a)
                    .map(|i| (tx[i] - x[i]).abs())
                    .fold(0.0, f64::max),
            },
            None => Step {
                residual,
                drift: 0.0,
                other: residual,
            },
        };

        still = if step.drift == 0.0 { still + 1 } else { 0 };
        let confirm = if axis.is_some() { window } else { 1 };
        if residual <= config.eps_fix && still >= confirm {
            let class = FixedPointClass::Exists {
                point: x.clone(),
                residual,
                iterations: it,
            };
            return Ok(finish(class, x, residuals));
        }

        history.push_back(step);
        if history.len() > window {
            history.pop_front();
        }

        if let (Some(a), true) = (axis, history.len() == window) {
            let first = history.front().expect("window is full");
            let last = history.back().expect("window is full");
            let settled = history.iter().all(|s| s.other <= config.eps_fix);
            let monotone = history.iter().all(|s| s.drift > 0.0);

            let drifting = monotone && (tx[a] > config.z_max || (settled && last.drift >= 0.5 * first.drift));
            let floor = settled
                && history.iter().all(|s| s.residual > 10.0 * config.eps_fix)
                && (last.residual - first.residual).abs() <= 1e-12 * first.residual;

            let reason = if drifting {
                Some(NonExistence::Drift)
            } else if floor {
                Some(NonExistence::ResidualFloor)
            } else {
                None
            };
            if let Some(reason) = reason {
                let class = FixedPointClass::NotExists {
                    reason,
                    residual,
                    iterations: it,
                };
                return Ok(finish(class, tx, residuals));
            }
        }

        x = tx;
    }

    let class = FixedPointClass::Inconclusive {
        residual: last_residual,
        iterations: config.max_iters,
    };
    Ok(finish(class, x, residuals))
}

/// Relaxation of the first set that turns `P₃^α P₂^α (P₁^α)^(k-2)` into the
/// three-map composition `P₃^α P₂^α P₁^β`.
pub fn reduced_beta(alpha: f64, k: u32) -> Result<f64> {
    if k < 3 {
        return Err(Error::contract(format!("composition length k = {k} must be at least 3")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::contract(format!("alpha = {alpha} outside [0, 1]")));
    }
    if k == 3 {
        return Ok(alpha);
    }
    Ok(1.0 - (1.0 - alpha).powi(k as i32 - 2))
}

/// The chain `(A₁, β), (A₂, α), (A₃, α)` of a scene.
pub fn scene_chain(scene: &ConstructedScene, alpha: f64, beta: f64) -> Result<Vec<RelaxedProjection>> {
    Ok(vec![
        RelaxedProjection::new(scene.a1().clone(), beta)?,
        RelaxedProjection::new(scene.a2().clone(), alpha)?,
        RelaxedProjection::new(scene.a3().clone(), alpha)?,
    ])
}

/// Default start: the origin projected onto `A₁`.
pub fn default_start(scene: &ConstructedScene) -> Result<PointN> {
    scene.a1().project(&PointN::zeros(3))
}

/// Classifies whether the `k`-fold equal-α composition has a fixed point.
pub fn classify_alpha(
    scene: &ConstructedScene,
    alpha: f64,
    k: u32,
    config: &IterationConfig,
) -> Result<IterationOutcome> {
    classify_alpha_from(scene, alpha, k, &default_start(scene)?, config)
}

pub fn classify_alpha_from(
    scene: &ConstructedScene,
    alpha: f64,
    k: u32,
    start: &PointN,
    config: &IterationConfig,
) -> Result<IterationOutcome> {
    let beta = reduced_beta(alpha, k)?;
    let chain = scene_chain(scene, alpha, beta)?;
    let mut out = iterate_to_fixed_point(&chain, start, config)?;

    // With α > 0 every fixed point has a flat foot on A₁. A point that
    // passed the detector without one is a rounding artefact: the z-step
    // `-s ∂f/∂z` is positive but smaller than half an ulp of z.
    let artefact = match &out.class {
        FixedPointClass::Exists { point, .. } if alpha > 0.0 => !on_flat_part(scene, point)?,
        _ => false,
    };
    if artefact {
        out.trace.last = out.class.point().expect("checked above").clone();
        out.class = FixedPointClass::NotExists {
            reason: NonExistence::Drift,
            residual: out.class.residual(),
            iterations: out.class.iterations(),
        };
    }

    if let FixedPointClass::NotExists {
        reason: NonExistence::Drift,
        iterations,
        ..
    } = out.class
    {
        if let Some(found) = probe_levels(scene, &chain, &out.trace.last, iterations, config)? {
            return Ok(IterationOutcome {
                class: found.class,
                trace: TraceSummary {
                    first: start.clone(),
                    ..found.trace
                },
            });
        }
    }
    Ok(out)
}

fn on_flat_part(scene: &ConstructedScene, point: &PointN) -> Result<bool> {
    let foot = scene.a1().project(point)?;
    Ok(scene.function().is_flat_at(foot[0], foot[2]))
}

const PROBE_ITERS: usize = 20_000;

/// A fixed point that first appears at level `n` sits at height `z >= n - 1`,
/// and the drift towards such a wall slows down without bound. After a drift
/// verdict, restart at each integer height above the current one, keeping
/// the settled `(x, y)`. A restart only counts when it converges and `f`
/// is flat at the foot of the point on `A₁`.
fn probe_levels(
    scene: &ConstructedScene,
    chain: &[RelaxedProjection],
    last: &PointN,
    spent: usize,
    config: &IterationConfig,
) -> Result<Option<IterationOutcome>> {
    let cfg = IterationConfig {
        max_iters: config.max_iters.min(PROBE_ITERS),
        ..*config
    };
    let lowest = last[2].max(0.0).floor() as usize + 1;
    for m in lowest..=scene.level_probe_depth() {
        let candidate = PointN::from([last[0], last[1], m as f64]);
        let out = iterate_to_fixed_point(chain, &candidate, &cfg)?;
        let FixedPointClass::Exists {
            point,
            residual,
            iterations,
        } = out.class
        else {
            continue;
        };
        if on_flat_part(scene, &point)? {
            return Ok(Some(IterationOutcome {
                class: FixedPointClass::Exists {
                    point,
                    residual,
                    iterations: spent + iterations,
                },
                trace: out.trace,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin_singleton() -> ConvexSetDescriptor {
        ConvexSetDescriptor::singleton(vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn relax_examples() {
        let x = PointN::from([2.0, 0.0]);
        let rp = RelaxedProjection::new(origin_singleton(), 0.5).unwrap();
        assert_eq!(relax(&rp, &x).unwrap(), PointN::from([1.0, 0.0]));

        let id = RelaxedProjection::new(ConvexSetDescriptor::ParabolaEpigraph, 0.0).unwrap();
        let y = PointN::from([0.3, -7.0]);
        assert_eq!(relax(&id, &y).unwrap(), y);

        let full = RelaxedProjection::new(ConvexSetDescriptor::ParabolaEpigraph, 1.0).unwrap();
        assert_eq!(
            relax(&full, &y).unwrap(),
            ConvexSetDescriptor::ParabolaEpigraph.project(&y).unwrap()
        );
        assert!(RelaxedProjection::new(origin_singleton(), 1.5).is_err());
    }

    #[test]
    fn compose_order_and_identity() {
        let x = PointN::from([2.0, 3.0]);
        let ids = vec![
            RelaxedProjection::new(origin_singleton(), 0.0).unwrap(),
            RelaxedProjection::new(ConvexSetDescriptor::ParabolaEpigraph, 0.0).unwrap(),
        ];
        assert_eq!(compose_apply(&ids, &x).unwrap(), x);
        assert!(compose_apply(&[], &x).is_err());

        // First element is applied first: project onto {(1, 0)} and then halfway to {(0, 0)}.
        let chain = vec![
            RelaxedProjection::new(ConvexSetDescriptor::singleton(vec![1.0, 0.0]).unwrap(), 1.0).unwrap(),
            RelaxedProjection::new(origin_singleton(), 0.5).unwrap(),
        ];
        assert_eq!(compose_apply(&chain, &x).unwrap(), PointN::from([0.5, 0.0]));
    }

    #[test]
    fn beta_reduction() {
        assert_eq!(reduced_beta(0.37, 3).unwrap(), 0.37);
        assert_eq!(reduced_beta(0.5, 5).unwrap(), 0.875);
        assert_eq!(reduced_beta(0.0, 7).unwrap(), 0.0);
        assert!(reduced_beta(0.5, 2).is_err());
    }

    #[test]
    fn contraction_converges_without_drift_axis() {
        let chain = vec![RelaxedProjection::new(origin_singleton(), 0.5).unwrap()];
        let cfg = IterationConfig {
            drift_axis: None,
            ..IterationConfig::default()
        };
        let out = iterate_to_fixed_point(&chain, &PointN::from([1.0, 1.0]), &cfg).unwrap();
        match out.class {
            FixedPointClass::Exists { point, residual, .. } => {
                assert!(residual <= 1e-9);
                assert!(point.norm() <= 2e-9);
            }
            other => panic!("expected a fixed point, got {other:?}"),
        }
        assert_eq!(out.trace.residuals[0], (1, 0.5f64.hypot(0.5)));
    }

    #[test]
    fn exact_fixed_point_is_reported_at_once() {
        let chain = vec![
            RelaxedProjection::new(ConvexSetDescriptor::vertical_ray(0.0, 0.0), 1.0).unwrap(),
        ];
        let out = iterate_to_fixed_point(&chain, &PointN::from([0.0, 0.0, 1.0]), &IterationConfig::default())
            .unwrap();
        assert!(out.class.is_exists());
        assert_eq!(out.class.iterations(), 1);
    }

    #[test]
    fn invalid_config_rejected() {
        let chain = vec![RelaxedProjection::new(origin_singleton(), 0.5).unwrap()];
        let cfg = IterationConfig {
            eps_fix: 0.0,
            ..IterationConfig::default()
        };
        assert!(iterate_to_fixed_point(&chain, &PointN::from([1.0, 1.0]), &cfg).is_err());
    }
}
