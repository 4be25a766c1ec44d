//! Finite-dimensional versions of the averaging argument behind closedness
//! of the fixed-point set: near-orthonormal systems and their means,
//! Cesàro averages of approximate fixed points, and a probe that follows a
//! sequence `α_n → α₀` of parameters with bounded fixed points.

use serde::{Deserialize, Serialize};

use crate::construction::ConstructedScene;
use crate::dynamics::{classify_alpha, IterationConfig};
use crate::error::{Error, Result};
use crate::geometry::PointN;
use crate::planar::{planar_chain, planar_fixed_point_closed_form};

/// Slack allowed on the norm bound at the limit parameter.
pub const NORM_SLACK: f64 = 1e-6;

/// `M` points `y_1 … y_M` and a point `y`, with their metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoSystem {
    ys: Vec<PointN>,
    y: PointN,
    norms: Vec<f64>,
    gram: Vec<Vec<f64>>,
    dist_sq: Vec<f64>,
}

impl OrthoSystem {
    pub fn new(ys: Vec<PointN>, y: PointN) -> Result<Self> {
        if ys.is_empty() {
            return Err(Error::contract("an orthogonal system needs at least one point"));
        }
        for p in &ys {
            p.ensure_dim(y.dim())?;
        }
        let norms = ys.iter().map(PointN::norm).collect();
        let gram = ys.iter().map(|a| ys.iter().map(|b| a.dot(b)).collect()).collect();
        let dist_sq = ys.iter().map(|p| p.dist(&y).powi(2)).collect();
        Ok(Self {
            ys,
            y,
            norms,
            gram,
            dist_sq,
        })
    }

    pub fn m(&self) -> usize {
        self.ys.len()
    }

    pub fn points(&self) -> &[PointN] {
        &self.ys
    }

    pub fn y(&self) -> &PointN {
        &self.y
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn gram(&self) -> &[Vec<f64>] {
        &self.gram
    }

    pub fn dist_sq(&self) -> &[f64] {
        &self.dist_sq
    }

    /// Largest violation among `‖y_i‖ = 1`, `⟨y_i, y_j⟩ = 0` and
    /// `‖y - y_i‖² <= (M-1)/M`.
    pub fn hypothesis_defect(&self) -> f64 {
        let m = self.m();
        let bound = (m as f64 - 1.0) / m as f64;
        let norm_defect = self.norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
        let mut inner = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    inner = inner.max(self.gram[i][j].abs());
                }
            }
        }
        let dist = self.dist_sq.iter().map(|d| (d - bound).max(0.0)).fold(0.0, f64::max);
        norm_defect.max(inner).max(dist)
    }
}

/// `‖y - (y_1 + … + y_M)/M‖`.
pub fn lemat_deviation(sys: &OrthoSystem) -> f64 {
    let mean = PointN::mean(&sys.ys).expect("system is non-empty with equal dimensions");
    sys.y.dist(&mean)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CesaroResult {
    /// Mean of the supplied points.
    pub u: PointN,
    /// `‖T(u) - u‖`.
    pub residual: f64,
    /// `‖u - x₀‖`.
    pub dist: f64,
}

pub fn cesaro_refine(
    t: impl Fn(&PointN) -> Result<PointN>,
    points: &[PointN],
    x0: &PointN,
) -> Result<CesaroResult> {
    let u = PointN::mean(points)?;
    u.ensure_dim(x0.dim())?;
    let residual = t(&u)?.dist(&u);
    let dist = u.dist(x0);
    Ok(CesaroResult { u, residual, dist })
}

/// Planar run of the averaging step: `x_n` are the planar fixed points for
/// `α_n = α₀ + rate/n` (all with the given `β`), and `T` is the planar
/// composition at `α₀`. Returns `(M, ‖T(u_M) - u_M‖)` for each requested `M`,
/// where `u_M` averages `x_1 … x_M`.
pub fn planar_cesaro_residuals(alpha0: f64, rate: f64, beta: f64, ms: &[usize]) -> Result<Vec<(usize, f64)>> {
    let chain = planar_chain(alpha0, beta)?;
    let x0 = planar_fixed_point_closed_form(alpha0, beta)?.u;
    let top = ms.iter().copied().max().unwrap_or(0);
    let xs = (1..=top)
        .map(|n| Ok(planar_fixed_point_closed_form(alpha0 + rate / n as f64, beta)?.u))
        .collect::<Result<Vec<_>>>()?;
    ms.iter()
        .map(|&m| {
            if m == 0 {
                return Err(Error::contract("averages need M >= 1"));
            }
            let r = cesaro_refine(|p| crate::dynamics::compose_apply(&chain, p), &xs[..m], &x0)?;
            Ok((m, r.residual))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeEntry {
    pub alpha: f64,
    pub class: String,
    pub residual: f64,
    pub iterations: usize,
    pub point: Option<PointN>,
    pub norm: Option<f64>,
}

impl ProbeEntry {
    fn within(&self, r: f64) -> bool {
        self.class == "exists" && self.norm.is_some_and(|n| n <= r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosednessReport {
    pub alpha0: f64,
    pub k: u32,
    pub r: f64,
    pub tol: f64,
    pub sequence: Vec<ProbeEntry>,
    /// Every `α_n` has a fixed point of norm at most `r`.
    pub precondition_ok: bool,
    /// Indices (from 1) of the `α_n` that broke the precondition.
    pub precondition_failures: Vec<usize>,
    pub limit: ProbeEntry,
    /// Mean of `‖x_n - x₀‖` over the second half of the sequence.
    pub lambda_estimate: Option<f64>,
    /// `‖T(u) - u‖` at `α₀` for `u` the mean of the second half of the `x_n`.
    pub cesaro_residual: Option<f64>,
    /// The limit has a fixed point of norm at most `r + tol`.
    pub confirmed: bool,
}

fn probe_entry(scene: &ConstructedScene, alpha: f64, k: u32, config: &IterationConfig) -> Result<ProbeEntry> {
    let out = classify_alpha(scene, alpha, k, config)?;
    let point = out.class.point().cloned();
    Ok(ProbeEntry {
        alpha,
        class: out.class.label().to_string(),
        residual: out.class.residual(),
        iterations: out.class.iterations(),
        norm: point.as_ref().map(PointN::norm),
        point,
    })
}

/// Follows `alphas → alpha0`: each `α_n` should have a fixed point of norm
/// at most `r`, and then so should `α₀` (up to [`NORM_SLACK`]). A broken
/// precondition is reported in the result, not raised.
pub fn fr_closedness_probe(
    scene: &ConstructedScene,
    alphas: &[f64],
    alpha0: f64,
    k: u32,
    r: f64,
    config: &IterationConfig,
) -> Result<ClosednessReport> {
    if alphas.is_empty() {
        return Err(Error::contract("probe needs a non-empty sequence"));
    }
    if !(r > 0.0) {
        return Err(Error::contract("norm bound r must be positive"));
    }
    let sequence = alphas
        .iter()
        .map(|&a| probe_entry(scene, a, k, config))
        .collect::<Result<Vec<_>>>()?;
    let precondition_failures: Vec<usize> = sequence
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.within(r))
        .map(|(i, _)| i + 1)
        .collect();
    let limit = probe_entry(scene, alpha0, k, config)?;

    let tail: Vec<&PointN> = sequence[sequence.len() / 2..]
        .iter()
        .filter_map(|e| e.point.as_ref())
        .collect();
    let (lambda_estimate, cesaro_residual) = match (&limit.point, tail.is_empty()) {
        (Some(x0), false) => {
            let lambda = tail.iter().map(|p| p.dist(x0)).sum::<f64>() / tail.len() as f64;
            let beta = crate::dynamics::reduced_beta(alpha0, k)?;
            let chain = crate::dynamics::scene_chain(scene, alpha0, beta)?;
            let owned: Vec<PointN> = tail.iter().map(|p| (*p).clone()).collect();
            let c = cesaro_refine(|p| crate::dynamics::compose_apply(&chain, p), &owned, x0)?;
            (Some(lambda), Some(c.residual))
        }
        _ => (None, None),
    };

    let precondition_ok = precondition_failures.is_empty();
    Ok(ClosednessReport {
        alpha0,
        k,
        r,
        tol: NORM_SLACK,
        confirmed: precondition_ok && limit.within(r + NORM_SLACK),
        sequence,
        precondition_ok,
        precondition_failures,
        limit,
        lambda_estimate,
        cesaro_residual,
    })
}

/// `α_n = α₀ + rate/n` for `n = 1 … terms`, clamped to `[0, 1]`.
pub fn alpha_sequence(alpha0: f64, rate: f64, terms: usize) -> Vec<f64> {
    (1..=terms)
        .map(|n| (alpha0 + rate / n as f64).clamp(0.0, 1.0))
        .collect()
}
