use std::sync::Arc;

use super::series::{g_n, h_n, CoefficientRule, MAX_TERMS};
use super::{FSigmaSpec, IntervalUnion, TailMode};
use crate::error::{Error, Result};
use crate::geometry::{ConvexFunction, ConvexSetDescriptor, Jet};
use crate::planar::phi;

/// Truncation tolerance used when the scene function backs a projection.
pub const SCENE_TOL: f64 = 1e-17;

/// Distance to `E_n` below which a point counts as lying on the flat part
/// of `f`. Converged iterates land within about 1e-9 of the true foot.
pub const FLAT_TOL: f64 = 1e-9;

/// `E_n = (-∞, -1] ∪ φ(F_n) ∪ [2, ∞)`.
pub fn build_e(spec: &FSigmaSpec, n: usize) -> Result<IntervalUnion> {
    if n == 0 {
        return Err(Error::contract("levels are numbered from 1"));
    }
    let image = spec.level(n).image_decreasing(phi)?;
    let rays = IntervalUnion::new(vec![(f64::NEG_INFINITY, -1.0), (2.0, f64::INFINITY)])?;
    Ok(rays.union(&image))
}

/// `(a_n(x), b_n(x))` for a set containing both unbounded rays.
pub fn gap_endpoints(e: &IntervalUnion, x: f64) -> (f64, f64) {
    e.gap_endpoints(x)
        .expect("sets built by build_e contain points on both sides of every x")
}

/// One evaluation of the truncated series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FEval {
    pub jet: Jet,
    /// Number of series terms summed.
    pub terms: usize,
    /// Bound on the omitted tail of the value.
    pub value_bound: f64,
    /// Bound on the omitted tail of every gradient and Hessian entry.
    pub derivative_bound: f64,
}

/// `f(x, z) = x² + Σ c_n g_n(x) h_n(z)` for a fixed F-sigma spec.
#[derive(Clone, Debug)]
pub struct SeriesFunction {
    /// `E_1, …, E_L`; `E_n = E_L` for `n > L`.
    e_sets: Vec<IntervalUnion>,
    rule: CoefficientRule,
    tol: f64,
}

impl SeriesFunction {
    pub fn new(spec: &FSigmaSpec, rule: CoefficientRule) -> Result<Self> {
        let depth = match spec.tail() {
            TailMode::Constant => spec.explicit_levels(),
            TailMode::Shrinking { .. } => MAX_TERMS,
        };
        let e_sets = (1..=depth).map(|n| build_e(spec, n)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            e_sets,
            rule,
            tol: SCENE_TOL,
        })
    }

    pub fn rule(&self) -> CoefficientRule {
        self.rule
    }

    pub fn e_set(&self, n: usize) -> &IntervalUnion {
        &self.e_sets[n.min(self.e_sets.len()) - 1]
    }

    /// Sum of the series truncated so that the omitted tail is at most `tol`.
    pub fn eval(&self, x: f64, z: f64, tol: f64) -> FEval {
        let terms = self.rule.terms_for(tol);
        let jet = self.partial_sum(x, z, terms);
        FEval {
            jet,
            terms,
            value_bound: self.rule.value_tail_bound(terms),
            derivative_bound: self.rule.tail_bound(terms),
        }
    }

    /// Every summed term at height `z` has `x` within [`FLAT_TOL`] of its
    /// set. The sets grow with `n`, so only the first term matters.
    pub fn is_flat_at(&self, x: f64, z: f64) -> bool {
        let first = if z >= 0.0 { (z.floor() as usize).saturating_add(1) } else { 1 };
        if first > self.rule.terms_for(self.tol) {
            return true;
        }
        let (a, b) = gap_endpoints(self.e_set(first), x);
        (x - a).min(b - x) <= FLAT_TOL
    }

    /// Deepest level whose gap set can differ from the ones before it,
    /// limited to levels whose terms are still summed.
    pub fn last_distinct_level(&self) -> usize {
        self.e_sets.len().min(self.rule.terms_for(self.tol))
    }

    /// The series part `Σ c_n g_n(x) h_n(z)` alone, without `x²`.
    pub fn excess(&self, x: f64, z: f64) -> f64 {
        self.series(x, z, self.rule.terms_for(self.tol)).value
    }

    pub fn partial_sum(&self, x: f64, z: f64, terms: usize) -> Jet {
        let s = self.series(x, z, terms);
        Jet {
            value: x * x + s.value,
            grad: [2.0 * x + s.grad[0], s.grad[1]],
            hess: [[2.0 + s.hess[0][0], s.hess[0][1]], [s.hess[1][0], s.hess[1][1]]],
        }
    }

    fn series(&self, x: f64, z: f64, terms: usize) -> Jet {
        let mut out = Jet {
            value: 0.0,
            grad: [0.0; 2],
            hess: [[0.0; 2]; 2],
        };
        // h_n vanishes for n <= z.
        let first = if z >= 0.0 { (z.floor() as usize).saturating_add(1) } else { 1 };
        let mut cached: Option<(usize, (f64, f64, f64))> = None;
        for n in first..=terms {
            let idx = n.min(self.e_sets.len()) - 1;
            let (g, g1, g2) = match cached {
                Some((i, g)) if i == idx => g,
                _ => {
                    let (a, b) = gap_endpoints(&self.e_sets[idx], x);
                    let g = g_n(x, a, b);
                    cached = Some((idx, g));
                    g
                }
            };
            if g == 0.0 && g1 == 0.0 && g2 == 0.0 {
                continue;
            }
            let (h, h1, h2) = h_n(z, n);
            let c = self.rule.coefficient(n);
            out.value += c * g * h;
            out.grad[0] += c * g1 * h;
            out.grad[1] += c * g * h1;
            out.hess[0][0] += c * g2 * h;
            out.hess[0][1] += c * g1 * h1;
            out.hess[1][1] += c * g * h2;
        }
        out.hess[1][0] = out.hess[0][1];
        out
    }
}

impl ConvexFunction for SeriesFunction {
    fn jet(&self, x: f64, z: f64) -> Jet {
        self.eval(x, z, self.tol).jet
    }

    fn truncation_bound(&self) -> f64 {
        self.rule.tail_bound(self.rule.terms_for(self.tol))
    }
}

/// The three sets `A₁ = {z ≥ 0, y ≥ f(x, z)}`, `A₂ = {(1, 0, z)}`, `A₃ = {(0, 0, z)}`.
#[derive(Clone, Debug)]
pub struct ConstructedScene {
    spec: FSigmaSpec,
    function: Arc<SeriesFunction>,
    a1: ConvexSetDescriptor,
    a2: ConvexSetDescriptor,
    a3: ConvexSetDescriptor,
}

impl ConstructedScene {
    pub fn new(spec: FSigmaSpec) -> Result<Self> {
        Self::with_rule(spec, CoefficientRule::standard())
    }

    pub fn with_rule(spec: FSigmaSpec, rule: CoefficientRule) -> Result<Self> {
        spec.validate()?;
        let function = Arc::new(SeriesFunction::new(&spec, rule)?);
        let a1 = ConvexSetDescriptor::SmoothEpigraph(function.clone());
        Ok(Self {
            spec,
            function,
            a1,
            a2: ConvexSetDescriptor::vertical_ray(1.0, 0.0),
            a3: ConvexSetDescriptor::vertical_ray(0.0, 0.0),
        })
    }

    pub fn spec(&self) -> &FSigmaSpec {
        &self.spec
    }

    pub fn rule(&self) -> CoefficientRule {
        self.function.rule()
    }

    pub fn function(&self) -> &SeriesFunction {
        &self.function
    }

    pub fn a1(&self) -> &ConvexSetDescriptor {
        &self.a1
    }

    pub fn a2(&self) -> &ConvexSetDescriptor {
        &self.a2
    }

    pub fn a3(&self) -> &ConvexSetDescriptor {
        &self.a3
    }

    pub fn build_e(&self, n: usize) -> Result<IntervalUnion> {
        build_e(&self.spec, n)
    }

    pub fn f_eval(&self, x: f64, z: f64, tol: f64) -> Result<FEval> {
        f_eval(self, x, z, tol)
    }

    /// Highest integer `z` tried by the classifier's level probes.
    pub fn level_probe_depth(&self) -> usize {
        match self.spec.tail() {
            TailMode::Constant => self.spec.explicit_levels(),
            TailMode::Shrinking { .. } => (self.spec.explicit_levels() + 24).min(self.function.last_distinct_level()),
        }
    }

    /// Default upper end of membership scans in `z`: one past the explicit levels.
    pub fn default_z_max(&self) -> f64 {
        self.spec.explicit_levels() as f64 + 1.0
    }
}

pub fn f_eval(scene: &ConstructedScene, x: f64, z: f64, tol: f64) -> Result<FEval> {
    if !(x.is_finite() && z.is_finite() && z >= 0.0) {
        return Err(Error::contract(format!("f is evaluated at finite x and z >= 0, got ({x}, {z})")));
    }
    if !(tol > 0.0) {
        return Err(Error::contract("truncation tolerance must be positive"));
    }
    Ok(scene.function.eval(x, z, tol))
}

/// `min f(x, z) - x²` over `samples` equally spaced `z ∈ [0, z_max]`.
pub fn membership_gap(scene: &ConstructedScene, x: f64, z_max: f64, samples: usize) -> Result<f64> {
    if !(z_max >= 0.0) || samples < 2 {
        return Err(Error::contract("need z_max >= 0 and at least two samples"));
    }
    Ok((0..samples)
        .map(|i| scene.function.excess(x, z_max * i as f64 / (samples - 1) as f64))
        .fold(f64::INFINITY, f64::min))
}
