use std::fmt;
use std::sync::Arc;

use super::cubic::parabola_foot;
use super::epigraph::{project_smooth_epigraph_with, EpigraphSolverConfig};
use super::PointN;
use crate::error::{Error, Result};

/// Value, gradient and Hessian of a function of `(x, z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    /// `[∂/∂x, ∂/∂z]`
    pub grad: [f64; 2],
    /// `[[xx, xz], [zx, zz]]`
    pub hess: [[f64; 2]; 2],
}

/// A convex C² function on `ℝ × [0, ∞)` that can be used as the boundary of
/// an epigraph set.
pub trait ConvexFunction: Send + Sync {
    fn jet(&self, x: f64, z: f64) -> Jet;

    fn value(&self, x: f64, z: f64) -> f64 {
        self.jet(x, z).value
    }

    /// Upper bound on the absolute error of every entry returned by
    /// [`ConvexFunction::jet`]. Zero for closed-form functions.
    fn truncation_bound(&self) -> f64 {
        0.0
    }
}

/// `f(x, z) = x²`; its epigraph is the parabola region crossed with a half-line.
#[derive(Clone, Copy, Debug, Default)]
pub struct SquareInX;

impl ConvexFunction for SquareInX {
    fn jet(&self, x: f64, _z: f64) -> Jet {
        Jet {
            value: x * x,
            grad: [2.0 * x, 0.0],
            hess: [[2.0, 0.0], [0.0, 0.0]],
        }
    }
}

/// The closed convex sets the construction is built from.
#[derive(Clone)]
pub enum ConvexSetDescriptor {
    /// `{point}` in any dimension.
    Singleton(PointN),
    /// `{(x0, y0, z) : z >= 0}` in ℝ³.
    VerticalRay { base: [f64; 2] },
    /// `{(x, y) : y >= x²}` in ℝ².
    ParabolaEpigraph,
    /// `{(x, y, z) : z >= 0, y >= f(x, z)}` in ℝ³.
    SmoothEpigraph(Arc<dyn ConvexFunction>),
    /// A planar set crossed with `[0, ∞)` in the third coordinate.
    ProductWithHalfLine(Box<ConvexSetDescriptor>),
}

impl fmt::Debug for ConvexSetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Singleton(p) => f.debug_tuple("Singleton").field(p).finish(),
            Self::VerticalRay { base } => f.debug_struct("VerticalRay").field("base", base).finish(),
            Self::ParabolaEpigraph => f.write_str("ParabolaEpigraph"),
            Self::SmoothEpigraph(_) => f.write_str("SmoothEpigraph(..)"),
            Self::ProductWithHalfLine(inner) => {
                f.debug_tuple("ProductWithHalfLine").field(inner).finish()
            }
        }
    }
}

impl ConvexSetDescriptor {
    pub fn singleton(coords: Vec<f64>) -> Result<Self> {
        Ok(Self::Singleton(PointN::new(coords)?))
    }

    pub fn vertical_ray(x: f64, y: f64) -> Self {
        Self::VerticalRay { base: [x, y] }
    }

    pub fn product_with_half_line(planar: ConvexSetDescriptor) -> Result<Self> {
        if planar.dim() != 2 {
            return Err(Error::contract("ProductWithHalfLine needs a planar factor"));
        }
        Ok(Self::ProductWithHalfLine(Box::new(planar)))
    }

    /// Ambient dimension of the set.
    pub fn dim(&self) -> usize {
        match self {
            Self::Singleton(p) => p.dim(),
            Self::ParabolaEpigraph => 2,
            Self::VerticalRay { .. } | Self::SmoothEpigraph(_) | Self::ProductWithHalfLine(_) => 3,
        }
    }

    /// Membership up to an absolute slack.
    pub fn contains(&self, p: &PointN, slack: f64) -> bool {
        if p.dim() != self.dim() {
            return false;
        }
        match self {
            Self::Singleton(q) => p.dist(q) <= slack,
            Self::VerticalRay { base } => {
                (p[0] - base[0]).abs() <= slack && (p[1] - base[1]).abs() <= slack && p[2] >= -slack
            }
            Self::ParabolaEpigraph => p[1] >= p[0] * p[0] - slack,
            Self::SmoothEpigraph(f) => p[2] >= -slack && p[1] >= f.value(p[0], p[2].max(0.0)) - slack,
            Self::ProductWithHalfLine(inner) => {
                p[2] >= -slack && inner.contains(&PointN::from([p[0], p[1]]), slack)
            }
        }
    }

    /// Nearest point of the set to `p`, with default solver settings.
    pub fn project(&self, p: &PointN) -> Result<PointN> {
        self.project_with(p, &EpigraphSolverConfig::default())
    }

    pub fn project_with(&self, p: &PointN, cfg: &EpigraphSolverConfig) -> Result<PointN> {
        p.ensure_dim(self.dim())?;
        if !p.is_finite() {
            return Err(Error::contract("cannot project a non-finite point"));
        }
        match self {
            Self::Singleton(q) => Ok(q.clone()),
            Self::VerticalRay { base } => Ok(PointN::from([base[0], base[1], p[2].max(0.0)])),
            Self::ParabolaEpigraph => {
                let (u, v) = (p[0], p[1]);
                if v >= u * u {
                    return Ok(p.clone());
                }
                let x = parabola_foot(u, v);
                Ok(PointN::from([x, x * x]))
            }
            Self::SmoothEpigraph(f) => project_smooth_epigraph_with(f.as_ref(), p, cfg),
            Self::ProductWithHalfLine(inner) => {
                let q = inner.project_with(&PointN::from([p[0], p[1]]), cfg)?;
                Ok(PointN::from([q[0], q[1], p[2].max(0.0)]))
            }
        }
    }
}

/// Free-function form of [`ConvexSetDescriptor::project`].
pub fn project(set: &ConvexSetDescriptor, p: &PointN) -> Result<PointN> {
    set.project(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOOT: f64 = 0.589_754_512_301_458_38;

    #[test]
    fn singleton_and_ray() {
        let s = ConvexSetDescriptor::singleton(vec![0.0, 0.0]).unwrap();
        assert_eq!(s.project(&PointN::from([2.0, 0.0])).unwrap(), PointN::from([0.0, 0.0]));

        let r = ConvexSetDescriptor::vertical_ray(1.0, 0.0);
        assert_eq!(
            r.project(&PointN::from([2.0, 2.0, 3.0])).unwrap(),
            PointN::from([1.0, 0.0, 3.0])
        );
        assert_eq!(
            r.project(&PointN::from([0.0, 0.0, -1.0])).unwrap(),
            PointN::from([1.0, 0.0, 0.0])
        );
    }

    #[test]
    fn parabola_examples() {
        let b1 = ConvexSetDescriptor::ParabolaEpigraph;
        let q = b1.project(&PointN::from([1.0, 0.0])).unwrap();
        assert!((q[0] - FOOT).abs() < 1e-14);
        assert!((q[1] - FOOT * FOOT).abs() < 1e-14);
        assert_eq!(b1.project(&PointN::from([0.0, 1.0])).unwrap(), PointN::from([0.0, 1.0]));
        // Directly below the vertex.
        assert_eq!(b1.project(&PointN::from([0.0, -3.0])).unwrap(), PointN::from([0.0, 0.0]));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let b1 = ConvexSetDescriptor::ParabolaEpigraph;
        assert!(matches!(
            b1.project(&PointN::from([1.0, 0.0, 0.0])),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
        let r = ConvexSetDescriptor::vertical_ray(1.0, 0.0);
        assert!(r.project(&PointN::from([1.0, 0.0])).is_err());
    }

    #[test]
    fn product_matches_planar_factor() {
        let a1p = ConvexSetDescriptor::product_with_half_line(ConvexSetDescriptor::ParabolaEpigraph)
            .unwrap();
        let q = a1p.project(&PointN::from([1.0, 0.0, -2.0])).unwrap();
        assert!((q[0] - FOOT).abs() < 1e-14);
        assert_eq!(q[2], 0.0);
        assert!(ConvexSetDescriptor::product_with_half_line(ConvexSetDescriptor::vertical_ray(0.0, 0.0))
            .is_err());
    }
}
