use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of a finite-dimensional Euclidean space.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointN(Vec<f64>);

impl PointN {
    /// Builds a point, rejecting empty or non-finite coordinate lists.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::contract("point must have at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::contract(format!("non-finite coordinate in {coords:?}")));
        }
        Ok(PointN(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        PointN(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &PointN) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(&self, other: &PointN) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `self + t * (target - self)`, evaluated coordinate-wise.
    ///
    /// A coordinate that does not move between `self` and `target` is copied
    /// bit-for-bit, and a coordinate that increases never decreases.
    pub fn toward(&self, target: &PointN, t: f64) -> PointN {
        PointN(
            self.0
                .iter()
                .zip(&target.0)
                .map(|(a, b)| a + t * (b - a))
                .collect(),
        )
    }

    pub(crate) fn ensure_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: self.dim(),
            });
        }
        Ok(())
    }

    /// Arithmetic mean of a non-empty slice of equal-dimension points.
    pub fn mean(points: &[PointN]) -> Result<PointN> {
        let first = points
            .first()
            .ok_or_else(|| Error::contract("mean of an empty point list"))?;
        let mut acc = vec![0.0; first.dim()];
        for p in points {
            p.ensure_dim(first.dim())?;
            for (a, c) in acc.iter_mut().zip(&p.0) {
                *a += c;
            }
        }
        let m = points.len() as f64;
        acc.iter_mut().for_each(|a| *a /= m);
        Ok(PointN(acc))
    }
}

impl fmt::Debug for PointN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("PointN").field(&self.0).finish()
    }
}

impl From<[f64; 2]> for PointN {
    fn from(c: [f64; 2]) -> Self {
        PointN(c.to_vec())
    }
}

impl From<[f64; 3]> for PointN {
    fn from(c: [f64; 3]) -> Self {
        PointN(c.to_vec())
    }
}

impl Index<usize> for PointN {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for PointN {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for &PointN {
    type Output = PointN;
    fn add(self, rhs: &PointN) -> PointN {
        PointN(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &PointN {
    type Output = PointN;
    fn sub(self, rhs: &PointN) -> PointN {
        PointN(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<&PointN> for f64 {
    type Output = PointN;
    fn mul(self, rhs: &PointN) -> PointN {
        PointN(rhs.0.iter().map(|c| self * c).collect())
    }
}
