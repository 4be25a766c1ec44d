use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite union of closed intervals `[lo, hi]`, kept sorted and pairwise
/// disjoint. Degenerate intervals (`lo == hi`) are points. Endpoints may be
/// infinite, which is how the unbounded rays of the gap sets are stored.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawIntervals", into = "RawIntervals")]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct RawIntervals {
    intervals: Vec<[f64; 2]>,
}

impl TryFrom<RawIntervals> for IntervalUnion {
    type Error = Error;
    fn try_from(raw: RawIntervals) -> Result<Self> {
        IntervalUnion::new(raw.intervals.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<IntervalUnion> for RawIntervals {
    fn from(u: IntervalUnion) -> Self {
        RawIntervals {
            intervals: u.intervals.into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

impl IntervalUnion {
    /// Normalizes the input: sorts, and merges overlapping or touching pieces.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &intervals {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(Error::contract(format!("malformed interval [{lo}, {hi}]")));
            }
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn point(x: f64) -> Self {
        Self {
            intervals: vec![(x, x)],
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        Self::new(all).expect("inputs are already valid")
    }

    /// Index of the last interval with `lo <= x`.
    fn floor_index(&self, x: f64) -> Option<usize> {
        self.intervals.partition_point(|iv| iv.0 <= x).checked_sub(1)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.floor_index(x).is_some_and(|i| x <= self.intervals[i].1)
    }

    /// Every point of `self` belongs to `other`.
    pub fn is_subset_of(&self, other: &IntervalUnion) -> bool {
        self.intervals.iter().all(|&(lo, hi)| {
            other
                .floor_index(lo)
                .is_some_and(|i| other.intervals[i].1 >= hi)
        })
    }

    /// `(max(E ∩ (-∞, x]), min(E ∩ [x, ∞)))`, or `None` when either side is empty.
    ///
    /// For `x ∈ E` this is `(x, x)`; otherwise it is the connected component
    /// of the complement that contains `x`.
    pub fn gap_endpoints(&self, x: f64) -> Option<(f64, f64)> {
        let i = self.floor_index(x)?;
        let (_, hi) = self.intervals[i];
        if x <= hi {
            return Some((x, x));
        }
        let next = self.intervals.get(i + 1)?;
        Some((hi, next.0))
    }

    /// Image under a continuous, strictly decreasing map: `[a, b] ↦ [g(b), g(a)]`.
    pub fn image_decreasing(&self, g: impl Fn(f64) -> Result<f64>) -> Result<IntervalUnion> {
        let mapped = self
            .intervals
            .iter()
            .map(|&(lo, hi)| Ok((g(hi)?, g(lo)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(mapped)
    }

    /// All finite interval endpoints.
    pub fn endpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.intervals
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .filter(|e| e.is_finite())
    }
}
