use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::IntervalUnion;
use crate::error::{Error, Result};

/// How the levels continue past the explicitly listed ones.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TailMode {
    /// `F_n = F_N` for `n > N`; the union is the closed set `F_N`.
    #[default]
    Constant,
    /// `F_{N+j} = F_N ∪ [lo + delta0·2^(-j), hi]`; the union adds `(lo, hi]`.
    Shrinking { lo: f64, hi: f64, delta0: f64 },
}

/// `F = ⋃ F_n` for nested closed sets `F_1 ⊂ F_2 ⊂ … ⊂ [0, 1]` with `0 ∈ F_1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FSigmaSpec {
    levels: Vec<IntervalUnion>,
    #[serde(default)]
    tail: TailMode,
}

impl FSigmaSpec {
    pub fn new(levels: Vec<IntervalUnion>, tail: TailMode) -> Result<Self> {
        let spec = Self { levels, tail };
        spec.validate()?;
        Ok(spec)
    }

    /// Single closed level, constant tail.
    pub fn closed(level: IntervalUnion) -> Result<Self> {
        Self::new(vec![level], TailMode::Constant)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec is always serializable")
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        Sha256::digest(self.to_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Reports the first violation, naming the 1-based level where relevant.
    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::spec(None, "levels: at least one level is required"));
        }
        for (i, level) in self.levels.iter().enumerate() {
            for &(lo, hi) in level.intervals() {
                if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi > 1.0 {
                    return Err(Error::spec(
                        Some(i + 1),
                        format!("levels[{i}].intervals: [{lo}, {hi}] is not inside [0, 1]"),
                    ));
                }
            }
        }
        if !self.levels[0].contains(0.0) {
            return Err(Error::spec(Some(1), "levels[0].intervals: 0 must belong to the first level"));
        }
        for (i, pair) in self.levels.windows(2).enumerate() {
            if !pair[0].is_subset_of(&pair[1]) {
                return Err(Error::spec(
                    Some(i + 2),
                    format!("levels[{}]: does not contain levels[{i}] (levels must be nested)", i + 1),
                ));
            }
        }
        if let TailMode::Shrinking { lo, hi, delta0 } = self.tail {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi && hi <= 1.0) {
                return Err(Error::spec(None, format!("tail: need 0 <= lo < hi <= 1, got lo={lo}, hi={hi}")));
            }
            if !(delta0.is_finite() && delta0 > 0.0) {
                return Err(Error::spec(None, format!("tail.delta0: must be positive, got {delta0}")));
            }
        }
        Ok(())
    }

    pub fn levels(&self) -> &[IntervalUnion] {
        &self.levels
    }

    pub fn tail(&self) -> TailMode {
        self.tail
    }

    /// Number of explicitly listed levels.
    pub fn explicit_levels(&self) -> usize {
        self.levels.len()
    }

    /// `F_n` for `n >= 1`.
    pub fn level(&self, n: usize) -> IntervalUnion {
        assert!(n >= 1, "levels are numbered from 1");
        let top = self.levels.len();
        if n <= top {
            return self.levels[n - 1].clone();
        }
        match self.tail {
            TailMode::Constant => self.levels[top - 1].clone(),
            TailMode::Shrinking { lo, hi, delta0 } => {
                let j = (n - top) as i32;
                let start = lo + delta0 * 2f64.powi(-j);
                let base = &self.levels[top - 1];
                if start <= hi {
                    base.union(&IntervalUnion::new(vec![(start, hi)]).expect("start <= hi"))
                } else {
                    base.clone()
                }
            }
        }
    }

    /// `α ∈ F = ⋃ F_n`, decided from the description rather than by sampling levels.
    pub fn contains(&self, alpha: f64) -> bool {
        let top = &self.levels[self.levels.len() - 1];
        match self.tail {
            TailMode::Constant => top.contains(alpha),
            TailMode::Shrinking { lo, hi, .. } => top.contains(alpha) || (lo < alpha && alpha <= hi),
        }
    }

    /// Endpoints of the explicit levels, plus the tail's accumulation
    /// endpoints and its first few moving endpoints. Sorted and deduplicated.
    pub fn boundary_points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.levels.iter().flat_map(|l| l.endpoints()).collect();
        if let TailMode::Shrinking { lo, hi, delta0 } = self.tail {
            pts.push(lo);
            pts.push(hi);
            pts.extend((1..=16).map(|j| lo + delta0 * 2f64.powi(-j)).filter(|s| *s <= hi));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}
