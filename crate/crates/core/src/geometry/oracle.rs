//! Brute-force nearest-point search, used as an independent check on
//! [`ConvexSetDescriptor::project`](super::ConvexSetDescriptor::project).
//!
//! A set is described to the oracle by a parameterization of the part of its
//! boundary that can carry a nearest point, plus a few explicit candidates
//! (the query point itself when it is a member, and its clamp onto the floor
//! `z = 0` when that is a member). The oracle never calls a projection routine.

use super::{ConvexSetDescriptor, PointN};
use crate::error::{Error, Result};

/// Axis-aligned sampling window in ambient coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Window {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| !(a <= b)) {
            return Err(Error::contract("window bounds must satisfy lo <= hi per axis"));
        }
        Ok(Self { lo, hi })
    }

    /// The cube `[-half, half]^dim`.
    pub fn cube(dim: usize, half: f64) -> Self {
        Self {
            lo: vec![-half; dim],
            hi: vec![half; dim],
        }
    }

    pub fn contains(&self, p: &PointN) -> bool {
        p.dim() == self.lo.len()
            && p.coords()
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(c, (lo, hi))| c >= lo && c <= hi)
    }
}

/// A parameterized sample of a closed convex set.
pub trait SetSampler {
    fn dim(&self) -> usize;

    /// Parameter box `[(lo, hi); k]` covering the part of the boundary inside
    /// the window, or `None` when that part is empty.
    fn param_box(&self, window: &Window) -> Option<Vec<(f64, f64)>>;

    fn point_at(&self, params: &[f64]) -> PointN;

    /// Candidates that the parameterization may miss.
    fn extra_candidates(&self, p: &PointN) -> Vec<PointN>;
}

impl SetSampler for ConvexSetDescriptor {
    fn dim(&self) -> usize {
        ConvexSetDescriptor::dim(self)
    }

    fn param_box(&self, w: &Window) -> Option<Vec<(f64, f64)>> {
        match self {
            Self::Singleton(_) => None,
            Self::VerticalRay { base } => {
                let inside = (w.lo[0]..=w.hi[0]).contains(&base[0]) && (w.lo[1]..=w.hi[1]).contains(&base[1]);
                let lo_z = w.lo[2].max(0.0);
                (inside && lo_z <= w.hi[2]).then(|| vec![(lo_z, w.hi[2])])
            }
            Self::ParabolaEpigraph => Some(vec![(w.lo[0], w.hi[0])]),
            Self::SmoothEpigraph(_) => {
                let lo_z = w.lo[2].max(0.0);
                (lo_z <= w.hi[2]).then(|| vec![(w.lo[0], w.hi[0]), (lo_z, w.hi[2])])
            }
            Self::ProductWithHalfLine(inner) => {
                let lo_z = w.lo[2].max(0.0);
                if lo_z > w.hi[2] {
                    return None;
                }
                let planar = Window {
                    lo: w.lo[..2].to_vec(),
                    hi: w.hi[..2].to_vec(),
                };
                let mut b = inner.param_box(&planar).unwrap_or_default();
                b.push((lo_z, w.hi[2]));
                Some(b)
            }
        }
    }

    fn point_at(&self, t: &[f64]) -> PointN {
        match self {
            Self::Singleton(q) => q.clone(),
            Self::VerticalRay { base } => PointN::from([base[0], base[1], t[0]]),
            Self::ParabolaEpigraph => PointN::from([t[0], t[0] * t[0]]),
            Self::SmoothEpigraph(f) => PointN::from([t[0], f.value(t[0], t[1]), t[1]]),
            Self::ProductWithHalfLine(inner) => {
                let z = *t.last().expect("product parameter list ends with z");
                let q = match inner.as_ref() {
                    Self::Singleton(q) => q.clone(),
                    other => other.point_at(&t[..t.len() - 1]),
                };
                PointN::from([q[0], q[1], z])
            }
        }
    }

    fn extra_candidates(&self, p: &PointN) -> Vec<PointN> {
        let mut out = Vec::new();
        if self.contains(p, 0.0) {
            out.push(p.clone());
        }
        match self {
            Self::Singleton(q) => out.push(q.clone()),
            Self::SmoothEpigraph(_) | Self::ProductWithHalfLine(_) if p.dim() == 3 => {
                let floor = PointN::from([p[0], p[1], 0.0]);
                if self.contains(&floor, 0.0) {
                    out.push(floor);
                }
            }
            _ => {}
        }
        out
    }
}

/// Grid-argmin of the distance from `p` over the sampled set.
///
/// One-parameter boundaries are scanned directly at `step`. Two-parameter
/// boundaries are scanned coarse-to-fine, ending with a full pass at `step`
/// around the coarse minimizer.
pub fn brute_force_project(
    sampler: &dyn SetSampler,
    p: &PointN,
    window: &Window,
    step: f64,
) -> Result<PointN> {
    p.ensure_dim(sampler.dim())?;
    if window.lo.len() != sampler.dim() {
        return Err(Error::contract("window dimension differs from the set"));
    }
    if !(step > 0.0) {
        return Err(Error::contract("grid step must be positive"));
    }

    let mut best: Option<(f64, PointN)> = None;
    let offer = |q: PointN, best: &mut Option<(f64, PointN)>| {
        if !window.contains(&q) {
            return;
        }
        let d = q.dist(p);
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            *best = Some((d, q));
        }
    };

    for q in sampler.extra_candidates(p) {
        offer(q, &mut best);
    }

    if let Some(pbox) = sampler.param_box(window) {
        match pbox.len() {
            0 => offer(sampler.point_at(&[]), &mut best),
            1 => {
                let (lo, hi) = pbox[0];
                let n = ((hi - lo) / step).floor() as usize;
                for i in 0..=n {
                    offer(sampler.point_at(&[lo + i as f64 * step]), &mut best);
                }
            }
            _ => {
                if let Some(q) = coarse_to_fine(sampler, p, window, &pbox, step) {
                    offer(q, &mut best);
                }
            }
        }
    }

    best.map(|(_, q)| q)
        .ok_or_else(|| Error::OracleFailure("sampling window contains no point of the set".into()))
}

fn coarse_to_fine(
    sampler: &dyn SetSampler,
    p: &PointN,
    window: &Window,
    pbox: &[(f64, f64)],
    step: f64,
) -> Option<PointN> {
    const COARSE_CELLS: f64 = 200.0;
    const SHRINK: f64 = 10.0;

    let extent = pbox.iter().map(|(lo, hi)| hi - lo).fold(0.0, f64::max);
    let mut h = (extent / COARSE_CELLS).max(step);
    let mut bounds: Vec<(f64, f64)> = pbox.to_vec();
    let mut found: Option<(f64, Vec<f64>)>;

    loop {
        found = None;
        let counts: Vec<usize> = bounds
            .iter()
            .map(|(lo, hi)| ((hi - lo) / h).floor() as usize + 1)
            .collect();
        let mut idx = vec![0usize; bounds.len()];
        let mut t = vec![0.0; bounds.len()];
        'grid: loop {
            for (k, i) in idx.iter().enumerate() {
                t[k] = (bounds[k].0 + *i as f64 * h).min(bounds[k].1);
            }
            let q = sampler.point_at(&t);
            if window.contains(&q) {
                let d = q.dist(p);
                if found.as_ref().is_none_or(|(bd, _)| d < *bd) {
                    found = Some((d, t.clone()));
                }
            }
            for k in 0..idx.len() {
                idx[k] += 1;
                if idx[k] < counts[k] {
                    continue 'grid;
                }
                idx[k] = 0;
            }
            break;
        }

        let (_, center) = found.as_ref()?;
        if h <= step {
            break;
        }
        let reach = 3.0 * h;
        bounds = center
            .iter()
            .zip(pbox)
            .map(|(c, (lo, hi))| ((c - reach).max(*lo), (c + reach).min(*hi)))
            .collect();
        h = (h / SHRINK).max(step);
    }

    found.map(|(_, t)| sampler.point_at(&t))
}
