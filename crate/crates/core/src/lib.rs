//! Relaxed projections onto closed convex sets, and a laboratory for the
//! question of when a composition of relaxed projections has a fixed point.
//!
//! For a relaxation coefficient `α ∈ [0, 1]` the relaxed projection onto a
//! closed convex set `A` is `x ↦ α P_A(x) + (1 - α) x`. Given a set
//! `F ⊂ [0, 1]` containing 0 and written as an increasing union of closed
//! sets, [`construction`] builds three convex sets in ℝ³ whose relaxed
//! composition has a fixed point exactly when `α ∈ F`, and [`dynamics`]
//! detects that numerically.
//!
//! Module map:
//!
//! - [`geometry`]: points, sets, exact projections and a brute-force oracle.
//! - [`planar`]: closed-form fixed points of the planar three-set composition.
//! - [`construction`]: F-sigma specs, the series function and the scene.
//! - [`dynamics`]: relaxed projections, iteration and classification.
//! - [`analysis`]: Cesàro averaging and closedness probes.
//! - [`report`]: scans, tables and their CSV/JSON encodings.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod analysis;
pub mod construction;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod planar;
pub mod report;
pub mod seed;

pub use error::{Error, Result};
pub use geometry::{ConvexSetDescriptor, PointN};
