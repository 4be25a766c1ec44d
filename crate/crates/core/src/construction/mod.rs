//! The three-set scene built from an F-sigma description of `F ⊂ [0, 1]`.
//!
//! Each closed level `F_n` is mapped by the decreasing function `φ` into
//! `(-1, 2)` and padded with the rays `(-∞, -1]` and `[2, ∞)`, giving `E_n`.
//! The series function `f` is `x²` plus non-negative bumps that live on the
//! gaps of `E_n` and are switched off for `z >= n`, so `f(x, z) = x²` for
//! large `z` exactly when `x ∈ ⋃ E_n`.

mod fsigma;
mod interval;
mod scene;
pub mod series;
mod verify;

pub use fsigma::{FSigmaSpec, TailMode};
pub use interval::IntervalUnion;
pub use scene::{build_e, f_eval, gap_endpoints, membership_gap, ConstructedScene, FEval, SeriesFunction, SCENE_TOL, FLAT_TOL};
pub use series::{certification_sum, coefficient, g_n, h_n, CoefficientRule};
pub use verify::{verify_construction, CheckResult, ConstructionReport, VerifyGrid};
