//! Real roots of the cubics that show up in parabola projections.
//!
//! Everything here reduces to finding the unique root of a function that is
//! strictly increasing on a known bracket. We bisect until the bracket is
//! narrow, then polish with Newton steps that are rejected whenever they
//! leave the bracket.

use crate::error::{Error, Result};

const BISECTION_WIDTH: f64 = 1e-6;
const POLISH_RESIDUAL: f64 = 1e-14;
const MAX_POLISH_STEPS: usize = 60;

/// Root of `f` on `[lo, hi]` where `f` is strictly increasing with
/// `f(lo) <= 0 <= f(hi)`.
fn increasing_root(f: impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64, scale: f64) -> f64 {
    let tol = POLISH_RESIDUAL * scale.max(1.0);
    let (flo, _) = f(lo);
    if flo >= 0.0 {
        return lo;
    }
    let (fhi, _) = f(hi);
    if fhi <= 0.0 {
        return hi;
    }

    while hi - lo > BISECTION_WIDTH * (1.0 + lo.abs().max(hi.abs())) {
        let mid = 0.5 * (lo + hi);
        let (fm, _) = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut x = 0.5 * (lo + hi);
    let mut best = (f(x).0.abs(), x);
    for _ in 0..MAX_POLISH_STEPS {
        let (fx, dfx) = f(x);
        if fx.abs() < best.0 {
            best = (fx.abs(), x);
        }
        if fx.abs() <= tol {
            // One more Newton step lands on the last bit.
            let y = x - fx / dfx;
            return if y > lo && y < hi && f(y).0.abs() < fx.abs() { y } else { x };
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        x = if dfx > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let fx = f(x).0.abs();
    if fx < best.0 {
        x
    } else {
        best.1
    }
}

/// Unique real root of `a3 x³ + a1 x = rhs` for `a3, a1 > 0`.
///
/// The root satisfies `|x| <= max(1, |rhs| / a1)`, which seeds the bracket.
pub fn monotone_cubic_root(a3: f64, a1: f64, rhs: f64) -> Result<f64> {
    if !(a3.is_finite() && a1.is_finite() && rhs.is_finite()) {
        return Err(Error::contract("monotone_cubic_root: non-finite input"));
    }
    if a3 <= 0.0 || a1 <= 0.0 {
        return Err(Error::contract(format!(
            "monotone_cubic_root: need a3 > 0 and a1 > 0, got a3={a3}, a1={a1}"
        )));
    }
    if rhs == 0.0 {
        return Ok(0.0);
    }
    let bound = (rhs.abs() / a1).max(1.0);
    let f = |x: f64| (a3 * x * x * x + a1 * x - rhs, 3.0 * a3 * x * x + a1);
    Ok(increasing_root(f, -bound, bound, rhs.abs()))
}

/// Abscissa of the nearest point of the parabola `y = x²` to `(u, v)`,
/// for a point strictly below the parabola.
///
/// The foot solves `2x³ + (1 - 2v) x - u = 0`. When `v >= 1/2` the cubic is
/// not monotone, but the foot is the unique root on the branch where the
/// cubic increases and which shares the sign of `u`.
pub(crate) fn parabola_foot(u: f64, v: f64) -> f64 {
    if u == 0.0 {
        // Below the vertex: 1 - 2v > 0, and the only root is 0.
        return 0.0;
    }
    let sign = u.signum();
    let u = u.abs();
    let a1 = 1.0 - 2.0 * v;
    let f = |x: f64| (2.0 * x * x * x + a1 * x - u, 6.0 * x * x + a1);
    // Increasing for x > x_c and f(x_c) <= -u < 0.
    let x_c = if a1 < 0.0 { (-a1 / 6.0).sqrt() } else { 0.0 };
    // f(x) >= 0 once x >= u, x >= 1 and 2x² >= -a1.
    let hi = u.max(1.0).max((-a1 / 2.0).max(0.0).sqrt()) + 1.0;
    sign * increasing_root(f, x_c, hi, u.max(a1.abs()))
}
