//! Building blocks of `f(x, z) = x² + Σ c_n g_n(x) h_n(z)`.

use serde::{Deserialize, Serialize};

/// Deepest truncation ever used; the tail after it is below 1e-38.
pub const MAX_TERMS: usize = 128;

/// `(value, first derivative, second derivative)`.
pub type Triple = (f64, f64, f64);

/// `g(x) = (x - a)³ (b - x)³` and its first two derivatives, for `a <= x <= b`.
pub fn g_n(x: f64, a: f64, b: f64) -> Triple {
    if a == b {
        return (0.0, 0.0, 0.0);
    }
    let l = x - a;
    let r = b - x;
    let m = a + b - 2.0 * x;
    let lr = l * r;
    (lr * lr * lr, 3.0 * lr * lr * m, 6.0 * lr * (m * m - lr))
}

/// `h(z) = (n - z)₊³` and its first two derivatives.
pub fn h_n(z: f64, n: usize) -> Triple {
    let t = (n as f64 - z).max(0.0);
    (t * t * t, -3.0 * t * t, 6.0 * t)
}

/// Positive coefficients `c_n = s · (6/81²) n⁻³ 2^-(n+1)`. The standard rule
/// has `s = 1`, for which `Σ (81²/6) n³ c_n = 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRule {
    scale: f64,
}

impl Default for CoefficientRule {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

impl CoefficientRule {
    pub fn standard() -> Self {
        Self::default()
    }

    /// Multiplies every coefficient by `scale`. Scales above 2 break the
    /// summability condition that makes `f` convex; only useful as a
    /// negative control.
    #[doc(hidden)]
    pub fn scaled(scale: f64) -> Self {
        Self { scale }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn coefficient(&self, n: usize) -> f64 {
        assert!(n >= 1, "coefficients are indexed from 1");
        let n3 = (n as f64).powi(3);
        self.scale * 6.0 / 6561.0 / n3 * 2f64.powi(-(n as i32 + 1))
    }

    /// `Σ (81²/6) n³ c_n`, summed in closed form.
    pub fn certification_sum(&self) -> f64 {
        0.5 * self.scale
    }

    /// Bound on the tail after `terms` terms, valid for the value and every
    /// gradient and Hessian entry. The worst per-term bound is the `∂²/∂z²`
    /// one, `c_n · 3⁶ · 6n = 4 s 2^-(n+1)`.
    pub fn tail_bound(&self, terms: usize) -> f64 {
        4.0 * self.scale * 2f64.powi(-(terms as i32 + 1))
    }

    /// Tail bound of the value alone: `(2/3) s 2^-(N+1)`.
    pub fn value_tail_bound(&self, terms: usize) -> f64 {
        2.0 / 3.0 * self.scale * 2f64.powi(-(terms as i32 + 1))
    }

    /// Smallest `N` with `tail_bound(N) <= tol`, capped at [`MAX_TERMS`].
    pub fn terms_for(&self, tol: f64) -> usize {
        (1..=MAX_TERMS)
            .find(|&n| self.tail_bound(n) <= tol)
            .unwrap_or(MAX_TERMS)
    }
}

/// `Σ_n (81²/6) n³ c_n` for the standard rule: exactly one half.
pub fn certification_sum() -> f64 {
    CoefficientRule::standard().certification_sum()
}

/// `c_n` under the standard rule.
pub fn coefficient(n: usize) -> f64 {
    CoefficientRule::standard().coefficient(n)
}
