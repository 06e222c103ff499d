//! The ₁F₂({1/2}; {1, 3/2}; −x²/4) kernel, i.e. the running mean of J₀.

use super::bessel::{j0, j1, miller_j0_and_integral};
use crate::error::{domain, Result};

const SERIES_LIMIT: f64 = 4.0;
// The Struve expansion is only good to about e^(-x), so it starts late.
const ASYMPTOTIC_LIMIT: f64 = 40.0;

/// ₁F₂({1/2}; {1, 3/2}; −x²/4) = (1/x)∫₀ˣ J₀(u) du for x ≥ 0.
pub fn hyp1f2_kernel(x: f64) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(domain(format!(
            "kernel argument must be finite and non-negative, got {x}"
        )));
    }
    Ok(kernel(x))
}

pub(crate) fn kernel(x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        kernel_series(x)
    } else {
        integral_j0(x) / x
    }
}

/// ∫₀ˣ J₀(u) du for x ≥ 0.
pub fn integral_j0(x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        x * kernel_series(x)
    } else if x <= ASYMPTOTIC_LIMIT {
        miller_j0_and_integral(x).1
    } else {
        integral_j0_asymptotic(x)
    }
}

/// Σ (−x²/4)ᵏ / ((k!)² (2k+1)); only used where cancellation is mild.
fn kernel_series(x: f64) -> f64 {
    let y = -0.25 * x * x;
    let mut t = 1.0; // yᵏ/(k!)²
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        t *= y / (kf * kf);
        let term = t / (2.0 * kf + 1.0);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// ∫₀ˣ J₀ = 1 + J₁(x)·S₁(x) − J₀(x)·S₀(x), from the Struve-function
/// representation with H_ν − Y_ν expanded for large x:
/// S₁ = 1 − 1/x² + 9/x⁴ − 225/x⁶ + …, S₀ = 1/x − 3/x³ + 45/x⁵ − ….
fn integral_j0_asymptotic(x: f64) -> f64 {
    let inv2 = 1.0 / (x * x);
    let mut s1 = 1.0;
    let mut t1: f64 = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..200 {
        let odd = 2.0 * k as f64 + 1.0;
        let next = -t1 * odd * odd * inv2;
        if next.abs() >= prev || next.abs() < 1e-18 {
            break;
        }
        prev = next.abs();
        t1 = next;
        s1 += t1;
    }
    let mut t0 = 1.0 / x;
    let mut s0 = t0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let next = t0 * (1.0 - 4.0 * kf * kf) * inv2;
        if next.abs() >= prev || next.abs() < 1e-18 {
            break;
        }
        prev = next.abs();
        t0 = next;
        s0 += t0;
    }
    1.0 + j1(x) * s1 - j0(x) * s0
}
