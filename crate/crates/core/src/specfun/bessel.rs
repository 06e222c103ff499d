//! Bessel functions of the first kind, orders 0 and 1.
//!
//! Power series for |x| ≤ 6, Miller backward recurrence up to 20, Hankel
//! asymptotic expansion beyond.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{domain, Result};

// Series cancellation costs ~1e-13 by x = 10; Hankel's smallest term is
// ~5e-13 at x = 12.
const SERIES_LIMIT: f64 = 6.0;
const RECURRENCE_LIMIT: f64 = 20.0;

/// J₀(x). Returns NaN for NaN input; see [`bessel_j0`] for the checked form.
pub fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= SERIES_LIMIT {
        j0_series(ax)
    } else if ax <= RECURRENCE_LIMIT {
        miller(ax).0
    } else {
        hankel(ax, 0)
    }
}

/// J₁(x), odd in x.
pub fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_LIMIT {
        j1_series(ax)
    } else if ax <= RECURRENCE_LIMIT {
        miller(ax).1
    } else {
        hankel(ax, 1)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// J₀(x) with a domain check on the argument.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("J0 argument must be finite, got {x}")));
    }
    Ok(j0(x))
}

/// J₁(x) with a domain check on the argument.
pub fn bessel_j1(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("J1 argument must be finite, got {x}")));
    }
    Ok(j1(x))
}

fn j0_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        let kf = k as f64;
        term *= -y / (kf * kf);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > 2 {
            break;
        }
    }
    sum
}

fn j1_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for k in 1..80 {
        let kf = k as f64;
        term *= -y / (kf * (kf + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > 2 {
            break;
        }
    }
    sum
}

/// Hankel expansion J_ν(x) = √(2/πx)·[P cos χ − Q sin χ], χ = x − (2ν+1)π/4,
/// summed up to its smallest term.
fn hankel(x: f64, nu: u32) -> f64 {
    let mu = 4.0 * f64::from(nu * nu);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = term * (mu - odd * odd) / (kf * 8.0 * x);
        if next.abs() >= prev || next == 0.0 {
            break;
        }
        prev = next.abs();
        term = next;
        // a_k enters P for even k and Q for odd k, with alternating signs.
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    // cos(x − φ) and sin(x − φ) for φ = π/4 or 3π/4 without forming x − φ.
    let (cos_chi, sin_chi) = if nu == 0 {
        ((c + s) * FRAC_PI_4.cos(), (s - c) * FRAC_PI_4.sin())
    } else {
        ((s - c) * FRAC_PI_4.cos(), -(c + s) * FRAC_PI_4.sin())
    };
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// J₀(x) and ∫₀ˣ J₀ = 2 Σ J_{2k+1}(x) by Miller recurrence, x > 0.
pub(crate) fn miller_j0_and_integral(x: f64) -> (f64, f64) {
    let (j0, _, integral) = miller(x);
    (j0, integral)
}

/// Miller backward recurrence for (J₀, J₁, ∫₀ˣ J₀), x > 0.
///
/// Normalised with J₀ + 2 Σ J_{2k} = 1; accurate to a few ulps of O(1).
fn miller(x: f64) -> (f64, f64, f64) {
    let start = x + 30.0 + 8.0 * x.cbrt();
    let mut n = start.ceil() as usize;
    if n % 2 == 1 {
        n += 1;
    }
    let mut j_next = 0.0; // J_{k+1}
    let mut j_cur = 1e-30; // J_k, k = n
    let mut norm = 0.0;
    let mut odd_sum = 0.0;
    for k in (1..=n).rev() {
        // J_{k-1} = (2k/x) J_k − J_{k+1}
        let j_prev = (2.0 * k as f64 / x) * j_cur - j_next;
        if k % 2 == 0 {
            norm += 2.0 * j_cur;
        } else {
            odd_sum += j_cur;
        }
        j_next = j_cur;
        j_cur = j_prev;
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
            odd_sum *= 1e-250;
        }
    }
    norm += j_cur;
    (j_cur / norm, j_next / norm, 2.0 * odd_sum / norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// J₀(x) = (1/π)∫₀^π cos(x sin θ) dθ; the trapezoid rule converges
    /// geometrically for this periodic integrand.
    fn j0_trapezoid(x: f64) -> f64 {
        let n = 200 + 2 * x.abs() as usize;
        let h = PI / n as f64;
        let mut s = 0.5 * (1.0 + 1.0);
        for k in 1..n {
            s += (x * (k as f64 * h).sin()).cos();
        }
        s / n as f64
    }

    #[test]
    fn j0_at_zero_is_one() {
        assert_eq!(j0(0.0), 1.0);
        assert_eq!(j1(0.0), 0.0);
    }

    #[test]
    fn j0_matches_integral_representation() {
        for i in 0..400 {
            let x = i as f64 * 0.25;
            let d = (j0(x) - j0_trapezoid(x)).abs();
            assert!(d < 1e-13, "x={x} diff={d}");
        }
    }

    #[test]
    fn forty_term_series_agrees_at_ten() {
        let x: f64 = 10.0;
        let mut t = 1.0;
        let mut s = 1.0;
        for k in 1..40 {
            t *= -(x * x / 4.0) / (k as f64 * k as f64);
            s += t;
        }
        assert!((j0(x) - s).abs() < 1e-12);
        // Hankel branch on its own is limited by its smallest term at x = 10.
        assert!((hankel(x, 0) - s).abs() < 1e-9);
    }

    #[test]
    fn crossover_overlap() {
        for i in 0..=20 {
            let x = 19.0 + i as f64 * 0.1;
            let (m0, m1, _) = miller(x);
            assert!(
                (m0 - hankel(x, 0)).abs() < 1e-14,
                "x={x} {}",
                m0 - hankel(x, 0)
            );
            assert!(
                (m1 - hankel(x, 1)).abs() < 1e-14,
                "x={x} {}",
                m1 - hankel(x, 1)
            );
            let y = 5.0 + 0.1 * i as f64;
            assert!((miller(y).0 - j0_series(y)).abs() < 1e-14);
            assert!((miller(y).1 - j1_series(y)).abs() < 1e-14);
        }
    }

    #[test]
    fn j1_is_minus_derivative_of_j0() {
        for i in 1..60 {
            let x = i as f64 * 0.7;
            // Fourth-order stencil; the series carries ~1e-12 rounding near 12.
            let h = 1e-2;
            let d =
                (8.0 * (j0(x + h) - j0(x - h)) - (j0(x + 2.0 * h) - j0(x - 2.0 * h))) / (12.0 * h);
            assert!((d + j1(x)).abs() < 1e-8, "x={x} {}", d + j1(x));
        }
    }

    #[test]
    fn miller_agrees_with_direct_j0() {
        for i in 1..200 {
            let x = i as f64 * 0.5;
            let (m, _) = miller_j0_and_integral(x);
            assert!((m - j0(x)).abs() < 2e-12, "x={x}");
        }
    }

    #[test]
    fn first_zero_by_bisection() {
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if j0(lo) * j0(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((lo - 2.404826).abs() < 1e-6);
        assert!(j0(2.404826).abs() < 1e-6);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(bessel_j0(f64::NAN).is_err());
        assert!(bessel_j0(f64::INFINITY).is_err());
        assert!(bessel_j1(f64::NEG_INFINITY).is_err());
    }
}
