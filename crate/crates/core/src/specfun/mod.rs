//! Special functions used by the transition and dynamics code.

mod bessel;
mod kernel;
mod polylog;
mod zeros;

pub use bessel::{bessel_j0, bessel_j1, j0, j1};
pub use kernel::{hyp1f2_kernel, integral_j0};
pub use polylog::polylog_neg_half;
pub use zeros::{j0_zero, j0_zeros_up_to, zero_table, BesselZeroTable};

pub(crate) use kernel::kernel;

use crate::error::{domain, Result};

/// f(t) = ∫₀ᵗ |J₀(Ω_R τ)| dτ, evaluated piecewise between the zeros of J₀:
///
/// f = [(−1)ᵐ I(x) − 2 Σ_{j≤m} (−1)ʲ I(γⱼ)] / Ω_R,  x = Ω_R t,
///
/// with I(x) = ∫₀ˣ J₀ and m the number of zeros γⱼ ≤ x.
pub fn abs_j0_integral(omega_r: f64, t: f64) -> Result<f64> {
    if !(omega_r > 0.0 && omega_r.is_finite()) {
        return Err(domain(format!(
            "Rabi frequency must be positive, got {omega_r}"
        )));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(domain(format!("time must be non-negative, got {t}")));
    }
    Ok(abs_j0_integral_unchecked(omega_r, t))
}

pub(crate) fn abs_j0_integral_unchecked(omega_r: f64, t: f64) -> f64 {
    let x = omega_r * t;
    if x == 0.0 {
        return 0.0;
    }
    let (m, signed_sum) =
        zeros::with_zeros_up_to(x, |z, s| (z.len(), s.last().copied().unwrap_or(0.0)));
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    (sign * integral_j0(x) - 2.0 * signed_sum) / omega_r
}
