//! Renormalized light–matter couplings, Einstein A/B coefficients and the
//! cavity quality-factor algebra.
//!
//! Every coupling here is fixed by one requirement: the net emission
//! probability must settle at 1/2 for long times. The closed forms are fast
//! paths for that condition.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{C, EPSILON_0, HBAR};
use crate::error::{domain, numerical, Result};
use crate::photons::{planck_density_per_photon_unchecked, PhotonField};
use crate::specfun::polylog_neg_half;

/// 2g′/ω₀ above this triggers a rotating-wave warning.
pub const RWA_WARN_RATIO: f64 = 0.01;

/// Emitter with Bohr frequency `omega0` (rad/s) and dipole `d21` (C·m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelSystem {
    pub omega0: f64,
    pub d21: f64,
}

impl TwoLevelSystem {
    pub fn new(omega0: f64, d21: f64) -> Result<Self> {
        positive("Bohr frequency", omega0)?;
        positive("dipole moment", d21)?;
        Ok(Self { omega0, d21 })
    }
}

/// Open Fabry–Perot geometry: mirror quality factor, mirror radius (m) and
/// mirror separation (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityGeometry {
    pub q_factor: f64,
    pub mirror_radius: f64,
    pub mirror_separation: f64,
}

impl CavityGeometry {
    pub fn new(q_factor: f64, mirror_radius: f64, mirror_separation: f64) -> Result<Self> {
        positive("quality factor", q_factor)?;
        positive("mirror radius", mirror_radius)?;
        positive("mirror separation", mirror_separation)?;
        Ok(Self {
            q_factor,
            mirror_radius,
            mirror_separation,
        })
    }

    /// p₀ = 2πrh/(2πrh + 2πr²) = 1/(1 + r/h): the fraction of photons that
    /// leave through the open side.
    pub fn escape_probability(&self) -> f64 {
        1.0 / (1.0 + self.mirror_radius / self.mirror_separation)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    FreeSpace,
    BlackbodyThermal,
    LossyThermal,
    LossyCoherent,
}

impl Scenario {
    pub fn is_lossy(self) -> bool {
        matches!(self, Scenario::LossyThermal | Scenario::LossyCoherent)
    }
}

/// Renormalized coupling and the coefficients that go with it. Frequencies
/// in rad/s; `b0_coefficient` in (rad/s)/(J·s/m³).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSolution {
    pub g_prime: f64,
    pub omega_rabi: f64,
    pub a0_coefficient: f64,
    pub b0_coefficient: f64,
    pub q_net: Option<f64>,
    pub scenario: Scenario,
    pub omega0: f64,
    pub nbar: f64,
}

impl CouplingSolution {
    fn build(
        scenario: Scenario,
        g_prime: f64,
        omega_rabi: f64,
        a0: f64,
        q_net: Option<f64>,
        omega0: f64,
        nbar: f64,
    ) -> Self {
        let sol = Self {
            g_prime,
            omega_rabi,
            a0_coefficient: a0,
            b0_coefficient: a0 / planck_density_per_photon_unchecked(omega0),
            q_net,
            scenario,
            omega0,
            nbar,
        };
        if sol.rwa_ratio() > RWA_WARN_RATIO {
            log::warn!(
                "2g'/omega0 = {:.3e}: rotating-wave approximation is doubtful",
                sol.rwa_ratio()
            );
        }
        sol
    }

    /// 2g′/ω₀.
    pub fn rwa_ratio(&self) -> f64 {
        2.0 * self.g_prime / self.omega0
    }

    /// Lorentzian width ω₀/Q′, if the cavity is lossy.
    pub fn linewidth(&self) -> Option<f64> {
        self.q_net.map(|q| self.omega0 / q)
    }
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "{what} must be positive and finite, got {v}"
        )))
    }
}

fn non_negative(what: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "{what} must be non-negative and finite, got {v}"
        )))
    }
}

/// A(0) = d²ω₀³/(3πc³ε₀ħ).
pub fn free_space_a0(system: &TwoLevelSystem) -> f64 {
    system.d21.powi(2) * system.omega0.powi(3) / (3.0 * PI * C.powi(3) * EPSILON_0 * HBAR)
}

/// B₂₁(0) = πd²/(3ε₀ħ²).
pub fn einstein_b0(system: &TwoLevelSystem) -> f64 {
    PI * system.d21.powi(2) / (3.0 * EPSILON_0 * HBAR * HBAR)
}

/// g′(n̄) = (A(0)/n̄)·Li₋₁⁄₂(n̄/(1+n̄)), equal to A(0)·Σ pₙ√(n+1) for
/// thermal pₙ; A(0) itself at n̄ = 0.
pub fn renorm_blackbody(a0: f64, nbar: f64) -> Result<f64> {
    positive("A(0)", a0)?;
    non_negative("mean photon number", nbar)?;
    if nbar == 0.0 {
        return Ok(a0);
    }
    Ok(a0 * polylog_neg_half(nbar / (1.0 + nbar))? / nbar)
}

/// Free-space emitter, no photons: g′ = A(0), Ω_R = 2A(0).
pub fn free_space_coupling(system: &TwoLevelSystem) -> CouplingSolution {
    let a0 = free_space_a0(system);
    CouplingSolution::build(
        Scenario::FreeSpace,
        a0,
        2.0 * a0,
        a0,
        None,
        system.omega0,
        0.0,
    )
}

/// Ideal (lossless) cavity filled with blackbody radiation at n̄.
pub fn blackbody_coupling(system: &TwoLevelSystem, nbar: f64) -> Result<CouplingSolution> {
    blackbody_coupling_with_a0(free_space_a0(system), system.omega0, nbar)
}

/// Ideal-cavity coupling for a given (possibly cavity-enhanced) A(0).
pub fn blackbody_coupling_with_a0(a0: f64, omega0: f64, nbar: f64) -> Result<CouplingSolution> {
    positive("Bohr frequency", omega0)?;
    let g = renorm_blackbody(a0, nbar)?;
    Ok(CouplingSolution::build(
        Scenario::BlackbodyThermal,
        g,
        2.0 * g * (nbar + 1.0).sqrt(),
        a0,
        None,
        omega0,
        nbar,
    ))
}

/// Q′ = 1/(1/Q + p₀A(0)/ω₀).
pub fn net_quality_factor(geometry: &CavityGeometry, a0_enhanced: f64, omega0: f64) -> Result<f64> {
    net_quality_factor_with_escape(
        geometry.q_factor,
        geometry.escape_probability(),
        a0_enhanced,
        omega0,
    )
}

/// Same as [`net_quality_factor`] with the escape probability given directly.
pub fn net_quality_factor_with_escape(
    q_factor: f64,
    escape_probability: f64,
    a0_enhanced: f64,
    omega0: f64,
) -> Result<f64> {
    positive("quality factor", q_factor)?;
    positive("Bohr frequency", omega0)?;
    non_negative("A(0)", a0_enhanced)?;
    if !(0.0..1.0).contains(&escape_probability) {
        return Err(domain(format!(
            "escape probability must lie in [0, 1), got {escape_probability}"
        )));
    }
    Ok(1.0 / (1.0 / q_factor + escape_probability * a0_enhanced / omega0))
}

/// Positive root of 2Ω²Q′/ω₀ + Ω − 2A(0)(n̄+1) = 0, written in the
/// cancellation-free form Ω = 4A(n̄+1)/(1 + √(1 + 16A(n̄+1)Q′/ω₀)).
pub(crate) fn lossy_rabi_root(a0: f64, nbar: f64, q_net: f64, omega0: f64) -> f64 {
    let x = 16.0 * a0 * (nbar + 1.0) * q_net / omega0;
    4.0 * a0 * (nbar + 1.0) / (1.0 + (1.0 + x).sqrt())
}

/// Vacuum-Rabi fixed point g′ = A(0)√(n̄+1)/(1 + 4g′√(n̄+1)Q′/ω₀) for a lossy
/// cavity with the photon-number spread neglected.
pub fn lossy_fixed_point(a0: f64, nbar: f64, q_net: f64, omega0: f64) -> Result<CouplingSolution> {
    positive("A(0)", a0)?;
    non_negative("mean photon number", nbar)?;
    positive("net quality factor", q_net)?;
    positive("Bohr frequency", omega0)?;
    let omega_rabi = lossy_rabi_root(a0, nbar, q_net, omega0);
    Ok(CouplingSolution::build(
        Scenario::LossyThermal,
        omega_rabi / (2.0 * (nbar + 1.0).sqrt()),
        omega_rabi,
        a0,
        Some(q_net),
        omega0,
        nbar,
    ))
}

/// A(0) = Ω_R/(2(n̄+1)) + Ω_R²Q′/(ω₀(n̄+1)). `q_net = 0` drops the cavity
/// (Purcell) term and leaves the free-space part.
pub fn invert_a0_from_rabi(omega_rabi: f64, nbar: f64, q_net: f64, omega0: f64) -> Result<f64> {
    positive("Rabi frequency", omega_rabi)?;
    non_negative("mean photon number", nbar)?;
    non_negative("net quality factor", q_net)?;
    positive("Bohr frequency", omega0)?;
    Ok(omega_rabi / (2.0 * (nbar + 1.0))
        + omega_rabi * omega_rabi * q_net / (omega0 * (nbar + 1.0)))
}

const COUPLED_MAX_ITER: usize = 200;
const COUPLED_TOL: f64 = 1e-12;

/// Solves the enhanced A(0) and Q′ together for a measured Ω_R.
pub fn solve_cavity_coupled(
    omega_rabi: f64,
    nbar: f64,
    geometry: &CavityGeometry,
    omega0: f64,
) -> Result<CouplingSolution> {
    solve_cavity_coupled_with_escape(
        omega_rabi,
        nbar,
        geometry.q_factor,
        geometry.escape_probability(),
        omega0,
    )
}

/// [`solve_cavity_coupled`] with the escape probability given directly.
pub fn solve_cavity_coupled_with_escape(
    omega_rabi: f64,
    nbar: f64,
    q_factor: f64,
    escape_probability: f64,
    omega0: f64,
) -> Result<CouplingSolution> {
    let mut a0 = invert_a0_from_rabi(omega_rabi, nbar, 0.0, omega0)?;
    let mut q_net = net_quality_factor_with_escape(q_factor, escape_probability, a0, omega0)?;
    let mut converged = false;
    for _ in 0..COUPLED_MAX_ITER {
        let a_next = invert_a0_from_rabi(omega_rabi, nbar, q_net, omega0)?;
        let q_next = net_quality_factor_with_escape(q_factor, escape_probability, a_next, omega0)?;
        converged = (a_next - a0).abs() <= COUPLED_TOL * a_next
            && (q_next - q_net).abs() <= COUPLED_TOL * q_next;
        a0 = a_next;
        q_net = q_next;
        if converged {
            break;
        }
    }
    if !converged {
        // Far outside the physical regime the iteration stops contracting.
        // Eliminating Q′ leaves a quadratic in A(0) with one positive root.
        log::debug!("coupled iteration not contracting; using the quadratic root");
        let np1 = nbar + 1.0;
        let free = omega_rabi / (2.0 * np1);
        let k = omega_rabi * omega_rabi / (omega0 * np1);
        let alpha = escape_probability / omega0;
        let beta = 1.0 / q_factor - free * alpha;
        let gamma = free / q_factor + k;
        a0 = if alpha == 0.0 {
            gamma / beta
        } else {
            let disc = (beta * beta + 4.0 * alpha * gamma).sqrt();
            if beta >= 0.0 {
                2.0 * gamma / (beta + disc)
            } else {
                (disc - beta) / (2.0 * alpha)
            }
        };
        q_net = net_quality_factor_with_escape(q_factor, escape_probability, a0, omega0)?;
        if !(a0.is_finite() && a0 > 0.0) {
            return Err(numerical(format!(
                "coupled A(0)/Q' solve failed (A = {a0:e}, Q' = {q_net:e})"
            )));
        }
    }
    // One more pass so both equations hold at the returned pair.
    a0 = invert_a0_from_rabi(omega_rabi, nbar, q_net, omega0)?;
    Ok(CouplingSolution::build(
        Scenario::LossyThermal,
        omega_rabi / (2.0 * (nbar + 1.0).sqrt()),
        omega_rabi,
        a0,
        Some(q_net),
        omega0,
        nbar,
    ))
}

/// Long-time value of one lossy-cavity n-term,
/// A(0)·w·(n+1)·c/(ωₙ(c + 2ωₙ)) with ωₙ = 2g√(n+1) and c = ω₀/Q′.
pub fn lossy_limit_term(a0: f64, weight: f64, n: usize, g: f64, linewidth: f64) -> f64 {
    let np1 = n as f64 + 1.0;
    let w = 2.0 * g * np1.sqrt();
    a0 * weight * np1 * linewidth / (w * (linewidth + 2.0 * w))
}

/// Σₙ of [`lossy_limit_term`] over the given occupation weights.
pub fn lossy_long_time_limit(a0: f64, weights: &[f64], g: f64, linewidth: f64) -> f64 {
    weights
        .iter()
        .enumerate()
        .map(|(n, &p)| lossy_limit_term(a0, p, n, g, linewidth))
        .sum()
}

/// How the photon-number distribution enters the coherent-field coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherentClosure {
    /// Full Poisson sum of the per-n long-time limits set to 1/2.
    #[default]
    PoissonSum,
    /// Single term at n = n̄, i.e. the vacuum-Rabi fixed point evaluated at
    /// the coherent mean.
    MeanPhoton,
}

/// Coupling for a coherent (Poisson) field in a lossy cavity.
pub fn renorm_coherent(
    a0: f64,
    nbar: f64,
    q_net: f64,
    omega0: f64,
    closure: CoherentClosure,
) -> Result<CouplingSolution> {
    positive("A(0)", a0)?;
    non_negative("mean photon number", nbar)?;
    positive("net quality factor", q_net)?;
    positive("Bohr frequency", omega0)?;
    let g = match closure {
        CoherentClosure::MeanPhoton => {
            lossy_rabi_root(a0, nbar, q_net, omega0) / (2.0 * (nbar + 1.0).sqrt())
        }
        CoherentClosure::PoissonSum => {
            let weights = PhotonField::coherent(omega0, nbar)?.truncated_weights()?;
            let c = omega0 / q_net;
            let excess = |g: f64| lossy_long_time_limit(a0, &weights, g, c) - 0.5;
            bisect_decreasing(excess, 1e-3 * a0, 1e3 * a0)?
        }
    };
    Ok(CouplingSolution::build(
        Scenario::LossyCoherent,
        g,
        2.0 * g * (nbar + 1.0).sqrt(),
        a0,
        Some(q_net),
        omega0,
        nbar,
    ))
}

/// Root of a decreasing function on [lo, hi] by bisection.
fn bisect_decreasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo >= 0.0 && fhi <= 0.0) {
        return Err(numerical(format!(
            "coupling not bracketed: f({lo:e}) = {flo:e}, f({hi:e}) = {fhi:e}"
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
