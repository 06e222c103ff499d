//! Two-level population dynamics under the generalized rate equations
//!
//! dP₂/dt = R(t) − [A(t) + 2R(t)]P₂, A(t) = A(0)|J₀(Ω_R t)|, R(t) = R(0)|J₀(Ω_R t)|,
//!
//! together with the entropy of the resulting occupation distribution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B};
use crate::coupling::CouplingSolution;
use crate::error::{domain, numerical, Result};
use crate::ode::{self, OdeOptions};
use crate::quad::Integrator;
use crate::series::TimeSeries;
use crate::specfun::{abs_j0_integral_unchecked, j0, j0_zeros_up_to};

/// Level occupations at time `t` (s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationState {
    pub p1: f64,
    pub p2: f64,
    pub t: f64,
}

impl PopulationState {
    /// State with upper-level probability `p2`; P₁ = 1 − P₂.
    pub fn from_p2(p2: f64, t: f64) -> Self {
        Self {
            p1: 1.0 - p2,
            p2,
            t,
        }
    }
}

/// Rates at t = 0 in rad/s. `omega_rabi = 0` turns the Bessel factor off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub a0: f64,
    pub r0: f64,
    pub omega_rabi: f64,
}

impl RateParams {
    pub fn new(a0: f64, r0: f64, omega_rabi: f64) -> Result<Self> {
        for (what, v) in [("A(0)", a0), ("R(0)", r0), ("Rabi frequency", omega_rabi)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(domain(format!(
                    "{what} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(Self { a0, r0, omega_rabi })
    }

    /// A(0), R(0) = B₂₁(0)u(ω₀) = A(0)n̄ and Ω_R from a coupling solution.
    pub fn from_coupling(coupling: &CouplingSolution) -> Result<Self> {
        Self::new(
            coupling.a0_coefficient,
            coupling.a0_coefficient * coupling.nbar,
            coupling.omega_rabi,
        )
    }

    /// A(0) + 2R(0).
    pub fn total_rate(&self) -> f64 {
        self.a0 + 2.0 * self.r0
    }

    /// Long-time occupation R(0)/(A(0)+2R(0)).
    pub fn equilibrium_p2(&self) -> f64 {
        let k = self.total_rate();
        if k == 0.0 {
            f64::NAN
        } else {
            self.r0 / k
        }
    }

    fn bessel_factor(&self, t: f64) -> f64 {
        if self.omega_rabi == 0.0 {
            1.0
        } else {
            j0(self.omega_rabi * t).abs()
        }
    }

    /// Kinks of |J₀(Ω_R t)| in (0, t_max].
    fn kinks(&self, t_max: f64) -> Vec<f64> {
        if self.omega_rabi == 0.0 {
            return Vec::new();
        }
        j0_zeros_up_to(self.omega_rabi * t_max)
            .into_iter()
            .map(|z| z / self.omega_rabi)
            .collect()
    }
}

fn check_inputs(p2_init: f64, t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p2_init) {
        return Err(domain(format!(
            "initial probability must lie in [0, 1], got {p2_init}"
        )));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(domain(format!(
            "time must be finite and non-negative, got {t}"
        )));
    }
    Ok(())
}

/// Constant-rate solution P₂ = e^{−Kt}P₂(0) + (R/K)(1 − e^{−Kt}), K = A + 2R.
pub fn einstein_solution(params: &RateParams, p2_init: f64, t: f64) -> Result<PopulationState> {
    check_inputs(p2_init, t)?;
    Ok(PopulationState::from_p2(relax(params, p2_init, t), t))
}

fn relax(params: &RateParams, p2_init: f64, x: f64) -> f64 {
    let k = params.total_rate();
    if k == 0.0 {
        return p2_init;
    }
    let decay = (-k * x).exp();
    // 1 − e^{−Kx} without cancellation for small Kx
    decay * p2_init + params.r0 / k * -(-k * x).exp_m1()
}

/// P₂(t) = e^{−Kf(t)}[P₂(0) + R(0)∫₀ᵗ e^{Kf(τ)}|J₀(Ω_Rτ)|dτ], f(t) = ∫₀ᵗ|J₀(Ω_Rτ)|dτ.
///
/// The integral is taken with the factor e^{−Kf(t)} moved inside, so the
/// integrand is at most 1 and nothing overflows for long horizons.
pub fn generalized_solution(params: &RateParams, p2_init: f64, t: f64) -> Result<PopulationState> {
    check_inputs(p2_init, t)?;
    if params.omega_rabi == 0.0 {
        return einstein_solution(params, p2_init, t);
    }
    let w = params.omega_rabi;
    let k = params.total_rate();
    let f_t = abs_j0_integral_unchecked(w, t);
    let mut p2 = (-k * f_t).exp() * p2_init;
    if params.r0 > 0.0 && t > 0.0 {
        let mut points = vec![0.0];
        points.extend(params.kinks(t));
        if *points.last().unwrap() < t {
            points.push(t);
        }
        let integrand =
            |tau: f64| (k * (abs_j0_integral_unchecked(w, tau) - f_t)).exp() * j0(w * tau).abs();
        let est = Integrator::new(1e-13 / params.r0, 1e-13)
            .integrate(integrand, &points)
            .map_err(|e| numerical(format!("rate-equation quadrature at t = {t:e}: {e}")))?;
        p2 += params.r0 * est.value;
    }
    Ok(PopulationState::from_p2(p2, t))
}

/// [`generalized_solution`] over a grid, evaluated in parallel.
pub fn generalized_trajectory(
    params: &RateParams,
    p2_init: f64,
    t_grid: &[f64],
) -> Result<Vec<PopulationState>> {
    t_grid
        .par_iter()
        .map(|&t| generalized_solution(params, p2_init, t))
        .collect()
}

/// Direct Dormand–Prince integration of the coupled pair
/// dP₂/dt = R P₁ − (A+R) P₂, dP₁/dt = −R P₁ + (A+R) P₂, with steps landing
/// on every zero of J₀(Ω_R t). Starts from `p2_init` at t = 0 and reports
/// the grid points; channels `p1` and `p2`.
pub fn ode_oracle(params: &RateParams, p2_init: f64, t_grid: &[f64]) -> Result<TimeSeries> {
    let t_max = t_grid.last().copied().unwrap_or(0.0);
    check_inputs(p2_init, t_max)?;
    if t_grid.first().is_some_and(|&t0| t0 < 0.0) {
        return Err(domain("time grid must start at t >= 0"));
    }
    let rhs = |t: f64, y: &[f64; 2]| {
        let b = params.bessel_factor(t);
        let (a, r) = (params.a0 * b, params.r0 * b);
        let flow = r * y[0] - (a + r) * y[1];
        [-flow, flow]
    };
    // The initial condition holds at t = 0, not at the first output time.
    let skip = usize::from(t_grid.first().is_some_and(|&t0| t0 > 0.0));
    let mut times = Vec::with_capacity(t_grid.len() + skip);
    if skip == 1 {
        times.push(0.0);
    }
    times.extend_from_slice(t_grid);
    let mut ys = ode::integrate(
        rhs,
        [1.0 - p2_init, p2_init],
        &times,
        &params.kinks(t_max),
        &OdeOptions::default(),
    )?;
    ys.drain(..skip);
    TimeSeries::new(
        t_grid.to_vec(),
        vec![
            ("p1".to_string(), ys.iter().map(|y| y[0]).collect()),
            ("p2".to_string(), ys.iter().map(|y| y[1]).collect()),
        ],
    )
}

/// S/k_B = −[P₁ ln P₁ + P₂ ln P₂], with 0 ln 0 = 0.
pub fn entropy_over_kb(state: &PopulationState) -> f64 {
    let h = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    h(state.p1) + h(state.p2)
}

/// S = −k_B[P₁ ln P₁ + P₂ ln P₂] in J/K.
pub fn entropy(state: &PopulationState) -> f64 {
    K_B * entropy_over_kb(state)
}

/// Boltzmann weight of the upper level, 1/(1 + e^{ħω₀/k_BT}).
pub fn upper_level_weight(temperature: f64, omega0: f64) -> Result<f64> {
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(domain(format!(
            "temperature must be non-negative, got {temperature}"
        )));
    }
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(domain(format!(
            "Bohr frequency must be positive, got {omega0}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (1.0 + (HBAR * omega0 / (K_B * temperature)).exp()))
}

/// w₂·S[P₂(0) = 1] + w₁·S[P₁(0) = 1], in units of k_B.
pub fn average_entropy_over_kb(
    params: &RateParams,
    temperature: f64,
    omega0: f64,
    t: f64,
) -> Result<f64> {
    let w2 = upper_level_weight(temperature, omega0)?;
    let excited = generalized_solution(params, 1.0, t)?;
    let ground = generalized_solution(params, 0.0, t)?;
    Ok(w2 * entropy_over_kb(&excited) + (1.0 - w2) * entropy_over_kb(&ground))
}

/// Boltzmann-averaged entropy in J/K.
pub fn average_entropy(params: &RateParams, temperature: f64, omega0: f64, t: f64) -> Result<f64> {
    Ok(K_B * average_entropy_over_kb(params, temperature, omega0, t)?)
}

/// Same average for the constant-rate (Einstein) dynamics, in units of k_B.
pub fn average_entropy_einstein_over_kb(
    params: &RateParams,
    temperature: f64,
    omega0: f64,
    t: f64,
) -> Result<f64> {
    let w2 = upper_level_weight(temperature, omega0)?;
    let excited = einstein_solution(params, 1.0, t)?;
    let ground = einstein_solution(params, 0.0, t)?;
    Ok(w2 * entropy_over_kb(&excited) + (1.0 - w2) * entropy_over_kb(&ground))
}
