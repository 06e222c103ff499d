//! Net transition probabilities and the generalized Einstein coefficients.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::{CouplingSolution, Scenario};
use crate::error::{domain, invalid, numerical, Result};
use crate::photons::{planck_density_per_photon_unchecked, PhotonField};
use crate::quad::Integrator;
use crate::specfun::{j0, kernel};

/// Default absolute accuracy of a probability (summed over n-terms).
pub const DEFAULT_PROB_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CavityMode {
    Ideal,
    Lossy { q_net: f64 },
}

/// Exact photon-number sum or the single |J₀(Ω_R t)| factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientMode {
    Exact,
    #[default]
    Approx,
}

/// Emitter, field and coupling bundled for time evaluation.
#[derive(Debug, Clone)]
pub struct TransitionModel {
    field: PhotonField,
    coupling: CouplingSolution,
    cavity_mode: CavityMode,
    weights: Vec<f64>,
    prob_tol: f64,
}

impl TransitionModel {
    pub fn new(
        field: PhotonField,
        coupling: CouplingSolution,
        cavity_mode: CavityMode,
    ) -> Result<Self> {
        let nbar = field.mean_photon_number();
        if (nbar - coupling.nbar).abs() > 1e-9 * nbar.max(1e-12) {
            return Err(invalid(format!(
                "field has nbar = {nbar} but the coupling was solved for {}",
                coupling.nbar
            )));
        }
        let omega0 = coupling.omega0;
        if (field.omega0 - omega0).abs() > 1e-12 * omega0 {
            return Err(invalid(format!(
                "field frequency {} differs from the Bohr frequency {omega0}",
                field.omega0
            )));
        }
        match cavity_mode {
            CavityMode::Ideal => {
                if coupling.scenario.is_lossy() {
                    return Err(invalid("an ideal cavity needs a lossless coupling"));
                }
            }
            CavityMode::Lossy { q_net } => {
                if !coupling.scenario.is_lossy() {
                    return Err(invalid("a lossy cavity needs a lossy-cavity coupling"));
                }
                if !(q_net > 0.0 && q_net.is_finite()) {
                    return Err(domain(format!(
                        "net quality factor must be positive, got {q_net}"
                    )));
                }
                if let Some(q) = coupling.q_net {
                    if (q - q_net).abs() > 1e-12 * q {
                        return Err(invalid(format!(
                            "cavity Q' = {q_net} differs from the coupling's Q' = {q}"
                        )));
                    }
                }
                let width = omega0 / q_net;
                if width > 0.01 * omega0 || coupling.a0_coefficient > 0.01 * omega0 {
                    log::warn!(
                        "linewidth {width:e} or A(0) {:e} is not small against omega0",
                        coupling.a0_coefficient
                    );
                }
            }
        }
        let weights = field.truncated_weights()?;
        Ok(Self {
            field,
            coupling,
            cavity_mode,
            weights,
            prob_tol: DEFAULT_PROB_TOL,
        })
    }

    /// Cavity mode taken from the coupling: lossy with its Q′, or ideal.
    pub fn for_coupling(field: PhotonField, coupling: CouplingSolution) -> Result<Self> {
        let mode = match (coupling.scenario, coupling.q_net) {
            (Scenario::LossyThermal | Scenario::LossyCoherent, Some(q_net)) => {
                CavityMode::Lossy { q_net }
            }
            (Scenario::LossyThermal | Scenario::LossyCoherent, None) => {
                return Err(invalid("lossy coupling without a net quality factor"))
            }
            _ => CavityMode::Ideal,
        };
        Self::new(field, coupling, mode)
    }

    /// Absolute accuracy requested from the lossy-cavity quadratures.
    pub fn with_tolerance(mut self, prob_tol: f64) -> Self {
        self.prob_tol = prob_tol;
        self
    }

    pub fn field(&self) -> &PhotonField {
        &self.field
    }

    pub fn coupling(&self) -> &CouplingSolution {
        &self.coupling
    }

    pub fn cavity_mode(&self) -> CavityMode {
        self.cavity_mode
    }

    /// Truncated occupation probabilities p₀, p₁, ….
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn omega_n(&self, n: usize) -> f64 {
        2.0 * self.coupling.g_prime * (n as f64 + 1.0).sqrt()
    }

    /// Lossless cavity: A(0) Σ pₙ(n+1)·t·K(ωₙt) with K(x) = (1/x)∫₀ˣJ₀.
    pub fn prob_ideal(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let a0 = self.coupling.a0_coefficient;
        Ok(self
            .weights
            .iter()
            .enumerate()
            .map(|(n, &p)| a0 * p * (n as f64 + 1.0) * t * kernel(self.omega_n(n) * t))
            .sum())
    }

    fn linewidth(&self) -> Result<f64> {
        match self.cavity_mode {
            CavityMode::Lossy { q_net } => Ok(self.coupling.omega0 / q_net),
            CavityMode::Ideal => Err(invalid(
                "lossy-cavity probability needs a lossy cavity mode",
            )),
        }
    }

    /// Lossy cavity: each n-term Lorentzian-weighted over the mode continuum.
    pub fn prob_lossy(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let c = self.linewidth()?;
        let a0 = self.coupling.a0_coefficient;
        let mut total = 0.0;
        for (n, &p) in self.weights.iter().enumerate() {
            let scale = a0 * p * (n as f64 + 1.0);
            if scale == 0.0 {
                continue;
            }
            let j = lossy_mode_integral(self.omega_n(n), c, t, self.prob_tol / scale)?;
            total += scale * j;
        }
        Ok(total)
    }

    /// Single effective term at n = n̄ (photon-number spread neglected).
    pub fn prob_lossy_low_nbar(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let c = self.linewidth()?;
        if self.field.photon_number_fluctuation() > 1.0 {
            log::warn!(
                "photon-number spread {:.3} exceeds 1; single-term approximation is poor",
                self.field.photon_number_fluctuation()
            );
        }
        let nbar = self.coupling.nbar;
        let scale = self.coupling.a0_coefficient * (nbar + 1.0);
        let w = 2.0 * self.coupling.g_prime * (nbar + 1.0).sqrt();
        Ok(scale * lossy_mode_integral(w, c, t, self.prob_tol / scale)?)
    }

    /// P₂→₁(t) for the configured cavity.
    pub fn emission_prob(&self, t: f64) -> Result<f64> {
        match self.cavity_mode {
            CavityMode::Ideal => self.prob_ideal(t),
            CavityMode::Lossy { .. } => self.prob_lossy(t),
        }
    }

    /// P₁→₂(t) = 1 − P₂→₁(t).
    pub fn absorption_prob(&self, t: f64) -> Result<f64> {
        Ok(1.0 - self.emission_prob(t)?)
    }

    pub fn generalized_a(&self, t: f64, mode: CoefficientMode) -> Result<f64> {
        check_time(t)?;
        Ok(self.coupling.a0_coefficient * self.j0_factor(t, mode, false))
    }

    /// B₂₁(t), which is also B₁₂(t).
    pub fn generalized_b21(&self, t: f64, mode: CoefficientMode) -> Result<f64> {
        check_time(t)?;
        if mode == CoefficientMode::Exact && self.coupling.nbar == 0.0 {
            return Err(domain(
                "exact stimulated coefficient is undefined at nbar = 0",
            ));
        }
        Ok(self.coupling.b0_coefficient * self.j0_factor(t, mode, true))
    }

    pub fn generalized_b12(&self, t: f64, mode: CoefficientMode) -> Result<f64> {
        self.generalized_b21(t, mode)
    }

    /// Σ pₙ|J₀(ωₙt)| (or Σ n pₙ|J₀(ωₙt)|/n̄ when `stimulated`), or |J₀(Ω_R t)|.
    fn j0_factor(&self, t: f64, mode: CoefficientMode, stimulated: bool) -> f64 {
        match mode {
            CoefficientMode::Approx => j0(self.coupling.omega_rabi * t).abs(),
            CoefficientMode::Exact => {
                let s: f64 = self
                    .weights
                    .iter()
                    .enumerate()
                    .map(|(n, &p)| {
                        let w = if stimulated { n as f64 * p } else { p };
                        w * j0(self.omega_n(n) * t).abs()
                    })
                    .sum();
                if stimulated {
                    s / self.coupling.nbar
                } else {
                    s
                }
            }
        }
    }

    /// R₂→₁(t) = u(ω₀)B₂₁(t) + A(t).
    pub fn emission_rate(&self, t: f64, mode: CoefficientMode) -> Result<f64> {
        let a = self.generalized_a(t, mode)?;
        if self.coupling.nbar == 0.0 {
            return Ok(a);
        }
        let u = planck_density_per_photon_unchecked(self.coupling.omega0) * self.coupling.nbar;
        Ok(u * self.generalized_b21(t, mode)? + a)
    }

    /// R₁→₂(t) = ũ(ω₀)(n̄+1)B₁₂(t).
    pub fn absorption_rate(&self, t: f64, mode: CoefficientMode) -> Result<f64> {
        let mode = if self.coupling.nbar == 0.0 {
            CoefficientMode::Approx
        } else {
            mode
        };
        let ut = planck_density_per_photon_unchecked(self.coupling.omega0);
        Ok(ut * (self.coupling.nbar + 1.0) * self.generalized_b12(t, mode)?)
    }

    /// Evaluates `f` on every time, in parallel, keeping input order.
    pub fn sweep<F>(&self, times: &[f64], f: F) -> Result<Vec<f64>>
    where
        F: Fn(&Self, f64) -> Result<f64> + Sync,
    {
        times.par_iter().map(|&t| f(self, t)).collect()
    }
}

/// Free-function form of [`TransitionModel::generalized_a`].
pub fn generalized_a(
    coupling: &CouplingSolution,
    field: &PhotonField,
    t: f64,
    mode: CoefficientMode,
) -> Result<f64> {
    coefficient_model(coupling, field)?.generalized_a(t, mode)
}

/// Free-function form of [`TransitionModel::generalized_b21`].
pub fn generalized_b21(
    coupling: &CouplingSolution,
    field: &PhotonField,
    t: f64,
    mode: CoefficientMode,
) -> Result<f64> {
    coefficient_model(coupling, field)?.generalized_b21(t, mode)
}

fn coefficient_model(coupling: &CouplingSolution, field: &PhotonField) -> Result<TransitionModel> {
    TransitionModel::for_coupling(*field, *coupling)
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "time must be finite and non-negative, got {t}"
        )))
    }
}

/// (4/π)∫_{ω}^∞ c²/(4(Ω²−ω²)+c²) · sin²(Ωt/2)/(Ω√(Ω²−ω²)) dΩ.
///
/// With Ω² = ω² + s² this is (4/π)∫₀^∞ L(s) sin²(tΩ/2) ds,
/// L = c²/((4s²+c²)(s²+ω²)). Splitting sin² = (1 − cos)/2 gives
/// c/(ω(c+2ω)) − (2/π)∫₀^∞ L(s) cos(tΩ(s)) ds. The cosine integral is
/// taken along s = r·e^{iπ/4}; no singularity lies between that ray and the
/// real axis, and e^{itΩ} decays along it, so no oscillatory tail remains.
///
/// `abs_tol` is the target absolute error of the returned value.
pub fn lossy_mode_integral(omega_n: f64, linewidth: f64, t: f64, abs_tol: f64) -> Result<f64> {
    if !(omega_n > 0.0 && omega_n.is_finite()) {
        return Err(domain(format!(
            "n-photon Rabi frequency must be positive, got {omega_n}"
        )));
    }
    if !(linewidth > 0.0 && linewidth.is_finite()) {
        return Err(domain(format!(
            "linewidth must be positive, got {linewidth}"
        )));
    }
    check_time(t)?;
    let (w, c) = (omega_n, linewidth);
    let limit = c / (w * (c + 2.0 * w));
    if t == 0.0 {
        return Ok(0.0);
    }
    // Error budget on the cosine integral, split between tail and quadrature.
    let eps = (abs_tol.min(1e-6 * limit) * PI / 2.0).max(1e-300);
    let c2 = c * c;
    let w2 = w * w;
    let rot = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    let omega_at = |r: f64| Complex64::new(w2, r * r).sqrt();
    let integrand = |r: f64| {
        let r2 = r * r;
        let l = c2 / (Complex64::new(c2, 4.0 * r2) * Complex64::new(w2, r2));
        let phase = Complex64::new(0.0, t) * omega_at(r);
        (l * phase.exp() * rot).re
    };
    // |tail| ≤ e^{−t·Im Ω(R)}·c²/(12R³).
    let tail = |r: f64| (-t * omega_at(r).im).exp() * c2 / (12.0 * r.powi(3));
    let mut r_max = c.max(w).max(1.0 / t);
    while tail(r_max) > 0.5 * eps {
        r_max *= 1.5;
    }
    // Geometric breakpoints cover the scales √(ω/t), 1/t, c and ω.
    let r_min = (w / t).sqrt().min(1.0 / t).min(c).min(w) * 1e-3;
    let mut points = vec![0.0];
    let mut r = r_min.min(r_max);
    while r < r_max {
        points.push(r);
        r *= 2.0;
    }
    points.push(r_max);
    let est = Integrator::new(0.5 * eps, 0.0)
        .with_max_panels(100_000)
        .integrate(integrand, &points)
        .map_err(|e| {
            numerical(format!(
                "lossy integral failed (omega_n = {w:e}, linewidth = {c:e}, t = {t:e}): {e}"
            ))
        })?;
    Ok(limit - 2.0 / PI * est.value)
}
