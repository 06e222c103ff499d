//! Photon-number statistics of the cavity mode and Planck energy densities.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{C, HBAR, K_B};
use crate::error::{domain, numerical, Result};

/// Probability mass (and first-moment mass) left out of truncated n-sums.
pub const TAIL_TOLERANCE: f64 = 1e-12;

const MAX_TERMS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// Bose–Einstein occupation at temperature (K). T = 0 means vacuum.
    Thermal { temperature: f64 },
    /// Poisson occupation with the given mean.
    Coherent { nbar: f64 },
}

/// Photon statistics of the mode at `omega0` (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonField {
    pub kind: FieldKind,
    pub omega0: f64,
}

impl PhotonField {
    pub fn thermal(omega0: f64, temperature: f64) -> Result<Self> {
        check_omega(omega0)?;
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(domain(format!(
                "temperature must be finite and non-negative, got {temperature}"
            )));
        }
        Ok(Self {
            kind: FieldKind::Thermal { temperature },
            omega0,
        })
    }

    /// Thermal field whose Bose factor at `omega0` equals `nbar`.
    pub fn thermal_from_nbar(omega0: f64, nbar: f64) -> Result<Self> {
        check_nbar(nbar)?;
        let temperature = if nbar == 0.0 {
            0.0
        } else {
            HBAR * omega0 / (K_B * (1.0 / nbar).ln_1p())
        };
        Self::thermal(omega0, temperature)
    }

    pub fn coherent(omega0: f64, nbar: f64) -> Result<Self> {
        check_omega(omega0)?;
        check_nbar(nbar)?;
        Ok(Self {
            kind: FieldKind::Coherent { nbar },
            omega0,
        })
    }

    /// ħω₀/(k_B T); infinite at T = 0.
    fn reduced_energy(&self, temperature: f64) -> f64 {
        if temperature == 0.0 {
            f64::INFINITY
        } else {
            HBAR * self.omega0 / (K_B * temperature)
        }
    }

    /// n̄ = 1/(e^{ħω₀/k_BT} − 1) for thermal fields, the stored mean otherwise.
    pub fn mean_photon_number(&self) -> f64 {
        match self.kind {
            FieldKind::Thermal { temperature } => {
                let x = self.reduced_energy(temperature);
                if x.is_infinite() {
                    0.0
                } else {
                    1.0 / x.exp_m1()
                }
            }
            FieldKind::Coherent { nbar } => nbar,
        }
    }

    /// Δn: √(n̄(n̄+1)) for thermal, √n̄ for coherent light.
    pub fn photon_number_fluctuation(&self) -> f64 {
        let nbar = self.mean_photon_number();
        match self.kind {
            FieldKind::Thermal { .. } => (nbar * (nbar + 1.0)).sqrt(),
            FieldKind::Coherent { .. } => nbar.sqrt(),
        }
    }

    /// pₙ(ω₀).
    pub fn occupation_probability(&self, n: usize) -> f64 {
        match self.kind {
            FieldKind::Thermal { temperature } => {
                let x = self.reduced_energy(temperature);
                if x.is_infinite() {
                    return if n == 0 { 1.0 } else { 0.0 };
                }
                // (1 − e^{−x}) e^{−nx}
                -(-x).exp_m1() * (-(n as f64) * x).exp()
            }
            FieldKind::Coherent { nbar } => poisson(nbar, n),
        }
    }

    /// Occupation probabilities p₀ … p_{N−1}, with N chosen so that both the
    /// dropped probability mass and the dropped part of Σ(n+1)pₙ are below
    /// [`TAIL_TOLERANCE`].
    pub fn truncated_weights(&self) -> Result<Vec<f64>> {
        let nbar = self.mean_photon_number();
        let count = match self.kind {
            FieldKind::Thermal { .. } => thermal_cutoff(nbar),
            FieldKind::Coherent { .. } => poisson_cutoff(nbar),
        }
        .ok_or_else(|| {
            numerical(format!(
                "photon-number sum for nbar = {nbar} needs more than {MAX_TERMS} terms"
            ))
        })?;
        Ok((0..count).map(|n| self.occupation_probability(n)).collect())
    }

    /// Energy density of the thermal field at ω₀, u = ũ(ω₀)·n̄.
    pub fn thermal_energy_density(&self) -> f64 {
        planck_density_per_photon_unchecked(self.omega0) * self.mean_photon_number()
    }
}

fn check_omega(omega0: f64) -> Result<()> {
    if omega0 > 0.0 && omega0.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "mode frequency must be positive, got {omega0}"
        )))
    }
}

fn check_nbar(nbar: f64) -> Result<()> {
    if nbar >= 0.0 && nbar.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "mean photon number must be finite and non-negative, got {nbar}"
        )))
    }
}

fn poisson(nbar: f64, n: usize) -> f64 {
    if nbar == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let mut log_fact = 0.0;
    for k in 2..=n {
        log_fact += (k as f64).ln();
    }
    (n as f64 * nbar.ln() - nbar - log_fact).exp()
}

/// Smallest N with q^N (N + 1 + q/(1−q)) ≤ tolerance, q = n̄/(1+n̄). That
/// expression is the exact thermal tail of Σ_{n≥N} (n+1)pₙ and bounds the
/// probability tail q^N as well.
fn thermal_cutoff(nbar: f64) -> Option<usize> {
    if nbar == 0.0 {
        return Some(1);
    }
    let q = nbar / (1.0 + nbar);
    let ln_q = q.ln();
    let mut n = 1usize;
    while n <= MAX_TERMS {
        let nf = n as f64;
        let tail = (nf * ln_q).exp() * (nf + 1.0 + nbar);
        if tail <= TAIL_TOLERANCE {
            return Some(n);
        }
        n += 1;
    }
    None
}

/// Chernoff bound P(X ≥ N) ≤ e^{−n̄} (e n̄/N)^N for N > n̄. The first-moment
/// tail is Σ_{n≥N}(n+1)pₙ = P(X ≥ N) + n̄·P(X ≥ N−1).
fn poisson_cutoff(nbar: f64) -> Option<usize> {
    if nbar == 0.0 {
        return Some(1);
    }
    let chernoff = |n: usize| -> f64 {
        let nf = n as f64;
        if nf <= nbar {
            1.0
        } else {
            (-nbar + nf * (1.0 + (nbar / nf).ln())).exp()
        }
    };
    let mut n = (nbar.ceil() as usize).max(1) + 1;
    while n <= MAX_TERMS {
        if chernoff(n) + nbar * chernoff(n - 1) <= TAIL_TOLERANCE {
            return Some(n);
        }
        n += 1;
    }
    None
}

/// ũ(ω₀) = ħω₀³/(π²c³), the spectral energy density carried per photon.
pub fn planck_density_per_photon(omega0: f64) -> Result<f64> {
    check_omega(omega0)?;
    Ok(planck_density_per_photon_unchecked(omega0))
}

pub(crate) fn planck_density_per_photon_unchecked(omega0: f64) -> f64 {
    HBAR * omega0.powi(3) / (PI * PI * C.powi(3))
}
