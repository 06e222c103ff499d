//! Turns a [`RunConfig`] into a resolved emitter, field and coupling.

use einstein_rabi::constants::{dipole_from_a0e, omega_from_wavelength};
use einstein_rabi::coupling::{
    blackbody_coupling_with_a0, free_space_a0, invert_a0_from_rabi, lossy_fixed_point,
    net_quality_factor, renorm_blackbody, renorm_coherent, solve_cavity_coupled, CavityGeometry,
    CoherentClosure, CouplingSolution, TwoLevelSystem,
};
use einstein_rabi::photons::{FieldKind, PhotonField};
use einstein_rabi::transition::TransitionModel;

use crate::config::{
    CavityConfig, Closure, CouplingSource, DipoleUnit, FieldConfig, GridConfig, RunConfig, TimeUnit,
};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cavity {
    Ideal,
    Lossy {
        q_net: Option<f64>,
        geometry: Option<CavityGeometry>,
    },
}

#[derive(Debug, Clone)]
pub struct Setup {
    pub omega0: f64,
    pub omega0_formula: &'static str,
    pub system: Option<TwoLevelSystem>,
    pub field: PhotonField,
    pub cavity: Cavity,
    pub coupling: CouplingSolution,
    pub a0_formula: &'static str,
    pub closure: Option<CoherentClosure>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn closure(c: Closure) -> CoherentClosure {
    match c {
        Closure::PoissonSum => CoherentClosure::PoissonSum,
        Closure::MeanPhoton => CoherentClosure::MeanPhoton,
    }
}

impl Setup {
    pub fn resolve(config: &RunConfig) -> Result<Self, CliError> {
        let sys = &config.system;
        let (omega0, omega0_formula) = match (&sys.omega0, &sys.wavelength) {
            (Some(f), None) => (f.rad_per_s(), "input"),
            (None, Some(l)) => (omega_from_wavelength(l.meters())?, "2*pi*c/lambda"),
            _ => {
                return Err(config_err(
                    "system needs exactly one of `omega0` and `wavelength`",
                ))
            }
        };
        let system = match sys.dipole {
            Some(d) => {
                let d21 = match d.unit {
                    DipoleUnit::CM => d.value,
                    DipoleUnit::A0e => dipole_from_a0e(d.value)?,
                };
                Some(TwoLevelSystem::new(omega0, d21)?)
            }
            None => None,
        };

        let field = match config.field {
            FieldConfig::Thermal {
                temperature: Some(t),
                nbar: None,
            } => PhotonField::thermal(omega0, t)?,
            FieldConfig::Thermal {
                temperature: None,
                nbar: Some(n),
            } => PhotonField::thermal_from_nbar(omega0, n)?,
            FieldConfig::Thermal { .. } => {
                return Err(config_err(
                    "thermal field needs exactly one of `temperature` and `nbar`",
                ))
            }
            FieldConfig::Coherent { nbar } => PhotonField::coherent(omega0, nbar)?,
        };
        let nbar = field.mean_photon_number();
        let coherent = matches!(field.kind, FieldKind::Coherent { .. });

        let cavity = match &config.cavity {
            None | Some(CavityConfig::Ideal) => Cavity::Ideal,
            Some(CavityConfig::Lossy { q, mirror_radius, mirror_separation, q_net }) => {
                match (q, mirror_radius, mirror_separation, q_net) {
                    (None, None, None, Some(qn)) => Cavity::Lossy { q_net: Some(*qn), geometry: None },
                    (Some(q), Some(r), Some(h), None) => Cavity::Lossy {
                        q_net: None,
                        geometry: Some(CavityGeometry::new(*q, *r, *h)?),
                    },
                    _ => {
                        return Err(config_err(
                            "lossy cavity needs either `q_net`, or `q` with `mirror_radius` and `mirror_separation`",
                        ))
                    }
                }
            }
        };
        if coherent && matches!(cavity, Cavity::Ideal) {
            return Err(config_err(
                "a coherent field is only supported in a lossy cavity",
            ));
        }

        let cc = config.coupling.unwrap_or_default();
        let closure_choice = closure(cc.closure);
        let unused = |what: &str, present: bool| {
            if present {
                Err(config_err(format!(
                    "coupling.{what} is not used by source `{}`",
                    cc.source.name()
                )))
            } else {
                Ok(())
            }
        };

        // A(0), and Q′ where the cavity fixes it, before applying the field.
        let (a0, q_net, a0_formula) = match cc.source {
            CouplingSource::Dipole => {
                unused("a0", cc.a0.is_some())?;
                unused("omega_rabi", cc.omega_rabi.is_some())?;
                unused("calibration_nbar", cc.calibration_nbar.is_some())?;
                let s = system
                    .as_ref()
                    .ok_or_else(|| config_err("coupling source `dipole` needs `system.dipole`"))?;
                let a0 = free_space_a0(s);
                (
                    a0,
                    cavity_q_net(&cavity, a0, omega0)?,
                    "d^2 w0^3/(3 pi eps0 hbar c^3)",
                )
            }
            CouplingSource::A0 => {
                unused("omega_rabi", cc.omega_rabi.is_some())?;
                unused("calibration_nbar", cc.calibration_nbar.is_some())?;
                let a0 = cc
                    .a0
                    .ok_or_else(|| config_err("coupling source `a0` needs `coupling.a0`"))?
                    .value;
                (a0, cavity_q_net(&cavity, a0, omega0)?, "input")
            }
            CouplingSource::Rabi => {
                unused("a0", cc.a0.is_some())?;
                let omega_rabi = cc
                    .omega_rabi
                    .ok_or_else(|| {
                        config_err("coupling source `rabi` needs `coupling.omega_rabi`")
                    })?
                    .rad_per_s();
                let n_cal =
                    match (cc.calibration_nbar, coherent) {
                        (Some(n), _) => n,
                        (None, false) => nbar,
                        (None, true) => return Err(config_err(
                            "coupling source `rabi` with a coherent field needs `calibration_nbar`",
                        )),
                    };
                match cavity {
                    Cavity::Ideal => {
                        let per_a0 = renorm_blackbody(1.0, n_cal)?;
                        (
                            omega_rabi / (2.0 * (n_cal + 1.0).sqrt() * per_a0),
                            None,
                            "ideal Rabi inversion",
                        )
                    }
                    Cavity::Lossy {
                        geometry: Some(g), ..
                    } => {
                        let sol = solve_cavity_coupled(omega_rabi, n_cal, &g, omega0)?;
                        (sol.a0_coefficient, sol.q_net, "coupled cavity solve")
                    }
                    Cavity::Lossy { q_net: Some(q), .. } => (
                        invert_a0_from_rabi(omega_rabi, n_cal, q, omega0)?,
                        Some(q),
                        "lossy Rabi inversion",
                    ),
                    Cavity::Lossy { .. } => unreachable!("lossy cavity has q_net or geometry"),
                }
            }
        };

        let mut coupling = match (q_net, coherent) {
            (None, false) => blackbody_coupling_with_a0(a0, omega0, nbar)?,
            (Some(q), false) => lossy_fixed_point(a0, nbar, q, omega0)?,
            (Some(q), true) => renorm_coherent(a0, nbar, q, omega0, closure_choice)?,
            (None, true) => unreachable!("coherent field rejected for ideal cavities"),
        };
        // A measured Rabi frequency at the field's own photon number is kept exactly.
        if let (CouplingSource::Rabi, Some(omega_rabi)) = (cc.source, cc.omega_rabi) {
            if !coherent && cc.calibration_nbar.is_none_or(|n| n == nbar) {
                coupling.omega_rabi = omega_rabi.rad_per_s();
                coupling.g_prime = coupling.omega_rabi / (2.0 * (nbar + 1.0).sqrt());
            }
        }

        Ok(Self {
            omega0,
            omega0_formula,
            system,
            field,
            cavity,
            coupling,
            a0_formula,
            closure: coherent.then_some(closure_choice),
        })
    }

    pub fn model(&self) -> Result<TransitionModel, CliError> {
        Ok(TransitionModel::for_coupling(self.field, self.coupling)?)
    }

    pub fn geometry(&self) -> Option<CavityGeometry> {
        match self.cavity {
            Cavity::Lossy { geometry, .. } => geometry,
            Cavity::Ideal => None,
        }
    }

    /// Evenly spaced times in seconds; t_max = 0 gives the single time 0.
    pub fn time_grid(&self, grid: Option<&GridConfig>) -> Result<Vec<f64>, CliError> {
        let grid = grid.ok_or_else(|| config_err("this command needs a `grid` section"))?;
        if !(grid.t_max >= 0.0 && grid.t_max.is_finite()) {
            return Err(config_err(format!(
                "grid.t_max must be finite and non-negative, got {}",
                grid.t_max
            )));
        }
        let scale = match grid.unit {
            TimeUnit::S => 1.0,
            TimeUnit::InvOmegaRabi => {
                if self.coupling.omega_rabi <= 0.0 {
                    return Err(config_err(
                        "grid unit `inv_omega_rabi` needs a positive Rabi frequency",
                    ));
                }
                1.0 / self.coupling.omega_rabi
            }
        };
        if grid.t_max == 0.0 {
            return Ok(vec![0.0]);
        }
        if grid.points < 2 {
            return Err(config_err("grid.points must be at least 2 when t_max > 0"));
        }
        let t_max = grid.t_max * scale;
        let last = (grid.points - 1) as f64;
        Ok((0..grid.points).map(|i| t_max * i as f64 / last).collect())
    }
}

fn cavity_q_net(cavity: &Cavity, a0: f64, omega0: f64) -> Result<Option<f64>, CliError> {
    Ok(match cavity {
        Cavity::Ideal => None,
        Cavity::Lossy { q_net: Some(q), .. } => Some(*q),
        Cavity::Lossy {
            geometry: Some(g), ..
        } => Some(net_quality_factor(g, a0, omega0)?),
        Cavity::Lossy { .. } => unreachable!("lossy cavity has q_net or geometry"),
    })
}
