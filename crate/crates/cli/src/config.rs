//! JSON run configuration. Every frequency carries a unit tag; unknown keys
//! are rejected.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyUnit {
    /// Cycles per second; multiplied by 2π on ingestion.
    Hz,
    RadS,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Frequency {
    pub value: f64,
    pub unit: FrequencyUnit,
}

impl Frequency {
    pub fn rad_per_s(&self) -> f64 {
        match self.unit {
            FrequencyUnit::Hz => 2.0 * PI * self.value,
            FrequencyUnit::RadS => self.value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateUnit {
    PerS,
}

/// A transition rate such as A(0), in s⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rate {
    pub value: f64,
    pub unit: RateUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthUnit {
    M,
    Nm,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Length {
    pub value: f64,
    pub unit: LengthUnit,
}

impl Length {
    pub fn meters(&self) -> f64 {
        match self.unit {
            LengthUnit::M => self.value,
            LengthUnit::Nm => self.value * 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DipoleUnit {
    /// Coulomb-metre.
    CM,
    /// Multiple of a₀·e.
    A0e,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dipole {
    pub value: f64,
    pub unit: DipoleUnit,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// Bohr frequency; give this or `wavelength`.
    pub omega0: Option<Frequency>,
    pub wavelength: Option<Length>,
    pub dipole: Option<Dipole>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldConfig {
    /// Give `temperature` (K) or `nbar`.
    Thermal {
        temperature: Option<f64>,
        nbar: Option<f64>,
    },
    Coherent {
        nbar: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum CavityConfig {
    Ideal,
    /// Either `q_net`, or the mirror `q` with both mirror dimensions (m).
    Lossy {
        q: Option<f64>,
        mirror_radius: Option<f64>,
        mirror_separation: Option<f64>,
        q_net: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    #[default]
    PoissonSum,
    MeanPhoton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingSource {
    /// Free-space A(0) from the system dipole.
    #[default]
    Dipole,
    /// A given (cavity-enhanced) `a0`.
    A0,
    /// A(0) (and Q′ from mirror geometry) solved from a measured
    /// `omega_rabi` at `calibration_nbar` thermal photons, default the field's.
    Rabi,
}

impl CouplingSource {
    pub fn name(self) -> &'static str {
        match self {
            CouplingSource::Dipole => "dipole",
            CouplingSource::A0 => "a0",
            CouplingSource::Rabi => "rabi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    #[serde(default)]
    pub source: CouplingSource,
    pub a0: Option<Rate>,
    pub omega_rabi: Option<Frequency>,
    pub calibration_nbar: Option<f64>,
    #[serde(default)]
    pub closure: Closure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    #[default]
    S,
    InvOmegaRabi,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_max: f64,
    pub points: usize,
    #[serde(default)]
    pub unit: TimeUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonSumConfig {
    #[default]
    Full,
    MeanPhoton,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RabiOptions {
    #[serde(default)]
    pub photon_sum: PhotonSumConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientOptions {
    /// Divide every column by A(0).
    #[serde(default)]
    pub normalize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    #[default]
    Excited,
    Ground,
    ThermalAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsOptions {
    #[serde(default)]
    pub init: InitialState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitQuality {
    /// `q` is Q′.
    #[default]
    Net,
    /// `q` is the mirror Q; needs the cavity geometry.
    Mirror,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitOptionsConfig {
    pub vary: Vec<String>,
    pub bounds: BTreeMap<String, [f64; 2]>,
    /// Starting values overriding those implied by the scenario.
    #[serde(default)]
    pub initial: BTreeMap<String, f64>,
    #[serde(default)]
    pub quality: FitQuality,
    #[serde(default = "mean_photon")]
    pub photon_sum: PhotonSumConfig,
    pub restarts: Option<usize>,
    pub max_evaluations: Option<usize>,
}

fn mean_photon() -> PhotonSumConfig {
    PhotonSumConfig::MeanPhoton
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub field: FieldConfig,
    pub cavity: Option<CavityConfig>,
    pub coupling: Option<CouplingConfig>,
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub rabi: RabiOptions,
    #[serde(default)]
    pub coefficients: CoefficientOptions,
    #[serde(default)]
    pub dynamics: DynamicsOptions,
    pub fit: Option<FitOptionsConfig>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("at `{path}`: {}", e.into_inner()))
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}
