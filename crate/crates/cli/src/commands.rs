//! The subcommands, each returning the text it prints.

use std::collections::{BTreeMap, BTreeSet};

use einstein_rabi::coupling::{einstein_b0, free_space_a0, CoherentClosure};
use einstein_rabi::dynamics::{
    entropy_over_kb, generalized_trajectory, upper_level_weight, PopulationState, RateParams,
};
use einstein_rabi::fit::{
    fit_trace, FitOptions, FitResult, ModelTemplate, PhotonSum, QualityParam, TraceData,
};
use einstein_rabi::photons::{planck_density_per_photon, FieldKind};
use einstein_rabi::series::TimeSeries;
use einstein_rabi::transition::{CavityMode, CoefficientMode};
use serde::Serialize;

use crate::config::{FitQuality, InitialState, PhotonSumConfig, RunConfig};
use crate::error::CliError;
use crate::setup::Setup;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: &'static str,
    pub formula: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closure: Option<CoherentClosure>,
    pub quantities: BTreeMap<&'static str, Quantity>,
}

fn q(value: f64, unit: &'static str, formula: &'static str) -> Quantity {
    Quantity {
        value,
        unit,
        formula,
    }
}

pub fn constants(config: &RunConfig) -> Result<ConstantsReport, CliError> {
    let s = Setup::resolve(config)?;
    let c = &s.coupling;
    let mut m = BTreeMap::new();
    m.insert("omega0", q(s.omega0, "rad/s", s.omega0_formula));
    let nbar_formula = match s.field.kind {
        FieldKind::Thermal { .. } => "1/(exp(hbar w0/kB T) - 1)",
        FieldKind::Coherent { .. } => "input",
    };
    m.insert("nbar", q(c.nbar, "1", nbar_formula));
    let dn_formula = match s.field.kind {
        FieldKind::Thermal { .. } => "sqrt(nbar (nbar + 1))",
        FieldKind::Coherent { .. } => "sqrt(nbar)",
    };
    m.insert(
        "delta_n",
        q(s.field.photon_number_fluctuation(), "1", dn_formula),
    );
    if let FieldKind::Thermal { temperature } = s.field.kind {
        m.insert(
            "temperature",
            q(temperature, "K", "input or hbar w0/(kB ln(1 + 1/nbar))"),
        );
    }
    m.insert(
        "u_per_photon",
        q(
            planck_density_per_photon(s.omega0)?,
            "J s/m^3",
            "hbar w0^3/(pi^2 c^3)",
        ),
    );
    if let Some(sys) = &s.system {
        m.insert("d21", q(sys.d21, "C m", "input"));
        m.insert(
            "a0_free_space",
            q(free_space_a0(sys), "1/s", "d^2 w0^3/(3 pi eps0 hbar c^3)"),
        );
        m.insert(
            "b0_free_space",
            q(einstein_b0(sys), "m^3/(J s^2)", "pi d^2/(3 eps0 hbar^2)"),
        );
    }
    if let Some(g) = s.geometry() {
        m.insert(
            "escape_probability",
            q(g.escape_probability(), "1", "1/(1 + r/h)"),
        );
        m.insert("q_mirror", q(g.q_factor, "1", "input"));
    }
    if let Some(qn) = c.q_net {
        m.insert("q_net", q(qn, "1", "1/(1/Q + p0 A(0)/w0)"));
        m.insert("linewidth", q(s.omega0 / qn, "rad/s", "w0/Q'"));
    }
    m.insert("a0", q(c.a0_coefficient, "1/s", s.a0_formula));
    m.insert(
        "b0",
        q(c.b0_coefficient, "m^3/(J s^2)", "A(0)/u_per_photon"),
    );
    m.insert("r0", q(c.a0_coefficient * c.nbar, "1/s", "A(0) nbar"));
    let g_formula = match c.scenario {
        einstein_rabi::coupling::Scenario::LossyThermal => {
            "Omega_R/(2 sqrt(nbar + 1)), lossy fixed point"
        }
        einstein_rabi::coupling::Scenario::LossyCoherent => "coherent long-time closure",
        _ => "(A(0)/nbar) Li_{-1/2}(nbar/(1 + nbar))",
    };
    m.insert("g_prime", q(c.g_prime, "rad/s", g_formula));
    m.insert(
        "omega_rabi",
        q(c.omega_rabi, "rad/s", "2 g' sqrt(nbar + 1)"),
    );
    m.insert(
        "a0_over_omega_rabi",
        q(c.a0_coefficient / c.omega_rabi, "1", "A(0)/Omega_R"),
    );
    m.insert(
        "r0_over_omega_rabi",
        q(
            c.a0_coefficient * c.nbar / c.omega_rabi,
            "1",
            "A(0) nbar/Omega_R",
        ),
    );
    m.insert("rwa_ratio", q(c.rwa_ratio(), "1", "2 g'/w0"));
    let scenario = serde_json::to_value(c.scenario)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default();
    Ok(ConstantsReport {
        scenario,
        closure: s.closure,
        quantities: m,
    })
}

/// P₂→₁(t) on the configured grid.
pub fn rabi(config: &RunConfig) -> Result<TimeSeries, CliError> {
    let s = Setup::resolve(config)?;
    let times = s.time_grid(config.grid.as_ref())?;
    let model = s.model()?;
    let p = match (model.cavity_mode(), config.rabi.photon_sum) {
        (CavityMode::Ideal, _) => model.sweep(&times, |m, t| m.prob_ideal(t))?,
        (CavityMode::Lossy { .. }, PhotonSumConfig::Full) => {
            model.sweep(&times, |m, t| m.prob_lossy(t))?
        }
        (CavityMode::Lossy { .. }, PhotonSumConfig::MeanPhoton) => {
            model.sweep(&times, |m, t| m.prob_lossy_low_nbar(t))?
        }
    };
    Ok(TimeSeries::new(times, vec![("p21".into(), p)])?)
}

/// A(t), u·B₂₁(t) and R₁→₂(t), optionally divided by A(0).
pub fn coefficients(config: &RunConfig, mode: CoefficientMode) -> Result<TimeSeries, CliError> {
    let s = Setup::resolve(config)?;
    let times = s.time_grid(config.grid.as_ref())?;
    let model = s.model()?;
    let c = s.coupling;
    let u = planck_density_per_photon(c.omega0)? * c.nbar;
    let a = model.sweep(&times, |m, t| m.generalized_a(t, mode))?;
    let b = if c.nbar == 0.0 {
        vec![0.0; times.len()]
    } else {
        model.sweep(&times, |m, t| Ok(u * m.generalized_b21(t, mode)?))?
    };
    let r = model.sweep(&times, |m, t| m.absorption_rate(t, mode))?;
    let scale = if config.coefficients.normalize {
        1.0 / c.a0_coefficient
    } else {
        1.0
    };
    let norm = |v: Vec<f64>| v.into_iter().map(|x| x * scale).collect::<Vec<_>>();
    Ok(TimeSeries::new(
        times,
        vec![
            ("a_t".into(), norm(a)),
            ("b21_u".into(), norm(b)),
            ("r12".into(), norm(r)),
        ],
    )?)
}

/// Level populations and entropy under the generalized rate equations.
pub fn dynamics(config: &RunConfig) -> Result<TimeSeries, CliError> {
    let s = Setup::resolve(config)?;
    let times = s.time_grid(config.grid.as_ref())?;
    let params = RateParams::from_coupling(&s.coupling)?;
    let p2 = |traj: &[PopulationState]| traj.iter().map(|st| st.p2).collect::<Vec<_>>();
    let (p2, s_avg) = match config.dynamics.init {
        InitialState::Excited => (p2(&generalized_trajectory(&params, 1.0, &times)?), None),
        InitialState::Ground => (p2(&generalized_trajectory(&params, 0.0, &times)?), None),
        InitialState::ThermalAverage => {
            let FieldKind::Thermal { temperature } = s.field.kind else {
                return Err(CliError::Config(
                    "init `thermal_average` needs a thermal field".into(),
                ));
            };
            let w2 = upper_level_weight(temperature, s.omega0)?;
            let up = generalized_trajectory(&params, 1.0, &times)?;
            let down = generalized_trajectory(&params, 0.0, &times)?;
            let mixed = up
                .iter()
                .zip(&down)
                .map(|(a, b)| w2 * a.p2 + (1.0 - w2) * b.p2)
                .collect();
            let s_avg = up
                .iter()
                .zip(&down)
                .map(|(a, b)| w2 * entropy_over_kb(a) + (1.0 - w2) * entropy_over_kb(b))
                .collect();
            (mixed, Some(s_avg))
        }
    };
    let states: Vec<_> = p2
        .iter()
        .zip(&times)
        .map(|(&p, &t)| PopulationState::from_p2(p, t))
        .collect();
    let mut channels = vec![
        ("p1".to_string(), states.iter().map(|st| st.p1).collect()),
        ("p2".to_string(), p2),
        (
            "entropy_over_kB".to_string(),
            states.iter().map(entropy_over_kb).collect(),
        ),
    ];
    if let Some(s_avg) = s_avg {
        channels.push(("s_avg_over_kB".to_string(), s_avg));
    }
    Ok(TimeSeries::new(times, channels)?)
}

/// Fits the lossy-cavity model to a trace, starting from the configured scenario.
pub fn fit(config: &RunConfig, data: &TraceData, seed: u64) -> Result<FitResult, CliError> {
    let opts = config
        .fit
        .as_ref()
        .ok_or_else(|| CliError::Config("the fit command needs a `fit` section".into()))?;
    let s = Setup::resolve(config)?;
    if !matches!(s.field.kind, FieldKind::Thermal { .. }) {
        return Err(CliError::Config("fitting needs a thermal field".into()));
    }
    let c = s.coupling;
    let (quality, q_start) = match opts.quality {
        FitQuality::Net => {
            let qn = c
                .q_net
                .ok_or_else(|| CliError::Config("fitting needs a lossy cavity".into()))?;
            (QualityParam::Net, qn)
        }
        FitQuality::Mirror => {
            let g = s.geometry().ok_or_else(|| {
                CliError::Config("fit quality `mirror` needs the cavity geometry".into())
            })?;
            (
                QualityParam::Mirror {
                    mirror_radius: g.mirror_radius,
                    mirror_separation: g.mirror_separation,
                },
                g.q_factor,
            )
        }
    };
    let mut template = ModelTemplate::new(s.omega0, quality, c.omega_rabi, q_start, c.nbar);
    template.photon_sum = match opts.photon_sum {
        PhotonSumConfig::Full => PhotonSum::Full,
        PhotonSumConfig::MeanPhoton => PhotonSum::MeanPhoton,
    };
    for (name, &v) in &opts.initial {
        if !template.initial.contains_key(name) {
            return Err(CliError::Config(format!(
                "fit.initial: unknown parameter `{name}`"
            )));
        }
        template.initial.insert(name.clone(), v);
    }
    let vary: BTreeSet<String> = opts.vary.iter().cloned().collect();
    let bounds = opts
        .bounds
        .iter()
        .map(|(k, v)| (k.clone(), (v[0], v[1])))
        .collect();
    let mut options = FitOptions::default();
    if let Some(r) = opts.restarts {
        options.restarts = r;
    }
    if let Some(n) = opts.max_evaluations {
        options.max_evaluations = n;
    }
    fit_trace(data, &template, &vary, &bounds, seed, &options).map_err(|e| match e {
        einstein_rabi::Error::Invalid(m) => CliError::Config(format!("fit: {m}")),
        other => other.into(),
    })
}
