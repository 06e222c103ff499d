//! Least-squares fitting of lossy-cavity Rabi traces.
//!
//! The forward model is offset + amplitude·P₂→₁(t) with the coupling fixed by
//! (Ω_R, Q, n̄). Bounded parameters are mapped to unconstrained ones through
//! x = lo + (hi − lo)(1 + sin u)/2 and minimized with Nelder–Mead.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::{
    invert_a0_from_rabi, lossy_fixed_point, solve_cavity_coupled, CavityGeometry, CouplingSolution,
};
use crate::error::{invalid, Error, Result};
use crate::photons::PhotonField;
use crate::transition::TransitionModel;

pub const PARAMETER_NAMES: [&str; 5] = ["omega_rabi", "q", "nbar", "amplitude", "offset"];

/// One digitized point of an occupation-probability trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub value: f64,
    pub weight: f64,
}

/// Validated trace: at least 8 samples, strictly increasing times, values
/// in [−0.1, 1.1], non-negative weights with a positive sum.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceData {
    samples: Vec<Sample>,
}

impl TraceData {
    pub const MIN_SAMPLES: usize = 8;

    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        if samples.len() < Self::MIN_SAMPLES {
            return Err(invalid(format!(
                "trace needs at least {} samples, got {}",
                Self::MIN_SAMPLES,
                samples.len()
            )));
        }
        for (i, s) in samples.iter().enumerate() {
            if !(s.t.is_finite() && s.t >= 0.0) {
                return Err(invalid(format!(
                    "sample {i}: time {} is not a finite non-negative number",
                    s.t
                )));
            }
            if !(-0.1..=1.1).contains(&s.value) {
                return Err(invalid(format!(
                    "sample {i}: value {} outside [-0.1, 1.1]",
                    s.value
                )));
            }
            if !(s.weight >= 0.0 && s.weight.is_finite()) {
                return Err(invalid(format!(
                    "sample {i}: weight {} must be non-negative",
                    s.weight
                )));
            }
            if i > 0 && !(s.t > samples[i - 1].t) {
                return Err(invalid(format!(
                    "sample {i}: time {} does not increase (previous {})",
                    s.t,
                    samples[i - 1].t
                )));
            }
        }
        if samples.iter().map(|s| s.weight).sum::<f64>() <= 0.0 {
            return Err(invalid("all sample weights are zero"));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }
}

/// What the `q` parameter means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityParam {
    /// `q` is the net quality factor Q′ directly.
    Net,
    /// `q` is the mirror Q; Q′ and A(0) follow from the coupled solve.
    Mirror {
        mirror_radius: f64,
        mirror_separation: f64,
    },
}

/// Full photon-number sum or the single n̄ term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonSum {
    Full,
    #[default]
    MeanPhoton,
}

/// Forward model and starting point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelTemplate {
    pub omega0: f64,
    pub quality: QualityParam,
    pub photon_sum: PhotonSum,
    /// Starting values for every name in [`PARAMETER_NAMES`].
    pub initial: BTreeMap<String, f64>,
    /// Absolute accuracy of each model probability.
    pub tolerance: f64,
}

impl ModelTemplate {
    pub fn new(omega0: f64, quality: QualityParam, omega_rabi: f64, q: f64, nbar: f64) -> Self {
        let initial = [
            ("omega_rabi", omega_rabi),
            ("q", q),
            ("nbar", nbar),
            ("amplitude", 1.0),
            ("offset", 0.0),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Self {
            omega0,
            quality,
            photon_sum: PhotonSum::default(),
            initial,
            tolerance: 1e-8,
        }
    }

    fn value(&self, name: &str) -> Result<f64> {
        self.initial
            .get(name)
            .copied()
            .ok_or_else(|| invalid(format!("model template lacks parameter {name}")))
    }

    /// Coupling implied by (Ω_R, q, n̄).
    pub fn coupling(&self, omega_rabi: f64, q: f64, nbar: f64) -> Result<CouplingSolution> {
        match self.quality {
            QualityParam::Net => {
                let a0 = invert_a0_from_rabi(omega_rabi, nbar, q, self.omega0)?;
                let mut c = lossy_fixed_point(a0, nbar, q, self.omega0)?;
                // Keep Ω_R exactly as given; the root reproduces it to rounding.
                c.omega_rabi = omega_rabi;
                c.g_prime = omega_rabi / (2.0 * (nbar + 1.0).sqrt());
                Ok(c)
            }
            QualityParam::Mirror {
                mirror_radius,
                mirror_separation,
            } => {
                let geometry = CavityGeometry::new(q, mirror_radius, mirror_separation)?;
                solve_cavity_coupled(omega_rabi, nbar, &geometry, self.omega0)
            }
        }
    }

    /// offset + amplitude·P₂→₁(t) at each time.
    pub fn predict(&self, params: &BTreeMap<String, f64>, times: &[f64]) -> Result<Vec<f64>> {
        let get = |name: &str| {
            params
                .get(name)
                .copied()
                .ok_or_else(|| invalid(format!("missing parameter {name}")))
        };
        let (omega_rabi, q, nbar) = (get("omega_rabi")?, get("q")?, get("nbar")?);
        let (amplitude, offset) = (get("amplitude")?, get("offset")?);
        let coupling = self.coupling(omega_rabi, q, nbar)?;
        let field = PhotonField::thermal_from_nbar(self.omega0, nbar)?;
        let model = TransitionModel::for_coupling(field, coupling)?.with_tolerance(self.tolerance);
        let probs = match self.photon_sum {
            PhotonSum::Full => model.sweep(times, |m, t| m.prob_lossy(t))?,
            PhotonSum::MeanPhoton => model.sweep(times, |m, t| m.prob_lossy_low_nbar(t))?,
        };
        Ok(probs.into_iter().map(|p| offset + amplitude * p).collect())
    }
}

/// Optimizer budget and stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub restarts: usize,
    pub max_evaluations: usize,
    /// Stop when the simplex spread in objective falls below this fraction.
    pub f_tol: f64,
    /// and its diameter in the unconstrained coordinates below this.
    pub x_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            restarts: 3,
            max_evaluations: 2000,
            f_tol: 1e-10,
            x_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitParameter {
    pub value: f64,
    pub varied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub parameters: BTreeMap<String, FitParameter>,
    pub residual_rms: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Restart that produced the result.
    pub restart: usize,
    /// Best objective after each iteration of the winning restart.
    #[serde(skip)]
    pub best_objective_history: Vec<f64>,
}

impl FitResult {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.parameters.get(name).map(|p| p.value)
    }
}

struct Problem<'a> {
    data: &'a TraceData,
    template: &'a ModelTemplate,
    varied: Vec<(String, f64, f64)>,
    weight_sum: f64,
}

impl Problem<'_> {
    fn to_x(&self, u: &[f64]) -> Vec<f64> {
        self.varied
            .iter()
            .zip(u)
            .map(|((_, lo, hi), &ui)| lo + (hi - lo) * 0.5 * (1.0 + ui.sin()))
            .collect()
    }

    fn to_u(&self, x: &[f64]) -> Vec<f64> {
        self.varied
            .iter()
            .zip(x)
            .map(|((_, lo, hi), &xi)| (2.0 * (xi - lo) / (hi - lo) - 1.0).clamp(-1.0, 1.0).asin())
            .collect()
    }

    fn params(&self, x: &[f64]) -> BTreeMap<String, f64> {
        let mut p = self.template.initial.clone();
        for ((name, _, _), &v) in self.varied.iter().zip(x) {
            p.insert(name.clone(), v);
        }
        p
    }

    /// Weighted sum of squared residuals.
    fn objective_x(&self, x: &[f64]) -> Result<f64> {
        let params = self.params(x);
        let pred = self
            .template
            .predict(&params, &self.data.times())
            .map_err(|e| Error::Numerical(format!("forward model failed at {params:?}: {e}")))?;
        Ok(self
            .data
            .samples()
            .iter()
            .zip(&pred)
            .map(|(s, p)| s.weight * (p - s.value).powi(2))
            .sum())
    }

    fn rms(&self, ssr: f64) -> f64 {
        (ssr / self.weight_sum).sqrt()
    }
}

struct RunOutcome {
    u: Vec<f64>,
    f: f64,
    iterations: usize,
    evaluations: usize,
    converged: bool,
    history: Vec<f64>,
}

/// Fits the varied parameters of `template` to `data`. Restart 0 starts at
/// the template values; later restarts start at seeded uniform draws inside
/// the bounds.
pub fn fit_trace(
    data: &TraceData,
    template: &ModelTemplate,
    vary: &BTreeSet<String>,
    bounds: &BTreeMap<String, (f64, f64)>,
    seed: u64,
    options: &FitOptions,
) -> Result<FitResult> {
    if vary.is_empty() {
        return Err(invalid("no parameters to vary"));
    }
    let mut varied = Vec::new();
    for name in vary {
        if !PARAMETER_NAMES.contains(&name.as_str()) {
            return Err(invalid(format!("unknown fit parameter {name}")));
        }
        let &(lo, hi) = bounds
            .get(name)
            .ok_or_else(|| invalid(format!("varied parameter {name} has no bounds")))?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(format!(
                "bounds for {name} must be finite with lo < hi, got [{lo}, {hi}]"
            )));
        }
        let start = template.value(name)?;
        if !(lo..=hi).contains(&start) {
            return Err(invalid(format!(
                "start value {start} for {name} lies outside [{lo}, {hi}]"
            )));
        }
        varied.push((name.clone(), lo, hi));
    }
    for name in PARAMETER_NAMES {
        template.value(name)?;
    }
    let problem = Problem {
        data,
        template,
        weight_sum: data.samples().iter().map(|s| s.weight).sum(),
        varied,
    };
    let mids: Vec<f64> = problem
        .varied
        .iter()
        .map(|(_, lo, hi)| 0.5 * (lo + hi))
        .collect();
    problem.objective_x(&mids)?;

    let starts: Vec<Vec<f64>> = (0..options.restarts.max(1))
        .map(|k| {
            if k == 0 {
                let x0: Vec<f64> = problem
                    .varied
                    .iter()
                    .map(|(n, _, _)| template.initial[n])
                    .collect();
                problem.to_u(&x0)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                let x: Vec<f64> = problem
                    .varied
                    .iter()
                    .map(|(_, lo, hi)| rng.random_range(*lo..=*hi))
                    .collect();
                problem.to_u(&x)
            }
        })
        .collect();

    let runs: Vec<RunOutcome> = starts
        .into_par_iter()
        .map(|u0| nelder_mead(&problem, u0, options))
        .collect::<Result<_>>()?;
    let (restart, best) = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.f.total_cmp(&b.f).then(i.cmp(j)))
        .expect("at least one restart");

    let x = problem.to_x(&best.u);
    let mut parameters = BTreeMap::new();
    for name in PARAMETER_NAMES {
        parameters.insert(
            name.to_string(),
            FitParameter {
                value: template.initial[name],
                varied: false,
                bounds: None,
            },
        );
    }
    for ((name, lo, hi), v) in problem.varied.iter().zip(x) {
        parameters.insert(
            name.clone(),
            FitParameter {
                value: v.clamp(*lo, *hi),
                varied: true,
                bounds: Some((*lo, *hi)),
            },
        );
    }
    Ok(FitResult {
        parameters,
        residual_rms: problem.rms(best.f),
        iterations: best.iterations,
        evaluations: runs.iter().map(|r| r.evaluations).sum(),
        converged: best.converged,
        restart,
        best_objective_history: best.history.clone(),
    })
}

/// Nelder–Mead in the unconstrained coordinates.
fn nelder_mead(problem: &Problem<'_>, u0: Vec<f64>, options: &FitOptions) -> Result<RunOutcome> {
    let dim = u0.len();
    let evaluations = std::cell::Cell::new(0usize);
    let eval = |u: &[f64]| -> Result<f64> {
        evaluations.set(evaluations.get() + 1);
        problem.objective_x(&problem.to_x(u))
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = eval(&u0)?;
    simplex.push((u0.clone(), f0));
    for i in 0..dim {
        let mut v = u0.clone();
        // Step towards the interior so the vertex is not on a flat spot of sin.
        v[i] += if v[i] > 0.0 { -0.25 } else { 0.25 };
        let f = eval(&v)?;
        simplex.push((v, f));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    order(&mut simplex);
    let mut history = vec![simplex[0].1];
    let mut iterations = 0;
    let mut converged = false;
    while evaluations.get() < options.max_evaluations {
        let f_best = simplex[0].1;
        let f_worst = simplex[dim].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| {
                v.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (f_worst - f_best) <= options.f_tol * f_best.abs() + 1e-300 && diameter <= options.x_tol
        {
            converged = true;
            break;
        }
        iterations += 1;
        let mut centroid = vec![0.0; dim];
        for (v, _) in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }
        let along = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + coef * (w - c))
                .collect()
        };
        let reflected = along(-1.0);
        let f_r = eval(&reflected)?;
        if f_r < simplex[0].1 {
            let expanded = along(-2.0);
            let f_e = eval(&expanded)?;
            simplex[dim] = if f_e < f_r {
                (expanded, f_e)
            } else {
                (reflected, f_r)
            };
        } else if f_r < simplex[dim - 1].1 {
            simplex[dim] = (reflected, f_r);
        } else {
            let (contracted, f_c) = if f_r < simplex[dim].1 {
                let c = along(-0.5);
                let f = eval(&c)?;
                (c, f)
            } else {
                let c = along(0.5);
                let f = eval(&c)?;
                (c, f)
            };
            if f_c < simplex[dim].1.min(f_r) {
                simplex[dim] = (contracted, f_c);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let v: Vec<f64> = best
                        .iter()
                        .zip(&vertex.0)
                        .map(|(b, x)| b + 0.5 * (x - b))
                        .collect();
                    let f = eval(&v)?;
                    *vertex = (v, f);
                }
            }
        }
        order(&mut simplex);
        history.push(simplex[0].1);
    }
    let (u, f) = simplex.swap_remove(0);
    Ok(RunOutcome {
        u,
        f,
        iterations,
        evaluations: evaluations.get(),
        converged,
        history,
    })
}
