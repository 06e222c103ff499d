mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use einstein_rabi::fit::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn times() -> Vec<f64> {
    (0..61).map(|k| 90e-6 * k as f64 / 60.0).collect()
}

fn truth(quality: QualityParam, q: f64) -> ModelTemplate {
    ModelTemplate::new(rydberg_omega0(), quality, RYDBERG_RABI, q, RYDBERG_NBAR)
}

fn trace(template: &ModelTemplate, noise: f64, seed: u64) -> TraceData {
    let ts = times();
    let clean = template.predict(&template.initial, &ts).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise.max(f64::MIN_POSITIVE)).unwrap();
    let samples = ts
        .iter()
        .zip(&clean)
        .map(|(&t, &v)| Sample {
            t,
            value: if noise > 0.0 {
                v + normal.sample(&mut rng)
            } else {
                v
            },
            weight: 1.0,
        })
        .collect();
    TraceData::new(samples).unwrap()
}

fn names(list: &[&str]) -> BTreeSet<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn standard_bounds() -> BTreeMap<String, (f64, f64)> {
    [
        ("omega_rabi", (1.5e5, 4.5e5)),
        ("q", (1e5, 1e7)),
        ("nbar", (0.0, 0.2)),
        ("amplitude", (0.8, 1.2)),
        ("offset", (-0.1, 0.1)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn perturbed(template: &ModelTemplate) -> ModelTemplate {
    let mut t = template.clone();
    t.initial.insert("omega_rabi".into(), 0.9 * RYDBERG_RABI);
    t.initial.insert("q".into(), 2.0 * RYDBERG_QNET);
    t
}

fn rms(template: &ModelTemplate, params: &BTreeMap<String, f64>, data: &TraceData) -> f64 {
    let pred = template.predict(params, &data.times()).unwrap();
    let s: f64 = data
        .samples()
        .iter()
        .zip(&pred)
        .map(|(s, p)| (s.value - p).powi(2))
        .sum();
    (s / pred.len() as f64).sqrt()
}

#[test]
fn zero_noise_round_trip() {
    let gen = truth(QualityParam::Net, RYDBERG_QNET);
    let data = trace(&gen, 0.0, 0);
    let start = perturbed(&gen);
    let opts = FitOptions {
        f_tol: 1e-16,
        x_tol: 1e-10,
        ..FitOptions::default()
    };
    let r = fit_trace(
        &data,
        &start,
        &names(&["omega_rabi", "q"]),
        &standard_bounds(),
        1,
        &opts,
    )
    .unwrap();
    assert!(r.residual_rms < 1e-6, "rms = {}", r.residual_rms);
    assert!((r.value("omega_rabi").unwrap() / RYDBERG_RABI - 1.0).abs() < 1e-4);
}

#[test]
fn noisy_round_trip_and_invariants() {
    let gen = truth(QualityParam::Net, RYDBERG_QNET);
    let data = trace(&gen, 0.01, 7);
    let start = perturbed(&gen);
    let vary = names(&["omega_rabi", "q", "amplitude", "offset"]);
    let bounds = standard_bounds();
    let r = fit_trace(&data, &start, &vary, &bounds, 42, &FitOptions::default()).unwrap();
    assert!(r.converged);
    assert!((r.value("omega_rabi").unwrap() / RYDBERG_RABI - 1.0).abs() < 0.02);
    // Fixed parameters keep their template values.
    assert_eq!(r.value("nbar").unwrap(), RYDBERG_NBAR);
    assert!(!r.parameters["nbar"].varied);
    for name in &vary {
        let p = r.parameters[name];
        let (lo, hi) = bounds[name];
        assert!(p.varied && p.value >= lo && p.value <= hi);
    }
    assert!(r.best_objective_history.windows(2).all(|w| w[1] <= w[0]));
    let initial_rms = rms(&start, &start.initial, &data);
    assert!(r.residual_rms <= initial_rms);
    let fitted: BTreeMap<String, f64> = r
        .parameters
        .iter()
        .map(|(k, p)| (k.clone(), p.value))
        .collect();
    assert!((rms(&start, &fitted, &data) - r.residual_rms).abs() < 1e-12);

    let again = fit_trace(&data, &start, &vary, &bounds, 42, &FitOptions::default()).unwrap();
    assert_eq!(format!("{r:?}"), format!("{again:?}"));
}

#[test]
fn quality_factor_discrimination() {
    let geometry = QualityParam::Mirror {
        mirror_radius: 0.025,
        mirror_separation: 0.027,
    };
    let vary = names(&["omega_rabi", "amplitude", "offset"]);
    let bounds = standard_bounds();
    let opts = FitOptions {
        restarts: 1,
        ..FitOptions::default()
    };
    for (q_true, q_other) in [(7e7, 7e5), (7e5, 7e7)] {
        let data = trace(&truth(geometry, q_true), 0.01, 3);
        let fit_with = |q: f64| {
            let t = truth(geometry, q);
            fit_trace(&data, &t, &vary, &bounds, 5, &opts)
                .unwrap()
                .residual_rms
        };
        let (right, wrong) = (fit_with(q_true), fit_with(q_other));
        assert!(right < wrong, "Q = {q_true}: {right} vs {wrong}");
    }
}

#[test]
fn rejects_bad_requests() {
    let gen = truth(QualityParam::Net, RYDBERG_QNET);
    let data = trace(&gen, 0.0, 0);
    let bounds = standard_bounds();
    let opts = FitOptions::default();
    assert!(fit_trace(&data, &gen, &BTreeSet::new(), &bounds, 0, &opts).is_err());
    assert!(fit_trace(&data, &gen, &names(&["width"]), &bounds, 0, &opts).is_err());
    let mut open = bounds.clone();
    open.insert("q".into(), (1e5, f64::INFINITY));
    assert!(fit_trace(&data, &gen, &names(&["q"]), &open, 0, &opts).is_err());
    let mut tight = bounds.clone();
    tight.insert("omega_rabi".into(), (1e4, 2e4));
    assert!(fit_trace(&data, &gen, &names(&["omega_rabi"]), &tight, 0, &opts).is_err());
}

#[test]
fn trace_validation() {
    let s = |t: f64, v: f64| Sample {
        t,
        value: v,
        weight: 1.0,
    };
    let ok: Vec<Sample> = (0..8).map(|k| s(k as f64, 0.5)).collect();
    assert!(TraceData::new(ok.clone()).is_ok());
    assert!(TraceData::new(ok[..7].to_vec()).is_err());
    let mut bad = ok.clone();
    bad[3].t = 1.5;
    bad[4].t = 1.0;
    assert!(TraceData::new(bad).is_err());
    let mut out = ok.clone();
    out[2].value = 1.2;
    assert!(TraceData::new(out).is_err());
    let mut neg = ok;
    neg[0].weight = -1.0;
    assert!(TraceData::new(neg).is_err());
}
