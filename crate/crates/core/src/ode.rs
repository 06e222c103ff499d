//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.
//!
//! Steps never straddle a stop point: every requested output time and every
//! caller-supplied breakpoint (e.g. a kink of the right-hand side) is hit
//! exactly, so the method keeps its order across non-smooth points.

use crate::error::{domain, numerical, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// Fifth-order weights (also the last row of the tableau).
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// Difference between fifth- and fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Smallest step relative to the current time scale before giving up.
    pub min_step_ratio: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            min_step_ratio: 1e-14,
            max_steps: 5_000_000,
        }
    }
}

/// Integrate y' = f(t, y) from `t_grid[0]`, returning the state at every grid
/// time. `breakpoints` outside the grid range are ignored.
pub fn integrate<const N: usize, F>(
    f: F,
    y0: [f64; N],
    t_grid: &[f64],
    breakpoints: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let Some(&t0) = t_grid.first() else {
        return Ok(Vec::new());
    };
    for w in t_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(domain(format!(
                "time grid must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
    }
    if !t0.is_finite() || !t_grid[t_grid.len() - 1].is_finite() {
        return Err(domain("time grid must be finite"));
    }
    let t_end = t_grid[t_grid.len() - 1];

    let mut stops: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&b| b > t0 && b < t_end)
        .collect();
    stops.extend_from_slice(&t_grid[1..]);
    stops.sort_by(f64::total_cmp);
    stops.dedup();

    let mut out = Vec::with_capacity(t_grid.len());
    out.push(y0);
    let mut next_grid = 1;

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = initial_step(&f, t, &y, &k1, opts, stops.first().map_or(1.0, |s| s - t0));
    let mut steps = 0usize;

    for &stop in &stops {
        while t < stop {
            steps += 1;
            if steps > opts.max_steps {
                return Err(numerical(format!("ODE step budget exhausted at t = {t:e}")));
            }
            let scale = t.abs().max(stop - t0).max(f64::MIN_POSITIVE);
            if h < opts.min_step_ratio * scale {
                return Err(numerical(format!(
                    "ODE step size underflow at t = {t:e} (h = {h:e})"
                )));
            }
            let landing = t + h >= stop || stop - (t + h) < 1e-12 * scale;
            let h_try = if landing { stop - t } else { h };
            let (y_new, k7, err) = dopri_step(&f, t, &y, &k1, h_try, opts);
            if err <= 1.0 {
                t = if landing { stop } else { t + h_try };
                y = y_new;
                k1 = k7;
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).min(5.0)
                };
                // A forced short landing step says nothing about the natural
                // step size, so only grow from the step we wanted to take.
                h = if landing {
                    h.max(h_try * grow)
                } else {
                    h_try * grow
                };
            } else {
                h = h_try * (0.9 * err.powf(-0.2)).max(0.1);
            }
        }
        if next_grid < t_grid.len() && stop == t_grid[next_grid] {
            out.push(y);
            next_grid += 1;
        }
    }
    Ok(out)
}

fn initial_step<const N: usize, F>(
    f: &F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    opts: &OdeOptions,
    span: f64,
) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for i in 0..N {
        let sc = opts.abs_tol + opts.rel_tol * y[i].abs();
        d0 = d0.max(y[i].abs() / sc);
        d1 = d1.max(k1[i].abs() / sc);
    }
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6 * span
    } else {
        0.01 * d0 / d1
    };
    let mut y1 = [0.0; N];
    for i in 0..N {
        y1[i] = y[i] + h0 * k1[i];
    }
    let k2 = f(t + h0, &y1);
    let mut d2: f64 = 0.0;
    for i in 0..N {
        let sc = opts.abs_tol + opts.rel_tol * y[i].abs();
        d2 = d2.max((k2[i] - k1[i]).abs() / sc / h0);
    }
    let h1 = if d1.max(d2) <= 1e-15 {
        (1e-6 * span).max(h0 * 1e-3)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span).max(f64::MIN_POSITIVE)
}

/// One trial step. Returns the fifth-order solution, f at the new point
/// (first-same-as-last) and the scaled error norm.
fn dopri_step<const N: usize, F>(
    f: &F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    opts: &OdeOptions,
) -> ([f64; N], [f64; N], f64)
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut tmp = [0.0; N];
    for i in 0..N {
        tmp[i] = y[i] + h * A21 * k1[i];
    }
    let k2 = f(t + C2 * h, &tmp);
    for i in 0..N {
        tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    }
    let k3 = f(t + C3 * h, &tmp);
    for i in 0..N {
        tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    }
    let k4 = f(t + C4 * h, &tmp);
    for i in 0..N {
        tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    }
    let k5 = f(t + C5 * h, &tmp);
    for i in 0..N {
        tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    }
    let k6 = f(t + h, &tmp);
    let mut y_new = [0.0; N];
    for i in 0..N {
        y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
    }
    let k7 = f(t + h, &y_new);
    let mut err: f64 = 0.0;
    for i in 0..N {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
        err = err.max((e / sc).abs());
    }
    (y_new, k7, err)
}
