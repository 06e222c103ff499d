//! Reference evaluations built without the crate's numerics.
#![allow(dead_code)]

use std::f64::consts::PI;

use einstein_rabi::constants::hz_to_rad_per_s;

pub const RYDBERG_HZ: f64 = 51.099e9;
pub const RYDBERG_RABI: f64 = 0.295310e6;
pub const RYDBERG_NBAR: f64 = 0.0489;
pub const RYDBERG_QNET: f64 = 1.28318e6;
pub const RYDBERG_A0: f64 = 0.473053e6;

pub fn rydberg_omega0() -> f64 {
    hz_to_rad_per_s(RYDBERG_HZ)
}

/// J₀(x) = (1/π)∫₀^π cos(x sin θ) dθ by the trapezoid rule, which converges
/// geometrically for periodic integrands.
pub fn j0_trapezoid(x: f64) -> f64 {
    let n = 64 + 2 * x.abs().ceil() as usize;
    let h = PI / n as f64;
    let mut s = KahanSum::default();
    for k in 0..n {
        s.add((x * (h * k as f64).sin()).cos());
    }
    s.value() / n as f64
}

#[derive(Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite Gauss–Legendre over consecutive breakpoints.
pub fn composite(f: impl Fn(f64) -> f64, points: &[f64], rule: &[(f64, f64)]) -> f64 {
    let mut s = KahanSum::default();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        for &(x, wt) in rule {
            s.add(h * wt * f(m + h * x));
        }
    }
    s.value()
}

/// Uniform panels of width at most `width` covering [a, b].
pub fn panels(a: f64, b: f64, width: f64) -> Vec<f64> {
    let n = ((b - a) / width).ceil().max(1.0) as usize;
    (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
}

/// Sign changes of `f` on a fine scan of [0, x], refined by bisection.
pub fn roots_by_scan(f: impl Fn(f64) -> f64, x: f64, step: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let mut a = 0.0;
    let mut fa = f(a);
    while a < x {
        let b = (a + step).min(x);
        let fb = f(b);
        if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
                if hi - lo <= 4.0 * f64::EPSILON * hi {
                    break;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    roots
}

/// Real-axis evaluation of the lossy per-mode integral
/// (4/π)∫₀^∞ c²/((4s²+c²)(s²+ω²)) · sin²(t√(ω²+s²)/2) ds,
/// panels of width at most π/t, truncated at S with the mean tail
/// (2/π)·c²/(12S³) added back.
pub fn lossy_real_axis(w: f64, c: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let rule = gauss_legendre(20);
    let lorentz = |s: f64| c * c / ((4.0 * s * s + c * c) * (s * s + w * w));
    let f = |s: f64| {
        let half = 0.5 * t * (w * w + s * s).sqrt();
        lorentz(s) * half.sin().powi(2)
    };
    let big = 2e3 * c.max(w).max(1.0 / t);
    let mut pts = panels(0.0, 4.0 * c.max(w), (PI / t).min(0.25 * c.min(w)));
    let tail_start = *pts.last().unwrap();
    pts.extend(panels(tail_start, big, PI / t).into_iter().skip(1));
    let body = composite(f, &pts, &rule);
    4.0 / PI * body + 2.0 / PI * c * c / (12.0 * big.powi(3))
}
