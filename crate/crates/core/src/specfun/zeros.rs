//! Positive zeros of J₀, memoized in a process-wide table.

use std::f64::consts::PI;
use std::sync::RwLock;

use super::bessel::{j0, j1};
use super::kernel::integral_j0;
use crate::error::{domain, Result};

/// Zeros γ₀ⱼ of J₀ together with the running sums Σᵢ≤ⱼ (−1)ⁱ ∫₀^γᵢ J₀,
/// which is what the |J₀| integral needs.
#[derive(Debug, Clone, Default)]
pub struct BesselZeroTable {
    zeros: Vec<f64>,
    signed_integrals: Vec<f64>,
}

static TABLE: RwLock<BesselZeroTable> = RwLock::new(BesselZeroTable::new());

impl BesselZeroTable {
    pub const fn new() -> Self {
        Self {
            zeros: Vec::new(),
            signed_integrals: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    fn push_next(&mut self) {
        let j = self.zeros.len() + 1;
        let z = refine_zero(j);
        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        let prev = self.signed_integrals.last().copied().unwrap_or(0.0);
        self.zeros.push(z);
        self.signed_integrals.push(prev + sign * integral_j0(z));
    }

    fn grow_to_count(&mut self, count: usize) {
        while self.zeros.len() < count {
            self.push_next();
        }
    }

    fn grow_past(&mut self, x: f64) {
        while self.zeros.last().is_none_or(|&z| z <= x) {
            self.push_next();
        }
    }
}

/// McMahon's expansion for the j-th zero.
fn mcmahon(j: usize) -> f64 {
    let beta = (j as f64 - 0.25) * PI;
    let b8 = 8.0 * beta;
    beta + 1.0 / b8 - 124.0 / (3.0 * b8.powi(3)) + 120_928.0 / (15.0 * b8.powi(5))
}

fn refine_zero(j: usize) -> f64 {
    let mut x = mcmahon(j);
    for _ in 0..50 {
        // J₀' = −J₁
        let step = j0(x) / j1(x);
        x += step;
        if step.abs() < 1e-15 * x {
            break;
        }
    }
    x
}

/// The j-th positive zero of J₀ (j ≥ 1).
pub fn j0_zero(j: usize) -> Result<f64> {
    if j == 0 {
        return Err(domain("Bessel zero index starts at 1"));
    }
    {
        let table = TABLE.read().expect("zero table lock poisoned");
        if let Some(&z) = table.zeros.get(j - 1) {
            return Ok(z);
        }
    }
    let mut table = TABLE.write().expect("zero table lock poisoned");
    table.grow_to_count(j);
    Ok(table.zeros[j - 1])
}

/// All zeros of J₀ that are ≤ x, in increasing order.
pub fn j0_zeros_up_to(x: f64) -> Vec<f64> {
    with_zeros_up_to(x, |zeros, _| zeros.to_vec())
}

/// Runs `f` on the zeros ≤ x and the matching signed running sums.
pub(crate) fn with_zeros_up_to<T>(x: f64, f: impl FnOnce(&[f64], &[f64]) -> T) -> T {
    {
        let table = TABLE.read().expect("zero table lock poisoned");
        if table.zeros.last().is_some_and(|&z| z > x) {
            let m = table.zeros.partition_point(|&z| z <= x);
            return f(&table.zeros[..m], &table.signed_integrals[..m]);
        }
    }
    let mut table = TABLE.write().expect("zero table lock poisoned");
    table.grow_past(x);
    let m = table.zeros.partition_point(|&z| z <= x);
    f(&table.zeros[..m], &table.signed_integrals[..m])
}

/// Snapshot of the memoized table, growing it to at least `count` zeros.
pub fn zero_table(count: usize) -> BesselZeroTable {
    let mut table = TABLE.write().expect("zero table lock poisoned");
    table.grow_to_count(count);
    table.clone()
}
