//! Li₋₁⁄₂(x) = Σ_{k≥1} √k·xᵏ on [0, 1).

use crate::error::{domain, numerical, Result};

const MAX_TERMS: usize = 1_000_000;

/// Polylogarithm of order −1/2 by compensated direct summation.
pub fn polylog_neg_half(x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(domain(format!("Li_-1/2 needs 0 <= x < 1, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut power = 1.0;
    for k in 1..=MAX_TERMS {
        power *= x;
        let term = (k as f64).sqrt() * power;
        // Neumaier summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if term < 1e-17 * (sum + comp) && (k as f64) * (1.0 - x) > 1.0 {
            return Ok(sum + comp);
        }
    }
    Err(numerical(format!(
        "Li_-1/2({x}) did not converge within {MAX_TERMS} terms"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_domain() {
        assert_eq!(polylog_neg_half(0.0).unwrap(), 0.0);
        assert!(polylog_neg_half(1.0).is_err());
        assert!(polylog_neg_half(-0.1).is_err());
        assert!(polylog_neg_half(f64::NAN).is_err());
    }

    #[test]
    fn leading_term_near_zero() {
        for x in [1e-12, 1e-8, 1e-4] {
            let r = polylog_neg_half(x).unwrap() / x;
            assert!((r - 1.0).abs() < 2.0 * x);
        }
    }

    #[test]
    fn known_value_at_half() {
        // Reference value from a 30-digit evaluation.
        let v = polylog_neg_half(0.5).unwrap();
        assert!((v - 1.347_253_752_735_750_7).abs() < 1e-14, "{v}");
    }

    #[test]
    fn increasing_and_above_x() {
        let mut prev = 0.0;
        for i in 1..100 {
            let x = i as f64 / 100.0;
            let v = polylog_neg_half(x).unwrap();
            assert!(v >= x);
            assert!(v > prev);
            prev = v;
        }
    }
}
