//! Standard-normal CDF and quantile, used to move fixity factors in [0, 1]
//! to the real line and back.

use libm::erfc;
use statrs::function::erf::erf_inv;

use crate::scalar::{lit, to_f64, Scalar};

/// Boundary clamp applied before the quantile.
pub const PROBIT_EPS: f64 = 1e-9;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Φ(x).
pub fn normal_cdf<T: Scalar>(x: T) -> T {
    let x = to_f64(x);
    lit(0.5 * erfc(-x / SQRT_2))
}

fn quantile_f64(p: f64) -> f64 {
    let mut x = SQRT_2 * erf_inv(2.0 * p - 1.0);
    // one Newton step against the erfc-based CDF
    let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if pdf > 0.0 {
        x -= (0.5 * erfc(-x / SQRT_2) - p) / pdf;
    }
    x
}

/// Φ⁻¹(p) with p clamped to [ε, 1 − ε]. Returns the value and whether the
/// clamp was applied.
pub fn probit<T: Scalar>(p: T) -> (T, bool) {
    let raw = to_f64(p);
    let clamped = raw.clamp(PROBIT_EPS, 1.0 - PROBIT_EPS);
    (lit(quantile_f64(clamped)), clamped != raw)
}

/// Componentwise probit with a count of clamped entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbitVector<T> {
    pub values: Vec<T>,
    pub clamped: usize,
}

pub fn probit_transform<T: Scalar>(gamma: &[T]) -> ProbitVector<T> {
    let mut clamped = 0;
    let values = gamma
        .iter()
        .map(|&g| {
            let (v, c) = probit(g);
            clamped += usize::from(c);
            v
        })
        .collect();
    ProbitVector { values, clamped }
}

pub fn probit_inverse<T: Scalar>(z: &[T]) -> Vec<T> {
    z.iter().map(|&v| normal_cdf(v)).collect()
}
