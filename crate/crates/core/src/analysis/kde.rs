/// Smallest bandwidth used, so degenerate samples still give a density.
pub const BANDWIDTH_FLOOR: f64 = 1e-4;

/// Silverman's rule 1.06 σ̂ n^(-1/5), floored.
pub fn silverman_bandwidth(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    if samples.len() < 2 {
        return BANDWIDTH_FLOOR;
    }
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (1.06 * var.sqrt() * n.powf(-0.2)).max(BANDWIDTH_FLOOR)
}

/// Log density at `x` of the Gaussian KDE with bandwidth `h`.
pub fn kde_log_density(samples: &[f64], h: f64, x: f64) -> f64 {
    assert!(!samples.is_empty() && h > 0.0);
    let z: Vec<f64> = samples
        .iter()
        .map(|&s| -0.5 * ((x - s) / h).powi(2))
        .collect();
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = z.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln() - (samples.len() as f64 * h).ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn standard_normal_density_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let s: Vec<f64> = (0..10_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let v = kde_log_density(&s, silverman_bandwidth(&s), 0.0);
        assert!((v + 0.918_938_533).abs() < 0.05, "{v}");
    }

    #[test]
    fn tail_is_monotone() {
        let s = [0.0, 0.1, -0.1, 0.05];
        let h = silverman_bandwidth(&s);
        let vals: Vec<f64> = (0..20)
            .map(|i| kde_log_density(&s, h, 0.5 + i as f64 * 0.2))
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        assert!(vals[19].is_finite() && vals[19] < -100.0);
    }

    #[test]
    fn degenerate_samples_use_floor() {
        let s = [0.3; 50];
        assert_eq!(silverman_bandwidth(&s), BANDWIDTH_FLOOR);
        assert!(kde_log_density(&s, BANDWIDTH_FLOOR, 0.3).is_finite());
    }

    #[test]
    fn integrates_to_one() {
        let s = [0.2, 0.25, 0.4, 0.9];
        let h = silverman_bandwidth(&s);
        let (a, b, steps) = (-2.0, 3.0, 200_000);
        let dx = (b - a) / steps as f64;
        let total: f64 = (0..=steps)
            .map(|i| {
                let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
                w * kde_log_density(&s, h, a + i as f64 * dx).exp()
            })
            .sum::<f64>()
            * dx;
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }
}
