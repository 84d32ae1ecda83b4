use rand::Rng;

/// Draw a partition of `n` items from CRP(α) by sequential seating.
/// Labels are contiguous in 1..=K, numbered in order of first appearance.
pub fn crp_sample<R: Rng + ?Sized>(alpha: f64, n: usize, rng: &mut R) -> Vec<usize> {
    assert!(alpha > 0.0, "CRP concentration must be positive");
    let mut labels = Vec::with_capacity(n);
    let mut sizes: Vec<usize> = Vec::new();
    for i in 0..n {
        // i customers already seated
        let u = rng.gen::<f64>() * (i as f64 + alpha);
        let mut acc = 0.0;
        let mut chosen = sizes.len();
        for (k, &s) in sizes.iter().enumerate() {
            acc += s as f64;
            if u < acc {
                chosen = k;
                break;
            }
        }
        if chosen == sizes.len() {
            sizes.push(0);
        }
        sizes[chosen] += 1;
        labels.push(chosen + 1);
    }
    labels
}

/// E[K] under CRP(α) with `n` items: Σ_{i=1}^{n} α / (α + i − 1).
pub fn crp_expected_clusters(alpha: f64, n: usize) -> f64 {
    (1..=n).map(|i| alpha / (alpha + i as f64 - 1.0)).sum()
}

/// Number of distinct labels in a contiguous 1..=K labeling.
pub fn cluster_count(labels: &[usize]) -> usize {
    labels.iter().copied().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_customer_opens_one_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(crp_sample(3.0, 1, &mut rng), vec![1]);
        }
    }

    #[test]
    fn tiny_alpha_keeps_everyone_together() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let together = (0..1000)
            .filter(|_| cluster_count(&crp_sample(1e-9, 15, &mut rng)) == 1)
            .count();
        assert_eq!(together, 1000);
    }

    #[test]
    fn labels_are_contiguous() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let labels = crp_sample(5.0, 15, &mut rng);
            let k = cluster_count(&labels);
            for c in 1..=k {
                assert!(labels.contains(&c));
            }
            // first appearance order
            let mut seen = 0;
            for &l in &labels {
                assert!(l <= seen + 1);
                if l == seen + 1 {
                    seen += 1;
                }
            }
        }
    }

    #[test]
    fn analytic_expectation() {
        assert!((crp_expected_clusters(5.0, 15) - 7.322_031_619_051_743).abs() < 1e-12);
    }
}
