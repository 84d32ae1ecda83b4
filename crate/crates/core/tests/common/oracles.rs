//! Statistical oracles for the sampler steps, shared by the sampler tests
//! and the acceptance suite. Reference moments come from brute-force grid
//! integration or closed forms written out here, never from the library's
//! own posterior helpers.

use dphbmu::sampler::{
    crp_expected_clusters, crp_sample, normal_cdf, pcn_propose, probit, sample_beta,
    sample_cluster_means, sample_tau, CachedFit, Chain, ChainState, FnSimulator, RunOptions,
    SamplerConfig, SimulatorError,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// One measured quantity against its bound.
#[derive(Debug, Clone)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub bound: String,
    pub ok: bool,
}

impl Check {
    pub fn relative(label: &str, got: f64, want: f64, rel: f64) -> Self {
        let err = (got - want).abs() / want.abs();
        Self {
            label: format!("{label} (sampled {got:.5}, reference {want:.5})"),
            value: err,
            bound: format!("relative error <= {rel}"),
            ok: err <= rel,
        }
    }

    pub fn below(label: &str, value: f64, bound: f64) -> Self {
        Self {
            label: label.into(),
            value,
            bound: format!("<= {bound:e}"),
            ok: value <= bound,
        }
    }

    pub fn above(label: &str, value: f64, bound: f64) -> Self {
        Self {
            label: label.into(),
            value,
            bound: format!("> {bound}"),
            ok: value > bound,
        }
    }

    pub fn at_least(label: &str, value: f64, bound: f64) -> Self {
        Self {
            label: label.into(),
            value,
            bound: format!(">= {bound}"),
            ok: value >= bound,
        }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.ok { "ok" } else { "FAILED" };
        if self.value.fract() == 0.0 && self.value.abs() < 1e6 {
            write!(
                f,
                "{}: {} ({}) {verdict}",
                self.label, self.value, self.bound
            )
        } else {
            write!(
                f,
                "{}: {:.4e} ({}) {verdict}",
                self.label, self.value, self.bound
            )
        }
    }
}

pub fn assert_checks(checks: &[Check]) {
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.ok)
        .map(|c| c.to_string())
        .collect();
    assert!(failed.is_empty(), "{}", failed.join("\n"));
}

pub const DRAWS: usize = 100_000;

fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (
        mean,
        xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0),
    )
}

/// Mean and variance of an unnormalized log density tabulated on a uniform grid.
fn grid_moments(grid: &[f64], log_density: &[f64]) -> (f64, f64) {
    let max = log_density
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_density.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = w.iter().sum();
    let mean = grid.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() / z;
    let var = grid
        .iter()
        .zip(&w)
        .map(|(x, w)| (x - mean).powi(2) * w)
        .sum::<f64>()
        / z;
    (mean, var)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn log_normal(x: f64, mean: f64, precision: f64) -> f64 {
    0.5 * (precision / (2.0 * std::f64::consts::PI)).ln() - 0.5 * precision * (x - mean).powi(2)
}

fn log_gamma_density(x: f64, shape: f64, rate: f64) -> f64 {
    // normalizing constant dropped
    (shape - 1.0) * x.ln() - rate * x
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

pub fn config(f: impl FnOnce(&mut SamplerConfig)) -> SamplerConfig {
    let mut c = SamplerConfig::default();
    f(&mut c);
    c
}

pub fn cluster_mean_moments_match_grid_posterior() -> Vec<Check> {
    let mut checks = Vec::new();
    let cfg = config(|c| c.rho = 0.1);
    let thetas = [1.5, 2.0, 2.5, 2.0];
    let mut state = ChainState {
        thetas: thetas.iter().map(|&t| vec![t]).collect(),
        labels: vec![1; 4],
        mus: vec![vec![0.0]],
        tau: 1.0,
        beta: 1.0,
    };
    let grid = linspace(-4.0, 8.0, 200_001);
    let logp: Vec<f64> = grid
        .iter()
        .map(|&mu| {
            thetas.iter().map(|&t| log_normal(t, mu, 1.0)).sum::<f64>() + log_normal(mu, 0.0, 0.1)
        })
        .collect();
    let (mean, var) = grid_moments(&grid, &logp);
    checks.push(Check::below(
        "grid mean vs 8/4.1",
        (mean - 8.0 / 4.1).abs(),
        1e-9,
    ));
    checks.push(Check::below(
        "grid variance vs 1/4.1",
        (var - 1.0 / 4.1).abs(),
        1e-9,
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let draws: Vec<f64> = (0..DRAWS)
        .map(|_| {
            sample_cluster_means(&mut state, &cfg, &[0.0], &mut rng);
            state.mus[0][0]
        })
        .collect();
    let (m, v) = moments(&draws);
    checks.push(Check::relative("mean", m, mean, 0.02));
    checks.push(Check::relative("variance", v, var, 0.02));
    checks
}

pub fn shared_precision_moments_match_grid_posterior() -> Vec<Check> {
    let mut checks = Vec::new();
    // μ_k is integrated out on a grid inside every τ grid point
    let cfg = config(|c| {
        c.a_tau = 2.0;
        c.b_tau = 1.0;
        c.rho = 0.5;
    });
    let mu0 = 0.2;
    let clusters: [&[f64]; 2] = [&[0.5, 1.0], &[-0.3, 0.4]];
    let mut state = ChainState {
        thetas: [0.5, 1.0, -0.3, 0.4].iter().map(|&t| vec![t]).collect(),
        labels: vec![1, 1, 2, 2],
        mus: vec![vec![0.0], vec![0.0]],
        tau: 1.0,
        beta: 1.0,
    };
    let mu_grid = linspace(-25.0, 25.0, 10_001);
    let tau_grid = linspace(1e-4, 40.0, 4_000);
    let dmu = mu_grid[1] - mu_grid[0];
    let logp: Vec<f64> = tau_grid
        .iter()
        .map(|&tau| {
            let mut lp = log_gamma_density(tau, cfg.a_tau, cfg.b_tau);
            for members in clusters {
                let inner: Vec<f64> = mu_grid
                    .iter()
                    .map(|&mu| {
                        members.iter().map(|&t| log_normal(t, mu, tau)).sum::<f64>()
                            + log_normal(mu, mu0, cfg.rho * tau)
                    })
                    .collect();
                lp += log_sum_exp(&inner) + dmu.ln();
            }
            lp
        })
        .collect();
    let (mean, var) = grid_moments(&tau_grid, &logp);

    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let draws: Vec<f64> = (0..DRAWS)
        .map(|_| sample_tau(&mut state, &cfg, &[mu0], &mut rng))
        .collect();
    let (m, v) = moments(&draws);
    checks.push(Check::relative("mean", m, mean, 0.02));
    checks.push(Check::relative("variance", v, var, 0.02));
    checks
}

pub fn noise_precision_moments_match_grid_posterior() -> Vec<Check> {
    let mut checks = Vec::new();
    // two observations in R³ with squared residuals 1 and 3 at the cached fits
    let cfg = config(|c| {
        c.a_beta = 10.0;
        c.b_beta = 0.1;
    });
    let sim = FnSimulator::new(1, 3, |_: &[f64]| Ok(vec![0.0; 3]));
    let xs = [vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 1.0]];
    let fits: Vec<CachedFit<f64>> = xs
        .iter()
        .map(|x| CachedFit::evaluate(&sim, &[0.0], x))
        .collect();
    let mut state = ChainState::initial(2, &[0.0], &cfg);

    let grid = linspace(1e-6, 25.0, 200_001);
    let logp: Vec<f64> = grid
        .iter()
        .map(|&b| {
            log_gamma_density(b, cfg.a_beta, cfg.b_beta)
                + xs.iter()
                    .map(|x| x.iter().map(|&v| log_normal(v, 0.0, b)).sum::<f64>())
                    .sum::<f64>()
        })
        .collect();
    let (mean, var) = grid_moments(&grid, &logp);
    checks.push(Check::below(
        "grid mean vs 13/2.1",
        (mean - 13.0 / 2.1).abs(),
        1e-6,
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let draws: Vec<f64> = (0..DRAWS)
        .map(|_| sample_beta(&mut state, &cfg, &fits, 3, &mut rng))
        .collect();
    let (m, v) = moments(&draws);
    checks.push(Check::relative("mean", m, mean, 0.02));
    checks.push(Check::relative("variance", v, var, 0.02));
    checks
}

pub fn crp_mean_cluster_count_matches_harmonic_sum() -> Vec<Check> {
    let mut checks = Vec::new();
    let direct: f64 = (1..=15).map(|i| 5.0 / (5.0 + i as f64 - 1.0)).sum();
    checks.push(Check::below(
        "closed form vs direct sum",
        (crp_expected_clusters(5.0, 15) - direct).abs(),
        1e-12,
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mean = (0..10_000)
        .map(|_| *crp_sample(5.0, 15, &mut rng).iter().max().unwrap() as f64)
        .sum::<f64>()
        / 1e4;
    checks.push(Check::relative("E[K]", mean, direct, 0.02));
    checks
}

/// p-value of the chi-square homogeneity test between two samples of
/// small non-negative integers. Sparse tail categories are pooled.
fn homogeneity_p(a: &[usize], b: &[usize]) -> f64 {
    let top = a.iter().chain(b).copied().max().unwrap();
    let mut ca = vec![0.0; top + 1];
    let mut cb = vec![0.0; top + 1];
    a.iter().for_each(|&v| ca[v] += 1.0);
    b.iter().for_each(|&v| cb[v] += 1.0);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pending = (0.0, 0.0);
    for v in 0..=top {
        pending.0 += ca[v];
        pending.1 += cb[v];
        let total = pending.0 + pending.1;
        if total * na.min(nb) / (na + nb) >= 10.0 {
            bins.push(pending);
            pending = (0.0, 0.0);
        }
    }
    if let Some(last) = bins.last_mut() {
        last.0 += pending.0;
        last.1 += pending.1;
    }
    let stat: f64 = bins
        .iter()
        .map(|&(x, y)| {
            let ea = (x + y) * na / (na + nb);
            let eb = (x + y) * nb / (na + nb);
            (x - ea).powi(2) / ea + (y - eb).powi(2) / eb
        })
        .sum();
    1.0 - ChiSquared::new((bins.len() - 1) as f64).unwrap().cdf(stat)
}

pub fn crp_partition_is_exchangeable() -> Vec<Check> {
    let mut checks = Vec::new();
    // the cluster containing the first customer and the one containing the
    // last customer must have the same size distribution
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let draws: Vec<Vec<usize>> = (0..20_000).map(|_| crp_sample(5.0, 15, &mut rng)).collect();
    let size_of = |labels: &[usize], n: usize| labels.iter().filter(|&&l| l == labels[n]).count();
    let first: Vec<usize> = draws[..10_000].iter().map(|l| size_of(l, 0)).collect();
    let last: Vec<usize> = draws[10_000..].iter().map(|l| size_of(l, 14)).collect();
    let p = homogeneity_p(&first, &last);
    checks.push(Check::above(
        "first vs last customer cluster size p",
        p,
        0.01,
    ));
    checks
}

fn constant_simulator() -> FnSimulator<impl Fn(&[f64]) -> Result<Vec<f64>, SimulatorError> + Sync> {
    FnSimulator::new(1, 1, |_: &[f64]| Ok(vec![0.5]))
}

/// K draws of a DP chain whose likelihood is flat, so its label marginal is
/// the CRP prior.
fn prior_chain_k(order: &[usize], seed: u64, samples: usize) -> Vec<usize> {
    let cfg = config(|c| {
        c.step_size_s = 1.0;
        c.seed = seed;
    });
    let sim = constant_simulator();
    // observations differ only in value; a flat likelihood ignores them
    let obs: Vec<Vec<f64>> = order.iter().map(|&n| vec![n as f64]).collect();
    let mut chain = Chain::new(&cfg, &sim, &obs, RunOptions::default()).unwrap();
    for _ in 0..200 {
        chain.sweep();
    }
    (0..samples)
        .map(|_| {
            for _ in 0..5 {
                chain.sweep();
            }
            chain.state().k()
        })
        .collect()
}

pub fn label_sampler_reproduces_crp_prior_in_any_order() -> Vec<Check> {
    let mut checks = Vec::new();
    let natural: Vec<usize> = (0..15).collect();
    let mut permuted = natural.clone();
    permuted.shuffle(&mut ChaCha8Rng::seed_from_u64(606));
    let a = prior_chain_k(&natural, 11, 6_000);
    let b = prior_chain_k(&permuted, 12, 6_000);
    let mut rng = ChaCha8Rng::seed_from_u64(607);
    let reference: Vec<usize> = (0..6_000)
        .map(|_| *crp_sample(5.0, 15, &mut rng).iter().max().unwrap())
        .collect();

    let p_order = homogeneity_p(&a, &b);
    let p_prior = homogeneity_p(&a, &reference);
    checks.push(Check::above("K natural vs permuted order p", p_order, 0.01));
    checks.push(Check::above("K chain vs CRP draws p", p_prior, 0.01));
    checks
}

fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn pcn_with_flat_likelihood_keeps_its_prior() -> Vec<Check> {
    let mut checks = Vec::new();
    let (mu, tau, s) = (0.3, 2.0, 0.8);
    let sim = constant_simulator();
    let x = [0.5];
    let mut theta = vec![2.0];
    let mut fit = CachedFit::evaluate(&sim, &theta, &x);
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut rejected = 0usize;
    let mut samples = Vec::with_capacity(DRAWS);
    for t in 0..DRAWS + 1_000 {
        let out = pcn_propose(&theta, &[mu], tau, 1.0, s, &x, &fit, &sim, &mut rng);
        rejected += usize::from(!out.is_accepted());
        if let Some((next, next_fit)) = out.accepted {
            theta = next;
            fit = next_fit;
        }
        if t >= 1_000 {
            samples.push(theta[0]);
        }
    }
    let sd = 1.0 / tau.sqrt();
    let d = ks_statistic(&mut samples, |v| normal_cdf((v - mu) / sd));
    checks.push(Check::below(
        "rejections under flat likelihood",
        rejected as f64,
        0.5,
    ));
    checks.push(Check::below("KS distance to prior", d, 0.02));
    checks
}

pub fn pcn_linear_posterior_matches_closed_form() -> Vec<Check> {
    let mut checks = Vec::new();
    // h(θ) = θ in probit space, prior N(0, 1), β = 4, x = 1.5
    let (beta, x) = (4.0, [1.5]);
    let sim = FnSimulator::new(1, 1, |g: &[f64]| Ok(vec![probit(g[0]).0]));
    let post_var = 1.0 / (1.0 + beta);
    let post_mean = beta * x[0] * post_var;

    let mut theta = vec![0.0];
    let mut fit = CachedFit::evaluate(&sim, &theta, &x);
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut samples = Vec::with_capacity(DRAWS);
    let mut t = 0usize;
    while samples.len() < DRAWS {
        let out = pcn_propose(&theta, &[0.0], 1.0, beta, 0.8, &x, &fit, &sim, &mut rng);
        if let Some((next, next_fit)) = out.accepted {
            theta = next;
            fit = next_fit;
        }
        t += 1;
        if t > 2_000 && t % 2 == 0 {
            samples.push(theta[0]);
        }
    }
    let (m, v) = moments(&samples);
    checks.push(Check::relative("mean", m, post_mean, 0.02));
    checks.push(Check::relative("variance", v, post_var, 0.02));
    checks
}
