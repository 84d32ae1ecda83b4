//! Individual updates of one Gibbs sweep.

use rand::Rng;

use super::probit::probit_inverse;
use super::simulator::Simulator;
use super::{ChainState, SamplerConfig};
use crate::scalar::{from_usize, lit, Scalar};

/// Simulator output at the current θ_n and its squared residual against x_n.
/// A failed evaluation is stored with an infinite residual.
#[derive(Debug, Clone, PartialEq)]
pub struct CachedFit<T> {
    pub output: Option<Vec<T>>,
    pub sq_residual: T,
}

impl<T: Scalar> CachedFit<T> {
    /// Evaluate the simulator at probit-space `theta`.
    pub fn evaluate<S: Simulator<T> + ?Sized>(simulator: &S, theta: &[T], x: &[T]) -> Self {
        match simulator.simulate(&probit_inverse(theta)) {
            Ok(h) if h.len() == x.len() && h.iter().all(|v| v.is_finite()) => {
                let sq = squared_distance(x, &h);
                Self {
                    output: Some(h),
                    sq_residual: sq,
                }
            }
            _ => Self::failed(),
        }
    }

    pub fn failed() -> Self {
        Self {
            output: None,
            sq_residual: T::infinity(),
        }
    }

    pub fn is_failed(&self) -> bool {
        self.output.is_none()
    }
}

fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
}

/// ln N(x | μ, τ⁻¹I).
fn log_normal_iso<T: Scalar>(x: &[T], mu: &[T], tau: T) -> T {
    let half: T = lit(0.5);
    let two_pi: T = lit(2.0 * std::f64::consts::PI);
    half * from_usize::<T>(x.len()) * (tau.ln() - two_pi.ln())
        - half * tau * squared_distance(x, mu)
}

/// Unnormalized log weights of the label categorical.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelWeights<T> {
    /// One per existing cluster: ln N_k + ln N(θ | μ_k, τ⁻¹I).
    pub existing: Vec<T>,
    /// One per auxiliary: ln(α/m) + ln N(θ | μ_aux, τ⁻¹I).
    pub auxiliary: Vec<T>,
}

impl<T: Scalar> LabelWeights<T> {
    /// Normalized probabilities, existing clusters first.
    pub fn probabilities(&self) -> Vec<T> {
        let all: Vec<T> = self
            .existing
            .iter()
            .chain(&self.auxiliary)
            .copied()
            .collect();
        let max = all.iter().copied().fold(T::neg_infinity(), T::max);
        let exps: Vec<T> = all.iter().map(|&w| (w - max).exp()).collect();
        let total = exps.iter().copied().fold(T::zero(), |a, b| a + b);
        exps.into_iter().map(|e| e / total).collect()
    }
}

/// Label weights for an observation at `theta`, where `counts` are the
/// cluster sizes with that observation removed.
pub fn label_log_weights<T: Scalar>(
    theta: &[T],
    counts: &[usize],
    mus: &[Vec<T>],
    auxiliary: &[Vec<T>],
    tau: T,
    alpha: f64,
) -> LabelWeights<T> {
    let existing = counts
        .iter()
        .zip(mus)
        .map(|(&c, mu)| from_usize::<T>(c).ln() + log_normal_iso(theta, mu, tau))
        .collect();
    let log_new: T = lit((alpha / auxiliary.len() as f64).ln());
    let auxiliary = auxiliary
        .iter()
        .map(|mu| log_new + log_normal_iso(theta, mu, tau))
        .collect();
    LabelWeights {
        existing,
        auxiliary,
    }
}

fn sample_categorical<T: Scalar, R: Rng + ?Sized>(probabilities: &[T], rng: &mut R) -> usize {
    let u = T::open01(rng);
    let mut acc = T::zero();
    for (i, &p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probabilities
        .iter()
        .rposition(|&p| p > T::zero())
        .unwrap_or(0)
}

/// Resample c_n with auxiliary components.
///
/// If n sits alone in its cluster, that cluster is removed, the remaining
/// labels are compacted and its mean becomes the first auxiliary.
pub fn sample_label<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    state: &mut ChainState<T>,
    config: &SamplerConfig,
    mu0: &[T],
    rng: &mut R,
) {
    let c = state.labels[n];
    state.labels[n] = 0;
    let mut auxiliary = Vec::with_capacity(config.m_aux);
    if !state.labels.contains(&c) {
        auxiliary.push(state.mus.remove(c - 1));
        for l in state.labels.iter_mut() {
            if *l > c {
                *l -= 1;
            }
        }
    }
    let sd = (state.tau * lit(config.rho)).sqrt().recip();
    while auxiliary.len() < config.m_aux {
        auxiliary.push(
            mu0.iter()
                .map(|&m| m + sd * T::standard_normal(rng))
                .collect(),
        );
    }

    let mut counts = vec![0usize; state.k()];
    for &l in &state.labels {
        if l > 0 {
            counts[l - 1] += 1;
        }
    }
    let weights = label_log_weights(
        &state.thetas[n],
        &counts,
        &state.mus,
        &auxiliary,
        state.tau,
        config.alpha,
    );
    let choice = sample_categorical(&weights.probabilities(), rng);
    let k = state.k();
    if choice < k {
        state.labels[n] = choice + 1;
    } else {
        state.mus.push(auxiliary.swap_remove(choice - k));
        state.labels[n] = k + 1;
    }
}

fn class_sums<T: Scalar>(state: &ChainState<T>) -> (Vec<usize>, Vec<Vec<T>>) {
    let d = state.dim();
    let mut counts = vec![0usize; state.k()];
    let mut sums = vec![vec![T::zero(); d]; state.k()];
    for (theta, &c) in state.thetas.iter().zip(&state.labels) {
        counts[c - 1] += 1;
        for (s, &t) in sums[c - 1].iter_mut().zip(theta) {
            *s += t;
        }
    }
    (counts, sums)
}

/// μ_k ~ N((N_k θ̄_k + ρμ₀)/(N_k + ρ), (τ(N_k + ρ))⁻¹ I) for every cluster.
pub fn sample_cluster_means<T: Scalar, R: Rng + ?Sized>(
    state: &mut ChainState<T>,
    config: &SamplerConfig,
    mu0: &[T],
    rng: &mut R,
) {
    let rho: T = lit(config.rho);
    let (counts, sums) = class_sums(state);
    for (k, mu) in state.mus.iter_mut().enumerate() {
        let precision_scale = from_usize::<T>(counts[k]) + rho;
        let sd = (state.tau * precision_scale).sqrt().recip();
        for ((m, &s), &m0) in mu.iter_mut().zip(&sums[k]).zip(mu0) {
            *m = (s + rho * m0) / precision_scale + sd * T::standard_normal(rng);
        }
    }
}

/// Shape and rate of the conditional Gamma posterior of τ.
pub(crate) fn tau_posterior<T: Scalar>(
    state: &ChainState<T>,
    config: &SamplerConfig,
    mu0: &[T],
) -> (T, T) {
    let half: T = lit(0.5);
    let rho: T = lit(config.rho);
    let (counts, sums) = class_sums(state);
    let means: Vec<Vec<T>> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s.iter().map(|&v| v / from_usize(c)).collect())
        .collect();
    let mut scatter = T::zero();
    for (theta, &c) in state.thetas.iter().zip(&state.labels) {
        scatter += squared_distance(theta, &means[c - 1]);
    }
    for (mean, &c) in means.iter().zip(&counts) {
        let nk: T = from_usize(c);
        scatter += rho * nk / (rho + nk) * squared_distance(mean, mu0);
    }
    let shape = lit::<T>(config.a_tau) + half * from_usize::<T>(state.n() * mu0.len());
    let rate = lit::<T>(config.b_tau) + half * scatter;
    (shape, rate)
}

/// τ from its conditional Gamma posterior given θ and labels.
pub fn sample_tau<T: Scalar, R: Rng + ?Sized>(
    state: &mut ChainState<T>,
    config: &SamplerConfig,
    mu0: &[T],
    rng: &mut R,
) -> T {
    let (shape, rate) = tau_posterior(state, config, mu0);
    state.tau = T::gamma(shape, rate, rng);
    state.tau
}

/// Result of one pCN step.
#[derive(Debug, Clone, PartialEq)]
pub struct PcnOutcome<T> {
    /// Accepted θ* and its fit; `None` on rejection.
    pub accepted: Option<(Vec<T>, CachedFit<T>)>,
    pub simulator_failed: bool,
}

impl<T> PcnOutcome<T> {
    pub fn is_accepted(&self) -> bool {
        self.accepted.is_some()
    }
}

/// Propose θ* = μ + √(1 − s²)(θ − μ) + s τ^{-1/2} ξ and accept on the
/// likelihood ratio alone.
#[allow(clippy::too_many_arguments)]
pub fn pcn_propose<T: Scalar, S: Simulator<T> + ?Sized, R: Rng + ?Sized>(
    theta: &[T],
    mu: &[T],
    tau: T,
    beta: T,
    step_size: f64,
    x: &[T],
    current: &CachedFit<T>,
    simulator: &S,
    rng: &mut R,
) -> PcnOutcome<T> {
    let s: T = lit(step_size);
    let keep = (T::one() - s * s).sqrt();
    let scale = s / tau.sqrt();
    let proposal: Vec<T> = theta
        .iter()
        .zip(mu)
        .map(|(&t, &m)| m + keep * (t - m) + scale * T::standard_normal(rng))
        .collect();
    let fit = CachedFit::evaluate(simulator, &proposal, x);
    if fit.is_failed() {
        return PcnOutcome {
            accepted: None,
            simulator_failed: true,
        };
    }
    let accept = if current.is_failed() {
        true
    } else {
        let log_eta = -lit::<T>(0.5) * beta * (fit.sq_residual - current.sq_residual);
        T::open01(rng).ln() < log_eta
    };
    PcnOutcome {
        accepted: accept.then_some((proposal, fit)),
        simulator_failed: false,
    }
}

/// pCN update of θ_n in place. The cache is refreshed only on acceptance.
pub fn pcn_update_theta<T: Scalar, S: Simulator<T> + ?Sized, R: Rng + ?Sized>(
    n: usize,
    state: &mut ChainState<T>,
    config: &SamplerConfig,
    simulator: &S,
    x: &[T],
    fit: &mut CachedFit<T>,
    rng: &mut R,
) -> PcnOutcome<T> {
    let mu = &state.mus[state.labels[n] - 1];
    let outcome = pcn_propose(
        &state.thetas[n],
        mu,
        state.tau,
        state.beta,
        config.step_size_s,
        x,
        fit,
        simulator,
        rng,
    );
    if let Some((theta, new_fit)) = &outcome.accepted {
        state.thetas[n].clone_from(theta);
        *fit = new_fit.clone();
    }
    outcome
}

/// Shape and rate of the Gamma posterior of a noise precision given cached
/// squared residuals of `m`-dimensional observations. Failed fits are skipped.
pub(crate) fn beta_posterior<'a, T: Scalar>(
    a: f64,
    b: f64,
    fits: impl IntoIterator<Item = &'a CachedFit<T>>,
    m: usize,
) -> (T, T) {
    let half: T = lit(0.5);
    let mut used = 0usize;
    let mut sum = T::zero();
    for f in fits.into_iter().filter(|f| !f.is_failed()) {
        used += 1;
        sum += f.sq_residual;
    }
    (
        lit::<T>(a) + half * from_usize::<T>(used * m),
        lit::<T>(b) + half * sum,
    )
}

/// β from its Gamma posterior using the cached residuals.
pub fn sample_beta<T: Scalar, R: Rng + ?Sized>(
    state: &mut ChainState<T>,
    config: &SamplerConfig,
    fits: &[CachedFit<T>],
    output_dim: usize,
    rng: &mut R,
) -> T {
    let (shape, rate) = beta_posterior(config.a_beta, config.b_beta, fits, output_dim);
    state.beta = T::gamma(shape, rate, rng);
    state.beta
}
