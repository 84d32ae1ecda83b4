//! Non-hierarchical reference: one independent chain per observation with a
//! uniform prior on each fixity factor (standard normal in probit space) and
//! its own noise precision β_n.

use rayon::prelude::*;

use super::chain::{check_inputs, RunOptions};
use super::probit::probit_inverse;
use super::rng::{child_seed, substream, tag};
use super::simulator::Simulator;
use super::steps::{beta_posterior, pcn_propose, CachedFit};
use super::trace::{ChainDiagnostics, PosteriorTrace, TraceKind, TraceRecord};
use super::{SamplerConfig, SamplerError};
use crate::scalar::{lit, Scalar};

/// Recorded draws of one single-observation chain.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineChain<T> {
    pub iterations: Vec<u64>,
    /// Fixity factors per record.
    pub thetas: Vec<Vec<T>>,
    pub betas: Vec<T>,
    pub accepted: Vec<bool>,
    pub diagnostics: ChainDiagnostics,
}

/// Run the chain of a single observation `x` with its own seed.
pub fn run_baseline_chain<T: Scalar, S: Simulator<T> + ?Sized>(
    config: &SamplerConfig,
    simulator: &S,
    x: &[T],
    chain_seed: u64,
) -> Result<BaselineChain<T>, SamplerError> {
    check_inputs(config, simulator, std::slice::from_ref(&x.to_vec()))?;
    let d = simulator.parameter_dim();
    let m = simulator.output_dim();
    let zero = vec![T::zero(); d];
    let mut theta = zero.clone();
    let mut beta: T = lit(config.a_beta / config.b_beta);
    let mut fit = CachedFit::evaluate(simulator, &theta, x);

    let capacity = config.record_count() as usize;
    let mut out = BaselineChain {
        iterations: Vec::with_capacity(capacity),
        thetas: Vec::with_capacity(capacity),
        betas: Vec::with_capacity(capacity),
        accepted: Vec::with_capacity(capacity),
        diagnostics: ChainDiagnostics::default(),
    };
    for t in 1..=config.iterations {
        let outcome = pcn_propose(
            &theta,
            &zero,
            T::one(),
            beta,
            config.step_size_s,
            x,
            &fit,
            simulator,
            &mut substream(chain_seed, &[t, tag::PCN]),
        );
        out.diagnostics.proposals += 1;
        out.diagnostics.simulator_failures += u64::from(outcome.simulator_failed);
        let accepted = outcome.is_accepted();
        if let Some((next, next_fit)) = outcome.accepted {
            out.diagnostics.acceptances += 1;
            theta = next;
            fit = next_fit;
        }
        let (shape, rate) = beta_posterior(config.a_beta, config.b_beta, [&fit], m);
        beta = T::gamma(shape, rate, &mut substream(chain_seed, &[t, tag::BETA]));

        if config.records_iteration(t) {
            out.iterations.push(t);
            out.thetas.push(probit_inverse(&theta));
            out.betas.push(beta);
            out.accepted.push(accepted);
        }
    }
    Ok(out)
}

pub fn run_baseline<T: Scalar, S: Simulator<T> + ?Sized>(
    config: &SamplerConfig,
    simulator: &S,
    observations: &[Vec<T>],
) -> Result<PosteriorTrace<T>, SamplerError> {
    run_baseline_with(config, simulator, observations, RunOptions::default())
}

/// All per-observation chains, merged into one trace. Observation n uses
/// the seed `child_seed(config.seed, n)`.
pub fn run_baseline_with<T: Scalar, S: Simulator<T> + ?Sized>(
    config: &SamplerConfig,
    simulator: &S,
    observations: &[Vec<T>],
    options: RunOptions,
) -> Result<PosteriorTrace<T>, SamplerError> {
    check_inputs(config, simulator, observations)?;
    let one = |n: usize| {
        run_baseline_chain(
            config,
            simulator,
            &observations[n],
            child_seed(config.seed, n as u64),
        )
    };
    let chains: Vec<BaselineChain<T>> = match options.pool()? {
        Some(pool) => pool.install(|| {
            (0..observations.len())
                .into_par_iter()
                .map(one)
                .collect::<Result<_, _>>()
        })?,
        None => (0..observations.len()).map(one).collect::<Result<_, _>>()?,
    };

    let n = observations.len();
    let d = simulator.parameter_dim();
    let half = vec![lit::<T>(0.5); d];
    let mut diagnostics = ChainDiagnostics::default();
    for c in &chains {
        diagnostics.merge(&c.diagnostics);
    }
    let records = (0..chains[0].iterations.len())
        .map(|r| {
            let betas: Vec<T> = chains.iter().map(|c| c.betas[r]).collect();
            let mean_beta = betas.iter().copied().fold(T::zero(), |a, b| a + b) / lit(n as f64);
            TraceRecord {
                iteration: chains[0].iterations[r],
                k: n,
                labels: (1..=n).collect(),
                thetas: chains.iter().map(|c| c.thetas[r].clone()).collect(),
                mus: vec![half.clone(); n],
                tau: T::one(),
                beta: mean_beta,
                accepted: chains.iter().map(|c| c.accepted[r]).collect(),
                betas: Some(betas),
            }
        })
        .collect();
    Ok(PosteriorTrace {
        kind: TraceKind::Baseline,
        config: config.clone(),
        records,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::FnSimulator;

    #[test]
    fn identical_observations_and_seeds_give_identical_chains() {
        let sim = FnSimulator::new(2, 1, |g: &[f64]| Ok(vec![g[0] + g[1]]));
        let cfg = SamplerConfig {
            iterations: 300,
            burn_in: 100,
            ..SamplerConfig::baseline()
        };
        let a = run_baseline_chain(&cfg, &sim, &[1.2], 77).unwrap();
        let b = run_baseline_chain(&cfg, &sim, &[1.2], 77).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.thetas.len(), 200);
    }

    #[test]
    fn merged_trace_has_one_cluster_per_observation() {
        let sim = FnSimulator::new(1, 1, |g: &[f64]| Ok(vec![g[0]]));
        let cfg = SamplerConfig {
            iterations: 50,
            burn_in: 40,
            ..SamplerConfig::baseline()
        };
        let trace = run_baseline(&cfg, &sim, &[vec![0.2], vec![0.8], vec![0.5]]).unwrap();
        assert_eq!(trace.records.len(), 10);
        for r in &trace.records {
            assert_eq!(r.k, 3);
            assert_eq!(r.labels, vec![1, 2, 3]);
            assert_eq!(r.betas.as_ref().unwrap().len(), 3);
        }
        let chain1 = run_baseline_chain(&cfg, &sim, &[0.8], child_seed(cfg.seed, 1)).unwrap();
        let from_trace: Vec<f64> = trace.records.iter().map(|r| r.thetas[1][0]).collect();
        assert_eq!(
            from_trace,
            chain1.thetas.iter().map(|t| t[0]).collect::<Vec<_>>()
        );
    }
}
