use rayon::prelude::*;

use super::probit::probit_inverse;
use super::rng::{substream, tag};
use super::simulator::Simulator;
use super::steps::{
    pcn_propose, sample_beta, sample_cluster_means, sample_label, sample_tau, CachedFit, PcnOutcome,
};
use super::trace::{ChainDiagnostics, PosteriorTrace, TraceKind, TraceRecord};
use super::{ChainState, SamplerConfig, SamplerError};
use crate::scalar::{lit, Scalar};

/// Environment variable read by [`RunOptions::from_env`].
pub const WORKERS_ENV: &str = "DPHBMU_WORKERS";

/// Execution settings that never change the sampled values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Threads for per-observation updates; 1 runs inline.
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { workers: 1 }
    }
}

impl RunOptions {
    pub fn from_env() -> Self {
        let workers = std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&w| w >= 1)
            .unwrap_or(1);
        Self { workers }
    }

    pub(crate) fn pool(&self) -> Result<Option<rayon::ThreadPool>, SamplerError> {
        if self.workers <= 1 {
            return Ok(None);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map(Some)
            .map_err(|e| SamplerError::Pool(e.to_string()))
    }
}

pub(crate) fn check_inputs<T: Scalar, S: Simulator<T> + ?Sized>(
    config: &SamplerConfig,
    simulator: &S,
    observations: &[Vec<T>],
) -> Result<Vec<T>, SamplerError> {
    config.validate()?;
    if observations.is_empty() {
        return Err(SamplerError::InvalidObservations(
            "at least one observation is required".into(),
        ));
    }
    let m = simulator.output_dim();
    if let Some(n) = observations.iter().position(|x| x.len() != m) {
        return Err(SamplerError::DimensionMismatch(format!(
            "observation {} has {} entries, simulator produces {m}",
            n + 1,
            observations[n].len()
        )));
    }
    Ok(config
        .mu0_for(simulator.parameter_dim())?
        .into_iter()
        .map(lit)
        .collect())
}

/// A running DP mixture chain.
pub struct Chain<'a, T: Scalar, S: Simulator<T> + ?Sized> {
    config: &'a SamplerConfig,
    simulator: &'a S,
    observations: &'a [Vec<T>],
    mu0: Vec<T>,
    state: ChainState<T>,
    fits: Vec<CachedFit<T>>,
    accepted: Vec<bool>,
    iteration: u64,
    diagnostics: ChainDiagnostics,
    pool: Option<rayon::ThreadPool>,
}

impl<'a, T: Scalar, S: Simulator<T> + ?Sized> Chain<'a, T, S> {
    pub fn new(
        config: &'a SamplerConfig,
        simulator: &'a S,
        observations: &'a [Vec<T>],
        options: RunOptions,
    ) -> Result<Self, SamplerError> {
        let mu0 = check_inputs(config, simulator, observations)?;
        let state = ChainState::initial(observations.len(), &mu0, config);
        let mut chain = Self {
            config,
            simulator,
            observations,
            mu0,
            state,
            fits: Vec::new(),
            accepted: vec![false; observations.len()],
            iteration: 0,
            diagnostics: ChainDiagnostics::default(),
            pool: options.pool()?,
        };
        chain.refresh_fits();
        Ok(chain)
    }

    /// Replace the state, e.g. to start from a chosen configuration.
    pub fn set_state(&mut self, state: ChainState<T>) -> Result<(), SamplerError> {
        state.validate()?;
        if state.n() != self.observations.len() || state.dim() != self.mu0.len() {
            return Err(SamplerError::DimensionMismatch(
                "state does not match the problem".into(),
            ));
        }
        self.state = state;
        self.refresh_fits();
        Ok(())
    }

    fn refresh_fits(&mut self) {
        self.fits = self
            .state
            .thetas
            .iter()
            .zip(self.observations)
            .map(|(theta, x)| CachedFit::evaluate(self.simulator, theta, x))
            .collect();
    }

    pub fn state(&self) -> &ChainState<T> {
        &self.state
    }

    pub fn fits(&self) -> &[CachedFit<T>] {
        &self.fits
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn diagnostics(&self) -> &ChainDiagnostics {
        &self.diagnostics
    }

    /// One sweep: labels, cluster means, τ, pCN for every θ_n, then β.
    pub fn sweep(&mut self) {
        let t = self.iteration + 1;
        let seed = self.config.seed;
        let cfg = self.config;

        let mut rng = substream(seed, &[t, tag::LABELS]);
        for n in 0..self.state.n() {
            sample_label(n, &mut self.state, cfg, &self.mu0, &mut rng);
        }
        sample_cluster_means(
            &mut self.state,
            cfg,
            &self.mu0,
            &mut substream(seed, &[t, tag::MEANS]),
        );
        sample_tau(
            &mut self.state,
            cfg,
            &self.mu0,
            &mut substream(seed, &[t, tag::TAU]),
        );

        let outcomes = {
            let state = &self.state;
            let fits = &self.fits;
            let sim = self.simulator;
            let obs = self.observations;
            let step = move |n: usize| -> PcnOutcome<T> {
                let mut rng = substream(seed, &[t, tag::PCN, n as u64]);
                let mu = &state.mus[state.labels[n] - 1];
                pcn_propose(
                    &state.thetas[n],
                    mu,
                    state.tau,
                    state.beta,
                    cfg.step_size_s,
                    &obs[n],
                    &fits[n],
                    sim,
                    &mut rng,
                )
            };
            match &self.pool {
                Some(pool) => {
                    pool.install(|| (0..state.n()).into_par_iter().map(step).collect::<Vec<_>>())
                }
                None => (0..state.n()).map(step).collect::<Vec<_>>(),
            }
        };
        for (n, outcome) in outcomes.into_iter().enumerate() {
            self.diagnostics.proposals += 1;
            self.diagnostics.simulator_failures += u64::from(outcome.simulator_failed);
            self.accepted[n] = outcome.is_accepted();
            if let Some((theta, fit)) = outcome.accepted {
                self.diagnostics.acceptances += 1;
                self.state.thetas[n] = theta;
                self.fits[n] = fit;
            }
        }

        let m = self.simulator.output_dim();
        sample_beta(
            &mut self.state,
            cfg,
            &self.fits,
            m,
            &mut substream(seed, &[t, tag::BETA]),
        );
        self.iteration = t;
    }

    /// Snapshot of the current state in fixity-factor space.
    pub fn record(&self) -> TraceRecord<T> {
        TraceRecord {
            iteration: self.iteration,
            k: self.state.k(),
            labels: self.state.labels.clone(),
            thetas: self
                .state
                .thetas
                .iter()
                .map(|v| probit_inverse(v))
                .collect(),
            mus: self.state.mus.iter().map(|v| probit_inverse(v)).collect(),
            tau: self.state.tau,
            beta: self.state.beta,
            accepted: self.accepted.clone(),
            betas: None,
        }
    }

    /// Run the remaining sweeps and collect the recorded snapshots.
    pub fn run(mut self) -> PosteriorTrace<T> {
        let mut records = Vec::with_capacity(self.config.record_count() as usize);
        while self.iteration < self.config.iterations {
            self.sweep();
            if self.config.records_iteration(self.iteration) {
                records.push(self.record());
            }
        }
        PosteriorTrace {
            kind: TraceKind::Dp,
            config: self.config.clone(),
            records,
            diagnostics: self.diagnostics,
        }
    }
}

/// Advance a chain by one sweep.
pub fn gibbs_sweep<T: Scalar, S: Simulator<T> + ?Sized>(chain: &mut Chain<'_, T, S>) {
    chain.sweep();
}

pub fn run_chain<T: Scalar, S: Simulator<T> + ?Sized>(
    config: &SamplerConfig,
    simulator: &S,
    observations: &[Vec<T>],
) -> Result<PosteriorTrace<T>, SamplerError> {
    run_chain_with(config, simulator, observations, RunOptions::default())
}

pub fn run_chain_with<T: Scalar, S: Simulator<T> + ?Sized>(
    config: &SamplerConfig,
    simulator: &S,
    observations: &[Vec<T>],
    options: RunOptions,
) -> Result<PosteriorTrace<T>, SamplerError> {
    Ok(Chain::new(config, simulator, observations, options)?.run())
}
