//! Dirichlet-process Gaussian-mixture hierarchical sampler.
//!
//! All mixture quantities (θ, μ) live in probit space. The simulator is
//! always evaluated at Φ(θ), and recorded traces are converted back to
//! fixity-factor space.

mod baseline;
mod chain;
mod config;
mod crp;
mod probit;
pub mod rng;
mod simulator;
mod steps;
mod trace;

pub use baseline::{run_baseline, run_baseline_chain, run_baseline_with, BaselineChain};
pub use chain::{gibbs_sweep, run_chain, run_chain_with, Chain, RunOptions};
pub use config::SamplerConfig;
pub use crp::{cluster_count, crp_expected_clusters, crp_sample};
pub use probit::{normal_cdf, probit, probit_inverse, probit_transform, ProbitVector, PROBIT_EPS};
pub use simulator::{FnSimulator, FrameSimulator, Simulator, SimulatorError};
pub use steps::{
    label_log_weights, pcn_propose, pcn_update_theta, sample_beta, sample_cluster_means,
    sample_label, sample_tau, CachedFit, LabelWeights, PcnOutcome,
};
pub use trace::{
    read_trace, write_trace, ChainDiagnostics, PosteriorTrace, TraceKind, TraceRecord,
    TRACE_SCHEMA, TRACE_VERSION,
};

use crate::scalar::{lit, Scalar};

#[derive(Debug, thiserror::Error)]
pub enum SamplerError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid observations: {0}")]
    InvalidObservations(String),
    #[error("invalid chain state: {0}")]
    InvalidState(String),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("trace I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("trace format: {0}")]
    Format(String),
}

/// N observed nMBM vectors with optional ground truth for scoring.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet<T> {
    pub sensor_ids: Vec<String>,
    pub observations: Vec<Vec<T>>,
    /// Class labels in 1..=K.
    pub labels_truth: Option<Vec<usize>>,
    /// Fixity factors used to generate each observation.
    pub theta_truth: Option<Vec<Vec<T>>>,
}

impl<T: Scalar> ObservationSet<T> {
    pub fn new(sensor_ids: Vec<String>, observations: Vec<Vec<T>>) -> Result<Self, SamplerError> {
        let set = Self {
            sensor_ids,
            observations,
            labels_truth: None,
            theta_truth: None,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        let bad = |m: String| Err(SamplerError::InvalidObservations(m));
        if self.observations.is_empty() {
            return bad("at least one observation is required".into());
        }
        let m = self.sensor_ids.len();
        for (n, x) in self.observations.iter().enumerate() {
            if x.len() != m {
                return bad(format!(
                    "observation {} has {} entries, expected {m}",
                    n + 1,
                    x.len()
                ));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return bad(format!("observation {} has a non-finite entry", n + 1));
            }
        }
        if let Some(labels) = &self.labels_truth {
            if labels.len() != self.len() || labels.iter().any(|&c| c == 0) {
                return bad("truth labels must be one per observation, starting at 1".into());
            }
        }
        if let Some(theta) = &self.theta_truth {
            if theta.len() != self.len() {
                return bad("truth parameters must be one per observation".into());
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn output_dim(&self) -> usize {
        self.sensor_ids.len()
    }
}

/// Complete sampler state.
///
/// `thetas` and `mus` are in probit space. `labels` are in 1..=K, with
/// `mus[k - 1]` the mean of cluster k.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState<T> {
    pub thetas: Vec<Vec<T>>,
    pub labels: Vec<usize>,
    pub mus: Vec<Vec<T>>,
    pub tau: T,
    pub beta: T,
}

impl<T: Scalar> ChainState<T> {
    /// Single-cluster cold start: θ = 0, μ₁ = μ₀, τ and β at their prior means.
    pub fn initial(n: usize, mu0: &[T], config: &SamplerConfig) -> Self {
        let d = mu0.len();
        Self {
            thetas: vec![vec![T::zero(); d]; n],
            labels: vec![1; n],
            mus: vec![mu0.to_vec()],
            tau: lit(config.a_tau / config.b_tau),
            beta: lit(config.a_beta / config.b_beta),
        }
    }

    pub fn k(&self) -> usize {
        self.mus.len()
    }

    pub fn n(&self) -> usize {
        self.thetas.len()
    }

    pub fn dim(&self) -> usize {
        self.mus.first().or(self.thetas.first()).map_or(0, Vec::len)
    }

    /// Cluster sizes indexed by `label - 1`.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.k()];
        for &c in &self.labels {
            counts[c - 1] += 1;
        }
        counts
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        let bad = |m: String| Err(SamplerError::InvalidState(m));
        if self.labels.len() != self.thetas.len() {
            return bad("one label per observation required".into());
        }
        let k = self.k();
        if let Some(&c) = self.labels.iter().find(|&&c| c == 0 || c > k) {
            return bad(format!("label {c} outside 1..={k}"));
        }
        if let Some(empty) = self.counts().iter().position(|&c| c == 0) {
            return bad(format!("cluster {} is empty", empty + 1));
        }
        let d = self.dim();
        if self.thetas.iter().chain(&self.mus).any(|v| v.len() != d) {
            return bad("parameter vectors differ in length".into());
        }
        if !(self.tau > T::zero()
            && self.tau.is_finite()
            && self.beta > T::zero()
            && self.beta.is_finite())
        {
            return bad("precisions must be positive and finite".into());
        }
        Ok(())
    }
}
