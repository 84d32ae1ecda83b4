use serde::{Deserialize, Serialize};

use super::SamplerError;

/// Hyperparameters and run controls.
///
/// `mu0` holds either one value, which is broadcast to every parameter, or
/// exactly one value per parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub alpha: f64,
    pub m_aux: usize,
    pub mu0: Vec<f64>,
    pub rho: f64,
    pub a_tau: f64,
    pub b_tau: f64,
    pub a_beta: f64,
    pub b_beta: f64,
    pub step_size_s: f64,
    pub iterations: u64,
    pub burn_in: u64,
    pub seed: u64,
    pub thinning: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            alpha: 5.0,
            m_aux: 3,
            mu0: vec![0.0],
            rho: 0.1,
            a_tau: 10.0,
            b_tau: 0.1,
            a_beta: 10.0,
            b_beta: 0.1,
            step_size_s: 0.2,
            iterations: 10_000,
            burn_in: 5_000,
            seed: 0,
            thinning: 1,
        }
    }
}

impl SamplerConfig {
    /// Defaults for the independent per-observation baseline.
    pub fn baseline() -> Self {
        Self {
            step_size_s: 0.05,
            ..Self::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, SamplerError> {
        let cfg: Self = toml::from_str(text)
            .map_err(|e| SamplerError::InvalidConfig(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        let bad = |msg: String| Err(SamplerError::InvalidConfig(msg));
        let positive = [
            ("alpha", self.alpha),
            ("rho", self.rho),
            ("a_tau", self.a_tau),
            ("b_tau", self.b_tau),
            ("a_beta", self.a_beta),
            ("b_beta", self.b_beta),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if self.m_aux == 0 {
            return bad("m_aux must be at least 1".into());
        }
        if !(self.step_size_s > 0.0 && self.step_size_s <= 1.0) {
            return bad(format!(
                "step_size_s must lie in (0, 1], got {}",
                self.step_size_s
            ));
        }
        if self.mu0.is_empty() || self.mu0.iter().any(|v| !v.is_finite()) {
            return bad("mu0 must hold finite values".into());
        }
        if self.burn_in >= self.iterations {
            return bad(format!(
                "burn_in ({}) must be below iterations ({})",
                self.burn_in, self.iterations
            ));
        }
        if self.thinning == 0 {
            return bad("thinning must be at least 1".into());
        }
        Ok(())
    }

    /// `mu0` expanded to `d` entries.
    pub fn mu0_for(&self, d: usize) -> Result<Vec<f64>, SamplerError> {
        match self.mu0.len() {
            1 => Ok(vec![self.mu0[0]; d]),
            n if n == d => Ok(self.mu0.clone()),
            n => Err(SamplerError::DimensionMismatch(format!(
                "mu0 has {n} entries, parameters have {d}"
            ))),
        }
    }

    /// Number of recorded snapshots.
    pub fn record_count(&self) -> u64 {
        (self.iterations - self.burn_in) / self.thinning
    }

    pub(crate) fn records_iteration(&self, t: u64) -> bool {
        t > self.burn_in && (t - self.burn_in) % self.thinning == 0
    }
}
