//! Synthetic nMBM datasets drawn from a known class structure, plus the
//! measurement conversions used when building nMBM from strain and
//! acceleration records.

mod bundle;

pub use bundle::{
    read_bundle, read_observations_csv, sha256_hex, write_bundle, write_observations_csv,
    DatasetBundle, DatasetManifest, TruthSidecar, MANIFEST_FILE, OBSERVATIONS_FILE, TRUTH_FILE,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::frame::{simulate_nmbm, FixityVector, FrameModel};
use crate::sampler::rng::substream;
use crate::sampler::ObservationSet;
use crate::scalar::{lit, Scalar};

/// Mode whose nMBM is observed.
pub const OBSERVED_MODE: usize = 1;

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("invalid ground truth: {0}")]
    InvalidTruth(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("simulation of observation {observation} failed: {message}")]
    Simulation { observation: usize, message: String },
    #[error("omega must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("{0}")]
    Bundle(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Class structure used to generate a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    /// K × D class means in fixity-factor space.
    pub class_means: Vec<Vec<f64>>,
    /// One class per observation, in 1..=K.
    pub class_assignment: Vec<usize>,
    /// Observation noise standard deviation (kNm/mm).
    pub sigma_obs: f64,
    /// Within-class parameter standard deviation.
    pub sigma_theta: f64,
}

impl GroundTruth {
    /// Intact, moderate and severe classes of the two-bay three-story frame,
    /// five observations each, σ₀ = 0.02.
    pub fn three_damage_states(sigma_obs: f64) -> Self {
        Self {
            class_means: vec![
                vec![0.9; 9],
                vec![0.4, 0.7, 0.6, 0.7, 0.9, 0.8, 0.9, 0.9, 0.9],
                vec![0.2, 0.3, 0.3, 0.5, 0.6, 0.6, 0.7, 0.8, 0.8],
            ],
            class_assignment: [1; 5].into_iter().chain([2; 5]).chain([3; 5]).collect(),
            sigma_obs,
            sigma_theta: 0.02,
        }
    }

    pub fn classes(&self) -> usize {
        self.class_means.len()
    }

    pub fn dim(&self) -> usize {
        self.class_means.first().map_or(0, Vec::len)
    }

    pub fn observations(&self) -> usize {
        self.class_assignment.len()
    }

    /// Both standard deviations may be zero (noiseless limit).
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidTruth(m));
        if self.class_means.is_empty() || self.dim() == 0 {
            return bad("at least one non-empty class mean is required".into());
        }
        if self.class_means.iter().any(|m| m.len() != self.dim()) {
            return bad("class means differ in length".into());
        }
        if self
            .class_means
            .iter()
            .flatten()
            .any(|v| !(0.0..=1.0).contains(v))
        {
            return bad("class means must lie in [0, 1]".into());
        }
        if self.class_assignment.is_empty() {
            return bad("at least one observation is required".into());
        }
        if let Some(c) = self
            .class_assignment
            .iter()
            .find(|&&c| c == 0 || c > self.classes())
        {
            return bad(format!("class label {c} outside 1..={}", self.classes()));
        }
        for (name, v) in [
            ("sigma_obs", self.sigma_obs),
            ("sigma_theta", self.sigma_theta),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self, SynthError> {
        let truth: Self =
            toml::from_str(text).map_err(|e| SynthError::InvalidTruth(e.to_string()))?;
        truth.validate()?;
        Ok(truth)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("ground truth serializes")
    }
}

fn draw_fixity<T: Scalar, R: Rng + ?Sized>(mean: f64, sd: f64, rng: &mut R) -> T {
    let (mean, sd): (T, T) = (lit(mean), lit(sd));
    loop {
        let v = mean + sd * T::standard_normal(rng);
        if v >= T::zero() && v <= T::one() {
            return v;
        }
    }
}

/// Draw θ_n ~ N(μ_{c_n}, σ₀²I) (redrawing components outside [0, 1]) and
/// x_n = h(θ_n) + N(0, σ²I) with h the first-mode nMBM of `model`.
pub fn generate_dataset<T: Scalar>(
    truth: &GroundTruth,
    model: &FrameModel<T>,
    seed: u64,
) -> Result<ObservationSet<T>, SynthError> {
    truth.validate()?;
    if truth.dim() != model.spring_groups() {
        return Err(SynthError::DimensionMismatch(format!(
            "ground truth has {} parameters, model has {} spring groups",
            truth.dim(),
            model.spring_groups()
        )));
    }
    let sigma: T = lit(truth.sigma_obs);
    let mut thetas = Vec::with_capacity(truth.observations());
    let mut observations = Vec::with_capacity(truth.observations());
    for (n, &c) in truth.class_assignment.iter().enumerate() {
        let mut rng = substream(seed, &[n as u64]);
        let theta: Vec<T> = truth.class_means[c - 1]
            .iter()
            .map(|&m| draw_fixity(m, truth.sigma_theta, &mut rng))
            .collect();
        let fixity = FixityVector::new(theta.clone()).expect("draws lie in [0, 1]");
        let clean =
            simulate_nmbm(model, &fixity, OBSERVED_MODE).map_err(|e| SynthError::Simulation {
                observation: n + 1,
                message: e.to_string(),
            })?;
        observations.push(
            clean
                .values
                .into_iter()
                .map(|v| v + sigma * T::standard_normal(&mut rng))
                .collect(),
        );
        thetas.push(theta);
    }
    Ok(ObservationSet {
        sensor_ids: model
            .moment_sensors()
            .iter()
            .map(|s| s.id.clone())
            .collect(),
        observations,
        labels_truth: Some(truth.class_assignment.clone()),
        theta_truth: Some(thetas),
    })
}

/// Bending moment from extreme-fibre strains: (ε_t − ε_b)/2 · E · Z.
pub fn strain_to_moment<T: Scalar>(
    eps_top: T,
    eps_bottom: T,
    elastic_modulus: T,
    section_modulus: T,
) -> T {
    (eps_top - eps_bottom) / lit(2.0) * elastic_modulus * section_modulus
}

/// Modal displacement from modal acceleration: d = −a/ω².
pub fn accel_to_modal_displacement<T: Scalar>(
    modal_accel: &[T],
    omega: T,
) -> Result<Vec<T>, SynthError> {
    if !(omega > T::zero()) {
        return Err(SynthError::NonPositiveFrequency(crate::scalar::to_f64(
            omega,
        )));
    }
    let w2 = omega * omega;
    Ok(modal_accel.iter().map(|&a| -a / w2).collect())
}
