//! Dataset bundle: `observations.csv` (header of sensor ids, one row per
//! observation), `truth.toml` (generating classes and realized parameters)
//! and `manifest.toml` (seed, noise levels and SHA-256 of every file).

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{GroundTruth, SynthError, OBSERVED_MODE};
use crate::sampler::ObservationSet;
use crate::scalar::{lit, Scalar};

pub const OBSERVATIONS_FILE: &str = "observations.csv";
pub const TRUTH_FILE: &str = "truth.toml";
pub const MANIFEST_FILE: &str = "manifest.toml";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthSidecar {
    pub ground_truth: GroundTruth,
    /// Realized class of each observation.
    pub labels: Vec<usize>,
    /// Realized fixity factors, N × D.
    pub theta: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub tool_version: String,
    pub seed: u64,
    pub sigma_obs: f64,
    pub sigma_theta: f64,
    pub observed_mode: usize,
    pub model_file: String,
    pub model_sha256: String,
    pub observations_sha256: String,
    pub truth_sha256: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    pub observations: ObservationSet<f64>,
    pub truth: Option<TruthSidecar>,
    pub manifest: Option<DatasetManifest>,
}

pub fn write_observations_csv<T: Scalar, W: Write>(
    set: &ObservationSet<T>,
    out: W,
) -> Result<(), SynthError> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| SynthError::Bundle(e.to_string());
    w.write_record(&set.sensor_ids).map_err(err)?;
    for x in &set.observations {
        w.write_record(x.iter().map(|v| v.to_string()))
            .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_observations_csv<T: Scalar, R: Read>(
    input: R,
) -> Result<ObservationSet<T>, SynthError> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let sensor_ids: Vec<String> = r
        .headers()
        .map_err(|e| SynthError::Bundle(format!("observations header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut observations = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec =
            rec.map_err(|e| SynthError::Bundle(format!("observations row {}: {e}", i + 1)))?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, field)| {
                field.parse::<f64>().map(lit::<T>).map_err(|e| {
                    SynthError::Bundle(format!(
                        "observations row {}, column {}: {e}",
                        i + 1,
                        sensor_ids[j]
                    ))
                })
            })
            .collect::<Result<Vec<T>, _>>()?;
        observations.push(row);
    }
    ObservationSet::new(sensor_ids, observations).map_err(|e| SynthError::Bundle(e.to_string()))
}

/// Write the three bundle files into `dir` and return the manifest.
pub fn write_bundle(
    dir: &Path,
    set: &ObservationSet<f64>,
    truth: &GroundTruth,
    seed: u64,
    model_file: &str,
    model_bytes: &[u8],
) -> Result<DatasetManifest, SynthError> {
    fs::create_dir_all(dir)?;
    let mut csv_bytes = Vec::new();
    write_observations_csv(set, &mut csv_bytes)?;
    let sidecar = TruthSidecar {
        ground_truth: truth.clone(),
        labels: set
            .labels_truth
            .clone()
            .unwrap_or_else(|| truth.class_assignment.clone()),
        theta: set.theta_truth.clone().unwrap_or_default(),
    };
    let truth_text = toml::to_string(&sidecar).map_err(|e| SynthError::Bundle(e.to_string()))?;
    let manifest = DatasetManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        sigma_obs: truth.sigma_obs,
        sigma_theta: truth.sigma_theta,
        observed_mode: OBSERVED_MODE,
        model_file: model_file.to_string(),
        model_sha256: sha256_hex(model_bytes),
        observations_sha256: sha256_hex(&csv_bytes),
        truth_sha256: sha256_hex(truth_text.as_bytes()),
    };
    fs::write(dir.join(OBSERVATIONS_FILE), &csv_bytes)?;
    fs::write(dir.join(TRUTH_FILE), truth_text)?;
    fs::write(
        dir.join(MANIFEST_FILE),
        toml::to_string(&manifest).map_err(|e| SynthError::Bundle(e.to_string()))?,
    )?;
    Ok(manifest)
}

/// Read a bundle directory, or a bare observations CSV file. Hashes are
/// checked whenever a manifest is present.
pub fn read_bundle(path: &Path) -> Result<DatasetBundle, SynthError> {
    if path.is_file() {
        let bytes = fs::read(path)?;
        return Ok(DatasetBundle {
            observations: read_observations_csv(bytes.as_slice())?,
            truth: None,
            manifest: None,
        });
    }
    let csv_bytes = fs::read(path.join(OBSERVATIONS_FILE)).map_err(|e| {
        SynthError::Bundle(format!("{}: {e}", path.join(OBSERVATIONS_FILE).display()))
    })?;
    let mut observations: ObservationSet<f64> = read_observations_csv(csv_bytes.as_slice())?;

    let manifest = match fs::read_to_string(path.join(MANIFEST_FILE)) {
        Ok(text) => Some(
            toml::from_str::<DatasetManifest>(&text)
                .map_err(|e| SynthError::Bundle(format!("{MANIFEST_FILE}: {e}")))?,
        ),
        Err(_) => None,
    };
    let truth_text = fs::read_to_string(path.join(TRUTH_FILE)).ok();
    if let Some(m) = &manifest {
        if sha256_hex(&csv_bytes) != m.observations_sha256 {
            return Err(SynthError::Bundle(format!(
                "{OBSERVATIONS_FILE} does not match its manifest hash"
            )));
        }
        match &truth_text {
            Some(t) if sha256_hex(t.as_bytes()) != m.truth_sha256 => {
                return Err(SynthError::Bundle(format!(
                    "{TRUTH_FILE} does not match its manifest hash"
                )));
            }
            _ => {}
        }
    }
    let truth = match truth_text {
        Some(t) => {
            let sidecar: TruthSidecar =
                toml::from_str(&t).map_err(|e| SynthError::Bundle(format!("{TRUTH_FILE}: {e}")))?;
            sidecar.ground_truth.validate()?;
            observations.labels_truth = Some(sidecar.labels.clone());
            if !sidecar.theta.is_empty() {
                observations.theta_truth = Some(sidecar.theta.clone());
            }
            observations
                .validate()
                .map_err(|e| SynthError::Bundle(e.to_string()))?;
            Some(sidecar)
        }
        None => None,
    };
    Ok(DatasetBundle {
        observations,
        truth,
        manifest,
    })
}
