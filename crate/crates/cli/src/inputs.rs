//! Loading of the files shared by several commands.

use std::path::{Path, PathBuf};

use dphbmu::frame::{two_bay_three_story, FrameModel, ModelFile};
use dphbmu::sampler::SamplerConfig;
use dphbmu::synth::{read_bundle, sha256_hex, DatasetBundle, OBSERVATIONS_FILE};

use crate::error::{from_sampler, from_synth, input, usage, Categorize, CliResult};

pub const BUILTIN_MODEL: &str = "builtin:two_bay_three_story";

/// A frame model together with where it came from and the hashed bytes.
pub struct LoadedModel {
    pub model: FrameModel<f64>,
    pub name: String,
    pub text: String,
}

impl LoadedModel {
    pub fn sha256(&self) -> String {
        sha256_hex(self.text.as_bytes())
    }
}

/// Read a model file, or the built-in two-bay three-story frame.
pub fn load_model(path: Option<&Path>) -> CliResult<LoadedModel> {
    match path {
        None => {
            let model = two_bay_three_story::<f64>();
            let text = ModelFile::from_model(&model).to_toml();
            Ok(LoadedModel {
                model,
                name: BUILTIN_MODEL.into(),
                text,
            })
        }
        Some(p) => {
            let text = std::fs::read_to_string(p).or_io(format!("reading {}", p.display()))?;
            let model = ModelFile::parse(&text)
                .and_then(|f| f.into_model())
                .or_input(format!("{}", p.display()))?;
            Ok(LoadedModel {
                model,
                name: p.display().to_string(),
                text,
            })
        }
    }
}

/// Config from a file (every key required) or the given defaults.
pub fn load_config(path: Option<&Path>, defaults: SamplerConfig) -> CliResult<SamplerConfig> {
    match path {
        None => Ok(defaults),
        Some(p) => {
            let text = std::fs::read_to_string(p).or_io(format!("reading {}", p.display()))?;
            SamplerConfig::from_toml(&text).map_err(|e| from_sampler(e, p.display()))
        }
    }
}

/// Parse a seed list such as `1,2,5` or `1-10`.
pub fn parse_seeds(spec: &str) -> CliResult<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || usage(format!("invalid seed list entry '{part}'"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (
                    a.trim().parse().map_err(|_| bad())?,
                    b.trim().parse().map_err(|_| bad())?,
                );
                if a > b {
                    return Err(bad());
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(part.parse().map_err(|_| bad())?),
        }
    }
    if seeds.is_empty() {
        return Err(usage("empty seed list"));
    }
    let mut sorted = seeds.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != seeds.len() {
        return Err(usage("seed list contains duplicates"));
    }
    Ok(seeds)
}

/// A dataset bundle plus the hash of its observation file.
pub struct LoadedData {
    pub bundle: DatasetBundle,
    pub path: PathBuf,
    pub sha256: String,
}

pub fn load_data(path: &Path) -> CliResult<LoadedData> {
    if !path.exists() {
        return Err(input(format!("dataset {} does not exist", path.display())));
    }
    let csv_path = if path.is_dir() {
        path.join(OBSERVATIONS_FILE)
    } else {
        path.to_path_buf()
    };
    let bytes = std::fs::read(&csv_path).or_io(format!("reading {}", csv_path.display()))?;
    let bundle = read_bundle(path).map_err(|e| from_synth(e, path.display()))?;
    Ok(LoadedData {
        bundle,
        path: path.to_path_buf(),
        sha256: sha256_hex(&bytes),
    })
}
