use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::Args;
use dphbmu::analysis::k_posterior;
use dphbmu::sampler::{
    run_baseline_with, run_chain_with, write_trace, FrameSimulator, PosteriorTrace, RunOptions,
    SamplerConfig, SamplerError,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{from_sampler, Categorize, CliResult};
use crate::inputs::{load_config, load_data, load_model, parse_seeds};

pub const MANIFEST_FILE: &str = "manifest.toml";
pub const TRACE_FILE: &str = "trace.jsonl";

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Dataset bundle directory or observations CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Frame model TOML; defaults to the built-in two-bay three-story frame.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Sampler config TOML with every key present; defaults are built in.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Single chain seed (overrides the config).
    #[arg(long, conflicts_with = "seeds")]
    pub seed: Option<u64>,
    /// Batch of seeds, e.g. `1-10` or `1,4,9`; one subdirectory per seed.
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long)]
    pub iterations: Option<u64>,
    #[arg(long)]
    pub burn_in: Option<u64>,
    /// pCN step size s.
    #[arg(long)]
    pub step_size: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    Dp,
    Baseline,
}

/// Everything needed to rerun a fit bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub tool_version: String,
    pub kind: FitKind,
    pub model_file: String,
    pub model_sha256: String,
    pub data_path: String,
    pub data_sha256: String,
    pub seeds: Vec<u64>,
    /// Whether traces sit in per-seed subdirectories.
    pub batch: bool,
    pub out: String,
    /// Config shared by all seeds; each run replaces `seed`.
    pub config: SamplerConfig,
}

pub fn seed_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed-{seed}"))
}

pub fn run(args: &FitArgs, kind: FitKind) -> CliResult<()> {
    let defaults = match kind {
        FitKind::Dp => SamplerConfig::default(),
        FitKind::Baseline => SamplerConfig::baseline(),
    };
    let mut config = load_config(args.config.as_deref(), defaults)?;
    if let Some(v) = args.iterations {
        config.iterations = v;
    }
    if let Some(v) = args.burn_in {
        config.burn_in = v;
    }
    if let Some(v) = args.step_size {
        config.step_size_s = v;
    }
    let (seeds, batch) = match (&args.seeds, args.seed) {
        (Some(list), _) => (parse_seeds(list)?, true),
        (None, Some(s)) => (vec![s], false),
        (None, None) => (vec![config.seed], false),
    };
    config.seed = seeds[0];
    config
        .validate()
        .map_err(|e| from_sampler(e, "sampler config"))?;

    let model = load_model(args.model.as_deref())?;
    let data = load_data(&args.data)?;
    let observations = &data.bundle.observations;
    if observations.output_dim() != model.model.moment_sensors().len() {
        return Err(from_sampler(
            SamplerError::DimensionMismatch(format!(
                "dataset has {} sensors, model has {}",
                observations.output_dim(),
                model.model.moment_sensors().len()
            )),
            "checking inputs",
        ));
    }
    if let Some(m) = &data.bundle.manifest {
        if m.model_sha256 != model.sha256() {
            eprintln!(
                "warning: dataset was generated with a different model file ({})",
                m.model_file
            );
        }
    }
    let manifest = ExperimentManifest {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        kind,
        model_file: model.name.clone(),
        model_sha256: model.sha256(),
        data_path: data.path.display().to_string(),
        data_sha256: data.sha256.clone(),
        seeds: seeds.clone(),
        batch,
        out: args.out.display().to_string(),
        config: config.clone(),
    };
    std::fs::create_dir_all(&args.out).or_io(format!("creating {}", args.out.display()))?;
    let manifest_text = toml::to_string(&manifest).or_run("serializing manifest")?;
    std::fs::write(args.out.join(MANIFEST_FILE), manifest_text).or_io("writing manifest")?;

    let sim = FrameSimulator::new(model.model, 1);
    let options = RunOptions::from_env();
    let fit_one = |seed: u64| -> CliResult<(u64, PosteriorTrace<f64>)> {
        let cfg = SamplerConfig {
            seed,
            ..config.clone()
        };
        let trace = match kind {
            FitKind::Dp => run_chain_with(&cfg, &sim, &observations.observations, options),
            FitKind::Baseline => run_baseline_with(&cfg, &sim, &observations.observations, options),
        }
        .map_err(|e| from_sampler(e, format!("seed {seed}")))?;
        let dir = if batch {
            seed_dir(&args.out, seed)
        } else {
            args.out.clone()
        };
        std::fs::create_dir_all(&dir).or_io(format!("creating {}", dir.display()))?;
        let path = dir.join(TRACE_FILE);
        let file = File::create(&path).or_io(format!("creating {}", path.display()))?;
        write_trace(&trace, BufWriter::new(file)).map_err(|e| from_sampler(e, path.display()))?;
        Ok((seed, trace))
    };
    let results: Vec<(u64, PosteriorTrace<f64>)> = seeds
        .par_iter()
        .map(|&s| fit_one(s))
        .collect::<CliResult<_>>()?;

    for (seed, trace) in &results {
        let k = k_posterior(trace);
        let k_text = match kind {
            FitKind::Dp => format!(
                ", K mode {}",
                k.mode().map_or("-".into(), |m| m.to_string())
            ),
            FitKind::Baseline => String::new(),
        };
        println!(
            "seed {seed}: {} records, acceptance {:.3}{k_text}",
            trace.records.len(),
            trace.diagnostics.acceptance_rate()
        );
    }
    Ok(())
}
