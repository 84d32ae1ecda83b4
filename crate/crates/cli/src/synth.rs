use std::path::PathBuf;

use clap::Args;
use dphbmu::synth::{generate_dataset, write_bundle, GroundTruth};

use crate::error::{from_synth, input, Categorize, CliResult};
use crate::inputs::load_model;

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Frame model TOML; defaults to the built-in two-bay three-story frame.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Ground-truth TOML; defaults to the built-in three damage states.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Measurement noise standard deviation (kNm/mm). Overrides the truth file.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for the dataset bundle.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &SynthArgs) -> CliResult<()> {
    let model = load_model(args.model.as_deref())?;
    let mut truth = match &args.truth {
        Some(p) => {
            let text = std::fs::read_to_string(p).or_io(format!("reading {}", p.display()))?;
            GroundTruth::from_toml(&text).map_err(|e| from_synth(e, p.display()))?
        }
        None => GroundTruth::three_damage_states(args.sigma.unwrap_or(f64::NAN)),
    };
    if let Some(s) = args.sigma {
        truth.sigma_obs = s;
    }
    if args.truth.is_none() && args.sigma.is_none() {
        return Err(input("--sigma is required with the built-in ground truth"));
    }
    if !(truth.sigma_obs > 0.0 && truth.sigma_obs.is_finite()) {
        return Err(input(format!(
            "sigma must be positive, got {}",
            truth.sigma_obs
        )));
    }

    let set = generate_dataset(&truth, &model.model, args.seed)
        .map_err(|e| from_synth(e, "generating dataset"))?;
    write_bundle(
        &args.out,
        &set,
        &truth,
        args.seed,
        &model.name,
        model.text.as_bytes(),
    )
    .map_err(|e| from_synth(e, format!("writing {}", args.out.display())))?;
    println!(
        "wrote {}: N = {}, M = {}, K_truth = {}, sigma = {}, seed = {}",
        args.out.display(),
        set.len(),
        set.output_dim(),
        truth.classes(),
        truth.sigma_obs,
        args.seed
    );
    Ok(())
}
