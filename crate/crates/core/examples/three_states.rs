//! One hierarchical chain and one baseline run on a synthetic three-class
//! dataset, with timing.
//!
//! cargo run --release -p dphbmu --example three_states -- [sigma] [seed] [iterations]

use std::time::Instant;

use dphbmu::analysis::{k_posterior, mu_summaries, records_with_k, relabel_descending, slmp};
use dphbmu::frame::two_bay_three_story;
use dphbmu::sampler::{run_baseline, run_chain, FrameSimulator, SamplerConfig};
use dphbmu::synth::{generate_dataset, GroundTruth};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let sigma: f64 = args.first().map_or(0.10, |s| s.parse().unwrap());
    let seed: u64 = args.get(1).map_or(1, |s| s.parse().unwrap());
    let iterations: u64 = args.get(2).map_or(10_000, |s| s.parse().unwrap());

    let model = two_bay_three_story::<f64>();
    let truth = GroundTruth::three_damage_states(sigma);
    let data = generate_dataset(&truth, &model, seed).unwrap();
    let theta_truth = data.theta_truth.clone().unwrap();
    let sim = FrameSimulator::new(model, 1);

    let cfg = SamplerConfig {
        seed,
        iterations,
        burn_in: iterations / 2,
        ..Default::default()
    };
    let start = Instant::now();
    let trace = run_chain(&cfg, &sim, &data.observations).unwrap();
    let k = k_posterior(&trace);
    println!(
        "dp: {:.1}s, acceptance {:.3}",
        start.elapsed().as_secs_f64(),
        trace.diagnostics.acceptance_rate()
    );
    println!("K histogram {:?}, mode {:?}", k.histogram, k.mode());
    println!("SLMP {:.3}", slmp(&trace, &theta_truth).unwrap().slmp_total);
    if let Some(mode) = k.mode() {
        let relabeled = relabel_descending(&records_with_k(&trace, mode)).unwrap();
        for (c, row) in mu_summaries(&relabeled).unwrap().iter().enumerate() {
            let med: Vec<String> = row.iter().map(|s| format!("{:.2}", s.median)).collect();
            println!("  mu{} median [{}]", c + 1, med.join(", "));
        }
    }

    let base_cfg = SamplerConfig {
        seed,
        iterations,
        burn_in: iterations / 2,
        ..SamplerConfig::baseline()
    };
    let start = Instant::now();
    let base = run_baseline(&base_cfg, &sim, &data.observations).unwrap();
    println!(
        "baseline: {:.1}s, acceptance {:.3}, SLMP {:.3}",
        start.elapsed().as_secs_f64(),
        base.diagnostics.acceptance_rate(),
        slmp(&base, &theta_truth).unwrap().slmp_total
    );
}
