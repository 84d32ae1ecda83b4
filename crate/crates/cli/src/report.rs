use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::Args;
use dphbmu::analysis::{
    cooccurrence, cooccurrence_csv, k_histogram_csv, k_posterior, k_trace_csv, mean_std,
    mu_summaries, records_with_k, relabel_descending, slmp, slmp_csv, summaries_csv,
    theta_summaries,
};
use dphbmu::sampler::{read_trace, PosteriorTrace, TraceKind};
use dphbmu::synth::{read_bundle, TruthSidecar};

use crate::error::{from_sampler, from_synth, input, Categorize, CliResult};
use crate::fit::{seed_dir, TRACE_FILE};

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Trace files, run directories, or batch directories with seed-* runs.
    #[arg(required = true)]
    pub traces: Vec<PathBuf>,
    /// Truth for SLMP: a dataset bundle directory or a truth.toml sidecar.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Expand directories into the trace files they hold.
fn resolve(paths: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_file() {
            files.push(p.clone());
        } else if p.join(TRACE_FILE).is_file() {
            files.push(p.join(TRACE_FILE));
        } else if p.is_dir() {
            let mut runs: Vec<(u64, PathBuf)> = std::fs::read_dir(p)
                .or_io(format!("listing {}", p.display()))?
                .filter_map(Result::ok)
                .filter_map(|e| {
                    let name = e.file_name().to_string_lossy().into_owned();
                    let seed = name.strip_prefix("seed-")?.parse().ok()?;
                    let trace = e.path().join(TRACE_FILE);
                    trace.is_file().then_some((seed, trace))
                })
                .collect();
            if runs.is_empty() {
                return Err(input(format!("no traces found in {}", p.display())));
            }
            runs.sort();
            files.extend(runs.into_iter().map(|(_, t)| t));
        } else {
            return Err(input(format!("{} does not exist", p.display())));
        }
    }
    Ok(files)
}

fn load_truth(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let theta = if path.is_dir() {
        read_bundle(path)
            .map_err(|e| from_synth(e, path.display()))?
            .observations
            .theta_truth
    } else {
        let text = std::fs::read_to_string(path).or_io(format!("reading {}", path.display()))?;
        let sidecar: TruthSidecar = toml::from_str(&text).or_input(path.display())?;
        Some(sidecar.theta).filter(|t| !t.is_empty())
    };
    theta.ok_or_else(|| {
        input(format!(
            "{} carries no per-observation fixity factors",
            path.display()
        ))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> CliResult<()> {
    let path = dir.join(name);
    std::fs::write(&path, text).or_io(format!("writing {}", path.display()))
}

/// Write the per-trace report files and return the SLMP if truth is known.
fn report_one(
    trace: &PosteriorTrace<f64>,
    truth: Option<&[Vec<f64>]>,
    dir: &Path,
) -> CliResult<Option<f64>> {
    std::fs::create_dir_all(dir).or_io(format!("creating {}", dir.display()))?;
    let k = k_posterior(trace);
    write(dir, "k_histogram.csv", &k_histogram_csv(&k))?;
    write(dir, "k_trace.csv", &k_trace_csv(trace))?;
    write(
        dir,
        "cooccurrence.csv",
        &cooccurrence_csv(&cooccurrence(trace).or_run("co-occurrence")?),
    )?;
    write(
        dir,
        "theta_summary.csv",
        &summaries_csv("x", &theta_summaries(&trace.records).or_run("summaries")?),
    )?;

    let mut summary = String::new();
    let first = trace.records.first().map_or(0, |r| r.iteration);
    let last = trace.records.last().map_or(0, |r| r.iteration);
    let kind = match trace.kind {
        TraceKind::Dp => "dp",
        TraceKind::Baseline => "baseline",
    };
    writeln!(summary, "kind: {kind}").unwrap();
    writeln!(summary, "seed: {}", trace.config.seed).unwrap();
    writeln!(
        summary,
        "records: {} (iterations {first}..={last})",
        trace.records.len()
    )
    .unwrap();
    writeln!(
        summary,
        "pCN acceptance rate: {:.4}",
        trace.diagnostics.acceptance_rate()
    )
    .unwrap();
    writeln!(
        summary,
        "simulator failures: {}",
        trace.diagnostics.simulator_failures
    )
    .unwrap();

    if trace.kind == TraceKind::Dp {
        if let Some(mode) = k.mode() {
            writeln!(
                summary,
                "K posterior mode: {mode} (probability {:.4})",
                k.probability(mode)
            )
            .unwrap();
            let relabeled =
                relabel_descending(&records_with_k(trace, mode)).or_run("relabeling")?;
            let mus = mu_summaries(&relabeled).or_run("cluster summaries")?;
            write(dir, "mu_summary.csv", &summaries_csv("mu", &mus))?;
            writeln!(summary, "cluster mean medians at K = {mode}:").unwrap();
            for (c, row) in mus.iter().enumerate() {
                let med: Vec<String> = row.iter().map(|s| format!("{:.3}", s.median)).collect();
                writeln!(summary, "  mu{}: [{}]", c + 1, med.join(", ")).unwrap();
            }
        }
    }

    let score = match truth {
        Some(t) => {
            let report =
                slmp(trace, t).map_err(|e| input(format!("truth does not fit the trace: {e}")))?;
            write(dir, "slmp.csv", &slmp_csv(&report))?;
            writeln!(summary, "SLMP: {}", report.slmp_total).unwrap();
            Some(report.slmp_total)
        }
        None => None,
    };
    write(dir, "summary.txt", &summary)?;
    Ok(score)
}

pub fn run(args: &ReportArgs) -> CliResult<()> {
    let files = resolve(&args.traces)?;
    let truth = args.truth.as_deref().map(load_truth).transpose()?;
    let mut traces = Vec::with_capacity(files.len());
    for f in &files {
        let file = File::open(f).or_io(format!("opening {}", f.display()))?;
        let trace: PosteriorTrace<f64> =
            read_trace(BufReader::new(file)).map_err(|e| from_sampler(e, f.display()))?;
        traces.push(trace);
    }

    if traces.len() == 1 {
        let score = report_one(&traces[0], truth.as_deref(), &args.out)?;
        print!(
            "{}",
            std::fs::read_to_string(args.out.join("summary.txt")).or_io("reading summary")?
        );
        if score.is_none() {
            println!("no truth supplied; SLMP omitted");
        }
        return Ok(());
    }

    // per-seed directories unless two traces share a seed
    let distinct = {
        let mut seeds: Vec<u64> = traces.iter().map(|t| t.config.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        seeds.len() == traces.len()
    };
    let mut table = String::from("run,seed,kind,records,slmp\n");
    let mut scores = Vec::new();
    for (i, (trace, file)) in traces.iter().zip(&files).enumerate() {
        let dir = if distinct {
            seed_dir(&args.out, trace.config.seed)
        } else {
            args.out.join(format!("run-{}", i + 1))
        };
        let score = report_one(trace, truth.as_deref(), &dir)?;
        let kind = if trace.kind == TraceKind::Dp {
            "dp"
        } else {
            "baseline"
        };
        let slmp_text = score.map_or(String::new(), |s| s.to_string());
        writeln!(
            table,
            "{},{},{kind},{},{slmp_text}",
            file.display(),
            trace.config.seed,
            trace.records.len()
        )
        .unwrap();
        scores.extend(score);
    }
    write(&args.out, "runs.csv", &table)?;

    let mut summary = format!("runs: {}\n", traces.len());
    if !scores.is_empty() {
        let (mean, sd) = mean_std(&scores);
        write(
            &args.out,
            "slmp_table.csv",
            &format!("runs,slmp_mean,slmp_std\n{},{mean},{sd}\n", scores.len()),
        )?;
        writeln!(
            summary,
            "SLMP mean {mean:.3}, std {sd:.3} over {} runs",
            scores.len()
        )
        .unwrap();
    } else {
        summary.push_str("no truth supplied; SLMP omitted\n");
    }
    write(&args.out, "summary.txt", &summary)?;
    print!("{summary}");
    Ok(())
}
