//! Posterior post-processing of recorded traces.

mod kde;
mod report;

pub use kde::{kde_log_density, silverman_bandwidth, BANDWIDTH_FLOOR};
pub use report::{
    cooccurrence_csv, k_histogram_csv, k_trace_csv, matrix_csv, slmp_csv, summaries_csv,
};

use std::collections::BTreeMap;

use crate::sampler::{PosteriorTrace, TraceRecord};
use crate::scalar::{to_f64, Scalar};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum AnalysisError {
    #[error("trace has no records")]
    EmptyTrace,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("records have different cluster counts")]
    MixedK,
}

/// Sum of log marginal posterior densities at the true parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SlmpReport {
    pub slmp_total: f64,
    /// N × D log densities.
    pub per_component: Vec<Vec<f64>>,
    /// N × D KDE bandwidths.
    pub kde_bandwidths: Vec<Vec<f64>>,
}

fn marginal<T: Scalar>(records: &[TraceRecord<T>], n: usize, i: usize) -> Vec<f64> {
    records.iter().map(|r| to_f64(r.thetas[n][i])).collect()
}

/// Score a trace against true fixity factors (N × D) with a Gaussian KDE per
/// scalar marginal.
pub fn slmp<T: Scalar>(
    trace: &PosteriorTrace<T>,
    theta_truth: &[Vec<f64>],
) -> Result<SlmpReport, AnalysisError> {
    let first = trace.records.first().ok_or(AnalysisError::EmptyTrace)?;
    let (n_obs, d) = (first.thetas.len(), first.thetas.first().map_or(0, Vec::len));
    if theta_truth.len() != n_obs || theta_truth.iter().any(|t| t.len() != d) {
        return Err(AnalysisError::DimensionMismatch(format!(
            "trace has {n_obs} x {d} parameters, truth has {} rows",
            theta_truth.len()
        )));
    }
    let mut per_component = vec![vec![0.0; d]; n_obs];
    let mut kde_bandwidths = vec![vec![0.0; d]; n_obs];
    for n in 0..n_obs {
        for i in 0..d {
            let samples = marginal(&trace.records, n, i);
            let h = silverman_bandwidth(&samples);
            kde_bandwidths[n][i] = h;
            per_component[n][i] = kde_log_density(&samples, h, theta_truth[n][i]);
        }
    }
    let slmp_total = per_component.iter().flatten().sum();
    Ok(SlmpReport {
        slmp_total,
        per_component,
        kde_bandwidths,
    })
}

/// Records whose cluster count equals `k`.
pub fn records_with_k<T: Clone>(trace: &PosteriorTrace<T>, k: usize) -> Vec<TraceRecord<T>> {
    trace.records.iter().filter(|r| r.k == k).cloned().collect()
}

/// Order clusters of each record by the mean of their μ components,
/// largest first; ties keep the original order.
pub fn relabel_descending<T: Scalar>(
    records: &[TraceRecord<T>],
) -> Result<Vec<TraceRecord<T>>, AnalysisError> {
    let Some(first) = records.first() else {
        return Ok(Vec::new());
    };
    if records.iter().any(|r| r.k != first.k) {
        return Err(AnalysisError::MixedK);
    }
    Ok(records
        .iter()
        .map(|r| {
            let score: Vec<f64> = r
                .mus
                .iter()
                .map(|m| m.iter().map(|&v| to_f64(v)).sum::<f64>() / m.len().max(1) as f64)
                .collect();
            let mut order: Vec<usize> = (0..r.k).collect();
            order.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));
            let mut new_label = vec![0; r.k];
            for (pos, &old) in order.iter().enumerate() {
                new_label[old] = pos + 1;
            }
            let mut out = r.clone();
            out.mus = order.iter().map(|&old| r.mus[old].clone()).collect();
            out.labels = r.labels.iter().map(|&l| new_label[l - 1]).collect();
            out
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct KPosterior {
    pub histogram: BTreeMap<usize, usize>,
    pub trace: Vec<usize>,
}

impl KPosterior {
    /// Most frequent K; the smaller value wins a tie.
    pub fn mode(&self) -> Option<usize> {
        self.histogram
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(&k, _)| k)
    }

    pub fn probability(&self, k: usize) -> f64 {
        let total: usize = self.histogram.values().sum();
        if total == 0 {
            0.0
        } else {
            self.histogram.get(&k).copied().unwrap_or(0) as f64 / total as f64
        }
    }
}

pub fn k_posterior<T>(trace: &PosteriorTrace<T>) -> KPosterior {
    let trace_k: Vec<usize> = trace.records.iter().map(|r| r.k).collect();
    let mut histogram = BTreeMap::new();
    for &k in &trace_k {
        *histogram.entry(k).or_insert(0) += 1;
    }
    KPosterior {
        histogram,
        trace: trace_k,
    }
}

/// Fraction of records in which observations i and j share a cluster.
pub fn cooccurrence<T>(trace: &PosteriorTrace<T>) -> Result<Vec<Vec<f64>>, AnalysisError> {
    let first = trace.records.first().ok_or(AnalysisError::EmptyTrace)?;
    let n = first.labels.len();
    let mut counts = vec![vec![0usize; n]; n];
    for r in &trace.records {
        for i in 0..n {
            for j in 0..n {
                if r.labels[i] == r.labels[j] {
                    counts[i][j] += 1;
                }
            }
        }
    }
    let total = trace.records.len() as f64;
    Ok(counts
        .into_iter()
        .map(|row| row.into_iter().map(|c| c as f64 / total).collect())
        .collect())
}

/// Median and central 95% interval of a scalar marginal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentSummary {
    pub median: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn summarize(samples: &[f64]) -> ComponentSummary {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    ComponentSummary {
        median: quantile_sorted(&s, 0.5),
        lower: quantile_sorted(&s, 0.025),
        upper: quantile_sorted(&s, 0.975),
    }
}

/// N × D summaries of the per-observation parameters.
pub fn theta_summaries<T: Scalar>(
    records: &[TraceRecord<T>],
) -> Result<Vec<Vec<ComponentSummary>>, AnalysisError> {
    let first = records.first().ok_or(AnalysisError::EmptyTrace)?;
    Ok((0..first.thetas.len())
        .map(|n| {
            (0..first.thetas[n].len())
                .map(|i| {
                    summarize(
                        &records
                            .iter()
                            .map(|r| to_f64(r.thetas[n][i]))
                            .collect::<Vec<_>>(),
                    )
                })
                .collect()
        })
        .collect())
}

/// K × D summaries of cluster means over records sharing one K (relabel first).
pub fn mu_summaries<T: Scalar>(
    records: &[TraceRecord<T>],
) -> Result<Vec<Vec<ComponentSummary>>, AnalysisError> {
    let first = records.first().ok_or(AnalysisError::EmptyTrace)?;
    if records.iter().any(|r| r.k != first.k) {
        return Err(AnalysisError::MixedK);
    }
    Ok((0..first.k)
        .map(|k| {
            (0..first.mus[k].len())
                .map(|i| {
                    summarize(
                        &records
                            .iter()
                            .map(|r| to_f64(r.mus[k][i]))
                            .collect::<Vec<_>>(),
                    )
                })
                .collect()
        })
        .collect())
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}
