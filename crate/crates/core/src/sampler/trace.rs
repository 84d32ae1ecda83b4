//! Recorded snapshots and their line-delimited JSON form.
//!
//! A trace file starts with one header object
//! `{"schema": "dphbmu-trace", "version": 1, "kind": ..., "config": ..., "diagnostics": ..., "records": count}`
//! followed by one `TraceRecord` object per line.

use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{SamplerConfig, SamplerError};

pub const TRACE_SCHEMA: &str = "dphbmu-trace";
pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    /// Hierarchical DP mixture chain.
    Dp,
    /// Independent per-observation chains.
    Baseline,
}

/// One recorded iteration. `thetas` and `mus` are fixity factors in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Deserialize<'de>"))]
pub struct TraceRecord<T> {
    /// 1-based sweep number.
    pub iteration: u64,
    #[serde(rename = "K")]
    pub k: usize,
    /// Cluster labels in 1..=K.
    pub labels: Vec<usize>,
    pub thetas: Vec<Vec<T>>,
    pub mus: Vec<Vec<T>>,
    pub tau: T,
    pub beta: T,
    /// Whether each observation's pCN proposal was accepted this sweep.
    pub accepted: Vec<bool>,
    /// Per-observation noise precisions of the baseline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<T>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDiagnostics {
    pub proposals: u64,
    pub acceptances: u64,
    pub simulator_failures: u64,
}

impl ChainDiagnostics {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.acceptances as f64 / self.proposals as f64
        }
    }

    pub(crate) fn merge(&mut self, other: &Self) {
        self.proposals += other.proposals;
        self.acceptances += other.acceptances;
        self.simulator_failures += other.simulator_failures;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorTrace<T> {
    pub kind: TraceKind,
    pub config: SamplerConfig,
    pub records: Vec<TraceRecord<T>>,
    pub diagnostics: ChainDiagnostics,
}

impl<T> PosteriorTrace<T> {
    pub fn k_values(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.k).collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    schema: String,
    version: u32,
    kind: TraceKind,
    config: SamplerConfig,
    diagnostics: ChainDiagnostics,
    records: usize,
}

pub fn write_trace<T: Serialize, W: Write>(
    trace: &PosteriorTrace<T>,
    mut out: W,
) -> Result<(), SamplerError> {
    let header = Header {
        schema: TRACE_SCHEMA.to_string(),
        version: TRACE_VERSION,
        kind: trace.kind,
        config: trace.config.clone(),
        diagnostics: trace.diagnostics.clone(),
        records: trace.records.len(),
    };
    let json = |e: serde_json::Error| SamplerError::Format(e.to_string());
    serde_json::to_writer(&mut out, &header).map_err(json)?;
    out.write_all(b"\n")?;
    for r in &trace.records {
        serde_json::to_writer(&mut out, r).map_err(json)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trace<T: DeserializeOwned, R: BufRead>(
    input: R,
) -> Result<PosteriorTrace<T>, SamplerError> {
    let mut lines = input.lines();
    let first = lines
        .next()
        .ok_or_else(|| SamplerError::Format("empty trace file".into()))??;
    let header: Header =
        serde_json::from_str(&first).map_err(|e| SamplerError::Format(format!("header: {e}")))?;
    if header.schema != TRACE_SCHEMA || header.version != TRACE_VERSION {
        return Err(SamplerError::Format(format!(
            "unsupported trace schema {} version {}",
            header.schema, header.version
        )));
    }
    let mut records = Vec::with_capacity(header.records);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line)
            .map_err(|e| SamplerError::Format(format!("record {}: {e}", i + 1)))?;
        records.push(r);
    }
    if records.len() != header.records {
        return Err(SamplerError::Format(format!(
            "header announces {} records, found {}",
            header.records,
            records.len()
        )));
    }
    Ok(PosteriorTrace {
        kind: header.kind,
        config: header.config,
        records,
        diagnostics: header.diagnostics,
    })
}
