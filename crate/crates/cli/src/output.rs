//! File writers. JSON files hold `{"config": .., "result": ..}`; CSV files
//! start with a `# config: {json}` line followed by a header row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use qmsa_core::encoding::is_feasible;
use qmsa_core::{QaoaResult, QuboModel, SequenceSet};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const CONFIG_PREFIX: &str = "# config: ";

#[derive(Serialize)]
struct Envelope<'a, T> {
    config: &'a RunConfig,
    result: &'a T,
}

pub fn to_json<T: Serialize>(config: &RunConfig, result: &T) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(&Envelope { config, result })?;
    text.push('\n');
    Ok(text)
}

pub fn write_json<T: Serialize>(path: &Path, config: &RunConfig, result: &T) -> anyhow::Result<()> {
    std::fs::write(path, to_json(config, result)?)?;
    Ok(())
}

pub fn write_csv<T: Serialize>(path: &Path, config: &RunConfig, rows: &[T]) -> anyhow::Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    writeln!(file, "{CONFIG_PREFIX}{}", serde_json::to_string(config)?)?;
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub bitstring: String,
    pub count: u64,
    pub probability: f64,
    pub feasible: bool,
    pub energy: f64,
}

/// Every sampled outcome, most frequent first.
pub fn histogram_rows(
    r: &QaoaResult,
    seqs: &SequenceSet,
    model: &QuboModel,
) -> anyhow::Result<Vec<HistogramRow>> {
    r.histogram
        .ranked()
        .into_iter()
        .map(|(b, count)| {
            Ok(HistogramRow {
                bitstring: b.to_string(),
                count,
                probability: r.probability_of(b),
                feasible: is_feasible(b, seqs)?,
                energy: model.evaluate(b)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopRow {
    pub rank: usize,
    pub bitstring: String,
    pub count: u64,
    pub frequency: f64,
    pub probability: f64,
    pub energy: f64,
    pub feasible: bool,
    /// Rows joined by `/`; empty when infeasible.
    pub alignment: String,
    pub violations: usize,
}

pub fn top_rows(r: &QaoaResult) -> Vec<TopRow> {
    r.top
        .iter()
        .enumerate()
        .map(|(k, t)| TopRow {
            rank: k + 1,
            bitstring: t.bitstring.to_string(),
            count: t.count,
            frequency: t.count as f64 / r.histogram.shots as f64,
            probability: t.probability,
            energy: t.energy,
            feasible: t.feasible,
            alignment: t.alignment.as_ref().map(|a| a.join("/")).unwrap_or_default(),
            violations: t.violations.as_ref().map_or(0, Vec::len),
        })
        .collect()
}
