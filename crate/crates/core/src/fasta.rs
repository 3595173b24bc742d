//! Minimal FASTA reader for nucleotide records.

use std::path::Path;

use crate::encoding::{Nucleotide, SequenceSet};
use crate::error::{QmsaError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRecord {
    pub header: String,
    pub sequence: Vec<Nucleotide>,
}

/// Parses FASTA text. Sequence lines are concatenated, whitespace is ignored
/// and letters are upper-cased; anything outside `{A, C, G, T}` is rejected.
pub fn parse_records(text: &str) -> Result<Vec<FastaRecord>> {
    let mut records: Vec<FastaRecord> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            records.push(FastaRecord {
                header: header.trim().to_owned(),
                sequence: Vec::new(),
            });
            continue;
        }
        let Some(current) = records.last_mut() else {
            return Err(QmsaError::Parse(format!(
                "line {}: sequence data before the first '>' header",
                lineno + 1
            )));
        };
        for c in line.chars().filter(|c| !c.is_whitespace()) {
            current.sequence.push(Nucleotide::from_char(c)?);
        }
    }
    Ok(records)
}

pub fn parse_fasta(text: &str) -> Result<SequenceSet> {
    let records = parse_records(text)?;
    SequenceSet::from_nucleotides(records.into_iter().map(|r| r.sequence).collect())
}

pub fn read_fasta(path: impl AsRef<Path>) -> Result<SequenceSet> {
    parse_fasta(&std::fs::read_to_string(path)?)
}
