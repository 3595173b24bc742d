//! Fixture instances shared by the benchmarks.

use qmsa_core::{build_cost_qubo, build_weight_tensor, PenaltyConfig, QuboModel, SequenceSet};

/// Small instances keyed by qubit count.
pub const INSTANCES: &[(&str, &str)] = &[("6q", "AG,G"), ("15q", "ACG,AC"), ("20q", "ACGT,A")];

pub fn instance(inline: &str) -> SequenceSet {
    SequenceSet::from_inline(inline).expect("fixture instances are valid")
}

pub fn model(inline: &str) -> QuboModel {
    let seqs = instance(inline);
    build_cost_qubo(&seqs, &build_weight_tensor(&seqs), &PenaltyConfig::default())
}
