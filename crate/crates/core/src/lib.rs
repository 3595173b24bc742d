//! Multiple sequence alignment as a QUBO, solved with a simulated QAOA loop.
//!
//! The pipeline is
//! `SequenceSet -> WeightTensor -> QuboModel -> energy diagonal -> run_qaoa`,
//! with brute-force oracles and exact combinatorics alongside for checking.

pub mod combinatorics;
pub mod driver;
pub mod encoding;
pub mod error;
pub mod fasta;
pub mod hamiltonian;
pub mod oracle;
pub mod rng;
pub mod scoring;
pub mod simulator;

pub use combinatorics::{count_report, count_report_for_lengths, feasible_count, CountReport};
pub use driver::{
    optimize, p_sweep, p_sweep_with, run_qaoa, run_qaoa_with, sweep_series, ObjectiveMode, OptimizerConfig,
    QaoaResult, SweepPoint,
};
pub use encoding::{
    build_index_map, decode_bitstring, encode_alignment, enumerate_feasible, is_feasible,
    AlignmentMatrix, Bitstring, Decoded, Nucleotide, QubitIndexMap, SequenceSet, Violation,
};
pub use error::{QmsaError, Result};
pub use fasta::{parse_fasta, read_fasta};
pub use hamiltonian::{
    build_cost_qubo, build_energy_diagonal, qubo_to_ising, IsingModel, ModelJson, PenaltyConfig,
    QuboModel,
};
pub use oracle::{brute_force_min, cross_validate, direct_cost, oracle_report, OracleReport};
pub use scoring::{build_weight_tensor, sp_score, MatrixScoring, Similarity, WeightTensor};
pub use simulator::{trial_state, QaoaParams, SampleHistogram, StateVector};
