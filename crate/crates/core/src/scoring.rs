//! Sum-of-pairs scoring and the pairwise letter weight tensor.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::encoding::{parse_cell, AlignmentMatrix, Cell, Nucleotide, SequenceSet};
use crate::error::{QmsaError, Result};

/// Native SP similarity: -1 for a match, +1 for a mismatch, 0 when either
/// side is a gap.
pub fn sim_sp(a: Cell, b: Cell) -> i32 {
    match (a, b) {
        (Some(x), Some(y)) if x == y => -1,
        (Some(_), Some(_)) => 1,
        _ => 0,
    }
}

/// [`sim_sp`] on printable symbols (`_` or `-` for a gap).
pub fn sim_sp_chars(a: char, b: char) -> Result<i32> {
    Ok(sim_sp(parse_cell(a)?, parse_cell(b)?))
}

/// A symmetric score for a pair of alignment cells. Lower is better.
pub trait Similarity: Send + Sync {
    fn score(&self, a: Cell, b: Cell) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NativeSp;

impl Similarity for NativeSp {
    fn score(&self, a: Cell, b: Cell) -> f64 {
        sim_sp(a, b) as f64
    }
}

/// A user-supplied table, loaded from JSON objects such as
/// `{"AA": -2, "AC": 1, ..., "A_": 0.5}`.
///
/// Every unordered letter pair must be present (either order); pairs
/// involving a gap default to 0. Gap scores only affect [`sp_score_with`],
/// never the weight tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixScoring {
    letters: [[f64; 4]; 4],
    gap: [f64; 5],
}

impl MatrixScoring {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, f64> = serde_json::from_str(text)?;
        let mut letters = [[None::<f64>; 4]; 4];
        let mut gap = [0.0; 5];
        for (key, &value) in &raw {
            let chars: Vec<char> = key.chars().collect();
            if chars.len() != 2 {
                return Err(QmsaError::Parse(format!(
                    "scoring key {key:?} must be two symbols"
                )));
            }
            if !value.is_finite() {
                return Err(QmsaError::Parse(format!("score for {key:?} is not finite")));
            }
            match (parse_cell(chars[0])?, parse_cell(chars[1])?) {
                (Some(a), Some(b)) => {
                    for (x, y) in [(a, b), (b, a)] {
                        let slot = &mut letters[x as usize][y as usize];
                        if slot.is_some_and(|old| old != value) {
                            return Err(QmsaError::Parse(format!(
                                "conflicting scores for {x}{y}"
                            )));
                        }
                        *slot = Some(value);
                    }
                }
                (Some(a), None) | (None, Some(a)) => gap[a as usize] = value,
                (None, None) => gap[4] = value,
            }
        }
        let mut table = [[0.0; 4]; 4];
        for a in Nucleotide::ALL {
            for b in Nucleotide::ALL {
                table[a as usize][b as usize] = letters[a as usize][b as usize]
                    .ok_or_else(|| QmsaError::Parse(format!("scoring table lacks pair {a}{b}")))?;
            }
        }
        Ok(MatrixScoring {
            letters: table,
            gap,
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

impl Similarity for MatrixScoring {
    fn score(&self, a: Cell, b: Cell) -> f64 {
        match (a, b) {
            (Some(x), Some(y)) => self.letters[x as usize][y as usize],
            (Some(x), None) | (None, Some(x)) => self.gap[x as usize],
            (None, None) => self.gap[4],
        }
    }
}

/// Scores `w[s][n][t][m]` for aligning letter `n` of string `s` with letter
/// `m` of string `t`, stored only for `s < t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightTensor {
    lengths: Vec<usize>,
    /// One row-major `l_s x l_t` block per pair `s < t`, pairs in
    /// lexicographic order.
    blocks: Vec<Vec<f64>>,
}

impl WeightTensor {
    fn pair_slot(&self, s: usize, t: usize) -> usize {
        let n = self.lengths.len();
        debug_assert!(s < t && t < n);
        // pairs (s, t) with s < t enumerated row by row
        s * (2 * n - s - 1) / 2 + (t - s - 1)
    }

    pub fn num_strings(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Weight for letter `n` of `s` against letter `m` of `t`. Requires `s < t`.
    pub fn get(&self, s: usize, n: usize, t: usize, m: usize) -> f64 {
        assert!(s < t, "weights are stored for s < t only");
        self.blocks[self.pair_slot(s, t)][n * self.lengths[t] + m]
    }

    /// The `l_s x l_t` block for the pair `s < t`, row-major.
    pub fn block(&self, s: usize, t: usize) -> &[f64] {
        &self.blocks[self.pair_slot(s, t)]
    }

    /// Number of stored entries.
    pub fn num_entries(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

pub fn build_weight_tensor(seqs: &SequenceSet) -> WeightTensor {
    build_weight_tensor_with(seqs, &NativeSp)
}

pub fn build_weight_tensor_with(seqs: &SequenceSet, scheme: &dyn Similarity) -> WeightTensor {
    let count = seqs.len();
    let mut blocks = Vec::with_capacity(count * (count - 1) / 2);
    for s in 0..count {
        for t in s + 1..count {
            let mut block = Vec::with_capacity(seqs.string(s).len() * seqs.string(t).len());
            for &a in seqs.string(s) {
                for &b in seqs.string(t) {
                    block.push(scheme.score(Some(a), Some(b)));
                }
            }
            blocks.push(block);
        }
    }
    WeightTensor {
        lengths: seqs.lengths(),
        blocks,
    }
}

/// SP score of an alignment under the native similarity.
pub fn sp_score(a: &AlignmentMatrix) -> i64 {
    let mut total = 0i64;
    for i in 0..a.num_columns() {
        for j in 0..a.num_rows() {
            for k in j + 1..a.num_rows() {
                total += sim_sp(a.cell(j, i), a.cell(k, i)) as i64;
            }
        }
    }
    total
}

pub fn sp_score_with(a: &AlignmentMatrix, scheme: &dyn Similarity) -> f64 {
    let mut total = 0.0;
    for i in 0..a.num_columns() {
        for j in 0..a.num_rows() {
            for k in j + 1..a.num_rows() {
                total += scheme.score(a.cell(j, i), a.cell(k, i));
            }
        }
    }
    total
}
