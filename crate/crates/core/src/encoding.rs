//! Sequence sets, alignment matrices and the one-hot column encoding.
//!
//! A binary variable `x[s][n][i]` is 1 iff letter `n` of string `s` sits in
//! column `i` of the alignment. Variables are laid out string-major, then by
//! letter, then by column, so the displayed bitstring `100110` for the pair
//! `{AG, G}` reads as flat indices `0..6` from left to right:
//!
//! ```text
//! AG   x[0][0][0] x[0][0][1] x[0][1][0] x[0][1][1] x[1][0][0] x[1][0][1]
//! G_        1          0          0          1          1          0
//! ```
//!
//! All indices (strings, letters, columns) are zero-based. When a bitstring is
//! used as a computational-basis index, flat index 0 is the most significant
//! bit, so `100101` is basis state 37.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::combinatorics;
use crate::error::{QmsaError, Result};

/// Printable gap symbol.
pub const GAP: char = '_';

/// Largest number of feasible bitstrings [`enumerate_feasible`] will produce
/// unless a different cap is passed.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Nucleotide {
    A,
    C,
    G,
    T,
}

impl Nucleotide {
    pub const ALL: [Nucleotide; 4] = [Nucleotide::A, Nucleotide::C, Nucleotide::G, Nucleotide::T];

    /// Case-insensitive.
    pub fn from_char(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'A' => Ok(Nucleotide::A),
            'C' => Ok(Nucleotide::C),
            'G' => Ok(Nucleotide::G),
            'T' => Ok(Nucleotide::T),
            _ => Err(QmsaError::InvalidSymbol(c)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Nucleotide::A => 'A',
            Nucleotide::C => 'C',
            Nucleotide::G => 'G',
            Nucleotide::T => 'T',
        }
    }
}

impl fmt::Display for Nucleotide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// One alignment cell: a letter or a gap (`None`).
pub type Cell = Option<Nucleotide>;

pub fn parse_cell(c: char) -> Result<Cell> {
    if c == GAP || c == '-' {
        Ok(None)
    } else {
        Nucleotide::from_char(c).map(Some)
    }
}

pub fn cell_char(cell: Cell) -> char {
    cell.map_or(GAP, Nucleotide::as_char)
}

/// The input strings of an alignment instance.
///
/// Requires at least two non-empty strings and exactly one string of maximal
/// length (the reference string, which never receives gaps).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSet {
    strings: Vec<Vec<Nucleotide>>,
    reference: usize,
}

impl SequenceSet {
    pub fn new<S: AsRef<str>>(strings: &[S]) -> Result<Self> {
        let parsed = strings
            .iter()
            .map(|s| {
                s.as_ref()
                    .trim()
                    .chars()
                    .map(Nucleotide::from_char)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_nucleotides(parsed)
    }

    /// Parses the inline form `"AG,G"`.
    pub fn from_inline(list: &str) -> Result<Self> {
        let parts: Vec<&str> = list.split(',').map(str::trim).collect();
        Self::new(&parts)
    }

    pub fn from_nucleotides(strings: Vec<Vec<Nucleotide>>) -> Result<Self> {
        let lengths: Vec<usize> = strings.iter().map(Vec::len).collect();
        let reference = validate_lengths(&lengths)?;
        Ok(SequenceSet { strings, reference })
    }

    /// Number of strings `N`.
    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    /// Length `L` of the unique longest string, i.e. the number of columns.
    pub fn max_len(&self) -> usize {
        self.strings[self.reference].len()
    }

    pub fn reference_index(&self) -> usize {
        self.reference
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.strings.iter().map(Vec::len).collect()
    }

    pub fn string(&self, s: usize) -> &[Nucleotide] {
        &self.strings[s]
    }

    pub fn strings(&self) -> &[Vec<Nucleotide>] {
        &self.strings
    }

    /// Number of gaps string `s` receives, `L - l_s`.
    pub fn gaps(&self, s: usize) -> usize {
        self.max_len() - self.strings[s].len()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.strings
            .iter()
            .map(|s| s.iter().map(|c| c.as_char()).collect())
            .collect()
    }

    /// Total qubit count `L * sum(l_s)`.
    pub fn qubit_count(&self) -> usize {
        self.max_len() * self.strings.iter().map(Vec::len).sum::<usize>()
    }
}

impl fmt::Display for SequenceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_strings().join(","))
    }
}

/// Checks the shape rules shared by real and synthetic instances and returns
/// the index of the reference string.
pub fn validate_lengths(lengths: &[usize]) -> Result<usize> {
    if lengths.len() < 2 {
        return Err(QmsaError::InvalidSequences(format!(
            "need at least 2 strings, got {}",
            lengths.len()
        )));
    }
    if let Some(s) = lengths.iter().position(|&l| l == 0) {
        return Err(QmsaError::InvalidSequences(format!("string {s} is empty")));
    }
    let max = *lengths.iter().max().expect("non-empty");
    let longest: Vec<usize> = (0..lengths.len()).filter(|&s| lengths[s] == max).collect();
    if longest.len() != 1 {
        return Err(QmsaError::InvalidSequences(format!(
            "exactly one string must have maximal length {max}, strings {longest:?} all do"
        )));
    }
    Ok(longest[0])
}

/// Maps `(string, letter, column)` triples to flat qubit indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QubitIndexMap {
    columns: usize,
    lengths: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
}

impl QubitIndexMap {
    pub fn new(seqs: &SequenceSet) -> Self {
        Self::from_lengths(&seqs.lengths())
    }

    /// Builds the map for string lengths alone; the longest length is the
    /// column count. Shape validation is the caller's job.
    pub fn from_lengths(lengths: &[usize]) -> Self {
        let columns = lengths.iter().copied().max().unwrap_or(0);
        let mut offsets = Vec::with_capacity(lengths.len());
        let mut total = 0;
        for &l in lengths {
            offsets.push(total);
            total += l * columns;
        }
        QubitIndexMap {
            columns,
            lengths: lengths.to_vec(),
            offsets,
            total,
        }
    }

    /// Total number of qubits `n`.
    pub fn total_qubits(&self) -> usize {
        self.total
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn num_strings(&self) -> usize {
        self.lengths.len()
    }

    pub fn string_len(&self, s: usize) -> usize {
        self.lengths[s]
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Flat index of `x[s][letter][column]`.
    #[inline]
    pub fn index(&self, s: usize, letter: usize, column: usize) -> usize {
        debug_assert!(letter < self.lengths[s] && column < self.columns);
        self.offsets[s] + letter * self.columns + column
    }

    pub fn try_index(&self, s: usize, letter: usize, column: usize) -> Option<usize> {
        (s < self.lengths.len() && letter < self.lengths[s] && column < self.columns)
            .then(|| self.index(s, letter, column))
    }

    /// Inverse of [`index`](Self::index).
    pub fn triple(&self, k: usize) -> Option<(usize, usize, usize)> {
        if k >= self.total {
            return None;
        }
        let s = self.offsets.partition_point(|&o| o <= k) - 1;
        let local = k - self.offsets[s];
        Some((s, local / self.columns, local % self.columns))
    }
}

pub fn build_index_map(seqs: &SequenceSet) -> QubitIndexMap {
    QubitIndexMap::new(seqs)
}

/// An ordered assignment of binary values to the flat qubit indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn zeros(n: usize) -> Self {
        Bitstring(vec![false; n])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Bitstring(bits)
    }

    /// Basis state `index` on `n` qubits; flat index 0 is the most
    /// significant bit.
    pub fn from_index(index: usize, n: usize) -> Self {
        Bitstring((0..n).map(|j| basis_bit(index, j, n)).collect())
    }

    /// Basis index of this bitstring, or `None` if it does not fit in a
    /// `usize`.
    pub fn to_index(&self) -> Option<usize> {
        if self.0.len() >= usize::BITS as usize {
            return None;
        }
        Some(self.0.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> bool {
        self.0[k]
    }

    pub fn set(&mut self, k: usize, value: bool) {
        self.0[k] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Spin values `s_k = 1 - 2 x_k`.
    pub fn to_spins(&self) -> Vec<i8> {
        self.0.iter().map(|&b| if b { -1 } else { 1 }).collect()
    }
}

/// Value of qubit `j` in basis state `index` of an `n`-qubit register.
#[inline]
pub fn basis_bit(index: usize, j: usize, n: usize) -> bool {
    (index >> (n - 1 - j)) & 1 == 1
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = QmsaError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(QmsaError::Parse(format!(
                    "bitstring may only contain 0 and 1, found {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bitstring)
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An `N x L` grid of letters and gaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentMatrix {
    rows: Vec<Vec<Cell>>,
}

impl AlignmentMatrix {
    /// Builds a rectangular matrix. Use [`check_against`](Self::check_against)
    /// to verify it is an alignment of a particular sequence set.
    pub fn from_rows(rows: Vec<Vec<Cell>>) -> Result<Self> {
        if let Some(first) = rows.first() {
            let width = first.len();
            if let Some(bad) = rows.iter().position(|r| r.len() != width) {
                return Err(QmsaError::InvalidAlignment(format!(
                    "row {bad} has {} columns, row 0 has {width}",
                    rows[bad].len()
                )));
            }
        }
        Ok(AlignmentMatrix { rows })
    }

    /// Parses rows such as `["AG", "_G"]`.
    pub fn parse<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.as_ref().chars().map(parse_cell).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }

    /// Every string placed at the leftmost columns with trailing gaps.
    pub fn left_justified(seqs: &SequenceSet) -> Self {
        let width = seqs.max_len();
        let rows = seqs
            .strings()
            .iter()
            .map(|s| (0..width).map(|i| s.get(i).copied()).collect())
            .collect();
        AlignmentMatrix { rows }
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_columns(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn cell(&self, row: usize, column: usize) -> Cell {
        self.rows[row][column]
    }

    /// Columns occupied by the letters of `row`, in order.
    pub fn letter_columns(&self, row: usize) -> Vec<usize> {
        self.rows[row]
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|_| i))
            .collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&c| cell_char(c)).collect())
            .collect()
    }

    /// Verifies that row `s` holds exactly the letters of string `s`, in order,
    /// in a grid `L` columns wide.
    pub fn check_against(&self, seqs: &SequenceSet) -> Result<()> {
        if self.rows.len() != seqs.len() {
            return Err(QmsaError::InvalidAlignment(format!(
                "{} rows for {} strings",
                self.rows.len(),
                seqs.len()
            )));
        }
        if self.num_columns() != seqs.max_len() {
            return Err(QmsaError::InvalidAlignment(format!(
                "{} columns, expected {}",
                self.num_columns(),
                seqs.max_len()
            )));
        }
        for (s, row) in self.rows.iter().enumerate() {
            let letters: Vec<Nucleotide> = row.iter().flatten().copied().collect();
            if letters != seqs.string(s) {
                return Err(QmsaError::InvalidAlignment(format!(
                    "row {s} does not spell string {s}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for AlignmentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, row) in self.to_strings().iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            f.write_str(row)?;
        }
        Ok(())
    }
}

/// Sets the bit of every letter at its column.
pub fn encode_alignment(a: &AlignmentMatrix, map: &QubitIndexMap) -> Result<Bitstring> {
    if a.num_rows() != map.num_strings() {
        return Err(QmsaError::mismatch(map.num_strings(), a.num_rows()));
    }
    if a.num_columns() != map.columns() {
        return Err(QmsaError::mismatch(map.columns(), a.num_columns()));
    }
    let mut bits = Bitstring::zeros(map.total_qubits());
    for s in 0..a.num_rows() {
        let columns = a.letter_columns(s);
        if columns.len() != map.string_len(s) {
            return Err(QmsaError::InvalidAlignment(format!(
                "row {s} has {} letters, expected {}",
                columns.len(),
                map.string_len(s)
            )));
        }
        for (letter, column) in columns.into_iter().enumerate() {
            bits.set(map.index(s, letter, column), true);
        }
    }
    Ok(bits)
}

/// Which hard constraint a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintKind {
    /// Each letter occupies exactly one column.
    ExactlyOneColumn = 1,
    /// Each row-column cell holds at most one letter.
    AtMostOneLetter = 2,
    /// Letters keep their original order.
    OrderPreserved = 3,
}

/// One violated constraint instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum Violation {
    /// `columns` lists where the letter was placed (empty or more than one).
    ExactlyOneColumn {
        string: usize,
        letter: usize,
        columns: Vec<usize>,
    },
    AtMostOneLetter {
        string: usize,
        column: usize,
        letters: Vec<usize>,
    },
    /// `later_letter` sits in `later_letter_column`, strictly left of
    /// `earlier_letter_column`.
    OrderPreserved {
        string: usize,
        earlier_letter: usize,
        later_letter: usize,
        later_letter_column: usize,
        earlier_letter_column: usize,
    },
}

impl Violation {
    pub fn kind(&self) -> ConstraintKind {
        match self {
            Violation::ExactlyOneColumn { .. } => ConstraintKind::ExactlyOneColumn,
            Violation::AtMostOneLetter { .. } => ConstraintKind::AtMostOneLetter,
            Violation::OrderPreserved { .. } => ConstraintKind::OrderPreserved,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfeasibleReport {
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    Alignment(AlignmentMatrix),
    Infeasible(InfeasibleReport),
}

impl Decoded {
    pub fn alignment(&self) -> Option<&AlignmentMatrix> {
        match self {
            Decoded::Alignment(a) => Some(a),
            Decoded::Infeasible(_) => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Decoded::Alignment(_))
    }
}

fn check_len(b: &Bitstring, map: &QubitIndexMap) -> Result<()> {
    if b.len() != map.total_qubits() {
        return Err(QmsaError::mismatch(map.total_qubits(), b.len()));
    }
    Ok(())
}

/// Lists every violated constraint instance of `b`.
pub fn violations(b: &Bitstring, map: &QubitIndexMap) -> Result<Vec<Violation>> {
    check_len(b, map)?;
    let columns = map.columns();
    let mut out = Vec::new();
    for s in 0..map.num_strings() {
        let len = map.string_len(s);
        let placed = |letter: usize, column: usize| b.get(map.index(s, letter, column));
        for letter in 0..len {
            let cols: Vec<usize> = (0..columns).filter(|&i| placed(letter, i)).collect();
            if cols.len() != 1 {
                out.push(Violation::ExactlyOneColumn {
                    string: s,
                    letter,
                    columns: cols,
                });
            }
        }
        for column in 0..columns {
            let letters: Vec<usize> = (0..len).filter(|&n| placed(n, column)).collect();
            if letters.len() > 1 {
                out.push(Violation::AtMostOneLetter {
                    string: s,
                    column,
                    letters,
                });
            }
        }
        for earlier in 0..len {
            for later in earlier + 1..len {
                for i in 0..columns {
                    if !placed(later, i) {
                        continue;
                    }
                    for i2 in i + 1..columns {
                        if placed(earlier, i2) {
                            out.push(Violation::OrderPreserved {
                                string: s,
                                earlier_letter: earlier,
                                later_letter: later,
                                later_letter_column: i,
                                earlier_letter_column: i2,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Feasibility through an arbitrary bit accessor. With every letter in
/// exactly one column, the other two constraints together say the letter
/// columns of each row strictly increase.
pub(crate) fn feasible_with(map: &QubitIndexMap, bit: impl Fn(usize) -> bool) -> bool {
    let columns = map.columns();
    for s in 0..map.num_strings() {
        let mut previous: Option<usize> = None;
        for letter in 0..map.string_len(s) {
            let base = map.index(s, letter, 0);
            let mut found = None;
            for i in 0..columns {
                if bit(base + i) {
                    if found.is_some() {
                        return false;
                    }
                    found = Some(i);
                }
            }
            let Some(column) = found else {
                return false;
            };
            if previous.is_some_and(|p| p >= column) {
                return false;
            }
            previous = Some(column);
        }
    }
    true
}

pub fn is_feasible(b: &Bitstring, seqs: &SequenceSet) -> Result<bool> {
    let map = QubitIndexMap::new(seqs);
    check_len(b, &map)?;
    Ok(feasible_with(&map, |k| b.get(k)))
}

/// Feasibility of basis state `index` of the register described by `map`.
pub fn is_feasible_index(index: usize, map: &QubitIndexMap) -> bool {
    let n = map.total_qubits();
    feasible_with(map, |k| basis_bit(index, k, n))
}

pub fn decode_bitstring(b: &Bitstring, seqs: &SequenceSet) -> Result<Decoded> {
    let map = QubitIndexMap::new(seqs);
    let found = violations(b, &map)?;
    if !found.is_empty() {
        return Ok(Decoded::Infeasible(InfeasibleReport { violations: found }));
    }
    let width = map.columns();
    let rows = (0..seqs.len())
        .map(|s| {
            let mut row = vec![None; width];
            for (letter, &nt) in seqs.string(s).iter().enumerate() {
                let column = (0..width)
                    .find(|&i| b.get(map.index(s, letter, i)))
                    .expect("feasible bitstrings place every letter");
                row[column] = Some(nt);
            }
            row
        })
        .collect();
    Ok(Decoded::Alignment(AlignmentMatrix { rows }))
}

/// Every feasible bitstring, in ascending basis order.
pub fn enumerate_feasible(seqs: &SequenceSet) -> Result<Vec<Bitstring>> {
    enumerate_feasible_capped(seqs, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_feasible_capped(seqs: &SequenceSet, cap: u64) -> Result<Vec<Bitstring>> {
    let count = combinatorics::feasible_count(seqs);
    if count > cap.into() {
        return Err(QmsaError::CapExceeded {
            what: "feasible alignment count",
            requested: count.to_string(),
            cap: cap.to_string(),
        });
    }
    let map = QubitIndexMap::new(seqs);
    let width = map.columns();
    let per_string: Vec<Vec<Vec<usize>>> = (0..seqs.len())
        .map(|s| increasing_placements(seqs.string(s).len(), width))
        .collect();

    let mut out = Vec::new();
    let mut choice = vec![0usize; seqs.len()];
    loop {
        let mut bits = Bitstring::zeros(map.total_qubits());
        for (s, &c) in choice.iter().enumerate() {
            for (letter, &column) in per_string[s][c].iter().enumerate() {
                bits.set(map.index(s, letter, column), true);
            }
        }
        out.push(bits);

        // odometer over the per-string placements
        let mut s = seqs.len();
        loop {
            if s == 0 {
                out.sort();
                return Ok(out);
            }
            s -= 1;
            choice[s] += 1;
            if choice[s] < per_string[s].len() {
                break;
            }
            choice[s] = 0;
        }
    }
}

/// All strictly increasing column tuples of length `letters` in `0..width`.
fn increasing_placements(letters: usize, width: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, left: usize, width: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=width - left {
            cur.push(i);
            go(i + 1, left - 1, width, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, letters, width, &mut Vec::with_capacity(letters), &mut out);
    out
}
