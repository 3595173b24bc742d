//! The soft-constrained alignment cost as a QUBO, its Ising form, and the
//! diagonal of the problem Hamiltonian.
//!
//! The cost of a bitstring `x` is
//!
//! ```text
//! C(x) = sum_{s<t} sum_{n,m} sum_i w[s][n][t][m] x[s][n][i] x[t][m][i]
//!      + p1 sum_{s,n} (sum_i x[s][n][i] - 1)^2
//!      + p2 sum_{s,i} sum_{n<m} x[s][n][i] x[s][m][i]
//!      + p3 sum_s sum_{n<m} sum_{i<j} x[s][m][i] x[s][n][j]
//! ```
//!
//! The three penalty sums vanish exactly on feasible alignments, where the
//! first sum is the SP score.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::{Bitstring, QubitIndexMap, SequenceSet};
use crate::error::{QmsaError, Result};
use crate::scoring::WeightTensor;

/// Largest register that gets a dense energy diagonal or state vector.
pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Entries per independently computed slice of the energy diagonal. Fixed so
/// the floating-point result does not depend on the thread count.
const DIAGONAL_CHUNK: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyConfig {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig {
            p1: 10.0,
            p2: 1.0,
            p3: 1.0,
        }
    }
}

impl PenaltyConfig {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<Self> {
        let pen = PenaltyConfig { p1, p2, p3 };
        pen.validate()?;
        Ok(pen)
    }

    /// Rejects negative or non-finite weights and warns about zero ones.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p1", self.p1), ("p2", self.p2), ("p3", self.p3)] {
            if !v.is_finite() || v < 0.0 {
                return Err(QmsaError::Domain(format!(
                    "penalty {name} must be finite and non-negative, got {v}"
                )));
            }
            if v == 0.0 {
                log::warn!("penalty {name} is 0; its constraint family is disabled");
            }
        }
        Ok(())
    }

    pub fn min(&self) -> f64 {
        self.p1.min(self.p2).min(self.p3)
    }
}

/// `C(x) = x^T Q x + h^T x + d` over `x in {0,1}^n`.
///
/// `Q` is kept strictly upper-triangular: a coupling added at `(j, i)` with
/// `j > i` lands on `(i, j)`, and a diagonal weight is folded into `h` since
/// `x^2 = x` on binaries.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    n: usize,
    q: Vec<f64>,
    h: Vec<f64>,
    d: f64,
}

impl QuboModel {
    pub fn zeros(n: usize) -> Self {
        QuboModel {
            n,
            q: vec![0.0; n * n],
            h: vec![0.0; n],
            d: 0.0,
        }
    }

    /// Canonicalizes an arbitrary row-major `n x n` matrix.
    pub fn from_dense(n: usize, q: &[f64], h: &[f64], d: f64) -> Result<Self> {
        if q.len() != n * n {
            return Err(QmsaError::mismatch(n * n, q.len()));
        }
        if h.len() != n {
            return Err(QmsaError::mismatch(n, h.len()));
        }
        let mut m = QuboModel::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.add_quadratic(i, j, q[i * n + j]);
            }
            m.h[i] += h[i];
        }
        m.d = d;
        Ok(m)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, value: f64) {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.h[i] += value,
            std::cmp::Ordering::Less => self.q[i * self.n + j] += value,
            std::cmp::Ordering::Greater => self.q[j * self.n + i] += value,
        }
    }

    pub fn add_linear(&mut self, i: usize, value: f64) {
        self.h[i] += value;
    }

    pub fn add_constant(&mut self, value: f64) {
        self.d += value;
    }

    /// Stored matrix entry `Q[i][j]` (zero on and below the diagonal).
    pub fn quadratic(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n + j]
    }

    /// Coupling between `i` and `j` regardless of order.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        if i < j {
            self.quadratic(i, j)
        } else {
            self.quadratic(j, i)
        }
    }

    pub fn linear(&self) -> &[f64] {
        &self.h
    }

    pub fn constant(&self) -> f64 {
        self.d
    }

    /// Non-zero couplings as `(i, j, value)` with `i < j`, row-major.
    pub fn quadratic_terms(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let v = self.q[i * self.n + j];
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    pub fn evaluate(&self, x: &Bitstring) -> Result<f64> {
        if x.len() != self.n {
            return Err(QmsaError::mismatch(self.n, x.len()));
        }
        Ok(self.evaluate_with(|k| x.get(k)))
    }

    /// Energy of basis state `index`; flat index 0 is the most significant bit.
    pub fn evaluate_index(&self, index: usize) -> f64 {
        let n = self.n;
        self.evaluate_with(|k| crate::encoding::basis_bit(index, k, n))
    }

    fn evaluate_with(&self, bit: impl Fn(usize) -> bool) -> f64 {
        let ones: Vec<usize> = (0..self.n).filter(|&k| bit(k)).collect();
        let mut total = self.d;
        for (a, &i) in ones.iter().enumerate() {
            total += self.h[i];
            let row = &self.q[i * self.n..(i + 1) * self.n];
            for &j in &ones[a + 1..] {
                total += row[j];
            }
        }
        total
    }

    pub fn to_json(&self) -> ModelJson {
        ModelJson {
            n: self.n,
            quadratic: self.quadratic_terms(),
            linear: self.h.clone(),
            constant: self.d,
        }
    }

    pub fn from_json(json: &ModelJson) -> Result<Self> {
        json.check()?;
        let mut m = QuboModel::zeros(json.n);
        for &(i, j, v) in &json.quadratic {
            m.add_quadratic(i, j, v);
        }
        m.h.copy_from_slice(&json.linear);
        m.d = json.constant;
        Ok(m)
    }
}

/// `C(s) = s^T J s + b^T s + c` over `s in {-1,+1}^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    n: usize,
    j: Vec<f64>,
    b: Vec<f64>,
    c: f64,
}

impl IsingModel {
    pub fn num_spins(&self) -> usize {
        self.n
    }

    pub fn coupling(&self, i: usize, k: usize) -> f64 {
        self.j[i * self.n + k]
    }

    pub fn fields(&self) -> &[f64] {
        &self.b
    }

    pub fn constant(&self) -> f64 {
        self.c
    }

    pub fn evaluate(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.n {
            return Err(QmsaError::mismatch(self.n, spins.len()));
        }
        if let Some(bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(QmsaError::Domain(format!("spin value {bad} is not +1 or -1")));
        }
        let mut total = self.c;
        for i in 0..self.n {
            let si = spins[i] as f64;
            total += self.b[i] * si;
            let row = &self.j[i * self.n..(i + 1) * self.n];
            for (k, &jik) in row.iter().enumerate() {
                if jik != 0.0 {
                    total += jik * si * spins[k] as f64;
                }
            }
        }
        Ok(total)
    }

    pub fn to_json(&self) -> ModelJson {
        let mut quadratic = Vec::new();
        for i in 0..self.n {
            for k in 0..self.n {
                let v = self.j[i * self.n + k];
                if v != 0.0 {
                    quadratic.push((i, k, v));
                }
            }
        }
        ModelJson {
            n: self.n,
            quadratic,
            linear: self.b.clone(),
            constant: self.c,
        }
    }

    pub fn from_json(json: &ModelJson) -> Result<Self> {
        json.check()?;
        let n = json.n;
        let mut j = vec![0.0; n * n];
        for &(a, b, v) in &json.quadratic {
            j[a * n + b] += v;
        }
        Ok(IsingModel {
            n,
            j,
            b: json.linear.clone(),
            c: json.constant,
        })
    }
}

/// Exchange format shared by QUBO and Ising models:
/// `{"n": 2, "quadratic": [[0, 1, 1.0]], "linear": [0.0, 0.0], "constant": 0.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelJson {
    pub n: usize,
    pub quadratic: Vec<(usize, usize, f64)>,
    pub linear: Vec<f64>,
    pub constant: f64,
}

impl ModelJson {
    fn check(&self) -> Result<()> {
        if self.linear.len() != self.n {
            return Err(QmsaError::mismatch(self.n, self.linear.len()));
        }
        if let Some(&(i, j, _)) = self
            .quadratic
            .iter()
            .find(|&&(i, j, _)| i >= self.n || j >= self.n)
        {
            return Err(QmsaError::Parse(format!(
                "quadratic term ({i}, {j}) is out of range for n = {}",
                self.n
            )));
        }
        Ok(())
    }
}

pub fn build_cost_qubo(seqs: &SequenceSet, w: &WeightTensor, pen: &PenaltyConfig) -> QuboModel {
    let map = QubitIndexMap::new(seqs);
    build_cost_qubo_on(&map, w, pen)
}

/// Cost QUBO on an explicit index map; `w` must describe the same lengths.
pub fn build_cost_qubo_on(map: &QubitIndexMap, w: &WeightTensor, pen: &PenaltyConfig) -> QuboModel {
    assert_eq!(map.lengths(), w.lengths(), "weight tensor and map disagree");
    let columns = map.columns();
    let strings = map.num_strings();
    let mut m = QuboModel::zeros(map.total_qubits());

    for s in 0..strings {
        for t in s + 1..strings {
            for n in 0..map.string_len(s) {
                for k in 0..map.string_len(t) {
                    let weight = w.get(s, n, t, k);
                    if weight == 0.0 {
                        continue;
                    }
                    for i in 0..columns {
                        m.add_quadratic(map.index(s, n, i), map.index(t, k, i), weight);
                    }
                }
            }
        }
    }

    for s in 0..strings {
        let len = map.string_len(s);
        // (sum_i x_i - 1)^2 = -sum_i x_i + 2 sum_{i<j} x_i x_j + 1
        for n in 0..len {
            for i in 0..columns {
                let a = map.index(s, n, i);
                m.add_linear(a, -pen.p1);
                for j in i + 1..columns {
                    m.add_quadratic(a, map.index(s, n, j), 2.0 * pen.p1);
                }
            }
            m.add_constant(pen.p1);
        }
        for i in 0..columns {
            for n in 0..len {
                for k in n + 1..len {
                    m.add_quadratic(map.index(s, n, i), map.index(s, k, i), pen.p2);
                }
            }
        }
        for n in 0..len {
            for k in n + 1..len {
                for i in 0..columns {
                    for j in i + 1..columns {
                        m.add_quadratic(map.index(s, k, i), map.index(s, n, j), pen.p3);
                    }
                }
            }
        }
    }
    m
}

pub fn evaluate_qubo(m: &QuboModel, x: &Bitstring) -> Result<f64> {
    m.evaluate(x)
}

pub fn evaluate_ising(m: &IsingModel, spins: &[i8]) -> Result<f64> {
    m.evaluate(spins)
}

/// Substitutes `x = (1 - s) / 2`:
///
/// ```text
/// J = Q / 4
/// b = -(1^T Q^T + 1^T Q + 2 h^T) / 4
/// c = 1^T Q 1 / 4 + 1^T h / 2 + d
/// ```
pub fn qubo_to_ising(m: &QuboModel) -> IsingModel {
    let n = m.n;
    let j: Vec<f64> = m.q.iter().map(|v| v / 4.0).collect();
    let mut b = vec![0.0; n];
    let mut c = m.d;
    for (i, bi) in b.iter_mut().enumerate() {
        let row: f64 = (0..n).map(|k| m.q[i * n + k]).sum();
        let col: f64 = (0..n).map(|k| m.q[k * n + i]).sum();
        *bi = -(row + col + 2.0 * m.h[i]) / 4.0;
        c += row / 4.0 + m.h[i] / 2.0;
    }
    IsingModel { n, j, b, c }
}

pub fn build_energy_diagonal(m: &QuboModel) -> Result<Vec<f64>> {
    build_energy_diagonal_capped(m, DEFAULT_QUBIT_CAP)
}

/// `C(bits(k))` for every basis index `k`.
pub fn build_energy_diagonal_capped(m: &QuboModel, cap: usize) -> Result<Vec<f64>> {
    let n = m.n;
    if n > cap {
        return Err(QmsaError::CapExceeded {
            what: "qubit count",
            requested: n.to_string(),
            cap: cap.to_string(),
        });
    }
    // symmetric couplings indexed by basis bit position
    let mut by_bit = vec![0.0; n * n];
    for a in 0..n {
        for c in 0..n {
            if a != c {
                by_bit[(n - 1 - a) * n + (n - 1 - c)] = m.coupling(a, c);
            }
        }
    }
    let field: Vec<f64> = (0..n).map(|b| m.h[n - 1 - b]).collect();

    let mut diag = vec![0.0; 1usize << n];
    diag.par_chunks_mut(DIAGONAL_CHUNK)
        .enumerate()
        .for_each(|(chunk, out)| {
            let base = chunk * DIAGONAL_CHUNK;
            out[0] = m.evaluate_index(base);
            for offset in 1..out.len() {
                // add the highest set bit of the offset to an earlier entry
                let bit = usize::BITS as usize - 1 - offset.leading_zeros() as usize;
                let prev_offset = offset ^ (1 << bit);
                let prev = base | prev_offset;
                let row = &by_bit[bit * n..(bit + 1) * n];
                let mut delta = field[bit];
                let mut rest = prev;
                while rest != 0 {
                    let other = rest.trailing_zeros() as usize;
                    delta += row[other];
                    rest &= rest - 1;
                }
                out[offset] = out[prev_offset] + delta;
            }
        });
    Ok(diag)
}
