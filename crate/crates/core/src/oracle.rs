//! Exhaustive ground truth for desk-scale instances.
//!
//! Nothing here goes through [`QuboModel`](crate::hamiltonian::QuboModel):
//! [`direct_cost`] evaluates the four cost sums straight from the index map
//! and the weight tensor, and [`best_feasible`] scores decoded alignments.
//! Ties are always broken toward the lowest basis index.

use serde::Serialize;

use crate::encoding::{
    decode_bitstring, enumerate_feasible, is_feasible_index, Bitstring, QubitIndexMap, SequenceSet,
};
use crate::error::{QmsaError, Result};
use crate::hamiltonian::{
    build_cost_qubo, build_energy_diagonal, PenaltyConfig, DEFAULT_QUBIT_CAP,
};
use crate::scoring::{build_weight_tensor, sp_score, WeightTensor};

/// The four sums of the cost function, penalties already weighted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub score: f64,
    pub exactly_one: f64,
    pub at_most_one: f64,
    pub order: f64,
}

impl CostBreakdown {
    pub fn penalty(&self) -> f64 {
        self.exactly_one + self.at_most_one + self.order
    }

    pub fn total(&self) -> f64 {
        self.score + self.penalty()
    }
}

/// Evaluates the cost sum by sum for one bitstring.
pub fn direct_cost(
    seqs: &SequenceSet,
    w: &WeightTensor,
    pen: &PenaltyConfig,
    b: &Bitstring,
) -> Result<CostBreakdown> {
    let map = QubitIndexMap::new(seqs);
    if b.len() != map.total_qubits() {
        return Err(QmsaError::mismatch(map.total_qubits(), b.len()));
    }
    let x = |s: usize, n: usize, i: usize| b.get(map.index(s, n, i)) as u8 as f64;
    let strings = seqs.len();
    let columns = seqs.max_len();
    let len = |s: usize| seqs.string(s).len();

    let mut score = 0.0;
    for s in 0..strings {
        for t in s + 1..strings {
            for n in 0..len(s) {
                for m in 0..len(t) {
                    for i in 0..columns {
                        score += w.get(s, n, t, m) * x(s, n, i) * x(t, m, i);
                    }
                }
            }
        }
    }

    let mut exactly_one = 0.0;
    let mut at_most_one = 0.0;
    let mut order = 0.0;
    for s in 0..strings {
        for n in 0..len(s) {
            let placed: f64 = (0..columns).map(|i| x(s, n, i)).sum();
            exactly_one += (placed - 1.0).powi(2);
        }
        for i in 0..columns {
            for n in 0..len(s) {
                for m in n + 1..len(s) {
                    at_most_one += x(s, n, i) * x(s, m, i);
                }
            }
        }
        for n in 0..len(s) {
            for m in n + 1..len(s) {
                for i in 0..columns {
                    for j in i + 1..columns {
                        order += x(s, m, i) * x(s, n, j);
                    }
                }
            }
        }
    }
    Ok(CostBreakdown {
        score,
        exactly_one: pen.p1 * exactly_one,
        at_most_one: pen.p2 * at_most_one,
        order: pen.p3 * order,
    })
}

/// Exact argmin of an energy diagonal; the lowest index wins ties.
pub fn brute_force_min(diag: &[f64]) -> Result<(Bitstring, f64)> {
    brute_force_min_where(diag, |_| true)?
        .ok_or_else(|| QmsaError::Domain("empty energy diagonal".into()))
}

/// Argmin over the indices accepted by `keep`, or `None` if none are.
pub fn brute_force_min_where(
    diag: &[f64],
    keep: impl Fn(usize) -> bool,
) -> Result<Option<(Bitstring, f64)>> {
    let n = register_size(diag.len())?;
    let mut best: Option<(usize, f64)> = None;
    for (k, &e) in diag.iter().enumerate() {
        if keep(k) && best.is_none_or(|(_, b)| e < b) {
            best = Some((k, e));
        }
    }
    Ok(best.map(|(k, e)| (Bitstring::from_index(k, n), e)))
}

fn register_size(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(QmsaError::Domain(format!(
            "energy diagonal of length {dim} is not 2^n"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    if n > DEFAULT_QUBIT_CAP {
        return Err(QmsaError::CapExceeded {
            what: "qubit count",
            requested: n.to_string(),
            cap: DEFAULT_QUBIT_CAP.to_string(),
        });
    }
    Ok(n)
}

/// Feasible alignment with the lowest SP score; the lowest bitstring wins
/// ties.
pub fn best_feasible(seqs: &SequenceSet) -> Result<(Bitstring, i64)> {
    let mut best: Option<(Bitstring, i64)> = None;
    // enumeration is in ascending order, so strict improvement keeps the
    // lowest bitstring among equals
    for b in enumerate_feasible(seqs)? {
        let alignment = decode_bitstring(&b, seqs)?;
        let score = sp_score(alignment.alignment().expect("enumerated states are feasible"));
        if best.as_ref().is_none_or(|(_, s)| score < *s) {
            best = Some((b, score));
        }
    }
    Ok(best.expect("every instance has a feasible alignment"))
}

/// Sufficient (not necessary) condition for the global minimum to be
/// feasible: every penalty weight exceeds the spread of SP scores over the
/// feasible set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PenaltyMargin {
    pub min_penalty: f64,
    pub score_spread: f64,
    pub sufficient: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossValidation {
    pub global_min_bitstring: Bitstring,
    pub global_min_energy: f64,
    pub global_min_feasible: bool,
    pub feasible_min_bitstring: Bitstring,
    pub feasible_min_sp_score: i64,
    /// The global minimum is feasible and scores as well as the best
    /// feasible alignment.
    pub consistent: bool,
    pub penalty_margin: PenaltyMargin,
    pub findings: Vec<String>,
}

/// Compares the Hamiltonian's global minimum with the best feasible
/// alignment. Disagreements are reported as findings.
pub fn cross_validate(seqs: &SequenceSet, pen: &PenaltyConfig) -> Result<CrossValidation> {
    let w = build_weight_tensor(seqs);
    let model = build_cost_qubo(seqs, &w, pen);
    let diag = build_energy_diagonal(&model)?;
    let (global, energy) = brute_force_min(&diag)?;
    let (feasible_min, feasible_score) = best_feasible(seqs)?;

    let map = QubitIndexMap::new(seqs);
    let global_index = global.to_index().expect("register within cap");
    let global_feasible = is_feasible_index(global_index, &map);
    let global_score = if global_feasible {
        decode_bitstring(&global, seqs)?.alignment().map(sp_score)
    } else {
        None
    };

    let scores: Vec<i64> = enumerate_feasible(seqs)?
        .iter()
        .map(|b| {
            decode_bitstring(b, seqs)
                .map(|d| sp_score(d.alignment().expect("feasible")))
        })
        .collect::<Result<_>>()?;
    let spread = (scores.iter().max().unwrap() - scores.iter().min().unwrap()) as f64;
    let margin = PenaltyMargin {
        min_penalty: pen.min(),
        score_spread: spread,
        sufficient: pen.min() > spread,
    };

    let consistent = global_score == Some(feasible_score);
    let mut findings = Vec::new();
    if !global_feasible {
        findings.push(format!(
            "global minimum {global} (energy {energy}) is infeasible; penalties are too small"
        ));
        if margin.sufficient {
            findings.push(
                "penalties exceed the score spread yet the minimum is infeasible".to_owned(),
            );
        }
    } else if !consistent {
        findings.push(format!(
            "global minimum {global} scores {global_score:?}, best feasible {feasible_min} scores {feasible_score}"
        ));
    }
    Ok(CrossValidation {
        global_min_bitstring: global,
        global_min_energy: energy,
        global_min_feasible: global_feasible,
        feasible_min_bitstring: feasible_min,
        feasible_min_sp_score: feasible_score,
        consistent,
        penalty_margin: margin,
        findings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyEntry {
    pub bitstring: Bitstring,
    pub energy: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub global_min_bitstring: Bitstring,
    pub global_min_energy: f64,
    pub feasible_min_bitstring: Bitstring,
    pub feasible_min_sp_score: i64,
    /// The `top_k` lowest energies, ascending, ties by bitstring.
    pub energy_histogram: Vec<EnergyEntry>,
    pub top_k: usize,
    pub cross_validation: CrossValidation,
}

pub fn oracle_report(seqs: &SequenceSet, pen: &PenaltyConfig, top_k: usize) -> Result<OracleReport> {
    let w = build_weight_tensor(seqs);
    let diag = build_energy_diagonal(&build_cost_qubo(seqs, &w, pen))?;
    let n = seqs.qubit_count();
    let map = QubitIndexMap::new(seqs);
    let mut order: Vec<usize> = (0..diag.len()).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
    let energy_histogram = order
        .into_iter()
        .take(top_k)
        .map(|k| EnergyEntry {
            bitstring: Bitstring::from_index(k, n),
            energy: diag[k],
            feasible: is_feasible_index(k, &map),
        })
        .collect();
    let cross = cross_validate(seqs, pen)?;
    Ok(OracleReport {
        global_min_bitstring: cross.global_min_bitstring.clone(),
        global_min_energy: cross.global_min_energy,
        feasible_min_bitstring: cross.feasible_min_bitstring.clone(),
        feasible_min_sp_score: cross.feasible_min_sp_score,
        energy_histogram,
        top_k,
        cross_validation: cross,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    fn toy() -> SequenceSet {
        SequenceSet::from_inline("AG,G").unwrap()
    }

    #[test]
    fn toy_global_minimum() {
        let seqs = toy();
        let model = build_cost_qubo(&seqs, &build_weight_tensor(&seqs), &PenaltyConfig::default());
        let diag = build_energy_diagonal(&model).unwrap();
        assert_eq!(brute_force_min(&diag).unwrap(), (bs("100101"), -1.0));
    }

    #[test]
    fn tie_break_and_unique_minimum() {
        assert_eq!(brute_force_min(&[0.0; 8]).unwrap(), (bs("000"), 0.0));
        let mut diag = vec![1.0; 8];
        diag[5] = -2.0;
        assert_eq!(brute_force_min(&diag).unwrap().0, bs("101"));
        assert!(brute_force_min(&[0.0; 3]).is_err());
    }

    #[test]
    fn direct_cost_on_toy() {
        let seqs = toy();
        let w = build_weight_tensor(&seqs);
        let pen = PenaltyConfig::default();
        let c = direct_cost(&seqs, &w, &pen, &bs("100101")).unwrap();
        assert_eq!((c.score, c.penalty()), (-1.0, 0.0));
        let c = direct_cost(&seqs, &w, &pen, &bs("000000")).unwrap();
        assert_eq!(c.total(), 30.0);
        let c = direct_cost(&seqs, &w, &pen, &bs("011010")).unwrap();
        assert_eq!(c.order, 1.0);
        assert_eq!(c.exactly_one, 0.0);
    }

    #[test]
    fn best_feasible_examples() {
        assert_eq!(best_feasible(&toy()).unwrap(), (bs("100101"), -1));
        let (b, score) = best_feasible(&SequenceSet::from_inline("AC,A").unwrap()).unwrap();
        assert_eq!(score, -1);
        let a = decode_bitstring(&b, &SequenceSet::from_inline("AC,A").unwrap()).unwrap();
        assert_eq!(a.alignment().unwrap().to_strings(), vec!["AC", "A_"]);
        let (_, score) = best_feasible(&SequenceSet::from_inline("ACG,AC").unwrap()).unwrap();
        assert_eq!(score, -2);
    }

    #[test]
    fn cross_validation_on_toy() {
        let report = cross_validate(&toy(), &PenaltyConfig::default()).unwrap();
        assert!(report.consistent);
        assert!(report.findings.is_empty());
        assert_eq!(report.global_min_bitstring, bs("100101"));
        assert_eq!(report.feasible_min_bitstring, bs("100101"));
        assert_eq!(report.penalty_margin.score_spread, 2.0);
        assert!(!report.penalty_margin.sufficient);
    }

    #[test]
    fn generous_penalties_are_consistent() {
        let seqs = SequenceSet::from_inline("AC,A").unwrap();
        let report = cross_validate(&seqs, &PenaltyConfig::new(10.0, 10.0, 10.0).unwrap()).unwrap();
        assert!(report.consistent);
        assert!(report.penalty_margin.sufficient);
    }

    #[test]
    fn tiny_penalties_are_flagged() {
        let report = cross_validate(&toy(), &PenaltyConfig::new(0.1, 0.1, 0.1).unwrap()).unwrap();
        if !report.consistent {
            assert!(!report.findings.is_empty());
        }
        assert!(!report.penalty_margin.sufficient);
    }

    #[test]
    fn report_lists_lowest_energies() {
        let r = oracle_report(&toy(), &PenaltyConfig::default(), 5).unwrap();
        assert_eq!(r.energy_histogram.len(), 5);
        assert_eq!(r.energy_histogram[0].bitstring, bs("100101"));
        assert!(r
            .energy_histogram
            .windows(2)
            .all(|w| w[0].energy <= w[1].energy));
        assert!(r.energy_histogram.iter().all(|e| e.energy >= r.global_min_energy));
    }
}
