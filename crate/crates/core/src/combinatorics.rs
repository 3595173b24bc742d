//! Exact counts of feasible alignments and the feasible-fraction bound.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::encoding::{validate_lengths, SequenceSet};
use crate::error::{QmsaError, Result};

/// `C(n, k)` in exact arithmetic.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc = C(n, i) here, so the division is exact
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `prod_s C(L, L - l_s)`.
pub fn feasible_count(seqs: &SequenceSet) -> BigUint {
    feasible_count_for_lengths(&seqs.lengths())
}

pub fn feasible_count_for_lengths(lengths: &[usize]) -> BigUint {
    let width = lengths.iter().copied().max().unwrap_or(0) as u64;
    lengths
        .iter()
        .map(|&l| binomial(width, width - l as u64))
        .product()
}

/// Natural log of a positive big integer, accurate to f64 precision.
pub fn ln_big(value: &BigUint) -> f64 {
    let bits = value.bits();
    if bits <= 1000 {
        return value.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (value >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn log10_big(value: &BigUint) -> f64 {
    ln_big(value) / std::f64::consts::LN_10
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Natural log of `(1/L!) exp(-[L ln 2 - ln L][L + N - 1])`.
pub fn ln_fraction_upper_bound(strings: usize, columns: usize) -> Result<f64> {
    if strings < 2 || columns < 2 {
        return Err(QmsaError::Domain(format!(
            "the bound needs N >= 2 and L >= 2, got N = {strings}, L = {columns}"
        )));
    }
    let l = columns as f64;
    let rate = std::f64::consts::LN_2 * l - l.ln();
    Ok(-ln_factorial(columns as u64) - rate * (l + strings as f64 - 1.0))
}

pub fn fraction_upper_bound(strings: usize, columns: usize) -> Result<f64> {
    ln_fraction_upper_bound(strings, columns).map(f64::exp)
}

/// `value / 2^exponent` rounded once to f64. Exact whenever the quotient
/// is representable; underflows to 0 for tiny fractions.
fn ratio_to_pow2(value: &BigUint, exponent: u64) -> f64 {
    let bits = value.bits();
    let (mantissa, shift) = if bits > 64 {
        ((value >> (bits - 64)).to_f64().expect("64-bit"), bits - 64)
    } else {
        (value.to_f64().expect("64-bit"), 0)
    };
    let e = shift as i64 - exponent as i64;
    if e < -1074 - 64 {
        return 0.0;
    }
    // split the scaling so intermediate powers stay finite
    let half = e / 2;
    mantissa * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub strings: usize,
    pub columns: usize,
    pub lengths: Vec<usize>,
    pub qubits: usize,
    /// `|S|`, decimal.
    #[serde(serialize_with = "as_decimal")]
    pub feasible_count: BigUint,
    pub log10_feasible_count: f64,
    /// `|H| = 2^n`, decimal.
    #[serde(serialize_with = "as_decimal")]
    pub hilbert_dim: BigUint,
    pub log10_hilbert_dim: f64,
    /// `|S| / |H|`; 0 when it underflows f64, see `log10_fraction`.
    pub fraction: f64,
    pub log10_fraction: f64,
    pub bound: f64,
    pub log10_bound: f64,
    pub fraction_within_bound: bool,
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn count_report(seqs: &SequenceSet) -> CountReport {
    count_report_for_lengths(&seqs.lengths()).expect("sequence sets have a valid shape")
}

/// Report for a synthetic instance given only its string lengths.
pub fn count_report_for_lengths(lengths: &[usize]) -> Result<CountReport> {
    validate_lengths(lengths)?;
    let strings = lengths.len();
    let columns = *lengths.iter().max().expect("validated");
    let qubits = columns * lengths.iter().sum::<usize>();
    let feasible = feasible_count_for_lengths(lengths);
    let hilbert = BigUint::one() << qubits;

    let ln_count = ln_big(&feasible);
    let ln_fraction = ln_count - qubits as f64 * std::f64::consts::LN_2;
    let ln_bound = ln_fraction_upper_bound(strings, columns)?;
    let ln10 = std::f64::consts::LN_10;
    Ok(CountReport {
        strings,
        columns,
        lengths: lengths.to_vec(),
        qubits,
        log10_feasible_count: ln_count / ln10,
        log10_hilbert_dim: qubits as f64 * std::f64::consts::LOG10_2,
        fraction: ratio_to_pow2(&feasible, qubits as u64),
        log10_fraction: ln_fraction / ln10,
        bound: ln_bound.exp(),
        log10_bound: ln_bound / ln10,
        fraction_within_bound: ln_fraction <= ln_bound,
        feasible_count: feasible,
        hilbert_dim: hilbert,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(5, 0), BigUint::one());
        assert_eq!(binomial(5, 5), BigUint::one());
        assert_eq!(binomial(3, 4), BigUint::zero());
        assert_eq!(binomial(50, 7), BigUint::from(99_884_400u64));
        assert_eq!(
            binomial(100, 50).to_string(),
            "100891344545564193334812497256"
        );
    }

    #[test]
    fn binomial_grows_below_half() {
        for l in 2..40u64 {
            for g in 0..l.div_ceil(2) {
                if 2 * (g + 1) <= l {
                    assert!(binomial(l, g) < binomial(l, g + 1), "C({l},{g})");
                }
            }
        }
    }

    #[test]
    fn counts() {
        assert_eq!(
            feasible_count(&SequenceSet::from_inline("AG,G").unwrap()),
            BigUint::from(2u32)
        );
        assert_eq!(
            feasible_count(&SequenceSet::from_inline("ACG,AC").unwrap()),
            BigUint::from(3u32)
        );
        // all strings at full length: C(L, 0)^N
        assert_eq!(feasible_count_for_lengths(&[4, 4, 4]), BigUint::one());
    }

    #[test]
    fn large_instance_count() {
        let mut lengths = vec![50];
        lengths.extend(std::iter::repeat_n(43, 9));
        let count = feasible_count_for_lengths(&lengths);
        assert_eq!(count, binomial(50, 7).pow(9));
        let log10 = log10_big(&count);
        assert!((log10 - 71.995_478_986_560_76).abs() < 1e-9, "{log10}");
    }

    #[test]
    fn bound_values() {
        assert!((fraction_upper_bound(2, 2).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        assert!((fraction_upper_bound(3, 4).unwrap() - 1.0 / (24.0 * 4096.0)).abs() < 1e-18);
        assert!((fraction_upper_bound(2, 3).unwrap() - 81.0 / 24576.0).abs() < 1e-15);
        assert!(fraction_upper_bound(1, 3).is_err());
        assert!(fraction_upper_bound(2, 1).is_err());
    }

    #[test]
    fn toy_report() {
        let r = count_report(&SequenceSet::from_inline("AG,G").unwrap());
        assert_eq!(r.feasible_count, BigUint::from(2u32));
        assert_eq!(r.hilbert_dim, BigUint::from(64u32));
        assert_eq!(r.fraction, 1.0 / 32.0);
        assert!((r.bound - 1.0 / 16.0).abs() < 1e-15);
        assert!(r.fraction_within_bound);
    }

    #[test]
    fn second_report() {
        let r = count_report(&SequenceSet::from_inline("ACG,AC").unwrap());
        assert_eq!(r.qubits, 15);
        assert_eq!(r.hilbert_dim, BigUint::from(32768u32));
        assert_eq!(r.fraction, 3.0 / 32768.0);
        assert!((r.bound - 0.003_295_898_437_5).abs() < 1e-15);
    }

    #[test]
    fn huge_report_stays_in_log_space() {
        let mut lengths = vec![50];
        lengths.extend(std::iter::repeat_n(43, 9));
        let r = count_report_for_lengths(&lengths).unwrap();
        assert_eq!(r.qubits, 50 * (50 + 9 * 43));
        assert_eq!(r.fraction, 0.0);
        assert!(r.log10_fraction.is_finite());
        assert!(r.fraction_within_bound);
        assert!(count_report_for_lengths(&[3, 3]).is_err());
    }

    #[test]
    fn ratio_scaling_is_exact_for_powers_of_two() {
        assert_eq!(ratio_to_pow2(&BigUint::from(3u32), 2), 0.75);
        let big = BigUint::one() << 300u32;
        assert_eq!(ratio_to_pow2(&big, 301), 0.5);
    }
}
