#![allow(dead_code)]

use proptest::prelude::*;
use qmsa_core::SequenceSet;

const LETTERS: [char; 4] = ['A', 'C', 'G', 'T'];

/// Random valid instance with at most `max_qubits` qubits.
pub fn instance(max_qubits: usize) -> impl Strategy<Value = SequenceSet> {
    (2usize..=3, 2usize..=4)
        .prop_flat_map(|(strings, width)| {
            let others = prop::collection::vec(1..width, strings - 1);
            (Just(width), others)
        })
        .prop_filter("qubit cap", move |(width, others)| {
            width * (width + others.iter().sum::<usize>()) <= max_qubits
        })
        .prop_flat_map(|(width, others)| {
            let mut lengths = vec![width];
            lengths.extend(others);
            lengths
                .into_iter()
                .map(|l| prop::collection::vec(0usize..4, l))
                .collect::<Vec<_>>()
        })
        .prop_map(|rows| {
            let strings: Vec<String> = rows
                .iter()
                .map(|r| r.iter().map(|&k| LETTERS[k]).collect())
                .collect();
            SequenceSet::new(&strings).expect("valid by construction")
        })
}
