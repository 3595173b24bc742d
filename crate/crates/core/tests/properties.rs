mod common;

use proptest::prelude::*;
use qmsa_core::combinatorics::{count_report, feasible_count};
use qmsa_core::encoding::{decode_bitstring, encode_alignment, enumerate_feasible, is_feasible};
use qmsa_core::hamiltonian::{evaluate_ising, evaluate_qubo};
use qmsa_core::{
    build_cost_qubo, build_energy_diagonal, build_index_map, build_weight_tensor, direct_cost,
    qubo_to_ising, sp_score, Bitstring, PenaltyConfig, QuboModel,
};

fn random_qubo() -> impl Strategy<Value = (QuboModel, Vec<bool>)> {
    (1usize..=12).prop_flat_map(|n| {
        (
            prop::collection::vec(-5.0f64..5.0, n * n),
            prop::collection::vec(-5.0f64..5.0, n),
            -5.0f64..5.0,
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(q, h, d, x)| (QuboModel::from_dense(n, &q, &h, d).unwrap(), x))
    })
}

fn penalties() -> impl Strategy<Value = PenaltyConfig> {
    (0.1f64..20.0, 0.1f64..20.0, 0.1f64..20.0).prop_map(|(a, b, c)| PenaltyConfig::new(a, b, c).unwrap())
}

fn integer_penalties() -> impl Strategy<Value = PenaltyConfig> {
    (1u8..=20, 1u8..=20, 1u8..=20)
        .prop_map(|(a, b, c)| PenaltyConfig::new(a.into(), b.into(), c.into()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn decode_then_encode_round_trips(seqs in common::instance(16)) {
        let map = build_index_map(&seqs);
        for b in enumerate_feasible(&seqs).unwrap() {
            let decoded = decode_bitstring(&b, &seqs).unwrap();
            let a = decoded.alignment().expect("enumerated states are feasible");
            a.check_against(&seqs).unwrap();
            prop_assert_eq!(encode_alignment(a, &map).unwrap(), b);
        }
    }

    #[test]
    fn enumeration_matches_exhaustive_scan(seqs in common::instance(16)) {
        let n = seqs.qubit_count();
        let scanned: Vec<Bitstring> = (0..1usize << n)
            .map(|k| Bitstring::from_index(k, n))
            .filter(|b| is_feasible(b, &seqs).unwrap())
            .collect();
        let listed = enumerate_feasible(&seqs).unwrap();
        prop_assert_eq!(&listed, &scanned);
        prop_assert_eq!(feasible_count(&seqs), listed.len().into());
    }

    #[test]
    fn fraction_respects_bound(seqs in common::instance(24)) {
        let r = count_report(&seqs);
        prop_assert!(r.fraction_within_bound);
        prop_assert!(r.fraction <= r.bound);
    }

    #[test]
    fn qubo_and_ising_agree((m, x) in random_qubo()) {
        let ising = qubo_to_ising(&m);
        let b = Bitstring::from_bits(x);
        let e_qubo = evaluate_qubo(&m, &b).unwrap();
        let e_ising = evaluate_ising(&ising, &b.to_spins()).unwrap();
        prop_assert!((e_qubo - e_ising).abs() <= 1e-9 * e_qubo.abs().max(1.0), "{} vs {}", e_qubo, e_ising);
    }

    #[test]
    fn penalties_vanish_exactly_on_feasible_states(seqs in common::instance(12), pen in penalties()) {
        let w = build_weight_tensor(&seqs);
        let n = seqs.qubit_count();
        for k in 0..1usize << n {
            let b = Bitstring::from_index(k, n);
            let cost = direct_cost(&seqs, &w, &pen, &b).unwrap();
            if is_feasible(&b, &seqs).unwrap() {
                prop_assert_eq!(cost.penalty(), 0.0);
            } else {
                prop_assert!(cost.penalty() >= pen.min(), "{} at {}", cost.penalty(), b);
            }
        }
    }

    #[test]
    fn feasible_energy_is_sp_score(seqs in common::instance(16), pen in integer_penalties()) {
        let m = build_cost_qubo(&seqs, &build_weight_tensor(&seqs), &pen);
        for b in enumerate_feasible(&seqs).unwrap() {
            let a = decode_bitstring(&b, &seqs).unwrap();
            let score = sp_score(a.alignment().unwrap());
            prop_assert_eq!(m.evaluate(&b).unwrap(), score as f64);
        }
    }

    // real-valued weights cancel only up to rounding
    #[test]
    fn feasible_energy_is_sp_score_for_real_penalties(seqs in common::instance(16), pen in penalties()) {
        let m = build_cost_qubo(&seqs, &build_weight_tensor(&seqs), &pen);
        for b in enumerate_feasible(&seqs).unwrap() {
            let a = decode_bitstring(&b, &seqs).unwrap();
            let score = sp_score(a.alignment().unwrap()) as f64;
            prop_assert!((m.evaluate(&b).unwrap() - score).abs() <= 1e-9 * (pen.p1 + pen.p2 + pen.p3) * b.len() as f64);
        }
    }

    #[test]
    fn diagonal_matches_direct_cost(seqs in common::instance(12), pen in penalties()) {
        let w = build_weight_tensor(&seqs);
        let diag = build_energy_diagonal(&build_cost_qubo(&seqs, &w, &pen)).unwrap();
        let n = seqs.qubit_count();
        for (k, &e) in diag.iter().enumerate() {
            let direct = direct_cost(&seqs, &w, &pen, &Bitstring::from_index(k, n)).unwrap().total();
            prop_assert!((e - direct).abs() <= 1e-9 * direct.abs().max(1.0), "{} vs {} at {}", e, direct, k);
        }
    }
}
