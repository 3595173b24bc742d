//! The stride-based simulator against dense Kronecker-product matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use qmsa_core::{trial_state, QaoaParams, StateVector};

fn mixer_1q(beta: f64) -> DMatrix<Complex64> {
    let c = Complex64::new(beta.cos(), 0.0);
    let s = Complex64::new(0.0, -beta.sin());
    DMatrix::from_row_slice(2, 2, &[c, s, s, c])
}

/// `U_0 (x) U_1 (x) ... (x) U_{n-1}`: qubit 0 is the most significant bit.
fn mixer_dense(n: usize, beta: f64) -> DMatrix<Complex64> {
    let one = mixer_1q(beta);
    (1..n).fold(one.clone(), |acc, _| acc.kronecker(&one))
}

fn reference_state(n: usize, diag: &[f64], params: &QaoaParams) -> DVector<Complex64> {
    let dim = 1usize << n;
    let mut psi = DVector::from_element(dim, Complex64::new((dim as f64).powf(-0.5), 0.0));
    for (&beta, &gamma) in params.betas.iter().zip(&params.gammas) {
        let phase = DMatrix::from_diagonal(&DVector::from_iterator(
            dim,
            diag.iter().map(|&e| Complex64::from_polar(1.0, -gamma * e)),
        ));
        psi = mixer_dense(n, beta) * (phase * psi);
    }
    psi
}

fn case() -> impl Strategy<Value = (usize, Vec<f64>, QaoaParams)> {
    (1usize..=4, 1usize..=3).prop_flat_map(|(n, p)| {
        (
            Just(n),
            prop::collection::vec(-10.0f64..10.0, 1 << n),
            prop::collection::vec(-4.0f64..4.0, p),
            prop::collection::vec(-4.0f64..4.0, p),
        )
            .prop_map(|(n, diag, betas, gammas)| (n, diag, QaoaParams::new(betas, gammas).unwrap()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn matches_dense_reference((n, diag, params) in case()) {
        let fast = trial_state(n, &diag, &params).unwrap();
        let slow = reference_state(n, &diag, &params);
        for (a, b) in fast.amplitudes().iter().zip(slow.iter()) {
            prop_assert!((a - b).norm() < 1e-8, "{} vs {}", a, b);
        }
        prop_assert!((fast.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cost_phase_keeps_moduli((n, diag, params) in case()) {
        let mut psi = trial_state(n, &diag, &params).unwrap();
        let before: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm()).collect();
        psi.apply_cost_phase(&diag, params.gammas[0]).unwrap();
        for (a, m) in psi.amplitudes().iter().zip(before) {
            prop_assert!((a.norm() - m).abs() < 1e-10);
        }
    }

    #[test]
    fn mixer_keeps_norm((n, _diag, params) in case()) {
        let mut psi = StateVector::basis(n, (1 << n) - 1).unwrap();
        for &b in &params.betas {
            psi.apply_mixer(b);
        }
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn expectation_matches_dense_quadratic_form() {
    let diag: Vec<f64> = (0..8).map(|k| (k as f64 - 3.5).powi(2)).collect();
    let params = QaoaParams::new(vec![0.3, 1.2], vec![0.8, -0.4]).unwrap();
    let psi = reference_state(3, &diag, &params);
    let h = DMatrix::from_diagonal(&DVector::from_iterator(8, diag.iter().map(|&e| Complex64::new(e, 0.0))));
    let dense = (psi.adjoint() * h * &psi)[(0, 0)];
    let fast = trial_state(3, &diag, &params).unwrap().expectation(&diag).unwrap();
    assert!((dense.re - fast).abs() < 1e-10 && dense.im.abs() < 1e-12);
}

#[test]
fn sampled_frequencies_stay_within_four_sigma() {
    let diag: Vec<f64> = (0..16).map(|k| ((k * 7) % 5) as f64).collect();
    let params = QaoaParams::new(vec![0.7], vec![0.9]).unwrap();
    let psi = trial_state(4, &diag, &params).unwrap();
    let shots = 200_000u64;
    let h = psi.sample(shots, 11).unwrap();
    for (k, &p) in psi.probabilities().iter().enumerate() {
        let b = qmsa_core::Bitstring::from_index(k, 4);
        let expected = p * shots as f64;
        let sigma = (shots as f64 * p * (1.0 - p)).sqrt().max(1.0);
        let got = h.count(&b) as f64;
        assert!((got - expected).abs() <= 4.0 * sigma, "{b}: {got} vs {expected}");
    }
}
