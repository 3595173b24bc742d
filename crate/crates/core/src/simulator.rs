//! Exact state-vector simulation of the QAOA ansatz.
//!
//! Basis index `k` encodes the bitstring whose flat index 0 is the most
//! significant bit of `k`. The cost layer is applied from a precomputed
//! energy diagonal; the mixer is `exp(-i beta X)` on every qubit.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::Bitstring;
use crate::error::{QmsaError, Result};
use crate::hamiltonian::DEFAULT_QUBIT_CAP;
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Uniform superposition over `n` qubits.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::uniform_capped(n, DEFAULT_QUBIT_CAP)
    }

    pub fn uniform_capped(n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(QmsaError::Domain("a register needs at least one qubit".into()));
        }
        if n > cap {
            return Err(QmsaError::CapExceeded {
                what: "qubit count",
                requested: n.to_string(),
                cap: cap.to_string(),
            });
        }
        let dim = 1usize << n;
        let amp = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(StateVector {
            n,
            amps: vec![amp; dim],
        })
    }

    /// Computational basis state `index`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut psi = Self::uniform(n)?;
        if index >= psi.amps.len() {
            return Err(QmsaError::mismatch(psi.amps.len(), index));
        }
        psi.amps.fill(Complex64::new(0.0, 0.0));
        psi.amps[index] = Complex64::new(1.0, 0.0);
        Ok(psi)
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(QmsaError::Domain(format!(
                "{dim} amplitudes is not a qubit register"
            )));
        }
        Ok(StateVector {
            n: dim.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(Complex64::norm_sqr).collect()
    }

    fn check_diag(&self, diag: &[f64]) -> Result<()> {
        if diag.len() != self.amps.len() {
            return Err(QmsaError::mismatch(self.amps.len(), diag.len()));
        }
        Ok(())
    }

    /// `a_k <- a_k exp(-i gamma E_k)`.
    pub fn apply_cost_phase(&mut self, diag: &[f64], gamma: f64) -> Result<()> {
        self.check_diag(diag)?;
        for (a, &e) in self.amps.iter_mut().zip(diag) {
            *a *= Complex64::cis(-gamma * e);
        }
        Ok(())
    }

    /// Applies `[[cos b, -i sin b], [-i sin b, cos b]]` to every qubit.
    pub fn apply_mixer(&mut self, beta: f64) {
        let (sin, cos) = beta.sin_cos();
        let off = Complex64::new(0.0, -sin);
        for q in 0..self.n {
            let stride = 1usize << (self.n - 1 - q);
            for block in self.amps.chunks_exact_mut(2 * stride) {
                let (lo, hi) = block.split_at_mut(stride);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x * cos + y * off;
                    *b = x * off + y * cos;
                }
            }
        }
    }

    /// `sum_k |a_k|^2 E_k`, summed in index order.
    pub fn expectation(&self, diag: &[f64]) -> Result<f64> {
        self.check_diag(diag)?;
        Ok(self
            .amps
            .iter()
            .zip(diag)
            .map(|(a, &e)| a.norm_sqr() * e)
            .sum())
    }

    /// Draws `shots` measurement outcomes; identical seeds give identical
    /// histograms.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<SampleHistogram> {
        let mut rng = rng::stream(seed, rng::SAMPLING_STREAM);
        self.sample_with(shots, seed, &mut rng)
    }

    pub(crate) fn sample_with(
        &self,
        shots: u64,
        seed: u64,
        rng: &mut ChaCha8Rng,
    ) -> Result<SampleHistogram> {
        if shots == 0 {
            return Err(QmsaError::Domain("shots must be at least 1".into()));
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * acc;
            let k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            *counts.entry(k).or_default() += 1;
        }
        Ok(SampleHistogram {
            shots,
            seed,
            counts: counts
                .into_iter()
                .map(|(k, c)| (Bitstring::from_index(k, self.n), c))
                .collect(),
        })
    }
}

pub fn init_uniform(n: usize) -> Result<StateVector> {
    StateVector::uniform(n)
}

/// Layer counts and angles of the ansatz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if betas.len() != gammas.len() {
            return Err(QmsaError::mismatch(betas.len(), gammas.len()));
        }
        if betas.is_empty() {
            return Err(QmsaError::Domain("at least one layer is required".into()));
        }
        Ok(QaoaParams { betas, gammas })
    }

    pub fn zeros(p: usize) -> Self {
        QaoaParams {
            betas: vec![0.0; p],
            gammas: vec![0.0; p],
        }
    }

    /// Layer count `p`.
    pub fn layers(&self) -> usize {
        self.betas.len()
    }

    /// Flat `[betas..., gammas...]`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.betas.iter().chain(&self.gammas).copied().collect()
    }

    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if !flat.len().is_multiple_of(2) {
            return Err(QmsaError::Domain(format!(
                "flat parameter vector has odd length {}",
                flat.len()
            )));
        }
        let p = flat.len() / 2;
        Self::new(flat[..p].to_vec(), flat[p..].to_vec())
    }

    /// Appends an identity layer (`beta = gamma = 0`).
    pub fn padded(&self) -> Self {
        let mut out = self.clone();
        out.betas.push(0.0);
        out.gammas.push(0.0);
        out
    }

    /// Angles reduced to `[0, 2 pi)`.
    pub fn wrapped(&self) -> Self {
        let wrap = |v: &f64| v.rem_euclid(std::f64::consts::TAU);
        QaoaParams {
            betas: self.betas.iter().map(wrap).collect(),
            gammas: self.gammas.iter().map(wrap).collect(),
        }
    }
}

/// `prod_k U_M(beta_k) U_P(gamma_k)` applied to the uniform state, layer 1
/// first, cost phase before mixer within a layer.
pub fn trial_state(n: usize, diag: &[f64], params: &QaoaParams) -> Result<StateVector> {
    let mut psi = StateVector::uniform(n)?;
    for (&beta, &gamma) in params.betas.iter().zip(&params.gammas) {
        psi.apply_cost_phase(diag, gamma)?;
        psi.apply_mixer(beta);
    }
    Ok(psi)
}

pub fn expectation(psi: &StateVector, diag: &[f64]) -> Result<f64> {
    psi.expectation(diag)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleHistogram {
    pub shots: u64,
    pub seed: u64,
    pub counts: BTreeMap<Bitstring, u64>,
}

impl SampleHistogram {
    pub fn count(&self, b: &Bitstring) -> u64 {
        self.counts.get(b).copied().unwrap_or(0)
    }

    /// Outcomes by descending count, ties by ascending bitstring.
    pub fn ranked(&self) -> Vec<(&Bitstring, u64)> {
        let mut out: Vec<(&Bitstring, u64)> = self.counts.iter().map(|(b, &c)| (b, c)).collect();
        out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        out
    }

    pub fn most_frequent(&self) -> Option<&Bitstring> {
        self.ranked().first().map(|(b, _)| *b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn uniform_states() {
        let one = StateVector::uniform(1).unwrap();
        assert_abs_diff_eq!(one.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(one.amplitudes()[1].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        let six = StateVector::uniform(6).unwrap();
        assert!(six.amplitudes().iter().all(|a| *a == c(0.125, 0.0)));
        assert_abs_diff_eq!(six.norm_sqr(), 1.0, epsilon = 1e-15);
        assert!(StateVector::uniform(0).is_err());
        assert!(matches!(
            StateVector::uniform(25),
            Err(QmsaError::CapExceeded { .. })
        ));
    }

    #[test]
    fn cost_phase() {
        let mut psi = StateVector::uniform(1).unwrap();
        let before = psi.clone();
        psi.apply_cost_phase(&[0.0, 1.0], 0.0).unwrap();
        assert_eq!(psi, before);
        psi.apply_cost_phase(&[0.0, 1.0], PI).unwrap();
        assert_abs_diff_eq!(psi.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.amplitudes()[1].re, -FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.amplitudes()[1].im, 0.0, epsilon = 1e-15);
        assert!(psi.apply_cost_phase(&[0.0], 1.0).is_err());
    }

    #[test]
    fn mixer() {
        let mut psi = StateVector::basis(1, 0).unwrap();
        psi.apply_mixer(0.0);
        assert_eq!(psi.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        psi.apply_mixer(PI / 2.0);
        assert_abs_diff_eq!(psi.amplitudes()[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.amplitudes()[1].im, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.amplitudes()[1].re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn mixer_flips_every_qubit() {
        let mut psi = StateVector::basis(2, 1).unwrap();
        psi.apply_mixer(PI / 2.0);
        // |01> -> |10> with phase (-i)^2
        assert_abs_diff_eq!(psi.amplitudes()[2].re, -1.0, epsilon = 1e-15);
        let mut psi = StateVector::basis(2, 0).unwrap();
        psi.apply_mixer(PI / 2.0);
        // both qubits flipped: |11>, phase (-i)^2 = -1
        assert_abs_diff_eq!(psi.amplitudes()[3].re, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn identity_layers() {
        let diag: Vec<f64> = (0..8).map(|k| k as f64).collect();
        let uniform = StateVector::uniform(3).unwrap();
        assert_eq!(trial_state(3, &diag, &QaoaParams::zeros(1)).unwrap(), uniform);
        let params = QaoaParams::new(vec![0.3], vec![0.7]).unwrap();
        let once = trial_state(3, &diag, &params).unwrap();
        let padded = trial_state(3, &diag, &params.padded()).unwrap();
        assert_eq!(once, padded);
    }

    #[test]
    fn expectations() {
        let diag: Vec<f64> = (0..4).map(|k| k as f64).collect();
        let uniform = StateVector::uniform(2).unwrap();
        assert_abs_diff_eq!(uniform.expectation(&diag).unwrap(), 1.5, epsilon = 1e-15);
        let basis = StateVector::basis(2, 2).unwrap();
        assert_eq!(basis.expectation(&diag).unwrap(), 2.0);
        let flat = [4.5; 4];
        let params = QaoaParams::new(vec![0.4], vec![1.3]).unwrap();
        let psi = trial_state(2, &diag, &params).unwrap();
        assert_abs_diff_eq!(psi.expectation(&flat).unwrap(), 4.5, epsilon = 1e-12);
    }

    #[test]
    fn sampling_basis_and_determinism() {
        let psi = StateVector::basis(6, 37).unwrap();
        let h = psi.sample(5000, 1).unwrap();
        assert_eq!(h.counts.len(), 1);
        assert_eq!(h.count(&"100101".parse().unwrap()), 5000);

        let psi = StateVector::uniform(4).unwrap();
        assert_eq!(psi.sample(1000, 9).unwrap(), psi.sample(1000, 9).unwrap());
        assert_ne!(psi.sample(1000, 9).unwrap(), psi.sample(1000, 10).unwrap());
        assert!(psi.sample(0, 9).is_err());
    }

    #[test]
    fn sampling_uniform_qubit() {
        let h = StateVector::uniform(1).unwrap().sample(1_000_000, 42).unwrap();
        let zeros = h.count(&"0".parse().unwrap()) as f64;
        assert_eq!(h.counts.values().sum::<u64>(), 1_000_000);
        assert!((zeros - 500_000.0).abs() <= 1500.0, "{zeros}");
    }

    #[test]
    fn params_helpers() {
        let p = QaoaParams::new(vec![1.0, 2.0], vec![3.0, 4.0]).unwrap();
        assert_eq!(p.to_flat(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(QaoaParams::from_flat(&p.to_flat()).unwrap(), p);
        assert!(QaoaParams::new(vec![1.0], vec![]).is_err());
        assert!(QaoaParams::new(vec![], vec![]).is_err());
        let w = QaoaParams::new(vec![-0.5], vec![7.0]).unwrap().wrapped();
        assert_abs_diff_eq!(w.betas[0], 2.0 * PI - 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(w.gammas[0], 7.0 - 2.0 * PI, epsilon = 1e-12);
    }
}
