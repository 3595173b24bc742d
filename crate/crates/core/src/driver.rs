//! The hybrid loop: multi-start derivative-free minimization of the
//! simulated expectation, followed by sampling and decoding of the optimal
//! state.
//!
//! Every local run starts from one of
//!
//! * the all-zero angles (start 0),
//! * the previous layer count's optimum padded with identity layers, when
//!   one is supplied (start 1),
//! * `starts` seeded uniform draws from the configured angle ranges.
//!
//! Each local run reports the best point it ever evaluated, so the padded
//! start guarantees the `p + 1` optimum is no worse than the `p` optimum.

use std::cell::{Cell, RefCell};
use std::f64::consts::{PI, TAU};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::{decode_bitstring, Bitstring, Decoded, SequenceSet, Violation};
use crate::error::{QmsaError, Result};
use crate::hamiltonian::{build_cost_qubo, build_energy_diagonal, PenaltyConfig};
use crate::oracle::brute_force_min;
use crate::rng;
use crate::scoring::{build_weight_tensor, WeightTensor};
use crate::simulator::{trial_state, QaoaParams, SampleHistogram, StateVector};

/// Rows in the decoded top-outcome table.
pub const TOP_OUTCOMES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerMethod {
    /// Linear-approximation trust region (COBYLA).
    #[default]
    Cobyla,
}

/// What the optimizer minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ObjectiveMode {
    /// Exact state-vector expectation.
    #[default]
    Exact,
    /// Mean energy over `shots` samples. The sampling seed is derived from
    /// the master seed and the parameter values, so the objective is still
    /// a deterministic function.
    Shots { shots: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub method: OptimizerMethod,
    /// Objective evaluations per local run.
    pub max_evaluations: usize,
    /// Number of seeded random starts.
    pub starts: usize,
    pub beta_range: (f64, f64),
    pub gamma_range: (f64, f64),
    /// Stop a local run once a step changes the objective by less than this.
    pub tolerance: f64,
    /// Stop a local run once the trust region shrinks below this many radians.
    pub step_tolerance: f64,
    /// Initial trust-region radius in radians.
    pub initial_step: f64,
    pub seed: u64,
    pub objective: ObjectiveMode,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            method: OptimizerMethod::Cobyla,
            max_evaluations: 2000,
            starts: 10,
            beta_range: (0.0, PI),
            gamma_range: (0.0, TAU),
            tolerance: 1e-6,
            step_tolerance: 1e-8,
            initial_step: 0.5,
            seed: 0,
            objective: ObjectiveMode::Exact,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(QmsaError::Domain("starts must be at least 1".into()));
        }
        if self.max_evaluations == 0 {
            return Err(QmsaError::Domain("max_evaluations must be at least 1".into()));
        }
        for (name, (lo, hi)) in [("beta_range", self.beta_range), ("gamma_range", self.gamma_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(QmsaError::Domain(format!("{name} ({lo}, {hi}) is not an interval")));
            }
        }
        if !(self.tolerance >= 0.0 && self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(QmsaError::Domain(
                "tolerance must be >= 0 and initial_step > 0".into(),
            ));
        }
        // without a positive floor the trust region can shrink forever on
        // flat landscapes
        if !(self.step_tolerance > 0.0 && self.step_tolerance < self.initial_step) {
            return Err(QmsaError::Domain(
                "step_tolerance must lie in (0, initial_step)".into(),
            ));
        }
        if let ObjectiveMode::Shots { shots: 0 } = self.objective {
            return Err(QmsaError::Domain("shot-based objective needs shots >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    Zero,
    Warm,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartTrace {
    pub start: usize,
    pub kind: StartKind,
    pub initial: QaoaParams,
    pub params: QaoaParams,
    pub value: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimized {
    pub params: QaoaParams,
    pub value: f64,
    pub starts: Vec<StartTrace>,
}

/// Pads `params` with identity layers up to `p` layers.
pub fn pad_to(params: &QaoaParams, p: usize) -> QaoaParams {
    let mut out = params.clone();
    while out.layers() < p {
        out = out.padded();
    }
    out
}

fn initial_points(
    p: usize,
    cfg: &OptimizerConfig,
    warm: Option<&QaoaParams>,
) -> Vec<(StartKind, QaoaParams)> {
    let mut out = vec![(StartKind::Zero, QaoaParams::zeros(p))];
    if let Some(w) = warm.filter(|w| w.layers() <= p) {
        out.push((StartKind::Warm, pad_to(w, p)));
    }
    let mut rng = rng::stream(cfg.seed, rng::START_STREAM_BASE + p as u64);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng, (lo, hi): (f64, f64)| {
        lo + (hi - lo) * rng.random::<f64>()
    };
    for _ in 0..cfg.starts {
        let betas = (0..p).map(|_| draw(&mut rng, cfg.beta_range)).collect();
        let gammas = (0..p).map(|_| draw(&mut rng, cfg.gamma_range)).collect();
        out.push((StartKind::Random, QaoaParams { betas, gammas }));
    }
    out
}

struct LocalRun {
    x: Vec<f64>,
    value: f64,
    evaluations: usize,
}

/// One COBYLA run returning the best point it evaluated.
fn local_minimize(
    objective: &(dyn Fn(&QaoaParams) -> f64 + Sync),
    x0: &[f64],
    cfg: &OptimizerConfig,
) -> Result<LocalRun> {
    let best = RefCell::new((x0.to_vec(), f64::INFINITY));
    let evaluations = Cell::new(0usize);
    let bad_point: RefCell<Option<Vec<f64>>> = RefCell::new(None);

    let f = |x: &[f64], _: &mut ()| -> f64 {
        evaluations.set(evaluations.get() + 1);
        // a flat landscape ends the run within a few steps; the error is
        // raised once it returns
        if bad_point.borrow().is_some() {
            return 0.0;
        }
        let params = QaoaParams::from_flat(x).expect("even-length parameter vector");
        let value = objective(&params);
        if value.is_nan() {
            *bad_point.borrow_mut() = Some(x.to_vec());
            return 0.0;
        }
        let mut best = best.borrow_mut();
        if value < best.1 {
            *best = (x.to_vec(), value);
        }
        value
    };

    let bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); x0.len()];
    let stop = cobyla::StopTols {
        ftol_abs: cfg.tolerance,
        xtol_abs: vec![cfg.step_tolerance; x0.len()],
        ..cobyla::StopTols::default()
    };
    let cons: Vec<&dyn cobyla::Func<()>> = Vec::new();
    // Failure statuses (e.g. roundoff-limited) still leave a usable best point.
    let _ = cobyla::minimize(
        f,
        x0,
        &bounds,
        &cons,
        (),
        cfg.max_evaluations,
        cobyla::RhoBeg::All(cfg.initial_step),
        Some(stop),
    );

    if let Some(x) = bad_point.into_inner() {
        return Err(QmsaError::NonFiniteObjective(x));
    }
    let (x, value) = best.into_inner();
    Ok(LocalRun {
        x,
        value,
        evaluations: evaluations.get(),
    })
}

/// Minimizes `objective` over `p`-layer angles from every configured start.
///
/// The winner is the lowest value, ties to the lowest start index; its value
/// is re-evaluated before returning.
pub fn optimize(
    objective: &(dyn Fn(&QaoaParams) -> f64 + Sync),
    p: usize,
    cfg: &OptimizerConfig,
    warm: Option<&QaoaParams>,
) -> Result<Optimized> {
    cfg.validate()?;
    if p == 0 {
        return Err(QmsaError::Domain("at least one layer is required".into()));
    }
    let points = initial_points(p, cfg, warm);
    let traces = points
        .into_par_iter()
        .enumerate()
        .map(|(start, (kind, initial))| {
            let run = local_minimize(objective, &initial.to_flat(), cfg)?;
            Ok(StartTrace {
                start,
                kind,
                params: QaoaParams::from_flat(&run.x)?,
                initial,
                value: run.value,
                evaluations: run.evaluations,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let winner = traces
        .iter()
        .fold(&traces[0], |best, t| if t.value < best.value { t } else { best });
    let params = winner.params.clone();
    let value = objective(&params);
    if value.is_nan() {
        return Err(QmsaError::NonFiniteObjective(params.to_flat()));
    }
    Ok(Optimized {
        params,
        value,
        starts: traces,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalMinimum {
    pub bitstring: Bitstring,
    pub energy: f64,
}

/// One row of the decoded top-outcome table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopOutcome {
    pub bitstring: Bitstring,
    pub count: u64,
    /// Exact `|amplitude|^2` in the optimal state.
    pub probability: f64,
    pub energy: f64,
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alignment: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violations: Option<Vec<Violation>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaResult {
    pub qubits: usize,
    pub p: usize,
    pub penalties: PenaltyConfig,
    pub optimizer: OptimizerConfig,
    /// Optimal angles exactly as found; reproduce the state from these.
    pub best_params: QaoaParams,
    /// The same angles reduced to `[0, 2 pi)`.
    pub best_params_wrapped: QaoaParams,
    pub best_expectation: f64,
    /// `<H>` of the uniform superposition, for reference.
    pub uniform_expectation: f64,
    pub global_min: GlobalMinimum,
    pub probability_of_global_min: f64,
    pub per_start: Vec<StartTrace>,
    pub histogram: SampleHistogram,
    pub top: Vec<TopOutcome>,
    #[serde(skip)]
    probabilities: Vec<f64>,
}

impl QaoaResult {
    /// Exact probability of `b` in the optimal state; zero for bitstrings of
    /// the wrong length or results loaded from disk.
    pub fn probability_of(&self, b: &Bitstring) -> f64 {
        if b.len() != self.qubits {
            return 0.0;
        }
        b.to_index()
            .and_then(|k| self.probabilities.get(k).copied())
            .unwrap_or(0.0)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Most frequently sampled bitstring.
    pub fn most_sampled(&self) -> Option<&Bitstring> {
        self.histogram.most_frequent()
    }
}

/// Runs the full pipeline with the native SP scoring.
pub fn run_qaoa(
    seqs: &SequenceSet,
    p: usize,
    pen: &PenaltyConfig,
    shots: u64,
    cfg: &OptimizerConfig,
) -> Result<QaoaResult> {
    run_qaoa_with(seqs, &build_weight_tensor(seqs), p, pen, shots, cfg, None)
}

/// [`run_qaoa`] with explicit weights and an optional warm start (padded
/// to `p` layers if shorter).
pub fn run_qaoa_with(
    seqs: &SequenceSet,
    weights: &WeightTensor,
    p: usize,
    pen: &PenaltyConfig,
    shots: u64,
    cfg: &OptimizerConfig,
    warm: Option<&QaoaParams>,
) -> Result<QaoaResult> {
    pen.validate()?;
    cfg.validate()?;
    if shots == 0 {
        return Err(QmsaError::Domain("shots must be at least 1".into()));
    }
    let model = build_cost_qubo(seqs, weights, pen);
    let n = model.num_vars();
    let diag = build_energy_diagonal(&model)?;
    let (global_bits, global_energy) = brute_force_min(&diag)?;

    let objective = |params: &QaoaParams| -> f64 {
        let psi = match trial_state(n, &diag, params) {
            Ok(psi) => psi,
            Err(_) => return f64::NAN,
        };
        match cfg.objective {
            ObjectiveMode::Exact => psi.expectation(&diag).unwrap_or(f64::NAN),
            ObjectiveMode::Shots { shots } => {
                let salt = params
                    .to_flat()
                    .iter()
                    .fold(0u64, |acc, v| rng::derive_seed(acc, v.to_bits()));
                let seed = rng::derive_seed(cfg.seed, salt);
                let mut stream = rng::stream(seed, rng::SHOT_OBJECTIVE_STREAM);
                match psi.sample_with(shots, seed, &mut stream) {
                    Ok(h) => {
                        let total: f64 = h
                            .counts
                            .iter()
                            .map(|(b, &c)| c as f64 * diag[b.to_index().expect("in cap")])
                            .sum();
                        total / shots as f64
                    }
                    Err(_) => f64::NAN,
                }
            }
        }
    };

    let optimized = optimize(&objective, p, cfg, warm)?;
    let best_expectation = trial_state(n, &diag, &optimized.params)?.expectation(&diag)?;
    let psi = trial_state(n, &diag, &optimized.params)?;
    let probabilities = psi.probabilities();
    let histogram = psi.sample(shots, rng::derive_seed(cfg.seed, p as u64))?;

    let top = histogram
        .ranked()
        .into_iter()
        .take(TOP_OUTCOMES)
        .map(|(b, count)| {
            let k = b.to_index().expect("in cap");
            let (alignment, violations) = match decode_bitstring(b, seqs)? {
                Decoded::Alignment(a) => (Some(a.to_strings()), None),
                Decoded::Infeasible(r) => (None, Some(r.violations)),
            };
            Ok(TopOutcome {
                bitstring: b.clone(),
                count,
                probability: probabilities[k],
                energy: diag[k],
                feasible: alignment.is_some(),
                alignment,
                violations,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let global_index = global_bits.to_index().expect("in cap");
    Ok(QaoaResult {
        qubits: n,
        p,
        penalties: *pen,
        optimizer: cfg.clone(),
        best_params_wrapped: optimized.params.wrapped(),
        best_params: optimized.params,
        best_expectation,
        uniform_expectation: StateVector::uniform(n)?.expectation(&diag)?,
        probability_of_global_min: probabilities[global_index],
        global_min: GlobalMinimum {
            bitstring: global_bits,
            energy: global_energy,
        },
        per_start: optimized.starts,
        histogram,
        top,
        probabilities,
    })
}

/// Runs every layer count in `p_values` in order, warm-starting each from
/// the previous optimum when the previous layer count is smaller.
pub fn p_sweep(
    seqs: &SequenceSet,
    p_values: &[usize],
    pen: &PenaltyConfig,
    shots: u64,
    cfg: &OptimizerConfig,
) -> Result<Vec<QaoaResult>> {
    p_sweep_with(seqs, &build_weight_tensor(seqs), p_values, pen, shots, cfg)
}

/// [`p_sweep`] with explicit weights.
pub fn p_sweep_with(
    seqs: &SequenceSet,
    weights: &WeightTensor,
    p_values: &[usize],
    pen: &PenaltyConfig,
    shots: u64,
    cfg: &OptimizerConfig,
) -> Result<Vec<QaoaResult>> {
    let mut out: Vec<QaoaResult> = Vec::with_capacity(p_values.len());
    for &p in p_values {
        let warm = out.last().map(|r| &r.best_params).filter(|w| w.layers() < p);
        let result = run_qaoa_with(seqs, weights, p, pen, shots, cfg, warm)?;
        out.push(result);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub p: usize,
    pub best_expectation: f64,
    pub probability_of_global_min: f64,
    /// Fraction of shots that returned the global minimum.
    pub sampled_frequency_of_global_min: f64,
}

pub fn sweep_series(results: &[QaoaResult]) -> Vec<SweepPoint> {
    results
        .iter()
        .map(|r| SweepPoint {
            p: r.p,
            best_expectation: r.best_expectation,
            probability_of_global_min: r.probability_of_global_min,
            sampled_frequency_of_global_min: r.histogram.count(&r.global_min.bitstring) as f64
                / r.histogram.shots as f64,
        })
        .collect()
}
