//! Monte Carlo failure-rate estimation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::compiled::xor_into;
use super::CompiledGadget;
use crate::error::{invalid, Result};
use crate::gadgets::{with_preceding_cnot, GadgetCircuit, GadgetSpec};
use crate::noise::{trial_rng, FaultSampler, NoiseParams};
use crate::pauli::PauliFrame;

/// Two-sided confidence level of every reported interval.
pub const CONFIDENCE: f64 = 0.99;

const CHUNK: u64 = 8192;

/// Errors present on the input blocks.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum InputErrors {
    /// Inputs arrive clean.
    #[default]
    Clean,
    /// Fixed frames, matched to input blocks by `block_id`.
    Frames(Vec<PauliFrame>),
    /// Inputs are produced by noisy preceding CNOT gadgets with `r`
    /// repetitions; their own logical measurements are not judged.
    PrecedingCnot { r: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r1: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r2: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    pub epsilon: f64,
    pub epsilon_prime: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preceding_r: Option<usize>,
}

impl SimParams {
    fn new(spec: &GadgetSpec, p: &NoiseParams, preceding_r: Option<usize>) -> Self {
        let mut s = SimParams {
            n: spec.n(),
            r: None,
            r1: None,
            r2: None,
            t: None,
            epsilon: p.epsilon,
            epsilon_prime: p.epsilon_prime,
            preceding_r,
        };
        match *spec {
            GadgetSpec::MeasZl { r, .. } | GadgetSpec::ErrorCorrect { r, .. } => s.r = Some(r),
            GadgetSpec::Cnot { r1, r2, r, .. } => (s.r1, s.r2, s.r) = (Some(r1), Some(r2), Some(r)),
            GadgetSpec::BellPrep { t, .. } => s.t = Some(t),
            GadgetSpec::BellMeas { r1, r2, .. } => (s.r1, s.r2) = (Some(r1), Some(r2)),
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub gadget: String,
    pub params: SimParams,
    pub seed: u64,
    pub trials: u64,
    pub failures: u64,
    pub failure_rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Trials in which some judged vote was close.
    pub flag_raised: u64,
    /// Trials passing postselection (all trials when nothing is postselected).
    pub accepted: u64,
    pub accepted_failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditional_failure_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditional_ci: Option<(f64, f64)>,
}

/// Wilson score interval for `successes` out of `trials` at two-sided
/// confidence `level`.
pub fn wilson_interval(successes: u64, trials: u64, level: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(1.0 - (1.0 - level) / 2.0);
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0).min(phat) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0).max(phat) };
    (lo, hi)
}

#[derive(Clone, Copy, Default)]
struct Tally {
    failures: u64,
    flagged: u64,
    accepted: u64,
    accepted_failures: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            failures: self.failures + o.failures,
            flagged: self.flagged + o.flagged,
            accepted: self.accepted + o.accepted,
            accepted_failures: self.accepted_failures + o.accepted_failures,
        }
    }
}

/// Builds the gadget, applies the input model, and estimates its failure rate.
pub fn estimate_failure(
    spec: &GadgetSpec,
    p: &NoiseParams,
    trials: u64,
    seed: u64,
    inputs: &InputErrors,
) -> Result<SimResult> {
    let base = spec.build()?;
    match inputs {
        InputErrors::PrecedingCnot { r } => {
            let chained = with_preceding_cnot(&base, *r)?;
            estimate_failure_circuit(&chained, p, trials, seed, &[])
        }
        InputErrors::Frames(frames) => estimate_failure_circuit(&base, p, trials, seed, frames),
        InputErrors::Clean => estimate_failure_circuit(&base, p, trials, seed, &[]),
    }
}

/// Monte Carlo over an already-built circuit. Trial `t` draws its faults from
/// stream `t` of `seed`, so the result does not depend on thread count.
pub fn estimate_failure_circuit(
    c: &GadgetCircuit,
    p: &NoiseParams,
    trials: u64,
    seed: u64,
    inputs: &[PauliFrame],
) -> Result<SimResult> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let compiled = CompiledGadget::new(c)?;
    let sampler = FaultSampler::new(c, *p)?;
    let offset = compiled.input_signature(inputs);
    let clean = compiled.evaluate(&offset);

    let chunks = trials.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut tally = Tally::default();
            let mut events = Vec::new();
            let mut sig = compiled.zero_signature();
            let end = ((chunk + 1) * CHUNK).min(trials);
            for trial in chunk * CHUNK..end {
                let mut rng = trial_rng(seed, trial);
                sampler.sample_into(&mut rng, &mut events);
                let out = if events.is_empty() {
                    clean
                } else {
                    sig.copy_from_slice(&offset);
                    for e in &events {
                        xor_into(&mut sig, compiled.event_effect(e));
                    }
                    compiled.evaluate(&sig)
                };
                tally.failures += out.failed as u64;
                tally.flagged += out.flagged as u64;
                if out.accepted {
                    tally.accepted += 1;
                    tally.accepted_failures += out.failed as u64;
                }
            }
            tally
        })
        .reduce(Tally::default, Tally::merge);

    let (ci_lo, ci_hi) = wilson_interval(tally.failures, trials, CONFIDENCE);
    let postselected = c.logical_measurements.iter().any(|m| m.postselect);
    let (conditional_failure_rate, conditional_ci) = if postselected && tally.accepted > 0 {
        (
            Some(tally.accepted_failures as f64 / tally.accepted as f64),
            Some(wilson_interval(tally.accepted_failures, tally.accepted, CONFIDENCE)),
        )
    } else {
        (None, None)
    };
    let preceding_r = match c.context {
        crate::gadgets::Context::Chained { r } => Some(r),
        crate::gadgets::Context::Isolated => None,
    };
    Ok(SimResult {
        gadget: c.kind().name().to_string(),
        params: SimParams::new(&c.spec, p, preceding_r),
        seed,
        trials,
        failures: tally.failures,
        failure_rate: tally.failures as f64 / trials as f64,
        ci_lo,
        ci_hi,
        flag_raised: tally.flagged,
        accepted: tally.accepted,
        accepted_failures: tally.accepted_failures,
        conditional_failure_rate,
        conditional_ci,
    })
}
