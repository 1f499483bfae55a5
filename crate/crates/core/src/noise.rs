//! Sampleable instance of local stochastic biased noise.
//!
//! Each location faults independently:
//! - CPHASE: non-dephasing with probability ε′ (uniform over the 12 two-qubit
//!   Paulis with an X component), else dephasing with probability ε (uniform
//!   over Z⊗I, I⊗Z, Z⊗Z), else clean.
//! - |+⟩ preparation: Z with probability ε.
//! - σx measurement: classical outcome flip with probability ε.
//!
//! Any r given locations of which s are non-dephasing are jointly faulty with
//! probability at most ε^(r−s)·ε′^s, which is what the bounds assume.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gadgets::{GadgetCircuit, OpKind};
use crate::pauli::{PauliOp, TwoQubitPauli};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub epsilon: f64,
    pub epsilon_prime: f64,
}

impl NoiseParams {
    pub fn new(epsilon: f64, epsilon_prime: f64) -> Result<Self> {
        let p = Self { epsilon, epsilon_prime };
        p.validate()?;
        Ok(p)
    }

    /// ε′ = ε / bias. An infinite bias gives ε′ = 0.
    pub fn from_bias(epsilon: f64, bias: f64) -> Result<Self> {
        if !(bias >= 1.0) {
            return Err(invalid(format!("bias must be >= 1, got {bias}")));
        }
        Self::new(epsilon, epsilon / bias)
    }

    pub fn noiseless() -> Self {
        Self { epsilon: 0.0, epsilon_prime: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let (e, ep) = (self.epsilon, self.epsilon_prime);
        if !(0.0..=1.0).contains(&e) || !(0.0..=1.0).contains(&ep) {
            return Err(invalid(format!("probabilities must lie in [0, 1]: epsilon={e}, epsilon_prime={ep}")));
        }
        if ep > e {
            return Err(invalid(format!("epsilon_prime ({ep}) may not exceed epsilon ({e})")));
        }
        if e + ep > 1.0 {
            return Err(invalid(format!("epsilon + epsilon_prime exceeds 1 ({})", e + ep)));
        }
        Ok(())
    }

    /// ε/ε′; infinite when ε′ = 0.
    pub fn bias(&self) -> f64 {
        if self.epsilon_prime == 0.0 {
            f64::INFINITY
        } else {
            self.epsilon / self.epsilon_prime
        }
    }

    /// Probability that a location of this kind stays clean.
    pub fn clean_probability(&self, kind: OpKind) -> f64 {
        match kind {
            OpKind::Cphase => 1.0 - self.epsilon - self.epsilon_prime,
            OpKind::PrepPlus | OpKind::MeasX => 1.0 - self.epsilon,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaultClass {
    Dephasing,
    NonDephasing,
    PrepFlip,
    MeasFlip,
}

/// A fault at one operation. Single-qubit locations use only the first
/// component of `pauli`; a `MeasFlip` carries the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultEvent {
    pub location: usize,
    pub class: FaultClass,
    pub pauli: TwoQubitPauli,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultPath {
    /// Sorted by location; at most one event per location.
    pub events: Vec<FaultEvent>,
    /// `(seed, trial)` that produced a sampled path.
    pub seed: Option<(u64, u64)>,
}

impl FaultPath {
    pub fn new(mut events: Vec<FaultEvent>) -> Self {
        events.sort_by_key(|e| e.location);
        Self { events, seed: None }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// The three dephasing Paulis of a CPHASE fault.
pub fn dephasing_paulis() -> [TwoQubitPauli; 3] {
    [
        TwoQubitPauli(PauliOp::Z, PauliOp::I),
        TwoQubitPauli(PauliOp::I, PauliOp::Z),
        TwoQubitPauli(PauliOp::Z, PauliOp::Z),
    ]
}

/// The twelve two-qubit Paulis with an X component on at least one qubit.
pub fn non_dephasing_paulis() -> Vec<TwoQubitPauli> {
    TwoQubitPauli::all().filter(|p| !p.is_dephasing()).collect()
}

/// Every fault that can occur at an operation of `kind`, with its probability.
pub fn fault_branches(kind: OpKind, p: &NoiseParams) -> Vec<(FaultClass, TwoQubitPauli, f64)> {
    match kind {
        OpKind::Cphase => {
            let mut v: Vec<_> = dephasing_paulis()
                .into_iter()
                .map(|q| (FaultClass::Dephasing, q, p.epsilon / 3.0))
                .collect();
            v.extend(
                non_dephasing_paulis()
                    .into_iter()
                    .map(|q| (FaultClass::NonDephasing, q, p.epsilon_prime / 12.0)),
            );
            v
        }
        OpKind::PrepPlus => vec![(
            FaultClass::PrepFlip,
            TwoQubitPauli(PauliOp::Z, PauliOp::I),
            p.epsilon,
        )],
        OpKind::MeasX => vec![(FaultClass::MeasFlip, TwoQubitPauli::IDENTITY, p.epsilon)],
    }
}

/// RNG for one trial. Trial `t` of seed `s` is the same stream no matter which
/// worker runs it.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws fault paths for one circuit by geometric skipping, which touches
/// only the faulty locations.
#[derive(Clone, Debug)]
pub struct FaultSampler {
    params: NoiseParams,
    cphase_locs: Vec<usize>,
    single_locs: Vec<(usize, OpKind)>,
    cphase_rate: f64,
    nd_share: f64,
}

impl FaultSampler {
    pub fn new(c: &GadgetCircuit, params: NoiseParams) -> Result<Self> {
        params.validate()?;
        let mut cphase_locs = Vec::new();
        let mut single_locs = Vec::new();
        for (i, op) in c.ops.iter().enumerate() {
            match op.kind {
                OpKind::Cphase => cphase_locs.push(i),
                k => single_locs.push((i, k)),
            }
        }
        let cphase_rate = params.epsilon + params.epsilon_prime;
        let nd_share = if cphase_rate > 0.0 { params.epsilon_prime / cphase_rate } else { 0.0 };
        Ok(Self { params, cphase_locs, single_locs, cphase_rate, nd_share })
    }

    /// Positions hit in a run of `len` Bernoulli(p) trials.
    fn hits<R: Rng>(rng: &mut R, len: usize, p: f64, mut on_hit: impl FnMut(&mut R, usize)) {
        if p <= 0.0 || len == 0 {
            return;
        }
        if p >= 1.0 {
            for i in 0..len {
                on_hit(rng, i);
            }
            return;
        }
        let log_q = (-p).ln_1p();
        let mut i = 0usize;
        loop {
            let u: f64 = 1.0 - rng.gen::<f64>();
            let skip = (u.ln() / log_q).floor();
            if !(skip < (len - i) as f64) {
                return;
            }
            i += skip as usize;
            on_hit(rng, i);
            i += 1;
            if i >= len {
                return;
            }
        }
    }

    /// Appends the events of one sampled path to `out` (cleared first), sorted by location.
    pub fn sample_into<R: Rng>(&self, rng: &mut R, out: &mut Vec<FaultEvent>) {
        out.clear();
        let nd = non_dephasing_paulis();
        let deph = dephasing_paulis();
        let nd_share = self.nd_share;
        Self::hits(rng, self.cphase_locs.len(), self.cphase_rate, |rng, i| {
            let location = self.cphase_locs[i];
            let event = if rng.gen::<f64>() < nd_share {
                FaultEvent {
                    location,
                    class: FaultClass::NonDephasing,
                    pauli: nd[rng.gen_range(0..nd.len())],
                }
            } else {
                FaultEvent {
                    location,
                    class: FaultClass::Dephasing,
                    pauli: deph[rng.gen_range(0..deph.len())],
                }
            };
            out.push(event);
        });
        Self::hits(rng, self.single_locs.len(), self.params.epsilon, |_, i| {
            let (location, kind) = self.single_locs[i];
            let event = match kind {
                OpKind::PrepPlus => FaultEvent {
                    location,
                    class: FaultClass::PrepFlip,
                    pauli: TwoQubitPauli(PauliOp::Z, PauliOp::I),
                },
                _ => FaultEvent {
                    location,
                    class: FaultClass::MeasFlip,
                    pauli: TwoQubitPauli::IDENTITY,
                },
            };
            out.push(event);
        });
        out.sort_by_key(|e| e.location);
    }

    pub fn sample(&self, seed: u64, trial: u64) -> FaultPath {
        let mut rng = trial_rng(seed, trial);
        let mut events = Vec::new();
        self.sample_into(&mut rng, &mut events);
        FaultPath { events, seed: Some((seed, trial)) }
    }
}

/// Samples trial 0 of `seed`.
pub fn sample_fault_path(c: &GadgetCircuit, p: &NoiseParams, seed: u64) -> Result<FaultPath> {
    Ok(FaultSampler::new(c, *p)?.sample(seed, 0))
}

fn event_probability(kind: OpKind, e: &FaultEvent, p: &NoiseParams) -> Option<f64> {
    match (kind, e.class) {
        (OpKind::Cphase, FaultClass::Dephasing) if e.pauli.is_dephasing() && !e.pauli.is_identity() => {
            Some(p.epsilon / 3.0)
        }
        (OpKind::Cphase, FaultClass::NonDephasing) if !e.pauli.is_dephasing() => {
            Some(p.epsilon_prime / 12.0)
        }
        (OpKind::PrepPlus, FaultClass::PrepFlip) => Some(p.epsilon),
        (OpKind::MeasX, FaultClass::MeasFlip) => Some(p.epsilon),
        _ => None,
    }
}

/// Exact probability of `fp` under the sampling instance, clean locations included.
pub fn fault_path_probability(fp: &FaultPath, c: &GadgetCircuit, p: &NoiseParams) -> Result<f64> {
    p.validate()?;
    let mut faulted = vec![false; c.ops.len()];
    let mut prob = 1.0;
    for e in &fp.events {
        let op = c.ops.get(e.location).ok_or_else(|| {
            Error::InvalidParameter(format!("fault event at unknown location {}", e.location))
        })?;
        if std::mem::replace(&mut faulted[e.location], true) {
            return Err(invalid(format!("two fault events at location {}", e.location)));
        }
        prob *= event_probability(op.kind, e, p).ok_or_else(|| {
            invalid(format!("{:?} fault with {} is impossible at a {} location", e.class, e.pauli, op.kind.name()))
        })?;
    }
    for (op, hit) in c.ops.iter().zip(&faulted) {
        if !hit {
            prob *= p.clean_probability(op.kind);
        }
    }
    Ok(prob)
}
