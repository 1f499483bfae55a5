//! Pauli-frame simulation of gadget circuits.
//!
//! [`propagate`] is the reference path: it walks the schedule and tracks the
//! frame qubit by qubit. Because Pauli propagation through CPHASE is linear
//! over GF(2), every outcome flip is an XOR of per-fault contributions;
//! [`CompiledGadget`] tabulates those contributions once and is what the Monte
//! Carlo and exact-enumeration drivers use.

mod compiled;
mod enumerate;
mod montecarlo;

use crate::error::{invalid, Error, Result};
use crate::gadgets::{GadgetCircuit, OpKind};
use crate::noise::{FaultClass, FaultPath};
use crate::pauli::{cphase_conjugate, PauliFrame, PauliOp, TwoQubitPauli};

pub use compiled::{CompiledGadget, TrialOutcome};
pub use enumerate::{enumerate_exact, enumerate_to_mass, for_each_fault_path, ExactBracket, PATH_LIMIT};
pub use montecarlo::{
    estimate_failure, estimate_failure_circuit, wilson_interval, InputErrors, SimParams, SimResult,
    CONFIDENCE,
};

/// Outcome of one run of a gadget, relative to ideal execution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    /// One per logical measurement: noisy outcome differs from ideal.
    pub logical_flips: Vec<bool>,
    /// One per logical measurement: some vote was won by a margin of one.
    pub flags: Vec<bool>,
    /// Which logical measurements count toward failure.
    pub judged: Vec<bool>,
    /// Which logical measurements gate acceptance.
    pub postselect: Vec<bool>,
    /// Single-qubit σx outcome flips in schedule order.
    pub outcome_flips: Vec<bool>,
    /// Final frames of the blocks that survive the gadget.
    pub output_frames: Vec<PauliFrame>,
}

impl Transcript {
    pub fn accepted(&self) -> bool {
        !self.flags.iter().zip(&self.postselect).any(|(f, p)| *f && *p)
    }

    pub fn flagged(&self) -> bool {
        self.flags.iter().zip(&self.judged).any(|(f, j)| *f && *j)
    }

    pub fn output_frame(&self, block: usize) -> Option<&PauliFrame> {
        self.output_frames.iter().find(|f| f.block_id == block)
    }
}

/// Majority vote over `flips`. Returns `(flip, close)`, where `close` marks a
/// margin of exactly one vote.
pub fn majority(flips: &[bool], arity: usize) -> Result<(bool, bool)> {
    if arity % 2 == 0 {
        return Err(invalid(format!("vote arity must be odd, got {arity}")));
    }
    if flips.len() != arity {
        return Err(invalid(format!("expected {arity} votes, got {}", flips.len())));
    }
    let yes = flips.iter().filter(|f| **f).count();
    Ok(vote(yes, arity))
}

#[inline]
pub(crate) fn vote(yes: usize, arity: usize) -> (bool, bool) {
    let flip = 2 * yes > arity;
    let close = (2 * yes).abs_diff(arity) == 1;
    (flip, close)
}

/// A gadget fails iff any judged logical measurement disagrees with ideal.
/// Flags alone do not count.
pub fn judge_failure(t: &Transcript) -> bool {
    t.logical_flips.iter().zip(&t.judged).any(|(f, j)| *f && *j)
}

/// Runs `fp` through `c` starting from `inputs` (frames for input or data
/// blocks, matched by `block_id`; missing blocks start clean).
pub fn propagate(c: &GadgetCircuit, fp: &FaultPath, inputs: &[PauliFrame]) -> Result<Transcript> {
    let nq = c.qubit_count();
    let mut x = vec![false; nq];
    let mut z = vec![false; nq];

    let input_blocks = c.input_blocks();
    for f in inputs {
        if !input_blocks.contains(&f.block_id) {
            return Err(invalid(format!("block {} does not take an input frame", f.block_id)));
        }
        let range = c.block_range(f.block_id);
        if f.len() != range.len() {
            return Err(invalid(format!(
                "frame for block {} has length {}, block size is {}",
                f.block_id,
                f.len(),
                range.len()
            )));
        }
        for (j, g) in range.enumerate() {
            x[g] ^= f.x_bits[j];
            z[g] ^= f.z_bits[j];
        }
    }

    let mut faults: Vec<Option<(FaultClass, TwoQubitPauli)>> = vec![None; c.ops.len()];
    for e in &fp.events {
        let slot = faults.get_mut(e.location).ok_or_else(|| {
            Error::MalformedCircuit(format!("fault at unknown location {}", e.location))
        })?;
        *slot = Some((e.class, e.pauli));
    }

    let mut outcome_flips = Vec::new();
    for (op, fault) in c.ops.iter().zip(&faults) {
        let a = c.global(op.first);
        match op.kind {
            OpKind::PrepPlus => {
                x[a] = false;
                z[a] = false;
                if let Some((_, p)) = fault {
                    x[a] ^= p.0.x;
                    z[a] ^= p.0.z;
                }
            }
            OpKind::Cphase => {
                let b = c.global(op.second.ok_or_else(|| {
                    Error::MalformedCircuit("cphase without second operand".into())
                })?);
                let pair = TwoQubitPauli(PauliOp::new(x[a], z[a]), PauliOp::new(x[b], z[b]));
                let mut out = cphase_conjugate(pair);
                if let Some((_, p)) = fault {
                    out = out.compose(*p);
                }
                (x[a], z[a], x[b], z[b]) = (out.0.x, out.0.z, out.1.x, out.1.z);
            }
            OpKind::MeasX => {
                let meas_fault = matches!(fault, Some((FaultClass::MeasFlip, _)));
                outcome_flips.push(z[a] ^ meas_fault);
                x[a] = false;
                z[a] = false;
            }
        }
    }

    let slots = c.outcome_slots();
    let mut logical_flips = Vec::with_capacity(c.logical_measurements.len());
    let mut flags = Vec::with_capacity(c.logical_measurements.len());
    for lm in &c.logical_measurements {
        let mut flip = false;
        let mut close = false;
        for g in &lm.groups {
            let votes: Vec<bool> = g.members.iter().map(|q| outcome_flips[slots[q]]).collect();
            let (f, cl) = majority(&votes, g.arity())?;
            flip ^= f;
            close |= cl;
        }
        logical_flips.push(flip);
        flags.push(close);
    }

    let output_frames = c
        .output_blocks()
        .into_iter()
        .map(|b| {
            let range = c.block_range(b);
            let mut f = PauliFrame::zero(b, range.len());
            for (j, g) in range.enumerate() {
                f.x_bits.set(j, x[g]);
                f.z_bits.set(j, z[g]);
            }
            f
        })
        .collect();

    Ok(Transcript {
        logical_flips,
        flags,
        judged: c.logical_measurements.iter().map(|m| m.judged).collect(),
        postselect: c.logical_measurements.iter().map(|m| m.postselect).collect(),
        outcome_flips,
        output_frames,
    })
}
