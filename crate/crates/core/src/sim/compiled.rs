use crate::error::Result;
use crate::gadgets::{GadgetCircuit, OpKind};
use crate::noise::{FaultClass, FaultEvent, FaultPath};
use crate::pauli::{PauliFrame, PauliOp, TwoQubitPauli};

use super::{propagate, vote};

/// Result of evaluating one outcome-flip signature.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    pub failed: bool,
    pub flagged: bool,
    pub accepted: bool,
}

#[derive(Clone, Debug)]
struct GroupMask {
    mask: Vec<u64>,
    arity: usize,
}

#[derive(Clone, Debug)]
struct MeasurementPlan {
    groups: std::ops::Range<usize>,
    judged: bool,
    postselect: bool,
}

/// Linear fault-to-outcome table for one circuit.
///
/// A signature is a bit set over the circuit's σx outcomes (schedule order).
/// Each CPHASE location stores 16 signatures, one per two-qubit Pauli; a
/// preparation stores the signature of its Z fault, a measurement that of
/// its readout flip.
#[derive(Clone, Debug)]
pub struct CompiledGadget {
    words: usize,
    outcome_count: usize,
    offsets: Vec<usize>,
    table: Vec<u64>,
    input_x: Vec<Vec<u64>>,
    input_z: Vec<Vec<u64>>,
    input_index: Vec<(usize, usize)>,
    groups: Vec<GroupMask>,
    plans: Vec<MeasurementPlan>,
}

fn signature(flips: &[bool], words: usize) -> Vec<u64> {
    let mut s = vec![0u64; words];
    for (i, &f) in flips.iter().enumerate() {
        if f {
            s[i / 64] |= 1 << (i % 64);
        }
    }
    s
}

#[inline]
pub(crate) fn xor_into(acc: &mut [u64], other: &[u64]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a ^= b;
    }
}

impl CompiledGadget {
    pub fn new(c: &GadgetCircuit) -> Result<Self> {
        let outcome_count = c.measurement_ops().len();
        let words = outcome_count.div_ceil(64).max(1);

        let single = |location: usize, pauli: TwoQubitPauli, class: FaultClass| -> Result<Vec<u64>> {
            let fp = FaultPath::new(vec![FaultEvent { location, class, pauli }]);
            Ok(signature(&propagate(c, &fp, &[])?.outcome_flips, words))
        };

        let mut offsets = Vec::with_capacity(c.ops.len());
        let mut table = Vec::new();
        for (loc, op) in c.ops.iter().enumerate() {
            offsets.push(table.len() / words);
            match op.kind {
                OpKind::Cphase => {
                    let gens = [
                        TwoQubitPauli(PauliOp::X, PauliOp::I),
                        TwoQubitPauli(PauliOp::Z, PauliOp::I),
                        TwoQubitPauli(PauliOp::I, PauliOp::X),
                        TwoQubitPauli(PauliOp::I, PauliOp::Z),
                    ];
                    let mut gen_sigs = Vec::with_capacity(4);
                    for g in gens {
                        gen_sigs.push(single(loc, g, FaultClass::NonDephasing)?);
                    }
                    for idx in 0..16 {
                        let p = TwoQubitPauli::from_index(idx);
                        let bits = [p.0.x, p.0.z, p.1.x, p.1.z];
                        let mut s = vec![0u64; words];
                        for (on, g) in bits.iter().zip(&gen_sigs) {
                            if *on {
                                xor_into(&mut s, g);
                            }
                        }
                        table.extend(s);
                    }
                }
                OpKind::PrepPlus => {
                    table.extend(single(loc, TwoQubitPauli(PauliOp::Z, PauliOp::I), FaultClass::PrepFlip)?)
                }
                OpKind::MeasX => {
                    table.extend(single(loc, TwoQubitPauli::IDENTITY, FaultClass::MeasFlip)?)
                }
            }
        }

        let mut input_x = Vec::new();
        let mut input_z = Vec::new();
        let mut input_index = Vec::new();
        for b in c.input_blocks() {
            let size = c.blocks[b].size;
            for j in 0..size {
                let mut fx = PauliFrame::zero(b, size);
                fx.set(j, PauliOp::X);
                let mut fz = PauliFrame::zero(b, size);
                fz.set(j, PauliOp::Z);
                input_x.push(signature(&propagate(c, &FaultPath::default(), &[fx])?.outcome_flips, words));
                input_z.push(signature(&propagate(c, &FaultPath::default(), &[fz])?.outcome_flips, words));
                input_index.push((b, j));
            }
        }

        let slots = c.outcome_slots();
        let mut groups = Vec::new();
        let mut plans = Vec::new();
        for lm in &c.logical_measurements {
            let start = groups.len();
            for g in &lm.groups {
                let mut mask = vec![0u64; words];
                for q in &g.members {
                    let s = slots[q];
                    mask[s / 64] |= 1 << (s % 64);
                }
                groups.push(GroupMask { mask, arity: g.arity() });
            }
            plans.push(MeasurementPlan {
                groups: start..groups.len(),
                judged: lm.judged,
                postselect: lm.postselect,
            });
        }

        Ok(Self { words, outcome_count, offsets, table, input_x, input_z, input_index, groups, plans })
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn outcome_count(&self) -> usize {
        self.outcome_count
    }

    pub fn zero_signature(&self) -> Vec<u64> {
        vec![0; self.words]
    }

    /// Signature of a single fault with the given Pauli at `location`. For
    /// single-qubit locations the Pauli is ignored.
    pub fn effect(&self, location: usize, pauli: TwoQubitPauli, is_cphase: bool) -> &[u64] {
        let base = self.offsets[location];
        let idx = if is_cphase { base + pauli.index() } else { base };
        &self.table[idx * self.words..(idx + 1) * self.words]
    }

    pub fn event_effect(&self, e: &FaultEvent) -> &[u64] {
        let cphase = matches!(e.class, FaultClass::Dephasing | FaultClass::NonDephasing);
        self.effect(e.location, e.pauli, cphase)
    }

    /// Signature contributed by input-frame errors.
    pub fn input_signature(&self, inputs: &[PauliFrame]) -> Vec<u64> {
        let mut s = self.zero_signature();
        for (k, &(b, j)) in self.input_index.iter().enumerate() {
            for f in inputs.iter().filter(|f| f.block_id == b) {
                if f.x_bits[j] {
                    xor_into(&mut s, &self.input_x[k]);
                }
                if f.z_bits[j] {
                    xor_into(&mut s, &self.input_z[k]);
                }
            }
        }
        s
    }

    pub fn path_signature(&self, fp: &FaultPath, inputs: &[PauliFrame]) -> Vec<u64> {
        let mut s = self.input_signature(inputs);
        for e in &fp.events {
            xor_into(&mut s, self.event_effect(e));
        }
        s
    }

    /// Logical flips and close-vote flags per logical measurement.
    pub fn logical(&self, sig: &[u64]) -> Vec<(bool, bool)> {
        self.plans
            .iter()
            .map(|plan| {
                let mut flip = false;
                let mut close = false;
                for g in &self.groups[plan.groups.clone()] {
                    let yes: u32 = g.mask.iter().zip(sig).map(|(m, s)| (m & s).count_ones()).sum();
                    let (f, c) = vote(yes as usize, g.arity);
                    flip ^= f;
                    close |= c;
                }
                (flip, close)
            })
            .collect()
    }

    #[inline]
    pub fn evaluate(&self, sig: &[u64]) -> TrialOutcome {
        let mut out = TrialOutcome { accepted: true, ..Default::default() };
        for plan in &self.plans {
            let mut flip = false;
            let mut close = false;
            for g in &self.groups[plan.groups.clone()] {
                let yes: u32 = g.mask.iter().zip(sig).map(|(m, s)| (m & s).count_ones()).sum();
                let (f, c) = vote(yes as usize, g.arity);
                flip ^= f;
                close |= c;
            }
            if plan.judged {
                out.failed |= flip;
                out.flagged |= close;
            }
            if plan.postselect && close {
                out.accepted = false;
            }
        }
        out
    }
}
