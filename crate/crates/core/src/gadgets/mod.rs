//! Time-stepped circuits for the repetition-code gadgets.
//!
//! Every gadget is built from three fundamental operations: preparation of
//! |+⟩, CPHASE, and destructive σx measurement. Circuits carry their own
//! logical-measurement groupings so the simulator and the bounds share one
//! description of which single-qubit outcomes vote together.

mod build;
mod chain;
mod stats;
mod text;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use build::{
    build_bell_meas, build_bell_prep, build_cnot, build_error_correction, build_meas_zl,
};
pub use chain::with_preceding_cnot;
pub use stats::{schedule_stats, ScheduleStats};
pub use text::{parse_ops, to_text};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QubitAddr {
    pub block: usize,
    pub qubit: usize,
}

impl QubitAddr {
    pub const fn new(block: usize, qubit: usize) -> Self {
        Self { block, qubit }
    }
}

impl fmt::Display for QubitAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.block, self.qubit)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpKind {
    PrepPlus,
    Cphase,
    MeasX,
}

impl OpKind {
    pub fn name(self) -> &'static str {
        match self {
            OpKind::PrepPlus => "PrepPlus",
            OpKind::Cphase => "Cphase",
            OpKind::MeasX => "MeasX",
        }
    }
}

/// One fundamental operation at a fixed timestep. Each operation is also a
/// fault location.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub kind: OpKind,
    pub first: QubitAddr,
    /// Present only for `Cphase`.
    pub second: Option<QubitAddr>,
    pub timestep: usize,
}

impl Operation {
    pub fn prep(timestep: usize, q: QubitAddr) -> Self {
        Self { kind: OpKind::PrepPlus, first: q, second: None, timestep }
    }

    pub fn cphase(timestep: usize, a: QubitAddr, b: QubitAddr) -> Self {
        Self { kind: OpKind::Cphase, first: a, second: Some(b), timestep }
    }

    pub fn meas(timestep: usize, q: QubitAddr) -> Self {
        Self { kind: OpKind::MeasX, first: q, second: None, timestep }
    }

    pub fn operands(&self) -> impl Iterator<Item = QubitAddr> {
        std::iter::once(self.first).chain(self.second)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockRole {
    /// Arrives from a preceding gadget, consumed here.
    Input,
    /// Freshly prepared here, handed to the next gadget.
    Output,
    /// Both input and output (non-destructive measurement, or a chained link).
    Data,
    /// Syndrome ancillas; one qubit per repetition.
    Ancilla,
}

impl BlockRole {
    pub fn is_data(self) -> bool {
        !matches!(self, BlockRole::Ancilla)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub role: BlockRole,
    pub size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetKind {
    MeasZl,
    ErrorCorrect,
    Cnot,
    BellPrep,
    BellMeas,
}

impl GadgetKind {
    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::MeasZl => "meas_zl",
            GadgetKind::ErrorCorrect => "error_correct",
            GadgetKind::Cnot => "cnot",
            GadgetKind::BellPrep => "bell_prep",
            GadgetKind::BellMeas => "bell_meas",
        }
    }
}

impl std::str::FromStr for GadgetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "meas_zl" | "measzl" | "mz" => GadgetKind::MeasZl,
            "error_correct" | "ec" | "error_correction" => GadgetKind::ErrorCorrect,
            "cnot" => GadgetKind::Cnot,
            "bell_prep" | "bellprep" => GadgetKind::BellPrep,
            "bell_meas" | "bellmeas" => GadgetKind::BellMeas,
            other => return Err(Error::InvalidParameter(format!("unknown gadget {other:?}"))),
        })
    }
}

/// Gadget kind together with its size and repetition parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "gadget", rename_all = "snake_case")]
pub enum GadgetSpec {
    MeasZl { n: usize, r: usize },
    ErrorCorrect { n: usize, r: usize },
    /// `r` is the repetition count of the preceding gadget; it only enters
    /// the exposure bookkeeping of the σx^L measurements.
    Cnot { n: usize, r1: usize, r2: usize, r: usize },
    BellPrep { n: usize, t: usize },
    BellMeas { n: usize, r1: usize, r2: usize },
}

impl GadgetSpec {
    pub fn kind(&self) -> GadgetKind {
        match self {
            GadgetSpec::MeasZl { .. } => GadgetKind::MeasZl,
            GadgetSpec::ErrorCorrect { .. } => GadgetKind::ErrorCorrect,
            GadgetSpec::Cnot { .. } => GadgetKind::Cnot,
            GadgetSpec::BellPrep { .. } => GadgetKind::BellPrep,
            GadgetSpec::BellMeas { .. } => GadgetKind::BellMeas,
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            GadgetSpec::MeasZl { n, .. }
            | GadgetSpec::ErrorCorrect { n, .. }
            | GadgetSpec::Cnot { n, .. }
            | GadgetSpec::BellPrep { n, .. }
            | GadgetSpec::BellMeas { n, .. } => n,
        }
    }

    pub fn build(&self) -> Result<GadgetCircuit> {
        match *self {
            GadgetSpec::MeasZl { n, r } => build_meas_zl(n, r),
            GadgetSpec::ErrorCorrect { n, r } => build_error_correction(n, r),
            GadgetSpec::Cnot { n, r1, r2, r } => build_cnot(n, r1, r2, r),
            GadgetSpec::BellPrep { n, t } => build_bell_prep(n, t),
            GadgetSpec::BellMeas { n, r1, r2 } => build_bell_meas(n, r1, r2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasBasis {
    /// Repeated non-destructive Z-parity measurement read out through ancillas.
    ZType,
    /// Destructive σx^L, majority over the block's single-qubit outcomes.
    XType,
}

/// A set of single-qubit σx outcomes decoded by one majority vote.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteGroup {
    pub block: usize,
    /// Qubits whose σx outcomes vote; each is measured exactly once.
    pub members: Vec<QubitAddr>,
    /// Number of fault locations each constituent is exposed to, counting
    /// the preceding gadget's share where applicable.
    pub exposure: usize,
}

impl VoteGroup {
    pub fn arity(&self) -> usize {
        self.members.len()
    }
}

/// An encoded measurement: XOR of one or more majority-decoded groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalMeasurement {
    pub label: String,
    pub basis: MeasBasis,
    pub groups: Vec<VoteGroup>,
    /// Whether a flip counts toward gadget failure.
    pub judged: bool,
    /// Trials are accepted only when this measurement raises no flag.
    pub postselect: bool,
}

impl LogicalMeasurement {
    pub fn vote_arity(&self) -> usize {
        self.groups.first().map_or(0, VoteGroup::arity)
    }

    pub fn exposure(&self) -> usize {
        self.groups.iter().map(|g| g.exposure).max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Context {
    #[default]
    Isolated,
    /// Preceded by CNOT gadgets with `r` repetitions feeding every input block.
    Chained { r: usize },
}

/// Immutable, validated gadget circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetCircuit {
    pub spec: GadgetSpec,
    pub context: Context,
    pub blocks: Vec<Block>,
    /// Sorted by timestep.
    pub ops: Vec<Operation>,
    pub logical_measurements: Vec<LogicalMeasurement>,
    offsets: Vec<usize>,
}

impl GadgetCircuit {
    pub(crate) fn new(
        spec: GadgetSpec,
        context: Context,
        blocks: Vec<Block>,
        mut ops: Vec<Operation>,
        logical_measurements: Vec<LogicalMeasurement>,
    ) -> Result<Self> {
        ops.sort_by_key(|op| op.timestep);
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        let mut acc = 0;
        for b in &blocks {
            offsets.push(acc);
            acc += b.size;
        }
        offsets.push(acc);
        let circuit = Self { spec, context, blocks, ops, logical_measurements, offsets };
        circuit.audit()?;
        Ok(circuit)
    }

    pub fn kind(&self) -> GadgetKind {
        self.spec.kind()
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn qubit_count(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    /// Flat index of a qubit across all blocks.
    pub fn global(&self, q: QubitAddr) -> usize {
        self.offsets[q.block] + q.qubit
    }

    pub fn block_range(&self, block: usize) -> std::ops::Range<usize> {
        self.offsets[block]..self.offsets[block + 1]
    }

    pub fn blocks_with_role(&self, role: BlockRole) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().filter(move |(_, b)| b.role == role).map(|(i, _)| i)
    }

    /// Blocks whose frames are supplied by the caller.
    pub fn input_blocks(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| matches!(b.role, BlockRole::Input | BlockRole::Data))
            .map(|(i, _)| i)
            .collect()
    }

    /// Blocks that survive the gadget.
    pub fn output_blocks(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| matches!(b.role, BlockRole::Output | BlockRole::Data))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn depth(&self) -> usize {
        self.ops.last().map_or(0, |op| op.timestep + 1)
    }

    /// Op indices of the MeasX operations, in schedule order. Position in
    /// this list is the outcome's bit index.
    pub fn measurement_ops(&self) -> Vec<usize> {
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, op)| op.kind == OpKind::MeasX)
            .map(|(i, _)| i)
            .collect()
    }

    /// Map from measured qubit to its outcome bit index.
    pub fn outcome_slots(&self) -> HashMap<QubitAddr, usize> {
        self.measurement_ops()
            .into_iter()
            .enumerate()
            .map(|(slot, op)| (self.ops[op].first, slot))
            .collect()
    }

    pub fn label(&self) -> String {
        let base = match self.spec {
            GadgetSpec::MeasZl { n, r } => format!("meas_zl(n={n},r={r})"),
            GadgetSpec::ErrorCorrect { n, r } => format!("error_correct(n={n},r={r})"),
            GadgetSpec::Cnot { n, r1, r2, r } => format!("cnot(n={n},r1={r1},r2={r2},r={r})"),
            GadgetSpec::BellPrep { n, t } => format!("bell_prep(n={n},t={t})"),
            GadgetSpec::BellMeas { n, r1, r2 } => format!("bell_meas(n={n},r1={r1},r2={r2})"),
        };
        match self.context {
            Context::Isolated => base,
            Context::Chained { r } => format!("{base}+preceding_cnot(r={r})"),
        }
    }

    /// Well-formedness audit; every constructor runs it.
    pub fn audit(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedCircuit(msg));
        let nq = self.qubit_count();
        let mut last_step: Vec<Option<usize>> = vec![None; nq];
        let mut history: Vec<Vec<OpKind>> = vec![Vec::new(); nq];
        let mut prev_t = 0;
        for op in &self.ops {
            if op.timestep < prev_t {
                return bad("operations not sorted by timestep".into());
            }
            prev_t = op.timestep;
            match (op.kind, op.second) {
                (OpKind::Cphase, Some(b)) if b == op.first => {
                    return bad(format!("cphase with repeated operand {b}"));
                }
                (OpKind::Cphase, None) => return bad("cphase needs two operands".into()),
                (OpKind::PrepPlus | OpKind::MeasX, Some(_)) => {
                    return bad(format!("{} takes one operand", op.kind.name()));
                }
                _ => {}
            }
            for q in op.operands() {
                if q.block >= self.blocks.len() || q.qubit >= self.blocks[q.block].size {
                    return bad(format!("operand {q} out of range"));
                }
                let g = self.global(q);
                if last_step[g] == Some(op.timestep) {
                    return bad(format!("qubit {q} used twice at timestep {}", op.timestep));
                }
                last_step[g] = Some(op.timestep);
                history[g].push(op.kind);
            }
        }
        for (b, block) in self.blocks.iter().enumerate() {
            for q in 0..block.size {
                let h = &history[self.offsets[b] + q];
                let addr = QubitAddr::new(b, q);
                if h.iter().skip(1).any(|k| *k == OpKind::PrepPlus) {
                    return bad(format!("qubit {addr} prepared after first use"));
                }
                let meas = h.iter().filter(|k| **k == OpKind::MeasX).count();
                if meas > 1 || (meas == 1 && h.last() != Some(&OpKind::MeasX)) {
                    return bad(format!("qubit {addr} used after destructive measurement"));
                }
                match block.role {
                    BlockRole::Ancilla => {
                        if h.first() != Some(&OpKind::PrepPlus) || meas != 1 {
                            return bad(format!("ancilla {addr} must be prepared and measured once"));
                        }
                    }
                    BlockRole::Input if h.first() == Some(&OpKind::PrepPlus) => {
                        return bad(format!("input qubit {addr} is re-prepared"));
                    }
                    BlockRole::Output if h.first() != Some(&OpKind::PrepPlus) => {
                        return bad(format!("output qubit {addr} is never prepared"));
                    }
                    _ => {}
                }
            }
        }
        let slots = self.outcome_slots();
        for lm in &self.logical_measurements {
            if lm.groups.is_empty() {
                return bad(format!("logical measurement {} has no vote groups", lm.label));
            }
            for g in &lm.groups {
                if g.arity() % 2 == 0 {
                    return bad(format!("logical measurement {} has even vote arity", lm.label));
                }
                if let Some(m) = g.members.iter().find(|m| !slots.contains_key(m)) {
                    return bad(format!("vote member {m} of {} is never measured", lm.label));
                }
            }
        }
        Ok(())
    }
}
