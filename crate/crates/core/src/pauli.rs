//! Pauli error algebra for frame tracking.
//!
//! Phases are dropped everywhere: only supports and measurement-outcome flips
//! are observable in the circuits this crate simulates.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use bitvec::vec::BitVec;
use serde::{Deserialize, Serialize};

/// Single-qubit Pauli operator modulo phase, encoded as `(x, z)` bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOp {
    pub x: bool,
    pub z: bool,
}

impl PauliOp {
    pub const I: PauliOp = PauliOp { x: false, z: false };
    pub const X: PauliOp = PauliOp { x: true, z: false };
    pub const Z: PauliOp = PauliOp { x: false, z: true };
    pub const Y: PauliOp = PauliOp { x: true, z: true };

    pub const fn new(x: bool, z: bool) -> Self {
        Self { x, z }
    }

    pub fn is_identity(self) -> bool {
        !self.x && !self.z
    }

    /// Diagonal in the computational basis (I or Z).
    pub fn is_dephasing(self) -> bool {
        !self.x
    }

    pub fn compose(self, other: PauliOp) -> PauliOp {
        PauliOp {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }

    fn bits(self) -> u8 {
        (self.x as u8) | ((self.z as u8) << 1)
    }

    fn from_bits(bits: u8) -> Self {
        Self {
            x: bits & 1 != 0,
            z: bits & 2 != 0,
        }
    }
}

impl BitXor for PauliOp {
    type Output = PauliOp;
    fn bitxor(self, rhs: PauliOp) -> PauliOp {
        self.compose(rhs)
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match (self.x, self.z) {
            (false, false) => 'I',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        };
        write!(f, "{c}")
    }
}

/// Free composition, same as `a ^ b`.
pub fn compose(a: PauliOp, b: PauliOp) -> PauliOp {
    a.compose(b)
}

/// Two-qubit Pauli acting on an ordered operand pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoQubitPauli(pub PauliOp, pub PauliOp);

impl TwoQubitPauli {
    pub const IDENTITY: TwoQubitPauli = TwoQubitPauli(PauliOp::I, PauliOp::I);

    /// Dense index in `0..16`: `first.bits | second.bits << 2`.
    pub fn index(self) -> usize {
        (self.0.bits() | (self.1.bits() << 2)) as usize
    }

    pub fn from_index(index: usize) -> Self {
        assert!(index < 16, "two-qubit Pauli index out of range: {index}");
        let i = index as u8;
        TwoQubitPauli(PauliOp::from_bits(i & 3), PauliOp::from_bits(i >> 2))
    }

    pub fn all() -> impl Iterator<Item = TwoQubitPauli> {
        (0..16).map(TwoQubitPauli::from_index)
    }

    pub fn is_identity(self) -> bool {
        self.0.is_identity() && self.1.is_identity()
    }

    /// True iff neither factor has an X component.
    pub fn is_dephasing(self) -> bool {
        self.0.is_dephasing() && self.1.is_dephasing()
    }

    pub fn compose(self, other: TwoQubitPauli) -> TwoQubitPauli {
        TwoQubitPauli(self.0 ^ other.0, self.1 ^ other.1)
    }
}

impl fmt::Display for TwoQubitPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

/// Conjugation by CPHASE = diag(1, 1, 1, -1).
///
/// An X on either qubit picks up a Z on its partner; Z components pass through.
pub fn cphase_conjugate(pair: TwoQubitPauli) -> TwoQubitPauli {
    let TwoQubitPauli(a, b) = pair;
    TwoQubitPauli(
        PauliOp::new(a.x, a.z ^ b.x),
        PauliOp::new(b.x, b.z ^ a.x),
    )
}

/// True iff a σx measurement on `qubit` reports the opposite of the ideal
/// outcome. Only the Z component of the frame anticommutes with σx.
pub fn outcome_flip(frame: &PauliFrame, qubit: usize, meas_fault: bool) -> bool {
    frame.z_bits[qubit] ^ meas_fault
}

/// Deviation of one code block from ideal execution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliFrame {
    pub block_id: usize,
    pub x_bits: BitVec,
    pub z_bits: BitVec,
}

impl PauliFrame {
    pub fn zero(block_id: usize, n: usize) -> Self {
        Self {
            block_id,
            x_bits: BitVec::repeat(false, n),
            z_bits: BitVec::repeat(false, n),
        }
    }

    /// Frame with Z errors on the listed qubits.
    pub fn with_z(block_id: usize, n: usize, qubits: &[usize]) -> Self {
        let mut frame = Self::zero(block_id, n);
        for &q in qubits {
            frame.z_bits.set(q, true);
        }
        frame
    }

    pub fn len(&self) -> usize {
        self.z_bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z_bits.is_empty()
    }

    pub fn get(&self, qubit: usize) -> PauliOp {
        PauliOp::new(self.x_bits[qubit], self.z_bits[qubit])
    }

    pub fn set(&mut self, qubit: usize, p: PauliOp) {
        self.x_bits.set(qubit, p.x);
        self.z_bits.set(qubit, p.z);
    }

    pub fn apply(&mut self, qubit: usize, p: PauliOp) {
        let cur = self.get(qubit);
        self.set(qubit, cur ^ p);
    }

    pub fn is_zero(&self) -> bool {
        self.x_bits.not_any() && self.z_bits.not_any()
    }

    pub fn z_weight(&self) -> usize {
        self.z_bits.count_ones()
    }

    pub fn x_weight(&self) -> usize {
        self.x_bits.count_ones()
    }
}

impl BitXorAssign<&PauliFrame> for PauliFrame {
    fn bitxor_assign(&mut self, rhs: &PauliFrame) {
        assert_eq!(self.len(), rhs.len(), "frame length mismatch");
        self.x_bits ^= rhs.x_bits.as_bitslice();
        self.z_bits ^= rhs.z_bits.as_bitslice();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogicalKind {
    XL,
    ZL,
}

/// Logical Pauli of the length-n repetition code in the dual basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalOperator {
    pub kind: LogicalKind,
    pub support: Vec<usize>,
}

impl LogicalOperator {
    /// σx on the designated first qubit.
    pub fn x_logical(_n: usize) -> Self {
        Self {
            kind: LogicalKind::XL,
            support: vec![0],
        }
    }

    /// σz on every qubit of the block.
    pub fn z_logical(n: usize) -> Self {
        Self {
            kind: LogicalKind::ZL,
            support: (0..n).collect(),
        }
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    /// Whether this logical operator anticommutes with the Pauli error in `frame`.
    pub fn anticommutes_with(&self, frame: &PauliFrame) -> bool {
        let bits = match self.kind {
            // XL anticommutes with Z components, ZL with X components.
            LogicalKind::XL => &frame.z_bits,
            LogicalKind::ZL => &frame.x_bits,
        };
        self.support.iter().fold(false, |acc, &q| acc ^ bits[q])
    }
}
