//! Gadget builders.
//!
//! Scheduling follows one rule throughout: the k-th ancilla of a repeated
//! Z-parity measurement is prepared at step k and meets data qubit j of a
//! segment at step `k + base + j`. Data qubit j therefore lags qubit 0 by j
//! steps, and consecutive ancillas hit the same data qubit on consecutive
//! steps, so data never idles inside a segment.

use super::{
    Block, BlockRole, Context, GadgetCircuit, GadgetSpec, LogicalMeasurement, MeasBasis,
    Operation, QubitAddr, VoteGroup,
};
use crate::error::{check_odd, Result};

#[derive(Default)]
struct Builder {
    blocks: Vec<Block>,
    ops: Vec<Operation>,
    measurements: Vec<LogicalMeasurement>,
}

impl Builder {
    fn block(&mut self, name: &str, role: BlockRole, size: usize) -> usize {
        self.blocks.push(Block { name: name.to_string(), role, size });
        self.blocks.len() - 1
    }

    /// |+⟩ on qubit j of `block` at step j + `delay`.
    fn prep_block(&mut self, block: usize, delay: usize) {
        for j in 0..self.blocks[block].size {
            self.ops.push(Operation::prep(j + delay, QubitAddr::new(block, j)));
        }
    }

    /// Destructive σx on qubit j of `block` at step j + `delay`.
    fn measure_block(&mut self, block: usize, delay: usize) {
        for j in 0..self.blocks[block].size {
            self.ops.push(Operation::meas(j + delay, QubitAddr::new(block, j)));
        }
    }

    /// Repeated Z-parity measurement over the data blocks in `segments`,
    /// given as `(block, base)`; `base` values must be increasing and spaced
    /// by at least n.
    fn z_parity(
        &mut self,
        label: &str,
        n: usize,
        reps: usize,
        segments: &[(usize, usize)],
        postselect: bool,
    ) {
        let anc = self.block(&format!("{label}.anc"), BlockRole::Ancilla, reps);
        let (_, last_base) = *segments.last().expect("at least one segment");
        for k in 0..reps {
            let a = QubitAddr::new(anc, k);
            self.ops.push(Operation::prep(k, a));
            for &(block, base) in segments {
                for j in 0..n {
                    self.ops.push(Operation::cphase(k + base + j, QubitAddr::new(block, j), a));
                }
            }
            self.ops.push(Operation::meas(k + last_base + n, a));
        }
        self.measurements.push(LogicalMeasurement {
            label: label.to_string(),
            basis: MeasBasis::ZType,
            groups: vec![VoteGroup {
                block: anc,
                members: (0..reps).map(|k| QubitAddr::new(anc, k)).collect(),
                exposure: segments.len() * n + 2,
            }],
            judged: true,
            postselect,
        });
    }

    fn x_logical(&mut self, label: &str, blocks: &[(usize, usize)]) {
        let groups = blocks
            .iter()
            .map(|&(block, exposure)| VoteGroup {
                block,
                members: (0..self.blocks[block].size).map(|j| QubitAddr::new(block, j)).collect(),
                exposure,
            })
            .collect();
        self.measurements.push(LogicalMeasurement {
            label: label.to_string(),
            basis: MeasBasis::XType,
            groups,
            judged: true,
            postselect: false,
        });
    }

    fn finish(self, spec: GadgetSpec) -> Result<GadgetCircuit> {
        GadgetCircuit::new(spec, Context::Isolated, self.blocks, self.ops, self.measurements)
    }
}

/// Non-destructive σz^L measurement repeated `r` times, staggered.
pub fn build_meas_zl(n: usize, r: usize) -> Result<GadgetCircuit> {
    check_odd("n", n)?;
    check_odd("r", r)?;
    let mut b = Builder::default();
    let data = b.block("data", BlockRole::Data, n);
    b.z_parity("Mz", n, r, &[(data, 1)], false);
    b.finish(GadgetSpec::MeasZl { n, r })
}

/// One-bit-teleportation error correction: fresh output block, repeated
/// σz^L σz^L on (output, input), then destructive σx^L on the input.
pub fn build_error_correction(n: usize, r: usize) -> Result<GadgetCircuit> {
    check_odd("n", n)?;
    check_odd("r", r)?;
    let mut b = Builder::default();
    let input = b.block("in", BlockRole::Input, n);
    let output = b.block("out", BlockRole::Output, n);
    b.prep_block(output, 0);
    b.z_parity("Mzz", n, r, &[(output, 1), (input, 1 + n)], false);
    b.measure_block(input, n + r + 1);
    // prep + r cphase in the preceding gadget + r cphase here + meas
    b.x_logical("Mx", &[(input, 2 * r + 2)]);
    b.finish(GadgetSpec::ErrorCorrect { n, r })
}

/// Ancilla-side layout shared by the CNOT gadget and the Bell-measurement
/// network. Returns `(zz_done, zzz_done)` offsets for measuring the blocks.
///
/// `c_new`/`t_new` are the blocks read first by the σz^Lσz^L and
/// σz^Lσz^Lσz^L ancillas; `c_in`/`t_in` follow. `c_in` is shared by both
/// measurements and is scheduled for the three-block parity only after the
/// two-block parity has released it.
fn teleport_network(
    b: &mut Builder,
    n: usize,
    r1: usize,
    r2: usize,
    c_new: usize,
    t_new: usize,
    c_in: usize,
    t_in: usize,
) -> usize {
    let gap = n.max(r1);
    b.z_parity("Mzz", n, r1, &[(c_new, 1), (c_in, 1 + n)], false);
    b.z_parity("Mzzz", n, r2, &[(t_new, 1), (t_in, 1 + n), (c_in, 1 + n + gap)], false);
    gap
}

/// Teleportation-based CNOT gadget. Control input block 0, target input
/// block 1; the matching output blocks are 2 and 3.
pub fn build_cnot(n: usize, r1: usize, r2: usize, r: usize) -> Result<GadgetCircuit> {
    check_odd("n", n)?;
    check_odd("r1", r1)?;
    check_odd("r2", r2)?;
    check_odd("r", r)?;
    let mut b = Builder::default();
    let c_in = b.block("control.in", BlockRole::Input, n);
    let t_in = b.block("target.in", BlockRole::Input, n);
    let c_out = b.block("control.out", BlockRole::Output, n);
    let t_out = b.block("target.out", BlockRole::Output, n);
    b.prep_block(c_out, 0);
    b.prep_block(t_out, 0);
    let gap = teleport_network(&mut b, n, r1, r2, c_out, t_out, c_in, t_in);
    b.measure_block(c_in, n + gap + r2 + 1);
    b.measure_block(t_in, n + r2 + 1);
    b.x_logical("Mx[control]", &[(c_in, r + r1 + r2 + 2)]);
    b.x_logical("Mx[target]", &[(t_in, r + r2 + 2)]);
    b.finish(GadgetSpec::Cnot { n, r1, r2, r })
}

/// Encoded Bell pair: two blocks of |+⟩ and `t` repetitions of σz^Lσz^L.
/// The parity measurement is marked for postselection on its close-vote flag.
pub fn build_bell_prep(n: usize, t: usize) -> Result<GadgetCircuit> {
    check_odd("n", n)?;
    check_odd("t", t)?;
    let mut b = Builder::default();
    let first = b.block("bell.a", BlockRole::Output, n);
    let second = b.block("bell.b", BlockRole::Output, n);
    b.prep_block(first, 0);
    b.prep_block(second, n);
    b.z_parity("Mzz", n, t, &[(first, 1), (second, 1 + n)], true);
    b.finish(GadgetSpec::BellPrep { n, t })
}

/// Repetition-code network for the Bell measurements of the outer-code
/// teleportations: the CNOT gadget's parity measurements applied to two
/// incoming Bell halves (`bell.1`, `bell.2`) and two data blocks (`data.1`,
/// `data.2`), followed by σx on every qubit. The σx^L outcomes are combined
/// pairwise: `Mx^(i)` is the XOR of the decoded `bell.i` and `data.i` votes.
pub fn build_bell_meas(n: usize, r1: usize, r2: usize) -> Result<GadgetCircuit> {
    check_odd("n", n)?;
    check_odd("r1", r1)?;
    check_odd("r2", r2)?;
    let mut b = Builder::default();
    let bell1 = b.block("bell.1", BlockRole::Input, n);
    let data1 = b.block("data.1", BlockRole::Input, n);
    let bell2 = b.block("bell.2", BlockRole::Input, n);
    let data2 = b.block("data.2", BlockRole::Input, n);
    let gap = teleport_network(&mut b, n, r1, r2, bell1, bell2, data1, data2);
    b.measurements[0].label = "Mzz^(1)".into();
    b.measurements[1].label = "Mzzz^(2)".into();
    b.measure_block(bell1, r1 + 1);
    b.measure_block(bell2, r2 + 1);
    b.measure_block(data1, n + gap + r2 + 1);
    b.measure_block(data2, n + r2 + 1);
    let r = r1.max(r2);
    b.x_logical("Mx^(1)", &[(bell1, r + r1 + 2), (data1, r + r1 + r2 + 2)]);
    b.x_logical("Mx^(2)", &[(bell2, r + r2 + 2), (data2, r + r2 + 2)]);
    b.finish(GadgetSpec::BellMeas { n, r1, r2 })
}
