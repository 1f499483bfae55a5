//! Exhaustive fault-placement checks shared by the integration and
//! acceptance targets.
#![allow(dead_code)]

use bft_core::gadgets::{
    build_cnot, build_error_correction, build_meas_zl, BlockRole, GadgetCircuit, MeasBasis, OpKind,
};
use bft_core::noise::{dephasing_paulis, FaultClass, FaultEvent, FaultPath};
use bft_core::pauli::{PauliFrame, PauliOp, TwoQubitPauli};
use bft_core::sim::{propagate, Transcript};

#[derive(Debug, Default)]
pub struct Tally {
    pub name: String,
    pub cases: u64,
    pub violations: u64,
    pub first_violation: Option<String>,
}

impl Tally {
    fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.cases > 0 && self.violations == 0
    }
}

/// All k-subsets of `0..n` for k ≤ `k_max`.
pub fn subsets(n: usize, k_max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..k_max.min(n) {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for i in start..n {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Every single dephasing-type fault of the circuit.
pub fn dephasing_singles(c: &GadgetCircuit) -> Vec<FaultEvent> {
    let mut v = Vec::new();
    for (location, op) in c.ops.iter().enumerate() {
        match op.kind {
            OpKind::Cphase => v.extend(
                dephasing_paulis()
                    .into_iter()
                    .map(|pauli| FaultEvent { location, class: FaultClass::Dephasing, pauli }),
            ),
            OpKind::PrepPlus => v.push(FaultEvent {
                location,
                class: FaultClass::PrepFlip,
                pauli: TwoQubitPauli(PauliOp::Z, PauliOp::I),
            }),
            OpKind::MeasX => {
                v.push(FaultEvent { location, class: FaultClass::MeasFlip, pauli: TwoQubitPauli::IDENTITY })
            }
        }
    }
    v
}

/// Fault paths of up to `s_max` events drawn from `singles`, at most one per
/// location. Paths are grouped by size: `result[s]` has the size-`s` paths.
pub fn fault_paths(singles: &[FaultEvent], s_max: usize) -> Vec<Vec<FaultPath>> {
    let mut by_size = vec![vec![FaultPath::default()]];
    for s in 1..=s_max {
        let mut next = Vec::new();
        for fp in &by_size[s - 1] {
            let last = fp.events.last().map(|e| e.location);
            for e in singles {
                if last.map_or(true, |l| e.location > l) {
                    let mut ev = fp.events.clone();
                    ev.push(*e);
                    next.push(FaultPath::new(ev));
                }
            }
        }
        by_size.push(next);
    }
    by_size
}

fn frames_for(c: &GadgetCircuit, blocks: &[usize], picks: &[&Vec<usize>]) -> Vec<PauliFrame> {
    blocks
        .iter()
        .zip(picks)
        .map(|(&b, qs)| PauliFrame::with_z(b, c.blocks[b].size, qs))
        .collect()
}

fn basis_flips(t: &Transcript, c: &GadgetCircuit, basis: MeasBasis) -> bool {
    c.logical_measurements
        .iter()
        .zip(&t.logical_flips)
        .any(|(m, f)| m.basis == basis && *f)
}

fn is_data_block(c: &GadgetCircuit, b: usize) -> bool {
    c.blocks[b].role != BlockRole::Ancilla
}

/// Z errors on data qubits (inputs, data-side CPHASE faults, data preps),
/// singly and in pairs, never flip a Z-type logical measurement.
pub fn data_z_immunity(c: &GadgetCircuit, name: &str) -> Tally {
    let mut t = Tally::new(format!("data-Z immunity {name}"));
    #[derive(Clone, Copy)]
    enum Place {
        Input(usize, usize),
        Fault(FaultEvent),
    }
    let mut places = Vec::new();
    for b in c.input_blocks() {
        for j in 0..c.blocks[b].size {
            places.push(Place::Input(b, j));
        }
    }
    for (location, op) in c.ops.iter().enumerate() {
        if !is_data_block(c, op.first.block) {
            continue;
        }
        match op.kind {
            OpKind::Cphase => places.push(Place::Fault(FaultEvent {
                location,
                class: FaultClass::Dephasing,
                pauli: TwoQubitPauli(PauliOp::Z, PauliOp::I),
            })),
            OpKind::PrepPlus => places.push(Place::Fault(FaultEvent {
                location,
                class: FaultClass::PrepFlip,
                pauli: TwoQubitPauli(PauliOp::Z, PauliOp::I),
            })),
            OpKind::MeasX => {}
        }
    }
    for i in 0..places.len() {
        for j in i..places.len() {
            let pair: Vec<Place> = if i == j { vec![places[i]] } else { vec![places[i], places[j]] };
            let mut frames: Vec<PauliFrame> = Vec::new();
            let mut events = Vec::new();
            for p in &pair {
                match *p {
                    Place::Input(b, q) => match frames.iter_mut().find(|f| f.block_id == b) {
                        Some(f) => f.apply(q, PauliOp::Z),
                        None => frames.push(PauliFrame::with_z(b, c.blocks[b].size, &[q])),
                    },
                    Place::Fault(e) => events.push(e),
                }
            }
            let tr = propagate(c, &FaultPath::new(events), &frames).expect("propagate");
            t.record(!basis_flips(&tr, c, MeasBasis::ZType), || format!("placements {i},{j}"));
        }
    }
    t
}

/// With m input Z errors per measured block and s dephasing faults, the
/// σx-type measurements are correct while m + s ≤ (n−1)/2; the Z-type ones
/// while s ≤ (r−1)/2.
pub fn correctness_window(c: &GadgetCircuit, name: &str, n: usize, r: usize) -> (Tally, Tally) {
    let w = (n - 1) / 2;
    let wr = (r - 1) / 2;
    let mut tx = Tally::new(format!("σx window {name}"));
    let mut tz = Tally::new(format!("Z-type window {name}"));
    let inputs = c.input_blocks();
    let paths = fault_paths(&dephasing_singles(c), w.max(wr));
    for (s, group) in paths.iter().enumerate() {
        let m_max = w.saturating_sub(s);
        let per_block = subsets(n, m_max);
        let combos: Vec<Vec<&Vec<usize>>> = inputs.iter().fold(vec![vec![]], |acc, _| {
            acc.iter()
                .flat_map(|prefix| {
                    per_block.iter().map(move |q| {
                        let mut v = prefix.clone();
                        v.push(q);
                        v
                    })
                })
                .collect()
        });
        for fp in group {
            if s <= w {
                for picks in &combos {
                    let frames = frames_for(c, &inputs, picks);
                    let tr = propagate(c, fp, &frames).expect("propagate");
                    tx.record(!basis_flips(&tr, c, MeasBasis::XType), || format!("{fp:?} inputs {picks:?}"));
                }
            }
            if s <= wr {
                let tr = propagate(c, fp, &[]).expect("propagate");
                tz.record(!basis_flips(&tr, c, MeasBasis::ZType), || format!("{fp:?}"));
            }
        }
    }
    (tx, tz)
}

/// σz^L measurement: m input Z errors and s dephasing faults leave at most
/// m + s Z errors (and no X) on the data block.
pub fn meas_zl_output_count(n: usize, r: usize, m_max: usize, s_max: usize) -> Tally {
    let c = build_meas_zl(n, r).unwrap();
    let mut t = Tally::new(format!("σz^L output ≤ m+s (n={n}, r={r})"));
    let paths = fault_paths(&dephasing_singles(&c), s_max);
    for (s, group) in paths.iter().enumerate() {
        for fp in group {
            for q in subsets(n, m_max) {
                let tr = propagate(&c, fp, &[PauliFrame::with_z(0, n, &q)]).unwrap();
                let out = tr.output_frame(0).unwrap();
                t.record(out.z_weight() <= q.len() + s && out.x_weight() == 0, || format!("{fp:?} {q:?}"));
            }
        }
    }
    t
}

/// Error correction: the output block carries at most s Z errors whatever
/// the input errors.
pub fn error_correction_output_count(n: usize, r: usize, s_max: usize) -> Tally {
    let c = build_error_correction(n, r).unwrap();
    let mut t = Tally::new(format!("error-correction output ≤ s (n={n}, r={r})"));
    let out_block = c.output_blocks()[0];
    let in_block = c.input_blocks()[0];
    let paths = fault_paths(&dephasing_singles(&c), s_max);
    for (s, group) in paths.iter().enumerate() {
        for fp in group {
            for q in subsets(n, n) {
                let tr = propagate(&c, fp, &[PauliFrame::with_z(in_block, n, &q)]).unwrap();
                let out = tr.output_frame(out_block).unwrap();
                t.record(out.z_weight() <= s && out.x_weight() == 0, || format!("{fp:?} {q:?}"));
            }
        }
    }
    t
}

/// Everything above at block length `n` with `r` repetitions.
pub fn fault_tolerance_suite(n: usize, r: usize) -> Vec<Tally> {
    let mz = build_meas_zl(n, r).unwrap();
    let ec = build_error_correction(n, r).unwrap();
    let cnot = build_cnot(n, r, r, r).unwrap();
    let mut out = vec![
        data_z_immunity(&mz, &format!("meas_zl({n},{r})")),
        data_z_immunity(&ec, &format!("error_correct({n},{r})")),
        data_z_immunity(&cnot, &format!("cnot({n},{r},{r},{r})")),
    ];
    for (c, name) in [(&ec, format!("error_correct({n},{r})")), (&cnot, format!("cnot({n},{r},{r},{r})"))] {
        let (tx, tz) = correctness_window(c, &name, n, r);
        out.push(tx);
        out.push(tz);
    }
    let (_, tz) = correctness_window(&mz, &format!("meas_zl({n},{r})"), n, r);
    out.push(tz);
    out.push(meas_zl_output_count(n, r, 2, 2));
    out.push(error_correction_output_count(n, r, 2));
    out
}
