//! Two-gadget chaining: a gadget under test fed by preceding CNOT gadgets.
//!
//! Faults in the preceding gadgets reach the gadget under test only through
//! the output blocks they hand over. Their own logical measurements are kept
//! in the merged circuit but marked unjudged, so a non-dephasing fault that
//! damages both gadgets is charged once, to the later one.

use super::{
    build_cnot, BlockRole, Context, GadgetCircuit, Operation, QubitAddr,
};
use crate::error::{check_odd, Result};

/// Disjoint union of `pre` and `cur`, with `cur` shifted by `offset` steps
/// and each `(pre_block, cur_block)` link identified into one block.
fn merge(
    pre: &GadgetCircuit,
    cur: &GadgetCircuit,
    links: &[(usize, usize)],
    offset: usize,
    relabel_pre: bool,
) -> Result<GadgetCircuit> {
    let mut blocks = pre.blocks.clone();
    let mut map = vec![usize::MAX; cur.blocks.len()];
    for &(p, c) in links {
        blocks[p].role = BlockRole::Data;
        blocks[p].name = format!("{}={}", blocks[p].name, cur.blocks[c].name);
        map[c] = p;
    }
    for (c, block) in cur.blocks.iter().enumerate() {
        if map[c] == usize::MAX {
            map[c] = blocks.len();
            blocks.push(block.clone());
        }
    }
    let remap = |q: QubitAddr| QubitAddr::new(map[q.block], q.qubit);

    let mut ops = pre.ops.clone();
    ops.extend(cur.ops.iter().map(|op| Operation {
        kind: op.kind,
        first: remap(op.first),
        second: op.second.map(remap),
        timestep: op.timestep + offset,
    }));

    let mut measurements: Vec<_> = pre
        .logical_measurements
        .iter()
        .cloned()
        .map(|mut m| {
            if relabel_pre {
                m.judged = false;
                m.postselect = false;
                m.label = format!("pre:{}", m.label);
            }
            m
        })
        .collect();
    measurements.extend(cur.logical_measurements.iter().cloned().map(|mut m| {
        for g in &mut m.groups {
            g.block = map[g.block];
            for q in &mut g.members {
                *q = remap(*q);
            }
        }
        m
    }));

    GadgetCircuit::new(cur.spec, cur.context, blocks, ops, measurements)
}

/// Feeds every input block of `cur` from the output of a preceding CNOT
/// gadget with `r1 = r2 = r` repetitions. Input blocks are paired up; each
/// pair shares one preceding gadget (control output → first, target output
/// → second).
pub fn with_preceding_cnot(cur: &GadgetCircuit, r: usize) -> Result<GadgetCircuit> {
    check_odd("r", r)?;
    let n = cur.n();
    let inputs = cur.input_blocks();
    if inputs.is_empty() {
        let mut c = cur.clone();
        c.context = Context::Chained { r };
        return Ok(c);
    }

    let mut pre: Option<GadgetCircuit> = None;
    let mut links = Vec::new();
    for chunk in inputs.chunks(2) {
        let one = build_cnot(n, r, r, r)?;
        // output blocks of a CNOT are 2 (control) and 3 (target)
        let base = pre.as_ref().map_or(0, |p| p.blocks.len());
        links.push((base + 2, chunk[0]));
        if let Some(&second) = chunk.get(1) {
            links.push((base + 3, second));
        }
        pre = Some(match pre {
            None => one,
            Some(p) => merge(&p, &one, &[], 0, false)?,
        });
    }
    let pre = pre.expect("at least one preceding gadget");
    let mut merged = merge(&pre, cur, &links, pre.depth(), true)?;
    merged.context = Context::Chained { r };
    Ok(merged)
}
