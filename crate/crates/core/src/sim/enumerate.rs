//! Exact evaluation of gadget failure probability over all fault paths with a
//! bounded number of faults.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::CompiledGadget;
use crate::error::{Error, Result};
use crate::gadgets::{GadgetCircuit, OpKind};
use crate::noise::{fault_branches, fault_path_probability, FaultEvent, FaultPath, NoiseParams};
use crate::pauli::PauliFrame;

/// Work limit for both enumeration routes: fault paths for the explicit
/// walk, `(faults + 1) · 2^outcomes` table cells for the exact sum.
pub const PATH_LIMIT: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactBracket {
    /// Failing probability mass among paths with at most `max_faults` faults.
    pub lower: f64,
    /// `lower` plus all mass not explored.
    pub upper: f64,
    pub explored_mass: f64,
    pub max_faults: usize,
    /// Explored mass of runs that pass postselection.
    pub accepted_mass: f64,
    /// Explored mass of runs that pass postselection and still fail.
    pub accepted_failing_mass: f64,
}

impl ExactBracket {
    pub fn unexplored_mass(&self) -> f64 {
        (1.0 - self.explored_mass).max(0.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Sums the probability of every fault path with at most `max_faults` faults
/// and classifies each by whether the gadget fails.
///
/// Paths are grouped by the outcome-flip signature they produce, which is all
/// the failure verdict depends on, so the sum runs over
/// `(fault count, signature)` cells instead of individual paths.
pub fn enumerate_exact(
    c: &GadgetCircuit,
    p: &NoiseParams,
    max_faults: usize,
    inputs: &[PauliFrame],
) -> Result<ExactBracket> {
    p.validate()?;
    let compiled = CompiledGadget::new(c)?;
    let bits = compiled.outcome_count();
    let k_max = max_faults.min(c.ops.len());
    let cells = (k_max as f64 + 1.0) * 2f64.powi(bits as i32);
    if bits > 30 || cells > PATH_LIMIT {
        return Err(Error::GuardExceeded { work: cells, limit: PATH_LIMIT });
    }
    let states = 1usize << bits;
    let pack = |sig: &[u64]| sig[0] as usize;

    let mut dist = vec![vec![0.0f64; states]; k_max + 1];
    dist[0][0] = 1.0;
    for (loc, op) in c.ops.iter().enumerate() {
        let mut merged: HashMap<usize, f64> = HashMap::new();
        for (_, pauli, prob) in fault_branches(op.kind, p) {
            let sig = compiled.effect(loc, pauli, op.kind == OpKind::Cphase);
            *merged.entry(pack(sig)).or_default() += prob;
        }
        let branches: Vec<(usize, f64)> = merged.into_iter().filter(|(_, pr)| *pr > 0.0).collect();
        let clean = p.clean_probability(op.kind);
        for k in (0..=k_max).rev() {
            let (lo, hi) = dist.split_at_mut(k + 1);
            let cur = &mut lo[k];
            let next = hi.first_mut();
            match next {
                Some(next) => {
                    for s in 0..states {
                        let m = cur[s];
                        if m == 0.0 {
                            continue;
                        }
                        for &(e, pr) in &branches {
                            next[s ^ e] += m * pr;
                        }
                        cur[s] = m * clean;
                    }
                }
                None => cur.iter_mut().for_each(|m| *m *= clean),
            }
        }
    }

    let offset = pack(&compiled.input_signature(inputs));
    let mut sig = compiled.zero_signature();
    let verdicts: Vec<_> = (0..states)
        .map(|s| {
            sig[0] = (s ^ offset) as u64;
            compiled.evaluate(&sig)
        })
        .collect();

    let mut out = ExactBracket {
        lower: 0.0,
        upper: 0.0,
        explored_mass: 0.0,
        max_faults: k_max,
        accepted_mass: 0.0,
        accepted_failing_mass: 0.0,
    };
    for layer in &dist {
        for (m, v) in layer.iter().zip(&verdicts) {
            out.explored_mass += m;
            if v.failed {
                out.lower += m;
            }
            if v.accepted {
                out.accepted_mass += m;
                if v.failed {
                    out.accepted_failing_mass += m;
                }
            }
        }
    }
    out.upper = (out.lower + out.unexplored_mass()).min(1.0);
    Ok(out)
}

/// Raises the fault cutoff until the unexplored mass drops below
/// `max_unexplored`.
pub fn enumerate_to_mass(
    c: &GadgetCircuit,
    p: &NoiseParams,
    max_unexplored: f64,
    inputs: &[PauliFrame],
) -> Result<ExactBracket> {
    let mut k = 0;
    loop {
        let b = enumerate_exact(c, p, k, inputs)?;
        if b.unexplored_mass() < max_unexplored || k >= c.ops.len() {
            return Ok(b);
        }
        k += 1;
    }
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Calls `visit` on every fault path with at most `max_faults` events along
/// with its exact probability. Refuses when the path count exceeds
/// [`PATH_LIMIT`].
pub fn for_each_fault_path(
    c: &GadgetCircuit,
    p: &NoiseParams,
    max_faults: usize,
    mut visit: impl FnMut(&FaultPath, f64),
) -> Result<()> {
    p.validate()?;
    let locations = c.ops.len();
    let k_max = max_faults.min(locations);
    let branch_lists: Vec<_> = c.ops.iter().map(|op| fault_branches(op.kind, p)).collect();
    let widest = branch_lists.iter().map(Vec::len).max().unwrap_or(1) as f64;
    let paths: f64 = (0..=k_max).map(|k| binomial_f64(locations, k) * widest.powi(k as i32)).sum();
    if paths > PATH_LIMIT {
        return Err(Error::GuardExceeded { work: paths, limit: PATH_LIMIT });
    }

    fn recurse(
        start: usize,
        left: usize,
        events: &mut Vec<FaultEvent>,
        branch_lists: &[Vec<(crate::noise::FaultClass, crate::pauli::TwoQubitPauli, f64)>],
        c: &GadgetCircuit,
        p: &NoiseParams,
        visit: &mut dyn FnMut(&FaultPath, f64),
    ) {
        let fp = FaultPath::new(events.clone());
        let prob = fault_path_probability(&fp, c, p).expect("enumerated events are well-formed");
        visit(&fp, prob);
        if left == 0 {
            return;
        }
        for loc in start..branch_lists.len() {
            for &(class, pauli, _) in &branch_lists[loc] {
                events.push(FaultEvent { location: loc, class, pauli });
                recurse(loc + 1, left - 1, events, branch_lists, c, p, visit);
                events.pop();
            }
        }
    }

    let mut events = Vec::new();
    recurse(0, k_max, &mut events, &branch_lists, c, p, &mut visit);
    Ok(())
}
