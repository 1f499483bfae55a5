use serde::{Deserialize, Serialize};

use super::{BlockRole, GadgetCircuit, OpKind};

/// Operation counts and timing of a gadget schedule.
///
/// `output_ready_step` and `input_first_step` are read on qubit 0's
/// timeline: each qubit's step is shifted back by its index, undoing the
/// staggering lag. They are `None` when the gadget has no distinct
/// output/input blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleStats {
    pub cphase_count: usize,
    pub prep_count: usize,
    pub meas_count: usize,
    /// Timesteps in which a data qubit sits idle between its first and last
    /// operation, summed over data qubits. Storage locations carry no faults.
    pub idle_data_steps: usize,
    pub depth: usize,
    pub output_ready_step: Option<usize>,
    pub input_first_step: Option<usize>,
}

pub fn schedule_stats(c: &GadgetCircuit) -> ScheduleStats {
    let nq = c.qubit_count();
    let mut steps: Vec<Vec<usize>> = vec![Vec::new(); nq];
    let (mut cphase_count, mut prep_count, mut meas_count) = (0, 0, 0);
    for op in &c.ops {
        match op.kind {
            OpKind::Cphase => cphase_count += 1,
            OpKind::PrepPlus => prep_count += 1,
            OpKind::MeasX => meas_count += 1,
        }
        for q in op.operands() {
            steps[c.global(q)].push(op.timestep);
        }
    }

    let mut idle_data_steps = 0;
    let mut output_ready: Option<usize> = None;
    let mut input_first: Option<usize> = None;
    for (b, block) in c.blocks.iter().enumerate() {
        if !block.role.is_data() {
            continue;
        }
        for (j, g) in c.block_range(b).enumerate() {
            let s = &steps[g];
            let (Some(&first), Some(&last)) = (s.first(), s.last()) else {
                continue;
            };
            idle_data_steps += (last - first + 1) - s.len();
            match block.role {
                BlockRole::Output => {
                    let v = last.saturating_sub(j);
                    output_ready = Some(output_ready.map_or(v, |o| o.max(v)));
                }
                BlockRole::Input => {
                    let v = first.saturating_sub(j);
                    input_first = Some(input_first.map_or(v, |i| i.min(v)));
                }
                _ => {}
            }
        }
    }

    ScheduleStats {
        cphase_count,
        prep_count,
        meas_count,
        idle_data_steps,
        depth: c.depth().max(1),
        output_ready_step: output_ready,
        input_first_step: input_first,
    }
}
