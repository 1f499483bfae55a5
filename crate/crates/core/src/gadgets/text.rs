//! Line-oriented circuit listing: `<timestep> <kind> <block.qubit> [<block.qubit>]`.

use std::fmt::Write as _;

use super::{GadgetCircuit, OpKind, Operation, QubitAddr};
use crate::error::{Error, Result};

pub fn to_text(c: &GadgetCircuit) -> String {
    let mut out = String::new();
    for op in &c.ops {
        let _ = write!(out, "{} {} {}", op.timestep, op.kind.name(), op.first);
        if let Some(b) = op.second {
            let _ = write!(out, " {b}");
        }
        out.push('\n');
    }
    out
}

fn parse_addr(tok: &str, line: usize) -> Result<QubitAddr> {
    let err = || Error::MalformedCircuit(format!("line {line}: bad qubit address {tok:?}"));
    let (b, q) = tok.split_once('.').ok_or_else(err)?;
    Ok(QubitAddr::new(b.parse().map_err(|_| err())?, q.parse().map_err(|_| err())?))
}

/// Parses a listing back into operations. Blank lines and `#` comments are skipped.
pub fn parse_ops(text: &str) -> Result<Vec<Operation>> {
    let mut ops = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = |m: &str| Error::MalformedCircuit(format!("line {lineno}: {m}"));
        let timestep = toks[0].parse().map_err(|_| bad("bad timestep"))?;
        let kind = match toks.get(1).copied() {
            Some("PrepPlus") => OpKind::PrepPlus,
            Some("Cphase") => OpKind::Cphase,
            Some("MeasX") => OpKind::MeasX,
            _ => return Err(bad("unknown operation kind")),
        };
        let op = match (kind, toks.len()) {
            (OpKind::Cphase, 4) => Operation::cphase(
                timestep,
                parse_addr(toks[2], lineno)?,
                parse_addr(toks[3], lineno)?,
            ),
            (OpKind::PrepPlus, 3) => Operation::prep(timestep, parse_addr(toks[2], lineno)?),
            (OpKind::MeasX, 3) => Operation::meas(timestep, parse_addr(toks[2], lineno)?),
            _ => return Err(bad("wrong operand count")),
        };
        ops.push(op);
    }
    Ok(ops)
}
