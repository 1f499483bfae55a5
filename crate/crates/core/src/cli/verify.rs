//! Oracle suite: exact enumeration against Monte Carlo, Monte Carlo against
//! the closed-form bounds.

use serde::Serialize;

use super::RunConfig;
use crate::bounds::{cnot_failure_bound, CodeParams};
use crate::error::{invalid, Result};
use crate::gadgets::{build_cnot, build_error_correction, build_meas_zl, GadgetSpec};
use crate::noise::NoiseParams;
use crate::sim::{enumerate_exact, enumerate_to_mass, estimate_failure, estimate_failure_circuit, InputErrors};

pub const SUITES: [&str; 2] = ["small", "large"];

const MAX_UNEXPLORED: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyCheck {
    pub suite: String,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suites: Vec<String>,
    pub trials: u64,
    pub seed: u64,
    pub checks: Vec<VerifyCheck>,
    pub all_pass: bool,
}

fn parse_suites(raw: Option<&str>) -> Result<Vec<String>> {
    let picked: Vec<String> = raw
        .unwrap_or("")
        .split(',')
        .map(|s| s.trim().to_ascii_lowercase())
        .filter(|s| !s.is_empty())
        .collect();
    if picked.is_empty() {
        return Err(invalid(format!("no verification suite selected; use --suite {}", SUITES.join(","))));
    }
    if let Some(bad) = picked.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(invalid(format!("unknown suite {bad:?}; choose from {}", SUITES.join(", "))));
    }
    Ok(picked)
}

fn small_suite(trials: u64, seed: u64, checks: &mut Vec<VerifyCheck>) -> Result<()> {
    let p = NoiseParams::from_bias(1e-2, 1e3)?;
    for (name, c) in [("meas_zl(3,3)", build_meas_zl(3, 3)?), ("error_correct(3,3)", build_error_correction(3, 3)?)] {
        let exact = enumerate_to_mass(&c, &p, MAX_UNEXPLORED, &[])?;
        let mc = estimate_failure_circuit(&c, &p, trials, seed, &[])?;
        checks.push(VerifyCheck {
            suite: "small".into(),
            name: format!("bracket {name}"),
            pass: mc.ci_lo <= exact.upper && exact.lower <= mc.ci_hi,
            detail: format!(
                "exact [{:.4e}, {:.4e}] at {} faults; Monte Carlo {:.4e} in [{:.4e}, {:.4e}]",
                exact.lower, exact.upper, exact.max_faults, mc.failure_rate, mc.ci_lo, mc.ci_hi
            ),
        });
    }

    let cp = CodeParams::uniform(3)?;
    let spec = GadgetSpec::Cnot { n: 3, r1: 3, r2: 3, r: 3 };
    for eps in [1e-3, 3e-3] {
        let p = NoiseParams::from_bias(eps, 1e3)?;
        let bound = cnot_failure_bound(&cp, &p)?.eps_total;
        let mc = estimate_failure(&spec, &p, trials, seed, &InputErrors::PrecedingCnot { r: 3 })?;
        checks.push(VerifyCheck {
            suite: "small".into(),
            name: format!("dominance cnot(3,3,3,3) eps={eps:e}"),
            pass: mc.ci_hi <= bound,
            detail: format!("Monte Carlo upper {:.4e} vs bound {:.4e}", mc.ci_hi, bound),
        });
    }
    Ok(())
}

/// Asks for a full enumeration of the n = 11 CNOT gadget; the guard refuses
/// and the error propagates as an infeasibility exit.
fn large_suite() -> Result<()> {
    let c = build_cnot(11, 11, 11, 11)?;
    let p = NoiseParams::from_bias(2.5e-3, 1e4)?;
    enumerate_exact(&c, &p, c.ops.len(), &[])?;
    Ok(())
}

pub fn run_verify(cfg: &RunConfig) -> Result<VerifyReport> {
    let suites = parse_suites(cfg.suite.as_deref())?;
    let trials = cfg.trials.unwrap_or(100_000);
    let seed = cfg.seed.unwrap_or(0);
    let mut checks = Vec::new();
    for s in &suites {
        match s.as_str() {
            "small" => small_suite(trials, seed, &mut checks)?,
            "large" => large_suite()?,
            _ => unreachable!("suite names validated"),
        }
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport { suites, trials, seed, checks, all_pass })
}
