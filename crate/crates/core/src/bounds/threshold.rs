use serde::{Deserialize, Serialize};

use super::{cnot_failure_bound, effective_noise_n, CodeParams};
use crate::error::{check_odd, invalid, Result};
use crate::noise::NoiseParams;

/// Relative resolution of the bisection.
pub const REL_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub eps_max: f64,
    pub best_params: CodeParams,
    pub target: f64,
    pub bias: f64,
    /// Largest feasible ε for every `n` tried, in search order.
    pub per_n: Vec<(usize, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Odd block lengths 3, 5, ..., 41.
pub fn default_n_range() -> Vec<usize> {
    (3..=41).step_by(2).collect()
}

/// Largest ε with `f(ε) ≤ target`, for `f` non-decreasing with `f(0) = 0`.
fn bisect(target: f64, hi_limit: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, hi_limit);
    if f(hi)? <= target {
        return Ok(hi);
    }
    while hi - lo > REL_TOLERANCE * lo.max(f64::MIN_POSITIVE) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn check_inputs(bias: f64, n_range: &[usize]) -> Result<()> {
    if !(bias >= 1.0) {
        return Err(invalid(format!("bias must be >= 1, got {bias}")));
    }
    if n_range.is_empty() {
        return Err(invalid("n range is empty"));
    }
    n_range.iter().try_for_each(|&n| check_odd("n", n))
}

fn eps_ceiling(bias: f64) -> f64 {
    if bias.is_infinite() {
        1.0
    } else {
        bias / (bias + 1.0)
    }
}

/// For each `n`, the largest ε with `effective_noise(n) ≤ target` at
/// ε′ = ε/bias; returns the best `n` (with `r1 = r2 = r = n`).
pub fn optimize_threshold(bias: f64, target: f64, n_range: &[usize]) -> Result<ThresholdResult> {
    check_inputs(bias, n_range)?;
    if !(target > 0.0) {
        return Ok(ThresholdResult {
            eps_max: 0.0,
            best_params: CodeParams::uniform(n_range[0])?,
            target,
            bias,
            per_n: n_range.iter().map(|&n| (n, 0.0)).collect(),
            diagnostic: Some(format!("no positive noise strength meets target {target}")),
        });
    }
    let ceiling = eps_ceiling(bias);
    let mut per_n = Vec::with_capacity(n_range.len());
    for &n in n_range {
        let eps = bisect(target, ceiling, |e| effective_noise_n(n, &NoiseParams::from_bias(e, bias)?))?;
        per_n.push((n, eps));
    }
    let &(best_n, eps_max) = per_n
        .iter()
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .expect("non-empty range");
    Ok(ThresholdResult {
        eps_max,
        best_params: CodeParams::uniform(best_n)?,
        target,
        bias,
        per_n,
        diagnostic: None,
    })
}

/// Same search over independent `r1`, `r2` drawn from `n_range`, with the
/// preceding gadget's repetition count taken as `r = max(r1, r2)`. `per_n`
/// holds the best ε per block length.
pub fn optimize_threshold_grid(bias: f64, target: f64, n_range: &[usize]) -> Result<ThresholdResult> {
    check_inputs(bias, n_range)?;
    if !(target > 0.0) {
        return optimize_threshold(bias, target, n_range);
    }
    let ceiling = eps_ceiling(bias);
    let mut best: Option<(CodeParams, f64)> = None;
    let mut per_n = Vec::with_capacity(n_range.len());
    for &n in n_range {
        let mut best_here = 0.0;
        for &r1 in n_range {
            for &r2 in n_range {
                let cp = CodeParams::new(n, r1, r2, r1.max(r2))?;
                let eps = bisect(target, ceiling, |e| {
                    Ok(cnot_failure_bound(&cp, &NoiseParams::from_bias(e, bias)?)?.eps_total)
                })?;
                if eps > best_here {
                    best_here = eps;
                }
                if best.map_or(true, |(_, b)| eps > b) {
                    best = Some((cp, eps));
                }
            }
        }
        per_n.push((n, best_here));
    }
    let (best_params, eps_max) = best.expect("non-empty range");
    Ok(ThresholdResult { eps_max, best_params, target, bias, per_n, diagnostic: None })
}
