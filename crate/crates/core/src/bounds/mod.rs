//! Closed-form failure bounds for the repetition-code gadgets.
//!
//! Every bound has the shape `C(m, k) · (a·ε)^k`: some `k` of the `a·m`
//! dephasing-exposed locations in a vote must fault. Binomials are exact
//! integers; large powers are combined in log space.

mod sweep;
mod threshold;

use serde::{Deserialize, Serialize};

use crate::error::{check_odd, invalid, Error, Result};
use crate::noise::NoiseParams;

pub use sweep::{default_eps_grid, guide_line, sweep_effective_noise, SweepRow, SWEEP_HEADER};
pub use threshold::{
    default_n_range, optimize_threshold, optimize_threshold_grid, ThresholdResult, REL_TOLERANCE,
};

/// Repetition parameters of the CNOT gadget and its neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    /// Block length.
    pub n: usize,
    /// Repetitions of the two-block parity measurement.
    pub r1: usize,
    /// Repetitions of the three-block parity measurement.
    pub r2: usize,
    /// Repetitions of the measurements in the preceding gadget.
    pub r: usize,
    /// Repetitions in the postselected Bell-pair preparation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
}

impl CodeParams {
    pub fn new(n: usize, r1: usize, r2: usize, r: usize) -> Result<Self> {
        let cp = Self { n, r1, r2, r, t: None };
        cp.validate()?;
        Ok(cp)
    }

    /// `r1 = r2 = r = n`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(n, n, n, n)
    }

    pub fn with_t(mut self, t: usize) -> Result<Self> {
        check_odd("t", t)?;
        self.t = Some(t);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_odd("n", self.n)?;
        check_odd("r1", self.r1)?;
        check_odd("r2", self.r2)?;
        check_odd("r", self.r)?;
        if let Some(t) = self.t {
            check_odd("t", t)?;
        }
        if self.r > self.r1.max(self.r2) {
            return Err(invalid(format!(
                "r = {} exceeds max(r1, r2) = {}",
                self.r,
                self.r1.max(self.r2)
            )));
        }
        Ok(())
    }

    pub fn is_uniform(&self) -> bool {
        self.r1 == self.n && self.r2 == self.n && self.r == self.n
    }
}

/// Per-vote dephasing exposure of each logical measurement in the CNOT
/// gadget: the number of locations whose Z fault can flip one vote.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exposures {
    pub mzz: usize,
    pub mzzz: usize,
    pub mx_control: usize,
    pub mx_target: usize,
}

pub fn exposures(cp: &CodeParams) -> Exposures {
    let CodeParams { n, r1, r2, r, .. } = *cp;
    Exposures {
        mzz: 2 * n + 2,
        mzzz: 3 * n + 2,
        mx_control: r + r1 + r2 + 2,
        mx_target: r + r2 + 2,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Failure from a non-dephasing fault anywhere in the gadget.
    pub eps_nd: f64,
    pub eps_mzz: f64,
    pub eps_mzzz: f64,
    pub eps_mx1: f64,
    pub eps_mx2: f64,
    /// Failure from dephasing faults: the sum of the four measurement terms.
    pub eps_d: f64,
    pub eps_total: f64,
}

/// Exact binomial coefficient. Fails only if the value exceeds `u128`.
pub fn binomial(n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc · (n − i) / (i + 1) stays integral at every step
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| Error::Overflow(format!("C({n}, {k})")))?
            / (i as u128 + 1);
    }
    Ok(acc)
}

/// `C(m, k) · (a·ε)^k`.
pub fn vote_failure(m: usize, k: usize, a: usize, eps: f64) -> Result<f64> {
    let base = a as f64 * eps;
    if base == 0.0 {
        return Ok(if k == 0 { binomial(m, 0)? as f64 } else { 0.0 });
    }
    let c = binomial(m, k)?;
    if c == 0 {
        return Ok(0.0);
    }
    if k > 30 {
        Ok(((c as f64).ln() + k as f64 * base.ln()).exp())
    } else {
        Ok(c as f64 * base.powi(k as i32))
    }
}

fn majority_failure(m: usize, a: usize, eps: f64) -> Result<f64> {
    vote_failure(m, m.div_ceil(2), a, eps)
}

pub fn cnot_failure_bound(cp: &CodeParams, p: &NoiseParams) -> Result<BoundReport> {
    cp.validate()?;
    p.validate()?;
    let CodeParams { n, r1, r2, r, .. } = *cp;
    let e = p.epsilon;
    let x = exposures(cp);
    let eps_nd = ((2 * r1 + 3 * r2 + 2 * r) * n) as f64 * p.epsilon_prime;
    let eps_mzz = majority_failure(r1, x.mzz, e)?;
    let eps_mzzz = majority_failure(r2, x.mzzz, e)?;
    let eps_mx1 = majority_failure(n, x.mx_control, e)?;
    let eps_mx2 = majority_failure(n, x.mx_target, e)?;
    let eps_d = eps_mzz + eps_mzzz + eps_mx1 + eps_mx2;
    Ok(BoundReport { eps_nd, eps_mzz, eps_mzzz, eps_mx1, eps_mx2, eps_d, eps_total: eps_nd + eps_d })
}

/// Failure bound of the CNOT gadget with all repetition counts equal to `n`.
pub fn effective_noise(cp: &CodeParams, p: &NoiseParams) -> Result<f64> {
    cp.validate()?;
    if !cp.is_uniform() {
        return Err(invalid(format!(
            "effective noise needs r1 = r2 = r = n, got n={} r1={} r2={} r={}",
            cp.n, cp.r1, cp.r2, cp.r
        )));
    }
    effective_noise_n(cp.n, p)
}

/// `7n²ε′ + 2·C(n,k)·[(2n+2)^k + (3n+2)^k]·ε^k` with `k = (n+1)/2`.
pub fn effective_noise_n(n: usize, p: &NoiseParams) -> Result<f64> {
    check_odd("n", n)?;
    p.validate()?;
    let k = n.div_ceil(2);
    let nd = (7 * n * n) as f64 * p.epsilon_prime;
    Ok(nd + 2.0 * (vote_failure(n, k, 2 * n + 2, p.epsilon)? + vote_failure(n, k, 3 * n + 2, p.epsilon)?))
}

/// Results quoted from outside this toolkit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExternalConstants {
    /// Threshold of the outer CSS code against independent gadget failures.
    pub eps_th_css: f64,
    /// Decoding error of the outer code when gadgets fail below `eps_th_css`.
    pub eps_decode: f64,
    /// Magic-state distillation threshold.
    pub distill_threshold: f64,
}

impl Default for ExternalConstants {
    fn default() -> Self {
        Self { eps_th_css: 0.67e-3, eps_decode: 8.24e-2, distill_threshold: 0.141 }
    }
}

/// Thresholds obtained by feeding the flagged bounds into an outer-code
/// message-passing analysis that is not part of this toolkit. Listed as
/// reference values only; nothing here computes them.
pub const EXTERNAL_FLAGGED_THRESHOLD_BIAS_1E4: f64 = 3.51e-3;
pub const EXTERNAL_FLAGGED_THRESHOLD_BIAS_1E3: f64 = 2.09e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InjectionReport {
    /// Failure bound of the encoded Bell measurement.
    pub eps_bm: f64,
    /// Error of the injected state: decode + Bell measurement + raw prep.
    pub eps_inject: f64,
    pub pass: bool,
    pub distill_threshold: f64,
}

pub fn bell_measurement_bound(n: usize, r: usize, p: &NoiseParams) -> Result<f64> {
    check_odd("n", n)?;
    check_odd("r", r)?;
    p.validate()?;
    let e = p.epsilon;
    Ok((2 * r * n + r) as f64 * p.epsilon_prime
        + (1 + r) as f64 * e
        + majority_failure(r, n + 3, e)?
        + majority_failure(n, 2 * r + 2, e)?)
}

pub fn injection_bound(cp: &CodeParams, p: &NoiseParams, ext: &ExternalConstants) -> Result<InjectionReport> {
    cp.validate()?;
    let eps_bm = bell_measurement_bound(cp.n, cp.r, p)?;
    let eps_inject = ext.eps_decode + eps_bm + p.epsilon;
    Ok(InjectionReport {
        eps_bm,
        eps_inject,
        pass: eps_inject < ext.distill_threshold,
        distill_threshold: ext.distill_threshold,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlaggedBounds {
    /// Failure of the two-block parity measurement when a flag is raised.
    pub eps_flag: f64,
    /// Failure without a flag: needs two more faulty votes than a majority.
    pub eps_noflag: f64,
    /// Failure conditioned on acceptance of a `t`-repetition postselected
    /// preparation.
    pub eps_cond_accept: f64,
    /// Lower bound on the acceptance probability.
    pub denominator: f64,
}

pub fn flagged_bounds(n: usize, r1: usize, t: usize, p: &NoiseParams) -> Result<FlaggedBounds> {
    check_odd("n", n)?;
    check_odd("r1", r1)?;
    check_odd("t", t)?;
    p.validate()?;
    let a = 2 * n + 2;
    let e = p.epsilon;
    let eps_flag = vote_failure(r1, (r1 + 1) / 2, a, e)?;
    let eps_noflag = vote_failure(r1, (r1 + 3) / 2, a, e)?;
    let nd = (2 * n * t) as f64 * p.epsilon_prime;
    let numerator = vote_failure(t, (t + 3) / 2, a, e)? + nd;
    let denominator = 1.0 - vote_failure(t, (t - 1) / 2, a, e)? - nd;
    if denominator <= 0.0 {
        return Err(Error::RejectionDominated { denominator });
    }
    Ok(FlaggedBounds { eps_flag, eps_noflag, eps_cond_accept: numerator / denominator, denominator })
}
