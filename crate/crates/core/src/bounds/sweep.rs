use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::effective_noise_n;
use crate::error::{invalid, Result};
use crate::noise::NoiseParams;

pub const SWEEP_HEADER: [&str; 4] = ["epsilon", "bias", "n_opt", "eps1"];

/// One point of the effective-noise curve, minimised over block length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub bias: f64,
    pub n_opt: usize,
    pub eps1: f64,
}

/// 100 log-spaced points over [1e-4, 1e-2], plus the two quoted threshold
/// values so the curves pass exactly through them.
pub fn default_eps_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..98).map(|i| 10f64.powf(-4.0 + 2.0 * i as f64 / 97.0)).collect();
    g.extend([1.54e-3, 2.50e-3]);
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// For each `(ε, bias)`, the smallest effective noise over odd `n` in
/// `n_range`. Rows are grouped by bias, ε ascending within a group.
pub fn sweep_effective_noise(bias_list: &[f64], eps_grid: &[f64], n_range: &[usize]) -> Result<Vec<SweepRow>> {
    if bias_list.is_empty() || eps_grid.is_empty() || n_range.is_empty() {
        return Err(invalid("sweep grids must be non-empty"));
    }
    let mut eps: Vec<f64> = eps_grid.to_vec();
    eps.sort_by(f64::total_cmp);
    let points: Vec<(f64, f64)> = bias_list.iter().flat_map(|&b| eps.iter().map(move |&e| (b, e))).collect();
    points
        .par_iter()
        .map(|&(bias, epsilon)| {
            let p = NoiseParams::from_bias(epsilon, bias)?;
            let mut best: Option<(usize, f64)> = None;
            for &n in n_range {
                let v = effective_noise_n(n, &p)?;
                if best.map_or(true, |(_, b)| v < b) {
                    best = Some((n, v));
                }
            }
            let (n_opt, eps1) = best.expect("non-empty range");
            Ok(SweepRow { epsilon, bias, n_opt, eps1 })
        })
        .collect()
}

/// The ε⁽¹⁾ = ε reference line over the same grid.
pub fn guide_line(eps_grid: &[f64]) -> Vec<(f64, f64)> {
    eps_grid.iter().map(|&e| (e, e)).collect()
}
