use serde::{Deserialize, Serialize};

use super::weights::{binomial, phi};
use crate::walk_sim::ZPath;

/// The moment estimator `m̂^{α,β}` together with its effective sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub alpha: u32,
    pub beta: u32,
    pub value: f64,
    /// `N_n^α = #{x < n : Z_x ≥ α}`.
    pub visits: usize,
    pub n: usize,
}

/// A deviation radius at confidence level `1 - 2e^{-z}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationBound {
    pub z: f64,
    pub bound: f64,
}

impl MomentEstimate {
    /// `(n / N_n^α) C(α+β, α)^{-1} sqrt(z / 2n)`, infinite without visits.
    pub fn deviation_bound(&self, z: f64) -> DeviationBound {
        let bound = if self.visits == 0 {
            f64::INFINITY
        } else {
            let n = self.n as f64;
            let scale = binomial((self.alpha + self.beta) as u64, self.alpha as u64);
            n / self.visits as f64 / scale * (z / (2.0 * n)).sqrt()
        };
        DeviationBound { z, bound }
    }
}

/// `m̂^{α,β} = (1/N_n^α) Σ_{x=1}^n Φ_{α,β}(Z_{x-1}, Z_x)`, with `0/0 = 0`.
pub fn estimate_moment(zpath: &ZPath, alpha: u32, beta: u32) -> MomentEstimate {
    let visits = zpath.visits(alpha as u64);
    let sum: f64 = zpath.pairs().map(|(i, j)| phi(alpha, beta, i, j)).sum();
    let value = if visits == 0 { 0.0 } else { (sum / visits as f64).clamp(0.0, 1.0) };
    MomentEstimate { alpha, beta, value, visits, n: zpath.n }
}
