//! Brute-force conditional expectations under the annealed kernel, used to
//! check the estimators' centering identities.

use super::weights::{phi, psi};
use crate::env_model::EnvSpec;
use crate::error::Result;
use crate::walk_sim::kernel_row;

/// Kernel mass left out of the oracle sums.
pub const ORACLE_TAIL: f64 = 1e-12;

/// `E[Φ_{α,β}(Z_{x-1}, Z_x) | Z_{x-1} = i] = Σ_j Φ_{α,β}(i, j) K(i, j)`.
pub fn conditional_moment_oracle(spec: &EnvSpec, alpha: u32, beta: u32, i: u64) -> Result<f64> {
    if i < alpha as u64 {
        return Ok(0.0);
    }
    let row = kernel_row(spec, i, ORACLE_TAIL)?;
    Ok(row.expect(|j| phi(alpha, beta, i, j)))
}

/// `E[ψ^l_M(Z_{x-1}, Z_x) | Z_{x-1} = i] = Σ_j ψ^l_M(i, j) K(i, j)`.
pub fn conditional_cdf_oracle(spec: &EnvSpec, l: usize, m: usize, i: u64) -> Result<f64> {
    if i < m as u64 || l == 0 {
        return Ok(0.0);
    }
    let row = kernel_row(spec, i, ORACLE_TAIL)?;
    Ok(row.expect(|j| psi(l, m, i, j)))
}
