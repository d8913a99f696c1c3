use serde::Serialize;

use crate::env_model::{EnvSpec, Regime};
use crate::error::{Error, Result};
use crate::rng::{self, Domain};

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub level: u64,
    pub mean: f64,
    pub std_error: f64,
}

/// Increments `e^{V_x - V_0}` below this end the series for `W`.
const SERIES_CUTOFF: f64 = 1e-14;

/// Estimates `π([M, ∞)) = E[(1 - 1/W)^M]` with `W = Σ_{x≥0} Π_{z=1}^{x} ρ_z`.
pub fn invariant_tail(spec: &EnvSpec, level: u64, n_terms: usize, n_samples: usize, seed: u64) -> Result<TailEstimate> {
    Ok(invariant_tail_profile(spec, &[level], n_terms, n_samples, seed)?[0])
}

/// [`invariant_tail`] for several levels from one set of `W` draws.
pub fn invariant_tail_profile(
    spec: &EnvSpec,
    levels: &[u64],
    n_terms: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<TailEstimate>> {
    match spec.solve_kappa()? {
        Regime::TransientRight { .. } | Regime::NoKappa => {}
        other => return Err(Error::Regime { required: "transient to the right", found: other.name() }),
    }
    assert!(n_samples >= 2, "need at least two samples");
    let mut rng = rng::stream(seed, Domain::Tail, 0);
    let mut sums = vec![0.0f64; levels.len()];
    let mut squares = vec![0.0f64; levels.len()];
    for _ in 0..n_samples {
        let mut w = 1.0f64;
        let mut increment = 1.0f64;
        for _ in 1..n_terms {
            let omega = spec.sample_omega(&mut rng);
            increment *= (1.0 - omega) / omega;
            w += increment;
            if increment < SERIES_CUTOFF {
                break;
            }
        }
        debug_assert!(w >= 1.0);
        let base = 1.0 - 1.0 / w;
        for (k, &m) in levels.iter().enumerate() {
            let v = if m == 0 { 1.0 } else { base.powf(m as f64) };
            sums[k] += v;
            squares[k] += v * v;
        }
    }
    let n = n_samples as f64;
    Ok(levels
        .iter()
        .enumerate()
        .map(|(k, &level)| {
            let mean = sums[k] / n;
            let var = ((squares[k] - n * mean * mean) / (n - 1.0)).max(0.0);
            TailEstimate { level, mean, std_error: (var / n).sqrt() }
        })
        .collect())
}
