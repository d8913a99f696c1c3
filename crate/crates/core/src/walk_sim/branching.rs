use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use super::{Environment, TimeSource, ZPath};
use crate::env_model::EnvSpec;
use crate::error::{Error, Result};
use crate::rng::{self, Domain};

/// Largest count the branching sampler accepts.
pub const Z_LIMIT: u64 = 1 << 62;

/// Above this many successes the negative binomial is drawn as a
/// Gamma–Poisson mixture instead of a sum of geometrics.
const GEOMETRIC_SUM_LIMIT: u64 = 64;

/// Source of the per-site success probabilities.
pub enum SamplerMode<'a> {
    /// A fresh `a ~ ν` at every generation: the homogeneous chain with
    /// kernel `K^ν`.
    Annealed,
    /// `a = ω_{n-x-1}` read from a fixed environment.
    Quenched(&'a mut Environment),
}

/// Failures before the `successes`-th success with success probability `p`.
/// Returns `None` when the draw exceeds [`Z_LIMIT`].
pub fn negative_binomial<R: Rng + ?Sized>(successes: u64, p: f64, rng: &mut R) -> Option<u64> {
    if successes == 0 {
        return Some(0);
    }
    if successes <= GEOMETRIC_SUM_LIMIT {
        let log_q = (-p).ln_1p();
        let mut total: u64 = 0;
        for _ in 0..successes {
            // Inversion: floor(log U / log(1-p)), U in (0, 1].
            let u = 1.0 - rng.random::<f64>();
            let g = (u.ln() / log_q).floor();
            if g.is_nan() || g >= Z_LIMIT as f64 {
                return None;
            }
            total = total.checked_add(g as u64)?;
        }
        return (total < Z_LIMIT).then_some(total);
    }
    let scale = (1.0 - p) / p;
    let lambda = Gamma::new(successes as f64, scale).ok()?.sample(rng);
    if lambda.is_nan() || lambda >= Z_LIMIT as f64 {
        return None;
    }
    if lambda <= 0.0 {
        return Some(0);
    }
    let draw: f64 = Poisson::new(lambda).ok()?.sample(rng);
    (draw < Z_LIMIT as f64).then_some(draw as u64)
}

/// Samples `(Z_0, ..., Z_n)` directly: `Z_0 = 0` and `Z_{x+1}` given `Z_x = i`
/// is negative binomial with `i + 1` successes.
pub fn simulate_z_branching(spec: &EnvSpec, n: usize, seed: u64, mode: SamplerMode<'_>) -> Result<ZPath> {
    assert!(n >= 1, "n must be positive");
    let mut rng = rng::stream(seed, Domain::Branching, 0);
    let mut z = Vec::with_capacity(n + 1);
    z.push(0u64);
    let mut quenched = match mode {
        SamplerMode::Annealed => None,
        SamplerMode::Quenched(env) => Some(env),
    };
    for x in 0..n {
        let a = match quenched.as_deref_mut() {
            Some(env) => env.omega((n - x - 1) as i64),
            None => spec.sample_omega(&mut rng),
        };
        let next = negative_binomial(z[x] + 1, a, &mut rng).ok_or(Error::Overflow { x: x + 1 })?;
        z.push(next);
    }
    let hitting_time = n as u64 + 2 * z.iter().sum::<u64>();
    Ok(ZPath { n, hitting_time, z, time_source: TimeSource::Branching })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk_sim::sample_environment;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn geometric_half_has_half_mass_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let reps = 200_000;
        let zeros = (0..reps).filter(|_| negative_binomial(1, 0.5, &mut rng) == Some(0)).count();
        let p = zeros as f64 / reps as f64;
        assert!((p - 0.5).abs() < 4.0 * (0.25 / reps as f64).sqrt());
    }

    #[test]
    fn negative_binomial_moments_both_branches() {
        // mean k(1-p)/p, variance k(1-p)/p^2
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &(k, p) in &[(5u64, 0.3), (64, 0.6), (65, 0.6), (500, 0.45)] {
            let reps = 40_000;
            let draws: Vec<f64> = (0..reps).map(|_| negative_binomial(k, p, &mut rng).unwrap() as f64).collect();
            let mean = draws.iter().sum::<f64>() / reps as f64;
            let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
            let mu = k as f64 * (1.0 - p) / p;
            let sigma2 = mu / p;
            assert!((mean - mu).abs() < 4.0 * (sigma2 / reps as f64).sqrt(), "k={k} mean {mean} vs {mu}");
            assert!((var / sigma2 - 1.0).abs() < 0.05, "k={k} var {var} vs {sigma2}");
        }
    }

    #[test]
    fn overflow_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(negative_binomial(1000, 1e-300, &mut rng), None);
    }

    #[test]
    fn deterministic_and_starts_at_zero() {
        let spec = EnvSpec::beta(3.0, 3.0).unwrap();
        let a = simulate_z_branching(&spec, 500, 11, SamplerMode::Annealed).unwrap();
        let b = simulate_z_branching(&spec, 500, 11, SamplerMode::Annealed).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.z[0], 0);
        assert_eq!(a.z.len(), 501);
        assert_eq!(a.time_source, TimeSource::Branching);
        assert_eq!(a.hitting_time, 500 + 2 * a.total_left_steps());
    }

    #[test]
    fn quenched_reads_fixed_environment() {
        let spec = EnvSpec::beta(4.0, 3.0).unwrap();
        let mut env = sample_environment(&spec, 0);
        let q1 = simulate_z_branching(&spec, 20, 4, SamplerMode::Quenched(&mut env)).unwrap();
        let q2 = simulate_z_branching(&spec, 20, 4, SamplerMode::Quenched(&mut env)).unwrap();
        assert_eq!(q1, q2);
        // sites 0..n-1 were generated, nothing else
        assert_eq!(env.generated_sites(), 20);
    }
}
