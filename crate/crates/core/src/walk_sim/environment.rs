use rand_chacha::ChaCha8Rng;

use crate::env_model::EnvSpec;
use crate::rng::{self, Domain};

/// A lazily extended i.i.d. environment `(ω_x)_{x∈Z}`.
///
/// Sites are drawn on first read from their own counter-based stream, so a
/// site's value depends only on `(seed, x)`. Storage is a contiguous
/// two-sided array indexed by the offset from the lowest allocated site.
#[derive(Debug, Clone)]
pub struct Environment {
    spec: EnvSpec,
    seed: u64,
    /// Index of site 0 inside `omega`.
    origin: usize,
    /// `NaN` marks a site that has not been generated.
    omega: Vec<f64>,
    generated: usize,
}

pub fn sample_environment(spec: &EnvSpec, seed: u64) -> Environment {
    Environment::new(spec.clone(), seed)
}

impl Environment {
    pub fn new(spec: EnvSpec, seed: u64) -> Self {
        Self { spec, seed, origin: 0, omega: Vec::new(), generated: 0 }
    }

    pub fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of distinct sites generated so far.
    pub fn generated_sites(&self) -> usize {
        self.generated
    }

    /// `ω_x`, generating it on first access.
    pub fn omega(&mut self, x: i64) -> f64 {
        let idx = self.slot(x);
        let v = self.omega[idx];
        if !v.is_nan() {
            return v;
        }
        let v = self.spec.sample_omega(&mut self.site_rng(x));
        self.omega[idx] = v;
        self.generated += 1;
        v
    }

    /// `(ω_x)_{x in range}` in order.
    pub fn values(&mut self, range: std::ops::Range<i64>) -> Vec<f64> {
        range.map(|x| self.omega(x)).collect()
    }

    fn site_rng(&self, x: i64) -> ChaCha8Rng {
        rng::stream(self.seed, Domain::Environment, rng::zigzag(x))
    }

    fn slot(&mut self, x: i64) -> usize {
        let lowest = -(self.origin as i64);
        if x < lowest {
            let need = (lowest - x) as usize;
            let extra = need.max(self.omega.len()).max(16);
            let mut grown = vec![f64::NAN; extra + self.omega.len()];
            grown[extra..].copy_from_slice(&self.omega);
            self.omega = grown;
            self.origin += extra;
        }
        let idx = (x + self.origin as i64) as usize;
        if idx >= self.omega.len() {
            let len = (idx + 1).max(2 * self.omega.len()).max(16);
            self.omega.resize(len, f64::NAN);
        }
        idx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_environment() {
        let spec = EnvSpec::discrete(vec![(1.0, 0.7)]).unwrap();
        let mut env = sample_environment(&spec, 99);
        for x in -50..50 {
            assert_eq!(env.omega(x), 0.7);
        }
    }

    #[test]
    fn memoized_and_order_independent() {
        let spec = EnvSpec::beta(3.0, 3.0).unwrap();
        let mut a = sample_environment(&spec, 5);
        let first = a.omega(5);
        assert_eq!(a.omega(5), first);
        let mut b = sample_environment(&spec, 5);
        let _ = b.omega(-1000);
        let _ = b.omega(300);
        assert_eq!(b.omega(5), first);
        assert_eq!(b.generated_sites(), 3);
        let mut c = sample_environment(&spec, 6);
        assert_ne!(c.omega(5), first);
    }

    #[test]
    fn beta_site_mean_within_three_sigma() {
        let spec = EnvSpec::beta(3.0, 3.0).unwrap();
        let mut env = sample_environment(&spec, 2024);
        let n = 100_000;
        let vals = env.values(0..n);
        let mean = vals.iter().sum::<f64>() / n as f64;
        let m1 = spec.exact_moment(1, 0);
        let var = spec.exact_moment(2, 0) - m1 * m1;
        assert!((mean - m1).abs() < 3.0 * (var / n as f64).sqrt());
    }
}
