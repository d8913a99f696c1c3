//! Monte Carlo checks of the moment estimators' concentration and
//! asymptotic normality, and of the occupation counts `N_n^M / n`.

use serde::Serialize;

use super::{require_transient_right, run_indexed};
use crate::env_model::EnvSpec;
use crate::error::Result;
use crate::estimators::{estimate_moment, phi, MomentEstimate};
use crate::rng::derive_seed;
use crate::stats;
use crate::walk_sim::{invariant_tail_profile, simulate_z_branching, SamplerMode, ZPath};

/// Annealed path for replication `rep`.
fn annealed_path(spec: &EnvSpec, n: usize, seed: u64, rep: usize) -> Result<ZPath> {
    simulate_z_branching(spec, n, derive_seed(seed, &[n as u64, rep as u64]), SamplerMode::Annealed)
}

fn moment_sample(spec: &EnvSpec, alpha: u32, beta: u32, n: usize, reps: usize, seed: u64, workers: usize) -> Result<Vec<MomentEstimate>> {
    run_indexed(workers, reps, |rep| annealed_path(spec, n, seed, rep).map(|p| estimate_moment(&p, alpha, beta)))
        .into_iter()
        .collect()
}

/// Long-run estimate of the limiting variance from one stationary chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LongRunVariance {
    pub value: f64,
    pub std_error: f64,
    pub sites: usize,
    pub burn_in: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltReport {
    pub alpha: u32,
    pub beta: u32,
    pub n: usize,
    pub replications: usize,
    pub true_moment: f64,
    /// Mean of `sqrt(n)(m̂ - m)`.
    pub mean_scaled_error: f64,
    /// Sample variance of `sqrt(n)(m̂ - m)`.
    pub variance: f64,
    pub variance_se: f64,
    /// KS distance of the standardized sample to `N(0, 1)`.
    pub ks_distance: f64,
    pub insufficient_sample: bool,
    pub long_run: Option<LongRunVariance>,
    /// `[m^{0,2β} - (m^{0,β})², m^{0,β} - (m^{0,β})²]` when `α = 0`.
    pub variance_bounds: Option<[f64; 2]>,
}

impl CltReport {
    /// Whether the sample variance lies within the bounds up to `k` standard errors.
    pub fn variance_within_bounds(&self, k: f64) -> Option<bool> {
        self.variance_bounds
            .map(|[lo, hi]| self.variance >= lo - k * self.variance_se && self.variance <= hi + k * self.variance_se)
    }
}

const LONG_RUN_SITES: usize = 400_000;
const LONG_RUN_BURN_IN: usize = 2_000;
const LONG_RUN_BATCHES: usize = 40;

/// `E[Φ²]/p² - m²/p` with `p = P(Z̃_0 ≥ α)`, estimated by batch means along
/// one long annealed chain.
fn long_run_variance(spec: &EnvSpec, alpha: u32, beta: u32, m: f64, seed: u64) -> Result<LongRunVariance> {
    let total = LONG_RUN_SITES + LONG_RUN_BURN_IN;
    let path = simulate_z_branching(spec, total, derive_seed(seed, &[u64::MAX]), SamplerMode::Annealed)?;
    let pairs: Vec<(u64, u64)> = path.pairs().skip(LONG_RUN_BURN_IN).collect();
    let batch = pairs.len() / LONG_RUN_BATCHES;
    let estimate = |chunk: &[(u64, u64)]| {
        let len = chunk.len() as f64;
        let second: f64 = chunk.iter().map(|&(i, j)| phi(alpha, beta, i, j).powi(2)).sum::<f64>() / len;
        let p = chunk.iter().filter(|&&(i, _)| i >= alpha as u64).count() as f64 / len;
        second / (p * p) - m * m / p
    };
    let batches: Vec<f64> = pairs.chunks_exact(batch).map(estimate).collect();
    Ok(LongRunVariance {
        value: estimate(&pairs),
        std_error: stats::standard_error(&batches),
        sites: LONG_RUN_SITES,
        burn_in: LONG_RUN_BURN_IN,
    })
}

/// Samples `sqrt(n)(m̂^{α,β} - m^{α,β})` over independent annealed paths.
pub fn verify_clt(
    spec: &EnvSpec,
    alpha: u32,
    beta: u32,
    n: usize,
    replications: usize,
    seed: u64,
    workers: usize,
) -> Result<CltReport> {
    require_transient_right(&spec.solve_kappa()?)?;
    let m = spec.exact_moment(alpha, beta);
    let sample = moment_sample(spec, alpha, beta, n, replications, seed, workers)?;
    let scaled: Vec<f64> = sample.iter().map(|e| (n as f64).sqrt() * (e.value - m)).collect();
    let insufficient = replications < 2;
    let variance = stats::sample_sd(&scaled).powi(2);
    let squares: Vec<f64> = scaled.iter().map(|x| x * x).collect();
    let ks_distance = if insufficient {
        f64::NAN
    } else {
        let sd = variance.sqrt();
        stats::ks_normal(&scaled.iter().map(|x| x / sd).collect::<Vec<_>>())
    };
    let variance_bounds = (alpha == 0).then(|| {
        let m2 = spec.exact_moment(0, 2 * beta);
        [m2 - m * m, m - m * m]
    });
    Ok(CltReport {
        alpha,
        beta,
        n,
        replications,
        true_moment: m,
        mean_scaled_error: stats::mean(&scaled),
        variance,
        variance_se: stats::standard_error(&squares),
        ks_distance,
        insufficient_sample: insufficient,
        long_run: Some(long_run_variance(spec, alpha, beta, m, seed)?),
        variance_bounds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationRow {
    pub z: f64,
    /// `2e^{-z}`.
    pub nominal: f64,
    pub violations: usize,
    pub replications: usize,
    pub frequency: f64,
    /// `P(Bin(replications, min(nominal, 1)) ≥ violations)`.
    pub p_value: f64,
    /// `2e^{-z} ≥ 1` makes the bound vacuous.
    pub trivially_satisfied: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub alpha: u32,
    pub beta: u32,
    pub n: usize,
    pub true_moment: f64,
    pub rows: Vec<ConcentrationRow>,
}

/// Significance of the one-sided binomial check.
const BINOMIAL_LEVEL: f64 = 0.01;

/// Counts `|m̂ - m| ≥ (n/N_n^α) C(α+β,α)^{-1} sqrt(z/2n)` for each `z`.
#[allow(clippy::too_many_arguments)]
pub fn verify_concentration(
    spec: &EnvSpec,
    alpha: u32,
    beta: u32,
    n: usize,
    z_list: &[f64],
    replications: usize,
    seed: u64,
    workers: usize,
) -> Result<ConcentrationReport> {
    let m = spec.exact_moment(alpha, beta);
    let sample = moment_sample(spec, alpha, beta, n, replications, seed, workers)?;
    let rows = z_list
        .iter()
        .map(|&z| {
            let nominal = 2.0 * (-z).exp();
            let violations = sample.iter().filter(|e| (e.value - m).abs() >= e.deviation_bound(z).bound).count();
            let p_value = stats::binomial_upper_tail(violations as u64, replications as u64, nominal.min(1.0));
            let trivially_satisfied = nominal >= 1.0;
            ConcentrationRow {
                z,
                nominal,
                violations,
                replications,
                frequency: violations as f64 / replications as f64,
                p_value,
                trivially_satisfied,
                pass: trivially_satisfied || p_value > BINOMIAL_LEVEL,
            }
        })
        .collect();
    Ok(ConcentrationReport { alpha, beta, n, true_moment: m, rows })
}

/// Monte Carlo effort for the invariant-law tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailSettings {
    pub n_terms: usize,
    pub n_samples: usize,
}

impl Default for TailSettings {
    fn default() -> Self {
        TailSettings { n_terms: 100_000, n_samples: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationRow {
    #[serde(rename = "M")]
    pub m: u64,
    /// Mean of `N_n^M / n`.
    pub mean_fraction: f64,
    pub se_fraction: f64,
    /// `π([M, ∞))`.
    pub tail: f64,
    pub tail_se: f64,
    pub gap: f64,
    pub combined_se: f64,
    pub within_4se: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    #[serde(rename = "M")]
    pub m: u64,
    /// `M^κ π̂([M, ∞))`.
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationReport {
    pub n: usize,
    pub replications: usize,
    pub kappa: Option<f64>,
    pub rows: Vec<OccupationRow>,
    pub profile: Vec<ProfileRow>,
    pub max_gap: f64,
}

impl OccupationReport {
    /// `(max - min) / min` of the profile over the levels in `levels`.
    pub fn profile_spread(&self, levels: &[u64]) -> f64 {
        let vals: Vec<f64> = self.profile.iter().filter(|r| levels.contains(&r.m)).map(|r| r.value).collect();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (hi - lo) / lo
    }
}

/// Compares `E[N_n^M] / n` with `π([M, ∞))` for every `M` in `m_list`.
#[allow(clippy::too_many_arguments)]
pub fn verify_occupation(
    spec: &EnvSpec,
    m_list: &[u64],
    n: usize,
    replications: usize,
    seed: u64,
    workers: usize,
    tail: TailSettings,
) -> Result<OccupationReport> {
    let regime = spec.solve_kappa()?;
    require_transient_right(&regime)?;
    let fractions: Vec<Vec<f64>> = run_indexed(workers, replications, |rep| {
        annealed_path(spec, n, seed, rep).map(|p| m_list.iter().map(|&m| p.visits(m) as f64 / n as f64).collect())
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let tails = invariant_tail_profile(spec, m_list, tail.n_terms, tail.n_samples, derive_seed(seed, &[u64::MAX]))?;
    let rows: Vec<OccupationRow> = m_list
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            let column: Vec<f64> = fractions.iter().map(|f| f[k]).collect();
            let mean_fraction = stats::mean(&column);
            let se_fraction = if replications > 1 { stats::standard_error(&column) } else { 0.0 };
            let t = tails[k];
            let gap = (mean_fraction - t.mean).abs();
            let combined_se = (se_fraction.powi(2) + t.std_error.powi(2)).sqrt();
            OccupationRow {
                m,
                mean_fraction,
                se_fraction,
                tail: t.mean,
                tail_se: t.std_error,
                gap,
                combined_se,
                within_4se: gap <= 4.0 * combined_se,
            }
        })
        .collect();
    let kappa = regime.kappa();
    let profile = match kappa {
        Some(kappa) => tails
            .iter()
            .filter(|t| t.level > 0)
            .map(|t| {
                let scale = (t.level as f64).powf(kappa);
                ProfileRow { m: t.level, value: scale * t.mean, std_error: scale * t.std_error }
            })
            .collect(),
        None => Vec::new(),
    };
    let max_gap = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
    Ok(OccupationReport { n, replications, kappa, rows, profile, max_gap })
}
