//! Monte Carlo replication harness.
//!
//! Every replication derives its seed from `(base_seed, n, replication)`
//! and draws a fresh environment, so results do not depend on the number
//! of workers or on scheduling.

mod figures;
mod presets;
mod risk;
mod verify;

pub use figures::{run_figure_dataset, run_figure_dataset_with, FigureBundle};
pub use presets::{figure_preset, table1_preset, FigurePreset, FIGURE_PRESETS, TABLE1_PRESETS};
pub use risk::{run_risk_experiment, RiskRow, RiskTable};
pub use verify::{
    verify_clt, verify_concentration, verify_occupation, CltReport, ConcentrationReport, ConcentrationRow,
    LongRunVariance, OccupationReport, OccupationRow, ProfileRow, TailSettings,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env_model::{EnvSpec, Regime};
use crate::error::{Error, Result};
use crate::lepskii::{adaptive_estimate_capped, LepskiiResult, ZPolicy, DEFAULT_M_CAP};
use crate::rng::derive_seed;
use crate::walk_sim::{simulate_walk, simulate_z_branching, Environment, SamplerMode, ZPath, DEFAULT_MAX_STEPS};
use crate::estimators::sup_loss;

/// Largest `n` simulated step by step in the recurrent regime under [`Engine::Auto`].
pub const RECURRENT_WALK_LIMIT: usize = 500;

/// Which sampler produces `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// The walk, except for recurrent laws with `n > RECURRENT_WALK_LIMIT`.
    #[default]
    Auto,
    Walk,
    Branching,
}

impl Engine {
    fn uses_walk(self, regime: &Regime, n: usize) -> bool {
        match self {
            Engine::Walk => true,
            Engine::Branching => false,
            Engine::Auto => !(matches!(regime, Regime::Recurrent) && n > RECURRENT_WALK_LIMIT),
        }
    }
}

fn default_m_cap() -> usize {
    DEFAULT_M_CAP
}

fn default_max_steps() -> u64 {
    DEFAULT_MAX_STEPS
}

fn default_workers() -> usize {
    1
}

/// Knobs shared by every single-trajectory pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    #[serde(default)]
    pub engine: Engine,
    #[serde(default)]
    pub z_policy: ZPolicy,
    #[serde(default = "default_m_cap")]
    pub m_cap: usize,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            engine: Engine::Auto,
            z_policy: ZPolicy::Auto,
            m_cap: DEFAULT_M_CAP,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

/// A risk experiment: `replications` pipelines at each `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spec: EnvSpec,
    pub n_values: Vec<usize>,
    pub replications: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub z_policy: ZPolicy,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default = "default_m_cap")]
    pub m_cap: usize,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
}

impl ExperimentConfig {
    pub fn new(spec: EnvSpec, n_values: Vec<usize>, replications: usize, base_seed: u64) -> Self {
        ExperimentConfig {
            spec,
            n_values,
            replications,
            base_seed,
            z_policy: ZPolicy::Auto,
            workers: 1,
            engine: Engine::Auto,
            m_cap: DEFAULT_M_CAP,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        let invalid = |msg: &str| Err(Error::InvalidSpec(msg.to_string()));
        if self.n_values.is_empty() {
            return invalid("n_values must not be empty");
        }
        if self.n_values[0] < 2 {
            return invalid("every n must be at least 2");
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("n_values must be strictly increasing");
        }
        if self.replications == 0 {
            return invalid("replications must be positive");
        }
        if self.workers == 0 {
            return invalid("workers must be positive");
        }
        if self.m_cap == 0 {
            return invalid("m_cap must be positive");
        }
        if let ZPolicy::Fixed(z) = self.z_policy {
            if !(z > 0.0 && z.is_finite()) {
                return invalid("z must be positive");
            }
        }
        Ok(())
    }

    pub fn pipeline_options(&self) -> PipelineOptions {
        PipelineOptions { engine: self.engine, z_policy: self.z_policy, m_cap: self.m_cap, max_steps: self.max_steps }
    }
}

/// Seed of replication `rep` at sample size `n`.
pub fn replication_seed(base_seed: u64, n: usize, rep: usize) -> u64 {
    derive_seed(base_seed, &[n as u64, rep as u64])
}

/// Draws a fresh environment from `seed` and the path `Z` over it.
pub fn simulate_path(
    spec: &EnvSpec,
    regime: &Regime,
    n: usize,
    seed: u64,
    engine: Engine,
    max_steps: u64,
) -> Result<(ZPath, Environment)> {
    let mut env = Environment::new(spec.clone(), derive_seed(seed, &[0]));
    let walk_seed = derive_seed(seed, &[1]);
    let path = if engine.uses_walk(regime, n) {
        simulate_walk(&mut env, n, walk_seed, max_steps)?
    } else {
        simulate_z_branching(spec, n, walk_seed, SamplerMode::Quenched(&mut env))?
    };
    Ok((path, env))
}

/// One simulate → select → score pass.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub path: ZPath,
    pub environment: Environment,
    pub selection: LepskiiResult,
    pub loss: f64,
}

pub fn run_pipeline(spec: &EnvSpec, regime: &Regime, n: usize, seed: u64, opts: &PipelineOptions) -> Result<PipelineRun> {
    let (path, environment) = simulate_path(spec, regime, n, seed, opts.engine, opts.max_steps)?;
    let selection = adaptive_estimate_capped(&path, opts.z_policy, opts.m_cap)?;
    let loss = sup_loss(&selection.final_estimate, spec);
    Ok(PipelineRun { path, environment, selection, loss })
}

/// Evaluates `f(0), …, f(count - 1)` on a pool of `workers` threads and
/// returns the results in index order.
pub fn run_indexed<T, F>(workers: usize, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| (0..count).into_par_iter().map(&f).collect())
}

/// Regimes in which the walk reaches `n` almost surely.
fn require_reaching(regime: &Regime) -> Result<()> {
    match regime {
        Regime::TransientLeft => Err(Error::Regime { required: "recurrent or transient to the right", found: regime.name() }),
        _ => Ok(()),
    }
}

/// Regimes covered by the central limit and occupation results.
fn require_transient_right(regime: &Regime) -> Result<()> {
    match regime {
        Regime::TransientRight { .. } | Regime::NoKappa => Ok(()),
        _ => Err(Error::Regime { required: "transient to the right", found: regime.name() }),
    }
}
