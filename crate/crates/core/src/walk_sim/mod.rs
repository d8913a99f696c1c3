//! Environments, walks and the left-step process `Z`.
//!
//! `Z_x^n = L(T_n, n - x)` counts the left steps taken from site `n - x`
//! before the walk first hits `n`. Under the annealed law it is a branching
//! process with immigration whose one-step kernel is [`kernel_row`].

mod branching;
mod environment;
mod invariant;
pub mod io;
mod kernel;
mod walk;

pub use branching::{negative_binomial, simulate_z_branching, SamplerMode};
pub use environment::{sample_environment, Environment};
pub use invariant::{invariant_tail, invariant_tail_profile, TailEstimate};
pub use kernel::{kernel_row, KernelRow, KERNEL_J_CAP};
pub use walk::{simulate_walk, DEFAULT_MAX_STEPS};

use serde::{Deserialize, Serialize};

/// How `hitting_time` of a [`ZPath`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeSource {
    /// Counted step by step: the true `T_n`.
    Walk,
    /// `n + 2 Σ_{x=0}^{n} z[x]`, which ignores excursions below the origin.
    Branching,
}

/// The sufficient statistic `(Z_0^n, ..., Z_n^n)` of one trajectory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZPath {
    pub n: usize,
    pub hitting_time: u64,
    pub z: Vec<u64>,
    pub time_source: TimeSource,
}

impl ZPath {
    /// `#{x in [0, n-1] : z[x] >= level}`.
    pub fn visits(&self, level: u64) -> usize {
        self.z[..self.n].iter().filter(|&&v| v >= level).count()
    }

    /// Largest `z[x]` over `x in [0, n-1]`.
    pub fn max_level(&self) -> u64 {
        self.z[..self.n].iter().copied().max().unwrap_or(0)
    }

    /// Consecutive pairs `(z[x-1], z[x])`, `x = 1..=n`.
    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.z.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn total_left_steps(&self) -> u64 {
        self.z.iter().sum()
    }
}
