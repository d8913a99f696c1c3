use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::weights::hypergeometric_pmf;
use crate::env_model::EnvSpec;
use crate::walk_sim::ZPath;

/// The step-function c.d.f. estimator `F̂^M`, stored by its values on the
/// grid `l / (M + 1)`, `l = 0..=M+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfEstimate {
    #[serde(rename = "M")]
    pub m: usize,
    pub grid_values: Vec<f64>,
    /// `N_n^M = #{x < n : Z_x ≥ M}`.
    pub visits: usize,
    pub n: usize,
}

impl CdfEstimate {
    /// True when no site reached level `M`, so the estimate is identically 0.
    pub fn is_degenerate(&self) -> bool {
        self.visits == 0
    }

    /// Value of the step function at `u ∈ [0, 1]`.
    pub fn eval(&self, u: f64) -> f64 {
        let l = ((self.m + 1) as f64 * u.clamp(0.0, 1.0)).floor() as usize;
        self.grid_values[l.min(self.m + 1)]
    }

    /// Exact `sup_{u∈[0,1]} |F̂^M(u) - F̂^{M'}(u)|` between two step estimators.
    ///
    /// Walks the merged breakpoints `l/(M+1)` and `l'/(M'+1)` in order using
    /// integer cross-multiplication, so coincident knots are detected exactly.
    pub fn sup_distance(&self, other: &CdfEstimate) -> f64 {
        let (ma, mb) = (self.m as u64 + 1, other.m as u64 + 1);
        let (a, b) = (&self.grid_values, &other.grid_values);
        let (mut la, mut lb) = (0u64, 0u64);
        let mut best = 0.0f64;
        loop {
            best = best.max((a[la as usize] - b[lb as usize]).abs());
            if la + 1 == ma && lb + 1 == mb {
                break;
            }
            // next knots (la+1)/ma and (lb+1)/mb
            let lhs = (la + 1) * mb;
            let rhs = (lb + 1) * ma;
            if lhs <= rhs {
                la += 1;
            }
            if rhs <= lhs {
                lb += 1;
            }
        }
        best.max((a[self.m + 1] - b[other.m + 1]).abs())
    }
}

/// Accumulates `Σ_x ψ^l_M(Z_{x-1}, Z_x)` for every `l` at a single `M`.
fn accumulate(zpath: &ZPath, m: usize) -> CdfEstimate {
    let mut acc = vec![0.0; m + 1];
    let mut pmf = vec![0.0; m + 1];
    let mut visits = 0usize;
    for (i, j) in zpath.pairs() {
        if i < m as u64 {
            continue;
        }
        visits += 1;
        hypergeometric_pmf(m, i, j, &mut pmf);
        for (a, p) in acc.iter_mut().zip(&pmf) {
            *a += p;
        }
    }
    let mut grid_values = vec![0.0; m + 2];
    if visits > 0 {
        let mut running = 0.0;
        for l in 1..=m {
            running += acc[l - 1];
            grid_values[l] = (running / visits as f64).min(1.0);
        }
        grid_values[m + 1] = 1.0;
    }
    CdfEstimate { m, grid_values, visits, n: zpath.n }
}

/// `F̂^M` on its grid.
pub fn estimate_cdf(zpath: &ZPath, m: usize) -> CdfEstimate {
    assert!(m >= 1, "M must be positive");
    accumulate(zpath, m)
}

/// `F̂^M` for every `M ∈ [1, m_max]`, computed concurrently over `M`.
pub fn estimate_cdf_sweep(zpath: &ZPath, m_max: usize) -> Vec<CdfEstimate> {
    (1..=m_max).into_par_iter().map(|m| accumulate(zpath, m)).collect()
}

/// `sup_{u∈[0,1]} |F̂(u) - F(u)|` against the exact c.d.f. of `spec`.
///
/// On each cell `[l/(M+1), (l+1)/(M+1))` the estimate is constant and `F`
/// is nondecreasing, so the sup is reached at the left end or at the left
/// limit of the right end.
pub fn sup_loss(est: &CdfEstimate, spec: &EnvSpec) -> f64 {
    let m1 = (est.m + 1) as f64;
    let f = |u: f64| spec.exact_cdf(u).expect("grid point in [0,1]");
    let f_left = |u: f64| spec.exact_cdf_left(u).expect("grid point in [0,1]");
    let mut loss = 0.0f64;
    for l in 0..=est.m {
        let v = est.grid_values[l];
        let lo = l as f64 / m1;
        let hi = (l + 1) as f64 / m1;
        loss = loss.max(v - f(lo)).max(f_left(hi) - v);
    }
    loss.max((est.grid_values[est.m + 1] - f(1.0)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::psi;
    use crate::walk_sim::TimeSource;

    fn path(z: Vec<u64>) -> ZPath {
        ZPath { n: z.len() - 1, hitting_time: 0, z, time_source: TimeSource::Walk }
    }

    fn step(values: Vec<f64>) -> CdfEstimate {
        CdfEstimate { m: values.len() - 2, grid_values: values, visits: 1, n: 1 }
    }

    #[test]
    fn matches_literal_psi_average() {
        let p = path(vec![0, 5, 3, 9, 2, 0, 4, 12, 1, 6, 6]);
        for m in 1..=6 {
            let est = estimate_cdf(&p, m);
            let visits = p.visits(m as u64);
            assert_eq!(est.visits, visits);
            for l in 0..=m + 1 {
                let lit: f64 = p.pairs().map(|(i, j)| psi(l, m, i, j)).sum::<f64>() / visits as f64;
                assert!((est.grid_values[l] - lit).abs() < 1e-13, "M={m} l={l}");
            }
        }
    }

    #[test]
    fn degenerate_when_level_unreached() {
        let est = estimate_cdf(&path(vec![0, 1, 2, 1]), 3);
        assert!(est.is_degenerate());
        assert!(est.grid_values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sweep_equals_single() {
        let p = path(vec![0, 5, 3, 9, 2, 0, 4, 12, 1, 6, 6]);
        let sweep = estimate_cdf_sweep(&p, 12);
        for (k, est) in sweep.iter().enumerate() {
            assert_eq!(est, &estimate_cdf(&p, k + 1));
        }
    }

    #[test]
    fn sup_distance_on_merged_grid() {
        // F̂^1 jumps at 1/2, F̂^2 at 1/3 and 2/3
        let a = step(vec![0.0, 0.4, 1.0]);
        let b = step(vec![0.0, 0.1, 0.9, 1.0]);
        // gaps 0.1 on [1/3,1/2), 0.3 on [1/2,2/3), 0.5 on [2/3,1)
        assert!((a.sup_distance(&b) - 0.5).abs() < 1e-15);
        assert!((b.sup_distance(&a) - 0.5).abs() < 1e-15);
        assert_eq!(a.sup_distance(&a), 0.0);
        // coincident knots: M=1 and M=3 share 1/2
        let c = step(vec![0.0, 0.2, 0.4, 0.6, 1.0]);
        let brute = (0..=1000).map(|k| k as f64 / 1000.0).map(|u| (a.eval(u) - c.eval(u)).abs()).fold(0.0, f64::max);
        assert!((a.sup_distance(&c) - brute).abs() < 1e-15);
    }

    #[test]
    fn loss_of_zero_estimate_is_one() {
        let est = CdfEstimate { m: 4, grid_values: vec![0.0; 6], visits: 0, n: 10 };
        for spec in [EnvSpec::beta(3.0, 3.0).unwrap(), EnvSpec::uniform(0.3, 0.9).unwrap()] {
            assert!((sup_loss(&est, &spec) - 1.0).abs() < 1e-12);
        }
        let d = EnvSpec::discrete(vec![(0.5, 0.4), (0.5, 0.8)]).unwrap();
        assert!((sup_loss(&est, &d) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn loss_of_exact_grid_within_oscillation() {
        let spec = EnvSpec::beta(3.0, 3.0).unwrap();
        let m = 39;
        let grid: Vec<f64> = (0..=m + 1).map(|l| spec.exact_cdf(l as f64 / 40.0).unwrap()).collect();
        let loss = sup_loss(&step(grid), &spec);
        assert!(loss > 0.0 && loss <= 1.875 / 40.0 + 1e-12, "{loss}");
    }

    #[test]
    fn loss_on_atoms_uses_both_sides() {
        let d = EnvSpec::discrete(vec![(0.5, 0.5), (0.5, 0.75)]).unwrap();
        // exact step values on the M=3 grid 0, 1/4, 1/2, 3/4, 1
        let est = step(vec![0.0, 0.0, 0.5, 1.0, 1.0]);
        assert!(sup_loss(&est, &d) < 1e-15);
        let shifted = step(vec![0.0, 0.5, 0.5, 1.0, 1.0]);
        assert!((sup_loss(&shifted, &d) - 0.5).abs() < 1e-15);
    }
}
