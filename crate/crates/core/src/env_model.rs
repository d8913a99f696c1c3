//! Environment laws ν on (0, 1).
//!
//! An [`EnvSpec`] knows its exact c.d.f. `F`, its mixed moments
//! `m^{α,β} = E[ω^α (1-ω)^β]`, the moment-based grid approximation `F^M`, the
//! regime of the walk it generates and, for the bias bounds, its Hölder norm.

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::quadrature;

/// Relative tolerance of every adaptive quadrature in this module.
pub const QUAD_TOL: f64 = 1e-13;

/// `|E[log ρ]|` below this is classified as recurrent.
pub const RECURRENCE_THRESHOLD: f64 = 1e-9;

/// Number of grid intervals used by [`EnvSpec::holder_constant`].
pub const HOLDER_GRID: usize = 100_000;

/// Panels x points of the composite rule that discretizes a uniform law when
/// it is used as a mixing measure.
const UNIFORM_PANELS: usize = 64;
const UNIFORM_ORDER: usize = 20;

/// Law of a single site value `ω_x`.
///
/// JSON form: `{"type":"beta","a":3,"b":3}`,
/// `{"type":"uniform","lo":0.3,"hi":0.9}` or
/// `{"type":"discrete","atoms":[[0.3,0.4],[0.7,0.7]]}` where each atom is
/// `[weight, location]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", try_from = "RawSpec")]
pub enum EnvSpec {
    Beta { a: f64, b: f64 },
    Uniform { lo: f64, hi: f64 },
    Discrete { atoms: Vec<(f64, f64)> },
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum RawSpec {
    Beta { a: f64, b: f64 },
    Uniform { lo: f64, hi: f64 },
    Discrete { atoms: Vec<(f64, f64)> },
}

impl TryFrom<RawSpec> for EnvSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let spec = match raw {
            RawSpec::Beta { a, b } => EnvSpec::Beta { a, b },
            RawSpec::Uniform { lo, hi } => EnvSpec::Uniform { lo, hi },
            RawSpec::Discrete { atoms } => EnvSpec::Discrete { atoms },
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Long-run behaviour of the walk, read off the law of `log ρ_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Regime {
    Recurrent,
    /// `E[log ρ] < 0` and `E[ρ^κ] = 1`. `non_arithmetic` is false when the
    /// support of `log ρ` lies on a lattice, in which case the usual tail
    /// asymptotics are not guaranteed.
    TransientRight { kappa: f64, non_arithmetic: bool },
    TransientLeft,
    /// `E[log ρ] < 0` but `E[ρ^s] < 1` for every admissible `s > 0`.
    NoKappa,
}

impl Regime {
    pub fn kappa(&self) -> Option<f64> {
        match self {
            Regime::TransientRight { kappa, .. } => Some(*kappa),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Regime::Recurrent => "recurrent".into(),
            Regime::TransientRight { kappa, .. } => format!("transient-right(kappa={kappa})"),
            Regime::TransientLeft => "transient-left".into(),
            Regime::NoKappa => "transient-right(no kappa)".into(),
        }
    }
}

impl EnvSpec {
    pub fn beta(a: f64, b: f64) -> Result<Self> {
        let s = EnvSpec::Beta { a, b };
        s.validate()?;
        Ok(s)
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let s = EnvSpec::Uniform { lo, hi };
        s.validate()?;
        Ok(s)
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let s = EnvSpec::Discrete { atoms };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EnvSpec::Beta { a, b } => {
                if !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0) {
                    return Err(Error::InvalidSpec(format!("beta needs a, b > 0 (a={a}, b={b})")));
                }
            }
            EnvSpec::Uniform { lo, hi } => {
                if !(*lo > 0.0 && lo < hi && *hi < 1.0) {
                    return Err(Error::InvalidSpec(format!(
                        "uniform needs 0 < lo < hi < 1 (lo={lo}, hi={hi})"
                    )));
                }
            }
            EnvSpec::Discrete { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::InvalidSpec("discrete mixture has no atoms".into()));
                }
                let total: f64 = atoms.iter().map(|a| a.0).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidSpec(format!("weights sum to {total}, not 1")));
                }
                for (i, &(w, loc)) in atoms.iter().enumerate() {
                    if !(0.0..=1.0).contains(&w) {
                        return Err(Error::InvalidSpec(format!("atom {i}: weight {w} not in [0,1]")));
                    }
                    if !(loc > 0.0 && loc < 1.0) {
                        return Err(Error::InvalidSpec(format!("atom {i}: location {loc} not in (0,1)")));
                    }
                    if i > 0 && loc <= atoms[i - 1].1 {
                        return Err(Error::InvalidSpec("atom locations must be strictly increasing".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("EnvSpec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Draws one site value from ν.
    pub fn sample_omega<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let w = match self {
            EnvSpec::Beta { a, b } => Beta::new(*a, *b).expect("validated").sample(rng),
            EnvSpec::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            EnvSpec::Discrete { atoms } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut loc = atoms[atoms.len() - 1].1;
                for &(w, l) in atoms {
                    acc += w;
                    if u < acc {
                        loc = l;
                        break;
                    }
                }
                loc
            }
        };
        w.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
    }

    /// `F(u) = ν((0, u])`.
    pub fn exact_cdf(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain { what: "u", value: u });
        }
        Ok(self.cdf_unchecked(u, false))
    }

    /// Left limit `F(u-) = ν((0, u))`; differs from `F(u)` only at atoms.
    pub fn exact_cdf_left(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain { what: "u", value: u });
        }
        Ok(self.cdf_unchecked(u, true))
    }

    fn cdf_unchecked(&self, u: f64, left: bool) -> f64 {
        match self {
            EnvSpec::Beta { a, b } => {
                if u <= 0.0 {
                    0.0
                } else if u >= 1.0 {
                    1.0
                } else {
                    beta_reg(*a, *b, u)
                }
            }
            EnvSpec::Uniform { lo, hi } => ((u - lo) / (hi - lo)).clamp(0.0, 1.0),
            EnvSpec::Discrete { atoms } => {
                let s: f64 = atoms
                    .iter()
                    .filter(|&&(_, loc)| if left { loc < u } else { loc <= u })
                    .map(|a| a.0)
                    .sum();
                s.min(1.0)
            }
        }
    }

    /// Density of ν, `None` for atomic laws.
    pub fn density(&self, u: f64) -> Option<f64> {
        match self {
            EnvSpec::Beta { a, b } => {
                if u <= 0.0 || u >= 1.0 {
                    let edge = if u <= 0.0 { *a } else { *b };
                    return Some(if edge < 1.0 {
                        f64::INFINITY
                    } else if edge == 1.0 {
                        (-ln_beta(*a, *b)).exp()
                    } else {
                        0.0
                    });
                }
                Some(((a - 1.0) * u.ln() + (b - 1.0) * (1.0 - u).ln() - ln_beta(*a, *b)).exp())
            }
            EnvSpec::Uniform { lo, hi } => Some(if u >= *lo && u <= *hi { 1.0 / (hi - lo) } else { 0.0 }),
            EnvSpec::Discrete { .. } => None,
        }
    }

    /// `m^{α,β} = E[ω^α (1-ω)^β]`.
    pub fn exact_moment(&self, alpha: u32, beta: u32) -> f64 {
        if alpha == 0 && beta == 0 {
            return 1.0;
        }
        match self {
            EnvSpec::Beta { a, b } => {
                // B(a+α, b+β) / B(a, b) as a finite product.
                let mut m = 1.0;
                for t in 0..alpha {
                    m *= (a + t as f64) / (a + b + t as f64);
                }
                for t in 0..beta {
                    m *= (b + t as f64) / (a + b + (alpha + t) as f64);
                }
                m
            }
            EnvSpec::Uniform { lo, hi } => {
                let f = |u: f64| u.powi(alpha as i32) * (1.0 - u).powi(beta as i32);
                quadrature::integrate(f, *lo, *hi, QUAD_TOL) / (hi - lo)
            }
            EnvSpec::Discrete { atoms } => atoms
                .iter()
                .map(|&(w, l)| w * l.powi(alpha as i32) * (1.0 - l).powi(beta as i32))
                .sum(),
        }
    }

    /// `(F^M(l/(M+1)))_{l=0..=M+1}` with `F^M(l/(M+1)) = Σ_{k<l} C(M,k) m^{k,M-k}`.
    ///
    /// `M = 0` gives `[0, 1]`.
    pub fn target_cdf_grid(&self, m: usize) -> Vec<f64> {
        let mut grid = Vec::with_capacity(m + 2);
        grid.push(0.0);
        let mut binom = 1.0;
        let mut acc = 0.0;
        for k in 0..=m {
            acc += binom * self.exact_moment(k as u32, (m - k) as u32);
            grid.push(acc.min(1.0));
            binom *= (m - k) as f64 / (k + 1) as f64;
        }
        // The last entry is the binomial identity Σ_k C(M,k) m^{k,M-k} = 1.
        grid[m + 1] = 1.0;
        for l in 1..grid.len() {
            if grid[l] < grid[l - 1] {
                grid[l] = grid[l - 1];
            }
        }
        grid
    }

    /// `E[log ρ_0]` with `ρ = (1-ω)/ω`.
    pub fn mean_log_rho(&self) -> f64 {
        match self {
            EnvSpec::Beta { a, b } => digamma(*b) - digamma(*a),
            EnvSpec::Uniform { lo, hi } => {
                // Antiderivative of log(1-u) - log(u).
                let g = |u: f64| -(1.0 - u) * (1.0 - u).ln() - u * u.ln();
                (g(*hi) - g(*lo)) / (hi - lo)
            }
            EnvSpec::Discrete { atoms } => atoms.iter().map(|&(w, l)| w * ((1.0 - l) / l).ln()).sum(),
        }
    }

    /// `E[ρ_0^s]`, `+inf` outside the integrability range.
    pub fn rho_moment(&self, s: f64) -> f64 {
        match self {
            EnvSpec::Beta { a, b } => {
                if s >= *a || s <= -*b {
                    return f64::INFINITY;
                }
                (ln_gamma(a - s) + ln_gamma(b + s) - ln_gamma(*a) - ln_gamma(*b)).exp()
            }
            EnvSpec::Uniform { lo, hi } => {
                let f = |u: f64| ((1.0 - u) / u).powf(s);
                quadrature::integrate(f, *lo, *hi, QUAD_TOL) / (hi - lo)
            }
            EnvSpec::Discrete { atoms } => atoms.iter().map(|&(w, l)| w * ((1.0 - l) / l).powf(s)).sum(),
        }
    }

    /// Classifies the walk and, when transient to the right, finds κ with
    /// `E[ρ^κ] = 1` by bisection on the convex map `s -> E[ρ^s]`.
    pub fn solve_kappa(&self) -> Result<Regime> {
        let mlr = self.mean_log_rho();
        if mlr.abs() < RECURRENCE_THRESHOLD {
            return Ok(Regime::Recurrent);
        }
        if mlr > 0.0 {
            return Ok(Regime::TransientLeft);
        }
        let non_arithmetic = self.log_rho_non_arithmetic();
        let mut lo = 0.0;
        let mut hi = 1.0;
        loop {
            let v = self.rho_moment(hi);
            if v.is_nan() {
                return Err(Error::BracketFailure { s: hi, value: v });
            }
            if v > 1.0 {
                break;
            }
            lo = hi;
            hi *= 2.0;
            if hi > 1e6 {
                return Ok(Regime::NoKappa);
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = self.rho_moment(mid);
            if v.is_nan() {
                return Err(Error::BracketFailure { s: mid, value: v });
            }
            if v > 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Regime::TransientRight { kappa: 0.5 * (lo + hi), non_arithmetic })
    }

    fn log_rho_non_arithmetic(&self) -> bool {
        let EnvSpec::Discrete { atoms } = self else {
            return true;
        };
        let logs: Vec<f64> = atoms
            .iter()
            .filter(|a| a.0 > 0.0)
            .map(|&(_, l)| ((1.0 - l) / l).ln())
            .filter(|v| v.abs() > 1e-15)
            .collect();
        if logs.len() < 2 {
            return false;
        }
        logs[1..].iter().any(|v| !near_rational(v / logs[0], 10_000, 1e-9))
    }

    /// `||F||_γ` for `γ ∈ (0, 2]`: the Hölder seminorm of `F` for `γ ≤ 1`,
    /// `||F'||_∞` plus the `(γ-1)`-Hölder seminorm of `F'` above 1.
    pub fn holder_constant(&self, gamma: f64) -> f64 {
        assert!(gamma > 0.0 && gamma <= 2.0, "gamma must lie in (0, 2]");
        match self {
            EnvSpec::Discrete { .. } => f64::INFINITY,
            EnvSpec::Uniform { lo, hi } => {
                if gamma > 1.0 {
                    f64::INFINITY
                } else {
                    (hi - lo).powf(-gamma)
                }
            }
            EnvSpec::Beta { .. } => {
                let n = HOLDER_GRID;
                let h = 1.0 / n as f64;
                if gamma <= 1.0 {
                    let f: Vec<f64> = (0..=n).map(|k| self.cdf_unchecked(k as f64 * h, false)).collect();
                    grid_holder(&f, h, gamma)
                } else {
                    let d: Vec<f64> = (0..=n).map(|k| self.density(k as f64 * h).unwrap()).collect();
                    if d.iter().any(|v| !v.is_finite()) {
                        return f64::INFINITY;
                    }
                    let sup = d.iter().cloned().fold(0.0, f64::max);
                    sup + grid_holder(&d, h, gamma - 1.0)
                }
            }
        }
    }

    /// The law as a weighted list of site values, when that is how kernels
    /// and tails are integrated: atoms for a discrete law, composite
    /// Gauss–Legendre nodes (weights normalized to 1) for a uniform law.
    /// `None` for Beta laws, which use closed forms.
    pub(crate) fn mixing_nodes(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            EnvSpec::Beta { .. } => None,
            EnvSpec::Uniform { lo, hi } => Some(
                quadrature::composite(*lo, *hi, UNIFORM_PANELS, UNIFORM_ORDER)
                    .into_iter()
                    .map(|(x, w)| (w / (hi - lo), x))
                    .collect(),
            ),
            EnvSpec::Discrete { atoms } => Some(atoms.clone()),
        }
    }
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Lags used when scanning a grid for its Hölder quotient: every lag up to
/// 64 then a geometric progression.
fn holder_lags(n: usize) -> Vec<usize> {
    let mut lags: Vec<usize> = (1..=64.min(n)).collect();
    let mut d = 64.0f64;
    while (d as usize) < n {
        d *= 1.05;
        lags.push((d as usize).min(n));
    }
    lags.dedup();
    lags
}

fn grid_holder(values: &[f64], h: f64, gamma: f64) -> f64 {
    let n = values.len() - 1;
    let mut best: f64 = 0.0;
    for d in holder_lags(n) {
        let scale = (d as f64 * h).powf(gamma);
        let m = values
            .iter()
            .zip(&values[d..])
            .map(|(a, b)| (b - a).abs())
            .fold(0.0, f64::max);
        best = best.max(m / scale);
    }
    best
}

fn near_rational(r: f64, max_den: u64, tol: f64) -> bool {
    // Continued-fraction convergents of r.
    let (mut h0, mut h1) = (0.0f64, 1.0f64);
    let (mut k0, mut k1) = (1.0f64, 0.0f64);
    let mut x = r;
    for _ in 0..64 {
        let a = x.floor();
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den as f64 {
            return false;
        }
        if (r - h2 / k2).abs() <= tol * r.abs().max(1.0) {
            return true;
        }
        let frac = x - a;
        if frac.abs() < 1e-15 {
            return true;
        }
        x = 1.0 / frac;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig6() -> EnvSpec {
        EnvSpec::discrete(vec![(0.3, 0.4), (0.7, 0.7)]).unwrap()
    }

    fn builtins() -> Vec<EnvSpec> {
        vec![
            EnvSpec::beta(3.0, 3.0).unwrap(),
            EnvSpec::beta(4.0, 3.0).unwrap(),
            EnvSpec::beta(6.0, 3.0).unwrap(),
            EnvSpec::uniform(0.3, 0.9).unwrap(),
            fig6(),
        ]
    }

    #[test]
    fn cdf_examples() {
        assert!((EnvSpec::beta(3.0, 3.0).unwrap().exact_cdf(0.5).unwrap() - 0.5).abs() < 1e-14);
        assert!((EnvSpec::uniform(0.3, 0.9).unwrap().exact_cdf(0.6).unwrap() - 0.5).abs() < 1e-14);
        assert!((fig6().exact_cdf(0.5).unwrap() - 0.3).abs() < 1e-14);
        assert!((fig6().exact_cdf(0.4).unwrap() - 0.3).abs() < 1e-14);
        assert_eq!(fig6().exact_cdf_left(0.4).unwrap(), 0.0);
        for s in builtins() {
            assert_eq!(s.exact_cdf(0.0).unwrap(), 0.0);
            assert!((s.exact_cdf(1.0).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cdf_rejects_out_of_range() {
        let s = EnvSpec::beta(3.0, 3.0).unwrap();
        assert!(matches!(s.exact_cdf(1.5), Err(Error::Domain { .. })));
        assert!(s.exact_cdf(-0.1).is_err());
    }

    #[test]
    fn moment_examples() {
        for s in builtins() {
            assert_eq!(s.exact_moment(0, 0), 1.0);
        }
        let b33 = EnvSpec::beta(3.0, 3.0).unwrap();
        assert!((b33.exact_moment(1, 1) - 3.0 / 14.0).abs() < 1e-15);
        // quadrature cross-check of the Beta product form
        let q = quadrature::integrate(
            |u| u * (1.0 - u) * b33.density(u).unwrap(),
            0.0,
            1.0,
            1e-13,
        );
        assert!((q - 3.0 / 14.0).abs() < 1e-12);
        assert!((fig6().exact_moment(1, 0) - 0.61).abs() < 1e-15);
        // uniform: E[ω] = 0.6, E[ω^2] = (0.9^3 - 0.3^3) / (3 * 0.6)
        let u = EnvSpec::uniform(0.3, 0.9).unwrap();
        assert!((u.exact_moment(1, 0) - 0.6).abs() < 1e-13);
        assert!((u.exact_moment(2, 0) - (0.729 - 0.027) / 1.8).abs() < 1e-13);
    }

    #[test]
    fn pascal_recursion_holds() {
        for s in builtins() {
            for a in 0..=6 {
                for b in 0..=6 {
                    let lhs = s.exact_moment(a, b);
                    let rhs = s.exact_moment(a + 1, b) + s.exact_moment(a, b + 1);
                    assert!((lhs - rhs).abs() < 1e-12, "{s:?} {a} {b}: {lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn target_grid_examples_and_monotonicity() {
        let b33 = EnvSpec::beta(3.0, 3.0).unwrap();
        let g = b33.target_cdf_grid(1);
        assert_eq!(g.len(), 3);
        assert_eq!(g[0], 0.0);
        assert!((g[1] - 0.5).abs() < 1e-15);
        assert_eq!(g[2], 1.0);
        for s in builtins() {
            for m in 1..=60 {
                let g = s.target_cdf_grid(m);
                assert_eq!(g.len(), m + 2);
                assert_eq!(g[0], 0.0);
                assert_eq!(g[m + 1], 1.0);
                assert!(g.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn grid_top_entry_matches_binomial_identity() {
        // Before the final entry is pinned to 1 the raw sum must already be 1.
        for s in builtins() {
            let m = 12;
            let mut binom = 1.0;
            let mut acc = 0.0;
            for k in 0..=m {
                acc += binom * s.exact_moment(k as u32, (m - k) as u32);
                binom *= (m - k) as f64 / (k + 1) as f64;
            }
            assert!((acc - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kappa_examples() {
        let r = EnvSpec::beta(4.0, 3.0).unwrap().solve_kappa().unwrap();
        assert!((r.kappa().unwrap() - 1.0).abs() < 1e-8);
        let r = EnvSpec::beta(6.0, 3.0).unwrap().solve_kappa().unwrap();
        assert!((r.kappa().unwrap() - 3.0).abs() < 1e-8);
        assert_eq!(EnvSpec::beta(3.0, 3.0).unwrap().solve_kappa().unwrap(), Regime::Recurrent);
        assert_eq!(EnvSpec::beta(3.0, 4.0).unwrap().solve_kappa().unwrap(), Regime::TransientLeft);
        // ρ ≤ 1 almost surely: E[ρ^s] decreases, no κ.
        assert_eq!(EnvSpec::uniform(0.6, 0.9).unwrap().solve_kappa().unwrap(), Regime::NoKappa);
    }

    #[test]
    fn kappa_root_quality() {
        for s in [
            EnvSpec::beta(3.5, 3.0).unwrap(),
            EnvSpec::beta(4.0, 3.0).unwrap(),
            EnvSpec::beta(5.0, 3.0).unwrap(),
            EnvSpec::beta(3.6, 3.0).unwrap(),
            EnvSpec::uniform(0.3, 0.9).unwrap(),
            fig6(),
        ] {
            let k = s.solve_kappa().unwrap().kappa().unwrap();
            assert!((s.rho_moment(k) - 1.0).abs() <= 1e-10, "{s:?}");
            assert!(s.rho_moment(k / 2.0) < 1.0);
        }
        for (a, b) in [(3.5, 3.0), (4.0, 3.0), (5.0, 3.0), (6.0, 3.0), (3.75, 3.0), (2.5, 1.0)] {
            let k = EnvSpec::beta(a, b).unwrap().solve_kappa().unwrap().kappa().unwrap();
            assert!((k - (a - b)).abs() < 1e-8);
        }
    }

    #[test]
    fn discrete_arithmetic_flag() {
        // Both atoms on the lattice log(2)·Z: ρ ∈ {2, 1/2}.
        let lattice = EnvSpec::discrete(vec![(0.2, 1.0 / 3.0), (0.8, 2.0 / 3.0)]).unwrap();
        match lattice.solve_kappa().unwrap() {
            Regime::TransientRight { kappa, non_arithmetic } => {
                assert!(!non_arithmetic);
                assert!((lattice.rho_moment(kappa) - 1.0).abs() < 1e-10);
                // 0.2 * 2^k + 0.8 * 2^-k = 1 at 2^k = 4
                assert!((kappa - 2.0).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
        match fig6().solve_kappa().unwrap() {
            Regime::TransientRight { non_arithmetic, .. } => assert!(non_arithmetic),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn uniform_log_rho_matches_quadrature() {
        let s = EnvSpec::uniform(0.3, 0.9).unwrap();
        let q = quadrature::integrate(|u: f64| ((1.0 - u) / u).ln(), 0.3, 0.9, 1e-13) / 0.6;
        assert!((s.mean_log_rho() - q).abs() < 1e-12);
        assert!(EnvSpec::uniform(0.2, 0.8).unwrap().mean_log_rho().abs() < 1e-12);
    }

    #[test]
    fn holder_examples() {
        let u = EnvSpec::uniform(0.3, 0.9).unwrap();
        assert!((u.holder_constant(1.0) - 1.0 / 0.6).abs() < 1e-12);
        assert!(fig6().holder_constant(0.5).is_infinite());
        let b33 = EnvSpec::beta(3.0, 3.0).unwrap();
        assert!((b33.holder_constant(1.0) - 1.875).abs() < 1e-4);
        // ||f||_∞ + ||f'||_∞ = 1.875 + 60 max t(1/4 - t^2)·2 at t = 1/sqrt(12)
        let t = 1.0 / 12f64.sqrt();
        let expected = 1.875 + 60.0 * 2.0 * t * (0.25 - t * t);
        assert!((b33.holder_constant(2.0) - expected).abs() < 1e-3);
    }

    #[test]
    fn bias_bound_beta33() {
        let s = EnvSpec::beta(3.0, 3.0).unwrap();
        let norm = s.holder_constant(2.0);
        for m in 1..=60 {
            let g = s.target_cdf_grid(m);
            let gap = (0..=m + 1)
                .map(|l| (s.exact_cdf(l as f64 / (m + 1) as f64).unwrap() - g[l]).abs())
                .fold(0.0, f64::max);
            assert!(gap <= norm / (4.0 * (m + 2) as f64));
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let s: EnvSpec = serde_json::from_str(r#"{"type":"beta","a":3,"b":3}"#).unwrap();
        assert_eq!(s, EnvSpec::Beta { a: 3.0, b: 3.0 });
        let s: EnvSpec = serde_json::from_str(r#"{"type":"discrete","atoms":[[0.3,0.4],[0.7,0.7]]}"#).unwrap();
        assert_eq!(s, fig6());
        assert_eq!(EnvSpec::from_json(&s.to_json()).unwrap(), s);
        assert!(EnvSpec::from_json(r#"{"type":"uniform","lo":0.9,"hi":0.3}"#).is_err());
        assert!(EnvSpec::from_json(r#"{"type":"discrete","atoms":[[0.5,0.4],[0.4,0.7]]}"#).is_err());
        assert!(EnvSpec::from_json(r#"{"type":"discrete","atoms":[[0.5,0.7],[0.5,0.4]]}"#).is_err());
        assert!(EnvSpec::from_json(r#"{"type":"beta","a":-1,"b":3}"#).is_err());
    }

    #[test]
    fn mixing_nodes_integrate_moments() {
        let u = EnvSpec::uniform(0.3, 0.9).unwrap();
        let nodes = u.mixing_nodes().unwrap();
        let w: f64 = nodes.iter().map(|n| n.0).sum();
        assert!((w - 1.0).abs() < 1e-13);
        let m: f64 = nodes.iter().map(|&(w, a)| w * a.powi(5) * (1.0 - a).powi(7)).sum();
        assert!((m - u.exact_moment(5, 7)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn beta_cdf_is_monotone(a in 0.5f64..8.0, b in 0.5f64..8.0, u in 0.0f64..1.0, v in 0.0f64..1.0) {
            let s = EnvSpec::beta(a, b).unwrap();
            let (lo, hi) = if u < v { (u, v) } else { (v, u) };
            prop_assert!(s.exact_cdf(lo).unwrap() <= s.exact_cdf(hi).unwrap() + 1e-15);
        }

        #[test]
        fn beta_kappa_is_a_minus_b(b in 1.0f64..5.0, d in 0.1f64..4.0) {
            let s = EnvSpec::beta(b + d, b).unwrap();
            let k = s.solve_kappa().unwrap().kappa().unwrap();
            prop_assert!((k - d).abs() < 1e-8);
        }
    }
}
