//! Lepskii selection of the resolution `M` of the c.d.f. estimator.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::estimators::{estimate_cdf_sweep, CdfEstimate};
use crate::walk_sim::ZPath;

/// Default upper bound on the candidate resolutions.
///
/// In the recurrent regime `max_x Z_x` reaches `10^10`, so the candidate set
/// `1..=max_x Z_x` is truncated at this value.
pub const DEFAULT_M_CAP: usize = 500;

/// Confidence parameter `z` of the selector; serialized as `"auto"` or a number.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ZPolicy {
    /// `z = log n`.
    #[default]
    Auto,
    Fixed(f64),
}

impl ZPolicy {
    pub fn resolve(&self, n: usize) -> f64 {
        match *self {
            ZPolicy::Auto => (n as f64).ln(),
            ZPolicy::Fixed(z) => z,
        }
    }
}

impl FromStr for ZPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(ZPolicy::Auto);
        }
        match s.parse::<f64>() {
            Ok(z) if z > 0.0 && z.is_finite() => Ok(ZPolicy::Fixed(z)),
            _ => Err(Error::Parse(format!("z must be 'auto' or a positive number, got {s:?}"))),
        }
    }
}

impl Serialize for ZPolicy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ZPolicy::Auto => s.serialize_str("auto"),
            ZPolicy::Fixed(z) => s.serialize_f64(*z),
        }
    }
}

impl<'de> Deserialize<'de> for ZPolicy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Number(z) => z.to_string().parse::<ZPolicy>(),
            Raw::Text(t) => t.parse::<ZPolicy>(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for ZPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZPolicy::Auto => write!(f, "auto"),
            ZPolicy::Fixed(z) => write!(f, "{z}"),
        }
    }
}

fn radius_from_visits(n: usize, visits: usize, m: usize, z: f64) -> f64 {
    if visits == 0 {
        return f64::INFINITY;
    }
    let n = n as f64;
    n / visits as f64 * ((z + 3.0 * (m as f64).ln()) / (2.0 * n)).sqrt()
}

/// `R̂(M) = (n / N_n^M) sqrt((z + 3 log M) / 2n)`, infinite when `N_n^M = 0`.
pub fn radius(zpath: &ZPath, m: usize, z: f64) -> f64 {
    radius_from_visits(zpath.n, zpath.visits(m as u64), m, z)
}

/// Outcome of the selection, indexed by `M - 1` in every vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LepskiiResult {
    pub z: f64,
    /// Largest candidate resolution examined.
    pub m_max: usize,
    /// `max_{x<n} Z_x`, the untruncated candidate range.
    pub max_level: u64,
    pub chosen_m: usize,
    pub visits: Vec<usize>,
    pub radii: Vec<f64>,
    pub deltas: Vec<f64>,
    pub objective: Vec<f64>,
    pub final_estimate: CdfEstimate,
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

impl LepskiiResult {
    pub fn to_json(&self) -> Value {
        let per_m: Vec<Value> = (0..self.radii.len())
            .map(|k| {
                json!({
                    "M": k + 1,
                    "N": self.visits[k],
                    "radius": finite_or_null(self.radii[k]),
                    "delta": finite_or_null(self.deltas[k]),
                    "objective": finite_or_null(self.objective[k]),
                })
            })
            .collect();
        json!({
            "z": self.z,
            "M_max": self.m_max,
            "max_level": self.max_level,
            "chosen_M": self.chosen_m,
            "per_M": per_m,
            "final_grid": self.final_estimate.grid_values,
        })
    }
}

/// Runs the selector over `estimates`, which must hold `F̂^1, …, F̂^{M_max}`
/// in order.
///
/// `Δ(M) = max_{M'} ‖F̂^{M'} - F̂^{M∧M'}‖_∞ - 2R̂(M')` and the chosen `M`
/// is the smallest minimizer of `Δ(M) + 2R̂(M)`. The scan over `M' > M`
/// stops once `1 - 2R̂(M')` cannot beat the running maximum; the radii are
/// nondecreasing and the distances at most 1, so the result is unchanged.
pub fn select(estimates: &[CdfEstimate], zpath: &ZPath, z: f64) -> Result<LepskiiResult> {
    for (k, est) in estimates.iter().enumerate() {
        assert_eq!(est.m, k + 1, "estimates must cover 1..=M_max in order");
    }
    if estimates.is_empty() || estimates[0].visits == 0 {
        return Err(Error::EmptyRange);
    }
    let n = zpath.n;
    let visits: Vec<usize> = estimates.iter().map(|e| e.visits).collect();
    let radii: Vec<f64> = visits.iter().enumerate().map(|(k, &v)| radius_from_visits(n, v, k + 1, z)).collect();

    let mut deltas = Vec::with_capacity(estimates.len());
    let mut lower_max = f64::NEG_INFINITY;
    for (a, est) in estimates.iter().enumerate() {
        lower_max = lower_max.max(-2.0 * radii[a]);
        let mut delta = lower_max;
        for b in a + 1..estimates.len() {
            if 1.0 - 2.0 * radii[b] <= delta {
                break;
            }
            delta = delta.max(estimates[b].sup_distance(est) - 2.0 * radii[b]);
        }
        deltas.push(delta);
    }
    let objective: Vec<f64> = deltas.iter().zip(&radii).map(|(d, r)| d + 2.0 * r).collect();
    let mut chosen = 0;
    for k in 1..objective.len() {
        if objective[k] < objective[chosen] {
            chosen = k;
        }
    }
    Ok(LepskiiResult {
        z,
        m_max: estimates.len(),
        max_level: zpath.z[..n].iter().copied().max().unwrap_or(0),
        chosen_m: chosen + 1,
        visits,
        radii,
        deltas,
        objective,
        final_estimate: estimates[chosen].clone(),
    })
}

/// Computes `F̂^M` for `M ∈ [1, min(max_x Z_x, m_cap)]` and selects among them.
pub fn adaptive_estimate_capped(zpath: &ZPath, z: ZPolicy, m_cap: usize) -> Result<LepskiiResult> {
    let z = z.resolve(zpath.n);
    let max_level = zpath.z[..zpath.n].iter().copied().max().unwrap_or(0);
    let m_max = (max_level.min(m_cap as u64) as usize).max(1);
    let estimates = estimate_cdf_sweep(zpath, m_max);
    select(&estimates, zpath, z)
}

/// [`adaptive_estimate_capped`] with [`DEFAULT_M_CAP`].
pub fn adaptive_estimate(zpath: &ZPath, z: ZPolicy) -> Result<LepskiiResult> {
    adaptive_estimate_capped(zpath, z, DEFAULT_M_CAP)
}
