use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use super::{replication_seed, require_reaching, run_indexed, run_pipeline, ExperimentConfig};
use crate::env_model::{EnvSpec, Regime};
use crate::error::{Error, Result};
use crate::stats;
use crate::walk_sim::TimeSource;

/// Summary of the losses at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskRow {
    pub n: usize,
    /// Successful replications.
    pub replications: usize,
    pub failures: usize,
    pub mean_loss: f64,
    pub sd_loss: f64,
    pub se_loss: f64,
    #[serde(rename = "median_M_hat")]
    pub median_m_hat: f64,
    #[serde(rename = "median_T_n")]
    pub median_t_n: f64,
    /// `walk`, `branching` or `mixed`.
    pub engine: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskTable {
    pub spec: EnvSpec,
    pub kappa: Option<f64>,
    pub rows: Vec<RiskRow>,
    /// Minus the least-squares slope of `log mean_loss` on `log n`.
    pub slope: Option<f64>,
    pub slope_se: Option<f64>,
    /// `γ / (2γ + 4κ)` with `γ = 2`; `1/2` in the recurrent case.
    pub theoretical_rate: f64,
    /// Messages of failed replications, in replication order.
    pub errors: Vec<String>,
}

/// `1 / (2 + 2κ)`, `1/2` when recurrent, `0` when `E[ρ^s] < 1` for all `s`.
pub fn theoretical_rate(regime: &Regime) -> f64 {
    match regime {
        Regime::TransientRight { kappa, .. } => 1.0 / (2.0 + 2.0 * kappa),
        Regime::Recurrent => 0.5,
        Regime::NoKappa | Regime::TransientLeft => 0.0,
    }
}

impl RiskTable {
    /// `slope ± 2·SE`.
    pub fn slope_band(&self) -> Option<(f64, f64)> {
        match (self.slope, self.slope_se) {
            (Some(s), Some(se)) if se.is_finite() => Some((s - 2.0 * se, s + 2.0 * se)),
            _ => None,
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,replications,failures,mean_loss,sd_loss,se_loss,median_M_hat,median_T_n,engine,theoretical_rate")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                r.n,
                r.replications,
                r.failures,
                r.mean_loss,
                r.sd_loss,
                r.se_loss,
                r.median_m_hat,
                r.median_t_n,
                r.engine,
                self.theoretical_rate
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("serializable table");
        v["slope_band"] = match self.slope_band() {
            Some((lo, hi)) => json!([lo, hi]),
            None => Value::Null,
        };
        v
    }
}

struct Outcome {
    loss: f64,
    chosen_m: usize,
    hitting_time: u64,
    source: TimeSource,
}

/// Runs `replications` independent pipelines at every `n` and regresses the
/// log mean loss on `log n`.
pub fn run_risk_experiment(cfg: &ExperimentConfig) -> Result<RiskTable> {
    cfg.validate()?;
    let regime = cfg.spec.solve_kappa()?;
    require_reaching(&regime)?;
    let opts = cfg.pipeline_options();
    let mut rows = Vec::with_capacity(cfg.n_values.len());
    let mut errors = Vec::new();
    for &n in &cfg.n_values {
        let results = run_indexed(cfg.workers, cfg.replications, |rep| {
            let seed = replication_seed(cfg.base_seed, n, rep);
            run_pipeline(&cfg.spec, &regime, n, seed, &opts).map(|run| Outcome {
                loss: run.loss,
                chosen_m: run.selection.chosen_m,
                hitting_time: run.path.hitting_time,
                source: run.path.time_source,
            })
        });
        let mut ok = Vec::new();
        for (rep, r) in results.into_iter().enumerate() {
            match r {
                Ok(o) => ok.push(o),
                Err(e) => errors.push(format!("n={n} replication={rep}: {e}")),
            }
        }
        if ok.is_empty() {
            return Err(Error::InvalidSpec(format!("every replication failed at n={n}: {}", errors.last().unwrap())));
        }
        let losses: Vec<f64> = ok.iter().map(|o| o.loss).collect();
        let ms: Vec<f64> = ok.iter().map(|o| o.chosen_m as f64).collect();
        let times: Vec<f64> = ok.iter().map(|o| o.hitting_time as f64).collect();
        let engine = if ok.iter().all(|o| o.source == TimeSource::Walk) {
            "walk"
        } else if ok.iter().all(|o| o.source == TimeSource::Branching) {
            "branching"
        } else {
            "mixed"
        };
        rows.push(RiskRow {
            n,
            replications: ok.len(),
            failures: cfg.replications - ok.len(),
            mean_loss: stats::mean(&losses),
            sd_loss: stats::sample_sd(&losses),
            se_loss: stats::standard_error(&losses),
            median_m_hat: stats::median(&ms),
            median_t_n: stats::median(&times),
            engine: engine.to_string(),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean_loss.ln()).collect();
    let fit = stats::ols(&xs, &ys);
    Ok(RiskTable {
        spec: cfg.spec.clone(),
        kappa: regime.kappa(),
        rows,
        slope: fit.map(|f| -f.slope),
        slope_se: fit.map(|f| f.slope_se).filter(|se| se.is_finite()),
        theoretical_rate: theoretical_rate(&regime),
        errors,
    })
}
