use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::json;

use super::{run_pipeline, PipelineOptions};
use crate::env_model::EnvSpec;
use crate::error::Result;
use crate::estimators::io::write_csv;
use crate::lepskii::LepskiiResult;
use crate::walk_sim::TimeSource;

/// Points at which the exact c.d.f. curve is tabulated.
const CURVE_POINTS: usize = 1001;

/// One full pipeline run with everything needed to draw a figure.
#[derive(Debug, Clone)]
pub struct FigureBundle {
    pub spec: EnvSpec,
    pub n: usize,
    pub seed: u64,
    pub time_source: TimeSource,
    pub hitting_time: u64,
    pub chosen_m: usize,
    /// `N_∞ = ‖F - F̂^{M̂}‖_∞`.
    pub n_inf: f64,
    pub selection: LepskiiResult,
    /// `(ω_x)_{0≤x≤n-1}` of the realized environment.
    pub environment: Vec<f64>,
}

impl FigureBundle {
    /// `(u, F(u))` on a regular grid of `[0, 1]`.
    pub fn exact_curve(&self) -> Vec<(f64, f64)> {
        (0..CURVE_POINTS)
            .map(|k| {
                let u = k as f64 / (CURVE_POINTS - 1) as f64;
                (u, self.spec.exact_cdf(u).expect("u in [0,1]"))
            })
            .collect()
    }

    /// Sorted environment values with the empirical c.d.f. just after each.
    pub fn empirical_environment(&self) -> Vec<(f64, f64)> {
        let mut v = self.environment.clone();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        v.into_iter().enumerate().map(|(k, w)| (w, (k + 1) as f64 / n)).collect()
    }

    pub fn summary(&self) -> serde_json::Value {
        json!({
            "spec": self.spec,
            "n": self.n,
            "seed": self.seed,
            "engine": self.time_source,
            "T_n": self.hitting_time,
            "M_hat": self.chosen_m,
            "N_inf": self.n_inf,
            "lepskii": self.selection.to_json(),
        })
    }

    /// Writes `exact_cdf.csv`, `estimate.csv`, `empirical_env.csv` and
    /// `summary.json` into `dir` and returns their paths.
    pub fn write_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();

        let path = dir.join("exact_cdf.csv");
        let mut w = BufWriter::new(File::create(&path)?);
        writeln!(w, "u,F")?;
        for (u, f) in self.exact_curve() {
            writeln!(w, "{u},{f}")?;
        }
        w.flush()?;
        written.push(path);

        let path = dir.join("estimate.csv");
        let mut w = BufWriter::new(File::create(&path)?);
        write_csv(&mut w, &self.selection.final_estimate, self.seed)?;
        w.flush()?;
        written.push(path);

        let path = dir.join("empirical_env.csv");
        let mut w = BufWriter::new(File::create(&path)?);
        writeln!(w, "omega,ecdf")?;
        for (omega, f) in self.empirical_environment() {
            writeln!(w, "{omega},{f}")?;
        }
        w.flush()?;
        written.push(path);

        let path = dir.join("summary.json");
        std::fs::write(&path, serde_json::to_string_pretty(&self.summary())?)?;
        written.push(path);
        Ok(written)
    }
}

/// [`run_figure_dataset_with`] under default options.
pub fn run_figure_dataset(spec: &EnvSpec, n: usize, seed: u64) -> Result<FigureBundle> {
    run_figure_dataset_with(spec, n, seed, &PipelineOptions::default())
}

pub fn run_figure_dataset_with(spec: &EnvSpec, n: usize, seed: u64, opts: &PipelineOptions) -> Result<FigureBundle> {
    let regime = spec.solve_kappa()?;
    super::require_reaching(&regime)?;
    let mut run = run_pipeline(spec, &regime, n, seed, opts)?;
    let environment = run.environment.values(0..n as i64);
    Ok(FigureBundle {
        spec: spec.clone(),
        n,
        seed,
        time_source: run.path.time_source,
        hitting_time: run.path.hitting_time,
        chosen_m: run.selection.chosen_m,
        n_inf: run.loss,
        selection: run.selection,
        environment,
    })
}
