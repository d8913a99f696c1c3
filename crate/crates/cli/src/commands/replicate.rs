use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rwre::experiments::{
    figure_preset, run_figure_dataset, run_risk_experiment, table1_preset, verify_clt, verify_concentration,
    verify_occupation, ExperimentConfig, TailSettings, FIGURE_PRESETS,
};
use rwre::EnvSpec;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{create_out_dir, load_json, parse_value};
use crate::error::{CliError, CliResult};
use crate::manifest::ManifestBuilder;
use crate::ReplicateArgs;

const DEFAULT_SEED: u64 = 1;

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn default_spec() -> EnvSpec {
    EnvSpec::beta(4.0, 3.0).expect("valid spec")
}

/// Shallow merge of `overrides` into `base`; both must be JSON objects.
fn merge(mut base: Value, overrides: Option<Value>) -> CliResult<Value> {
    if let Some(o) = overrides {
        let Value::Object(map) = o else {
            return Err(CliError::config("config: expected a JSON object"));
        };
        for (k, v) in map {
            base[k] = v;
        }
    }
    Ok(base)
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<PathBuf> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(path.to_path_buf())
}

pub fn run(args: &ReplicateArgs) -> CliResult<()> {
    let overrides = args.config.as_deref().map(|c| load_json(c, "config")).transpose()?;
    create_out_dir(&args.out)?;
    let mode = &args.mode;
    if let Some(preset) = &mode.table1 {
        table1(args, preset, overrides)
    } else if let Some(preset) = &mode.figures {
        figures(args, preset, overrides)
    } else if mode.clt {
        clt(args, overrides)
    } else if mode.concentration {
        concentration(args, overrides)
    } else {
        occupation(args, overrides)
    }
}

fn table1(args: &ReplicateArgs, preset: &str, overrides: Option<Value>) -> CliResult<()> {
    let (spec, n_values) =
        table1_preset(preset).ok_or_else(|| CliError::config(format!("table1: unknown preset {preset:?}")))?;
    let replications = if args.paper_scale { 500 } else { 20 };
    let base = serde_json::to_value(ExperimentConfig::new(spec, n_values, replications, DEFAULT_SEED))?;
    let mut cfg: ExperimentConfig = parse_value(merge(base, overrides)?, "config")?;
    if let Some(seed) = args.seed {
        cfg.base_seed = seed;
    }
    cfg.workers = args.workers.unwrap_or_else(default_workers);
    cfg.validate().map_err(|e| CliError::config(format!("config: {e}")))?;

    let mut manifest = ManifestBuilder::start("replicate --table1", serde_json::to_value(&cfg)?, cfg.base_seed);
    let table = run_risk_experiment(&cfg)?;
    let csv = args.out.join("risk_table.csv");
    let mut w = BufWriter::new(File::create(&csv)?);
    table.write_csv(&mut w)?;
    w.flush()?;
    manifest.add(csv);
    manifest.add(write_json(&args.out.join("risk_summary.json"), &table.to_json())?);
    manifest.finish(&args.out)?;
    for r in &table.rows {
        println!("n={:>6} mean_loss={:.4} se={:.4} median_M_hat={}", r.n, r.mean_loss, r.se_loss, r.median_m_hat);
    }
    match table.slope {
        Some(s) => println!("slope={s:.4} theoretical_rate={:.4}", table.theoretical_rate),
        None => println!("slope=absent theoretical_rate={:.4}", table.theoretical_rate),
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FigureConfig {
    spec: EnvSpec,
    n: usize,
}

fn figures(args: &ReplicateArgs, preset: &str, overrides: Option<Value>) -> CliResult<()> {
    let seed = args.seed.unwrap_or(DEFAULT_SEED);
    let jobs: Vec<(String, EnvSpec, usize)> = match (preset, overrides) {
        ("all", None) => FIGURE_PRESETS
            .iter()
            .map(|p| {
                let f = figure_preset(p).expect("known preset");
                (p.to_string(), f.spec, f.n)
            })
            .collect(),
        ("all", Some(cfg)) => {
            let cfg: FigureConfig = parse_value(cfg, "config")?;
            vec![("custom".to_string(), cfg.spec, cfg.n)]
        }
        (name, cfg) => {
            let f = figure_preset(name).ok_or_else(|| CliError::config(format!("figures: unknown preset {name:?}")))?;
            let base = json!({ "spec": f.spec, "n": f.n });
            let cfg: FigureConfig = parse_value(merge(base, cfg)?, "config")?;
            vec![(name.to_string(), cfg.spec, cfg.n)]
        }
    };
    let config = json!(jobs.iter().map(|(name, spec, n)| json!({"name": name, "spec": spec, "n": n})).collect::<Vec<_>>());
    let mut manifest = ManifestBuilder::start("replicate --figures", config, seed);
    for (name, spec, n) in &jobs {
        if *n < 2 {
            return Err(CliError::config("n: must be at least 2"));
        }
        let bundle = run_figure_dataset(spec, *n, seed)?;
        manifest.extend(bundle.write_dir(&args.out.join(name))?);
        println!(
            "{name}: n={} T_n={} M_hat={} N_inf={:.4} engine={:?}",
            bundle.n, bundle.hitting_time, bundle.chosen_m, bundle.n_inf, bundle.time_source
        );
    }
    manifest.finish(&args.out)?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CltConfig {
    spec: EnvSpec,
    alpha: u32,
    beta: u32,
    n: usize,
    replications: usize,
}

fn clt(args: &ReplicateArgs, overrides: Option<Value>) -> CliResult<()> {
    let base = json!({
        "spec": default_spec(),
        "alpha": 1,
        "beta": 1,
        "n": 5000,
        "replications": if args.paper_scale { 2000 } else { 200 },
    });
    let cfg: CltConfig = parse_value(merge(base, overrides)?, "config")?;
    if cfg.n == 0 || cfg.replications == 0 {
        return Err(CliError::config("n and replications must be positive"));
    }
    let seed = args.seed.unwrap_or(DEFAULT_SEED);
    let workers = args.workers.unwrap_or_else(default_workers);
    let mut manifest = ManifestBuilder::start("replicate --clt", serde_json::to_value(&cfg)?, seed);
    let report = verify_clt(&cfg.spec, cfg.alpha, cfg.beta, cfg.n, cfg.replications, seed, workers)?;
    manifest.add(write_json(&args.out.join("clt_report.json"), &report)?);
    manifest.finish(&args.out)?;
    println!(
        "KS={:.4} variance={:.5}±{:.5} mean_scaled_error={:.4}",
        report.ks_distance, report.variance, report.variance_se, report.mean_scaled_error
    );
    if let Some(lr) = report.long_run {
        println!("long_run_variance={:.5}±{:.5}", lr.value, lr.std_error);
    }
    if let Some([lo, hi]) = report.variance_bounds {
        println!("variance_bounds=[{lo:.5}, {hi:.5}] within_3se={:?}", report.variance_within_bounds(3.0));
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConcentrationConfig {
    spec: EnvSpec,
    alpha: u32,
    beta: u32,
    n: usize,
    z_list: Vec<f64>,
    replications: usize,
}

fn concentration(args: &ReplicateArgs, overrides: Option<Value>) -> CliResult<()> {
    let base = json!({
        "spec": default_spec(),
        "alpha": 1,
        "beta": 1,
        "n": 200,
        "z_list": [1.0, 2.0, 3.0],
        "replications": if args.paper_scale { 10_000 } else { 1000 },
    });
    let cfg: ConcentrationConfig = parse_value(merge(base, overrides)?, "config")?;
    if cfg.n == 0 || cfg.replications == 0 {
        return Err(CliError::config("n and replications must be positive"));
    }
    if cfg.z_list.iter().any(|z| z.is_nan() || *z <= 0.0) {
        return Err(CliError::config("z_list: every z must be positive"));
    }
    let seed = args.seed.unwrap_or(DEFAULT_SEED);
    let workers = args.workers.unwrap_or_else(default_workers);
    let mut manifest = ManifestBuilder::start("replicate --concentration", serde_json::to_value(&cfg)?, seed);
    let report =
        verify_concentration(&cfg.spec, cfg.alpha, cfg.beta, cfg.n, &cfg.z_list, cfg.replications, seed, workers)?;
    let csv = args.out.join("concentration.csv");
    let mut w = BufWriter::new(File::create(&csv)?);
    writeln!(w, "z,nominal,violations,replications,frequency,p_value,trivially_satisfied,pass")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.z, r.nominal, r.violations, r.replications, r.frequency, r.p_value, r.trivially_satisfied, r.pass
        )?;
        println!("z={} frequency={:.4} nominal={:.4} pass={}", r.z, r.frequency, r.nominal, r.pass);
    }
    w.flush()?;
    manifest.add(csv);
    manifest.add(write_json(&args.out.join("concentration_report.json"), &report)?);
    manifest.finish(&args.out)?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OccupationConfig {
    spec: EnvSpec,
    m_list: Vec<u64>,
    n: usize,
    replications: usize,
    tail_terms: usize,
    tail_samples: usize,
}

fn occupation(args: &ReplicateArgs, overrides: Option<Value>) -> CliResult<()> {
    let base = json!({
        "spec": default_spec(),
        "m_list": [1, 2, 5, 10, 20, 40, 80],
        "n": 2000,
        "replications": if args.paper_scale { 400 } else { 100 },
        "tail_terms": 1_000_000,
        "tail_samples": if args.paper_scale { 400_000 } else { 50_000 },
    });
    let cfg: OccupationConfig = parse_value(merge(base, overrides)?, "config")?;
    if cfg.n == 0 || cfg.replications == 0 || cfg.tail_samples < 2 || cfg.tail_terms == 0 {
        return Err(CliError::config("n, replications and tail_terms must be positive, tail_samples at least 2"));
    }
    let seed = args.seed.unwrap_or(DEFAULT_SEED);
    let workers = args.workers.unwrap_or_else(default_workers);
    let mut manifest = ManifestBuilder::start("replicate --occupation", serde_json::to_value(&cfg)?, seed);
    let tail = TailSettings { n_terms: cfg.tail_terms, n_samples: cfg.tail_samples };
    let report = verify_occupation(&cfg.spec, &cfg.m_list, cfg.n, cfg.replications, seed, workers, tail)?;
    let csv = args.out.join("occupation.csv");
    let mut w = BufWriter::new(File::create(&csv)?);
    writeln!(w, "M,mean_fraction,se_fraction,tail,tail_se,gap,combined_se,within_4se")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.m, r.mean_fraction, r.se_fraction, r.tail, r.tail_se, r.gap, r.combined_se, r.within_4se
        )?;
        println!("M={:>3} N/n={:.5} pi_tail={:.5} gap/SE={:.2}", r.m, r.mean_fraction, r.tail, r.gap / r.combined_se);
    }
    w.flush()?;
    manifest.add(csv);
    manifest.add(write_json(&args.out.join("occupation_report.json"), &report)?);
    manifest.finish(&args.out)?;
    Ok(())
}
