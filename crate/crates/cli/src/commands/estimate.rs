use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

use rwre::estimators::{estimate_cdf_sweep, io::write_csv, sup_loss, CdfEstimate};
use rwre::lepskii::{adaptive_estimate_capped, ZPolicy};
use rwre::walk_sim::io::{read_binary, read_csv, ZPathRecord};
use serde_json::json;

use super::create_out_dir;
use crate::error::{CliError, CliResult};
use crate::manifest::ManifestBuilder;
use crate::EstimateArgs;

fn read_record(args: &EstimateArgs) -> CliResult<ZPathRecord> {
    let file = File::open(&args.input)
        .map_err(|e| CliError::config(format!("input: cannot open {}: {e}", args.input.display())))?;
    let reader = BufReader::new(file);
    if args.input.extension().is_some_and(|ext| ext == "bin") {
        let mut records = read_binary(reader)?;
        if records.len() != 1 {
            return Err(CliError::config(format!("input: expected one binary record, found {}", records.len())));
        }
        Ok(records.remove(0))
    } else {
        Ok(read_csv(reader)?)
    }
}

fn write_estimate(path: &std::path::Path, est: &CdfEstimate, seed: u64) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_csv(&mut w, est, seed)?;
    w.flush()?;
    Ok(())
}

pub fn run(args: &EstimateArgs) -> CliResult<()> {
    let z: ZPolicy = args.z.parse().map_err(|e: rwre::Error| CliError::config(format!("z: {e}")))?;
    if args.m_cap == 0 {
        return Err(CliError::config("m_cap: must be positive"));
    }
    let record = read_record(args)?;
    create_out_dir(&args.out)?;
    let config = json!({
        "input": args.input.display().to_string(),
        "z": z,
        "m_cap": args.m_cap,
    });
    let mut manifest = ManifestBuilder::start("estimate", config, record.seed);
    let result = adaptive_estimate_capped(&record.path, z, args.m_cap)?;

    let mut summary = result.to_json();
    summary["n"] = json!(record.path.n);
    summary["seed"] = json!(record.seed);
    if let Some(spec) = &record.spec {
        summary["spec"] = json!(spec);
        summary["N_inf"] = json!(sup_loss(&result.final_estimate, spec));
    }
    let lepskii_path = args.out.join("lepskii.json");
    std::fs::write(&lepskii_path, serde_json::to_string_pretty(&summary)?)?;
    manifest.add(lepskii_path);

    let est_path = args.out.join("estimate.csv");
    write_estimate(&est_path, &result.final_estimate, record.seed)?;
    manifest.add(est_path);

    if args.all_estimates {
        let dir = args.out.join("estimates");
        std::fs::create_dir_all(&dir)?;
        for est in estimate_cdf_sweep(&record.path, result.m_max) {
            let path = dir.join(format!("M_{:04}.csv", est.m));
            write_estimate(&path, &est, record.seed)?;
            manifest.add(path);
        }
    }
    manifest.finish(&args.out)?;
    println!(
        "M_hat={} z={} candidates={}{}",
        result.chosen_m,
        result.z,
        result.m_max,
        summary.get("N_inf").map(|v| format!(" N_inf={v}")).unwrap_or_default()
    );
    Ok(())
}
