use std::fs::File;
use std::io::{BufWriter, Write};

use rwre::experiments::{simulate_path, Engine};
use rwre::walk_sim::io::{write_binary, write_csv};
use rwre::EnvSpec;
use serde_json::json;

use super::{create_out_dir, load_json, parse_value};
use crate::error::{CliError, CliResult};
use crate::manifest::ManifestBuilder;
use crate::{EngineArg, FormatArg, SimulateArgs};

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let spec: EnvSpec = parse_value(load_json(&args.spec, "spec")?, "spec")?;
    if args.n == 0 {
        return Err(CliError::config("n: must be positive"));
    }
    let regime = spec.solve_kappa()?;
    let engine = match args.engine {
        EngineArg::Walk => Engine::Walk,
        EngineArg::Branching => Engine::Branching,
    };
    create_out_dir(&args.out)?;
    let config = json!({
        "spec": spec,
        "n": args.n,
        "engine": engine,
        "max_steps": args.max_steps,
        "regime": regime.name(),
    });
    let mut manifest = ManifestBuilder::start("simulate", config, args.seed);
    let (path, _) = simulate_path(&spec, &regime, args.n, args.seed, engine, args.max_steps)?;
    let file = match args.format {
        FormatArg::Csv => {
            let file = args.out.join("zpath.csv");
            let mut w = BufWriter::new(File::create(&file)?);
            write_csv(&mut w, &path, args.seed, &spec)?;
            w.flush()?;
            file
        }
        FormatArg::Binary => {
            let file = args.out.join("zpath.bin");
            let mut w = BufWriter::new(File::create(&file)?);
            write_binary(&mut w, &path, args.seed)?;
            w.flush()?;
            file
        }
    };
    manifest.add(file);
    manifest.finish(&args.out)?;
    println!("n={} T_n={} max_Z={} engine={:?}", path.n, path.hitting_time, path.max_level(), path.time_source);
    Ok(())
}
