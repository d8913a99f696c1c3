pub mod estimate;
pub mod replicate;
pub mod simulate;

use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Reads `arg` as inline JSON when it starts with `{`, otherwise as a file path.
pub fn load_json(arg: &str, what: &str) -> CliResult<Value> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::config(format!("{what}: cannot read {arg:?}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{what}: {e}")))
}

pub fn parse_value<T: DeserializeOwned>(value: Value, what: &str) -> CliResult<T> {
    serde_json::from_value(value).map_err(|e| CliError::config(format!("{what}: {e}")))
}

pub fn create_out_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::config(format!("out: cannot create {}: {e}", dir.display())))
}
