//! Config file + `--set` override resolution.

use std::path::Path;

use rpdqs_core::experiment::ExperimentConfig;
use toml::{Table, Value};

use crate::CliError;

/// Parse a `--set` value as a TOML literal, falling back to a bare string so
/// `--set mode=density` works without quoting.
fn parse_literal(raw: &str) -> Value {
    match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| Value::String(raw.to_owned())),
        Err(_) => Value::String(raw.to_owned()),
    }
}

fn set_path(table: &mut Table, key: &str, value: Value) -> Result<(), CliError> {
    let mut parts = key.split('.').peekable();
    let mut cur = table;
    while let Some(part) = parts.next() {
        if part.is_empty() {
            return Err(CliError::Config(format!("--set: malformed key `{key}`")));
        }
        if parts.peek().is_none() {
            cur.insert(part.to_owned(), value);
            return Ok(());
        }
        let entry = cur
            .entry(part.to_owned())
            .or_insert_with(|| Value::Table(Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("--set {key}: `{part}` is not a table")))?;
    }
    unreachable!("split yields at least one part")
}

/// Config file contents plus overrides, with `output` split off.
pub struct Resolved {
    pub experiment: ExperimentConfig,
    pub output: Option<String>,
}

pub fn resolve(
    file: Option<&Path>,
    overrides: &[String],
    seed: Option<u64>,
) -> Result<Resolved, CliError> {
    let mut table = match file {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", p.display()))
            })?;
            text.parse::<Table>()
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => Table::new(),
    };
    for o in overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects key=value, got `{o}`")))?;
        set_path(&mut table, k.trim(), parse_literal(v.trim()))?;
    }
    let output = match table.remove("output") {
        None => None,
        Some(Value::String(s)) => Some(s),
        Some(_) => return Err(CliError::Config("output must be a string".into())),
    };
    let mut experiment: ExperimentConfig = Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(format!("config: {}", e.message())))?;
    if let Some(s) = seed {
        experiment.seed = s;
    }
    experiment
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Resolved { experiment, output })
}
