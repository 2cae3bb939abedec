//! `--config FILE`: a TOML or JSON table whose keys mirror the long flags.
//!
//! Top-level keys apply to whichever subcommand accepts them; a table named
//! after the subcommand (`[train]`) applies to that subcommand only. The
//! values become flags placed before the ones typed on the command line, so
//! explicit flags win.

use std::ffi::OsString;
use std::path::Path;

use clap::{ArgAction, Command};
use serde_json::Value;

use crate::error::{Error, Result};

pub(crate) fn read_table(path: &Path) -> Result<serde_json::Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let source = path.display().to_string();
    let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    let value: Value = if is_toml {
        toml::from_str(&text).map_err(|e| Error::parse(&source, e.to_string()))?
    } else {
        serde_json::from_str(&text).map_err(|e| Error::parse(&source, e.to_string()))?
    };
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(Error::parse(source, "config must be a table of flag values")),
    }
}

fn scalar(key: &str, v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Array(items) => Ok(items.iter().map(|i| scalar(key, i)).collect::<Result<Vec<_>>>()?.join(",")),
        _ => Err(Error::InvalidConfig(format!("config key {key:?} has an unsupported value"))),
    }
}

/// Flags for `sub` derived from the config table.
pub(crate) fn flags_for(sub: &Command, table: &serde_json::Map<String, Value>) -> Result<Vec<OsString>> {
    let name = sub.get_name();
    let mut entries: Vec<(&String, &Value)> = table.iter().filter(|(_, v)| !v.is_object()).collect();
    if let Some(Value::Object(own)) = table.get(name) {
        entries.extend(own.iter());
    }
    let mut out = Vec::new();
    for (key, value) in entries {
        let long = key.replace('_', "-");
        if long == "config" {
            continue;
        }
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(long.as_str())) else {
            if table.get(name).and_then(Value::as_object).is_some_and(|own| own.contains_key(key)) {
                return Err(Error::InvalidConfig(format!("{name} has no --{long} flag")));
            }
            // shared keys meant for other subcommands
            continue;
        };
        let flag = OsString::from(format!("--{long}"));
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value {
                Value::Bool(true) => out.push(flag),
                Value::Bool(false) => {}
                _ => return Err(Error::InvalidConfig(format!("config key {key:?} must be true or false"))),
            }
        } else {
            out.push(flag);
            out.push(scalar(key, value)?.into());
        }
    }
    Ok(out)
}
