//! Flat `key=value` configuration files.
//!
//! Keys are the long flag names of the subcommand. Entries are turned into
//! flags placed before the command-line flags, so the command line wins.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::{CommandFactory, Parser};

use crate::args::Cli;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigEntry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits the file into entries. `#` starts a comment; blank lines are skipped.
pub fn parse_config_text(text: &str) -> CliResult<Vec<ConfigEntry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {line}: expected key=value, got '{}'",
                raw.trim()
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(CliError::Usage(format!(
                "config line {line}: empty key or value in '{}'",
                raw.trim()
            )));
        }
        out.push(ConfigEntry {
            line,
            key: key.to_owned(),
            value: value.to_owned(),
        });
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> CliResult<Vec<ConfigEntry>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn known_keys(subcommand: &str) -> Vec<String> {
    let cmd = Cli::command();
    cmd.find_subcommand(subcommand)
        .map(|sub| {
            sub.get_arguments()
                .filter_map(|a| a.get_long())
                .filter(|&l| l != "config")
                .map(str::to_owned)
                .collect()
        })
        .unwrap_or_default()
}

/// Converts entries to `--key value` pairs after checking each key and value
/// against the subcommand's flags.
pub fn entries_to_args(subcommand: &str, entries: &[ConfigEntry]) -> CliResult<Vec<OsString>> {
    let keys = known_keys(subcommand);
    let mut out = Vec::with_capacity(2 * entries.len());
    for e in entries {
        if !keys.iter().any(|k| k == &e.key) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key '{}' for '{subcommand}'",
                e.line, e.key
            )));
        }
        let flag = format!("--{}", e.key);
        if let Err(err) =
            Cli::try_parse_from(["plankton", subcommand, flag.as_str(), e.value.as_str()])
        {
            let msg = err.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            return Err(CliError::Usage(format!(
                "config line {}: invalid value for '{}': {first}",
                e.line, e.key
            )));
        }
        out.push(flag.into());
        out.push(e.value.clone().into());
    }
    Ok(out)
}
