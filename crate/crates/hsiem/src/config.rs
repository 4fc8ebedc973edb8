//! Flat `key = value` configuration files.
//!
//! Keys are long flag names without the dashes (`kappa0`, `n-max`). Values
//! use the same syntax as on the command line; complex numbers are `re,im`.
//! Boolean flags take `true` or `false`. Lines starting with `#` are ignored.

use std::fs;
use std::path::Path;

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunConfig {
    pub entries: Vec<(String, String)>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| CliError::Usage(format!("config line {}: expected 'key = value'", no + 1)))?;
            let key = k.trim().trim_start_matches("--").replace('_', "-");
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
                return Err(CliError::Usage(format!("config line {}: bad key '{}'", no + 1, k.trim())));
            }
            if entries.iter().any(|(e, _)| *e == key) {
                return Err(CliError::Usage(format!("config line {}: duplicate key '{key}'", no + 1)));
            }
            entries.push((key, v.trim().to_string()));
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Appends every entry whose flag is absent from `argv`.
    pub fn merge_into(&self, argv: &mut Vec<String>) {
        for (key, value) in &self.entries {
            let flag = format!("--{key}");
            let given = argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
            if given {
                continue;
            }
            match value.as_str() {
                "true" => argv.push(flag),
                "false" => {}
                v => argv.push(format!("{flag}={v}")),
            }
        }
    }
}

/// Removes `--config FILE` / `--config=FILE` from `argv` and returns the path.
pub fn take_config_path(argv: &mut Vec<String>) -> Result<Option<String>, CliError> {
    let mut path = None;
    let mut i = 0;
    while i < argv.len() {
        if argv[i] == "--config" {
            let v = argv.get(i + 1).cloned().ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
            argv.drain(i..i + 2);
            path = Some(v);
        } else if let Some(v) = argv[i].strip_prefix("--config=") {
            path = Some(v.to_string());
            argv.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(path)
}
