//! Invocation settings assembled from three layers: command-line flags
//! (which clap also fills from `WDVDB_*` environment variables), an
//! optional JSON config file, and built-in defaults. Flags beat the
//! file; the file beats the defaults.

use std::path::Path;

use serde::Deserialize;
use wdvdb_core::corpus::SplitName;
use wdvdb_core::eval::ReportFormat;
use wdvdb_core::learning::{
    custom_preset, filter_preset, ores_preset, wdvd_preset, CustomPresetFile, DetectorPreset,
};

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_WINDOW: usize = 16;
pub const DEFAULT_ADDRESS: &str = "127.0.0.1:0";
pub const DEFAULT_TIMEOUT_SECS: u64 = 60;

/// Optional JSON settings file. Every field may be omitted; present
/// fields fill in whatever the command line left unset.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub addr: Option<String>,
    pub preset: Option<String>,
    pub format: Option<String>,
    pub split: Option<String>,
    pub manifest: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("config file {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("config file {}: {e}", path.display())))
    }
}

/// Flag value if given (or taken from the environment by clap), else
/// the config-file value, else the default.
pub fn resolve<T: Clone>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Like [`resolve`] but without a default; missing everywhere is fine.
pub fn resolve_opt<T: Clone>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

pub fn parse_split(name: &str) -> Result<SplitName, CliError> {
    SplitName::parse(&name.to_ascii_uppercase()).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown split {name:?} (expected TRAINING, VALIDATION, or TEST)"
        ))
    })
}

pub fn parse_format(name: &str) -> Result<ReportFormat, CliError> {
    ReportFormat::from_name(name).map_err(|e| CliError::Usage(e.to_string()))
}

/// Resolves a preset name to its detector bundle. Accepts the built-in
/// names (any case) or `custom:<path>` pointing at a JSON preset file.
/// The built-ins take their training seed from `seed`; a custom file
/// carries its own.
pub fn parse_preset(name: &str, seed: u64) -> Result<DetectorPreset, CliError> {
    let lower = name.to_ascii_lowercase();
    match lower.as_str() {
        "wdvd" => Ok(wdvd_preset(seed)),
        "filter" => Ok(filter_preset(seed)),
        "ores" | "ores_subset" | "ores-subset" => Ok(ores_preset(seed)),
        _ => {
            if let Some(path) = lower.strip_prefix("custom:") {
                // use the original string for the path: case matters there
                let path = &name[name.len() - path.len()..];
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Data(format!("preset file {path}: {e}")))?;
                let file: CustomPresetFile = serde_json::from_str(&text)
                    .map_err(|e| CliError::Data(format!("preset file {path}: {e}")))?;
                Ok(custom_preset(file))
            } else {
                Err(CliError::Usage(format!(
                    "unknown preset {name:?} (expected wdvd, filter, ores, or custom:<file>)"
                )))
            }
        }
    }
}

pub fn ensure_window(k: usize) -> Result<usize, CliError> {
    if k == 0 {
        return Err(CliError::Usage(
            "backpressure window k must be at least 1".into(),
        ));
    }
    Ok(k)
}

/// Parses an RFC 3339 instant into epoch seconds.
pub fn parse_instant(s: &str) -> Result<i64, CliError> {
    chrono::DateTime::parse_from_rfc3339(s)
        .map(|dt| dt.timestamp())
        .map_err(|e| CliError::Usage(format!("bad timestamp {s:?}: {e}")))
}
