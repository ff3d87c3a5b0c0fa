use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

pub const REPORT_FILE: &str = "report.json";

/// Run summary. Maps are ordered so identical runs serialize identically.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub metrics: BTreeMap<String, f64>,
    /// Files written to the output directory, including the report itself.
    pub artifacts: Vec<String>,
    /// Wall-clock seconds per stage; present only when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<BTreeMap<String, f64>>,
}

pub fn render_report(report: &Report) -> Result<String> {
    if let Some((name, _)) = report.metrics.iter().find(|(_, v)| !v.is_finite()) {
        return Err(CliError::NonFiniteMetric(name.clone()));
    }
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Config(format!("report serialization: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    let text = render_report(report)?;
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
