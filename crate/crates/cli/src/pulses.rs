//! Pulse CSV: one pulse per line, comma-separated amplitudes, optional
//! leading `n`/`g` label.

use std::fs;
use std::io::Write;
use std::path::Path;

use rcnn_core::psd::{PulseLabel, PulseRecord, SYNTH_PERIOD_S};

use crate::error::{CliError, CsvError, Result};

/// One parsed line, scaled to unit peak.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseRow {
    pub line: u64,
    pub label: Option<PulseLabel>,
    pub samples: Vec<f64>,
}

fn parse_label(cell: &str) -> Option<PulseLabel> {
    match cell {
        "n" | "N" => Some(PulseLabel::Neutron),
        "g" | "G" => Some(PulseLabel::Gamma),
        _ => None,
    }
}

/// Parse every line; all pulses must have the same number of samples.
pub fn parse_pulse_rows(text: &str) -> std::result::Result<Vec<PulseRow>, CsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<PulseRow> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CsvError::new(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut cells = record.iter().peekable();
        let label = cells.peek().and_then(|c| parse_label(c));
        if label.is_some() {
            cells.next();
        }
        let samples = cells
            .enumerate()
            .map(|(i, cell)| match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(CsvError::new(
                    line,
                    format!("sample {} is not a finite number: {cell:?}", i + 1),
                )),
            })
            .collect::<std::result::Result<Vec<f64>, CsvError>>()?;
        if samples.is_empty() {
            return Err(CsvError::new(line, "no samples"));
        }
        if let Some(first) = rows.first() {
            if first.samples.len() != samples.len() {
                return Err(CsvError::new(
                    line,
                    format!(
                        "{} samples, line {} has {}",
                        samples.len(),
                        first.line,
                        first.samples.len()
                    ),
                ));
            }
        }
        let peak = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if peak.is_nan() || peak <= 0.0 {
            return Err(CsvError::new(line, format!("peak {peak} is not positive")));
        }
        rows.push(PulseRow {
            line,
            label,
            samples: samples.into_iter().map(|v| v / peak).collect(),
        });
    }
    if rows.is_empty() {
        return Err(CsvError::new(1, "no pulses"));
    }
    Ok(rows)
}

pub fn parse_pulses(text: &str) -> std::result::Result<Vec<PulseRecord>, CsvError> {
    parse_pulse_rows(text)?
        .into_iter()
        .map(|row| {
            PulseRecord::new(row.samples, SYNTH_PERIOD_S, row.label)
                .map_err(|e| CsvError::new(row.line, e.to_string()))
        })
        .collect()
}

pub fn load_pulses(path: &Path) -> Result<Vec<PulseRecord>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_pulses(&text).map_err(|source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Shortest round-trip formatting, so a write/read cycle is exact.
pub fn write_pulses(pulses: &[PulseRecord], mut out: impl Write) -> std::io::Result<()> {
    for p in pulses {
        let mut line = String::new();
        if let Some(label) = p.label() {
            line.push(label.code());
            line.push(',');
        }
        let cells: Vec<String> = p.samples().iter().map(|v| v.to_string()).collect();
        line.push_str(&cells.join(","));
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn save_pulses(pulses: &[PulseRecord], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_pulses(pulses, &mut buf).map_err(|e| CliError::io(path, e))?;
    fs::write(path, buf).map_err(|e| CliError::io(path, e))
}
