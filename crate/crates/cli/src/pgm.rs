//! Binary 8-bit PGM ("P5", maxval 255).

use std::fs;
use std::path::Path;

use rcnn_core::segmentation::BinaryMask;
use rcnn_core::{Grid, Image, StimulusField};

use crate::error::{CliError, PgmError, Result};

fn is_space(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | b'\x0b' | b'\x0c')
}

/// Skip whitespace and `#` comments, then read one decimal header field.
/// Returns the value and the offset of its first digit.
fn header_field(
    bytes: &[u8],
    pos: &mut usize,
    name: &str,
) -> std::result::Result<(usize, usize), PgmError> {
    let start = *pos;
    loop {
        match bytes.get(*pos) {
            Some(&b) if is_space(b) => *pos += 1,
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                    *pos += 1;
                }
            }
            _ => break,
        }
    }
    if *pos == start {
        return Err(PgmError::new(
            *pos,
            format!("expected whitespace before {name}"),
        ));
    }
    let digits_at = *pos;
    let mut value: usize = 0;
    while let Some(&b) = bytes.get(*pos).filter(|b| b.is_ascii_digit()) {
        value = value
            .checked_mul(10)
            .and_then(|v| v.checked_add((b - b'0') as usize))
            .ok_or_else(|| PgmError::new(digits_at, format!("{name} is too large")))?;
        *pos += 1;
    }
    if *pos == digits_at {
        return Err(match bytes.get(*pos) {
            None => PgmError::new(*pos, format!("header ends before {name}")),
            Some(&b) => PgmError::new(*pos, format!("expected {name}, found byte 0x{b:02x}")),
        });
    }
    Ok((value, digits_at))
}

pub fn parse_pgm(bytes: &[u8]) -> std::result::Result<Grid<u8>, PgmError> {
    match bytes.get(..2) {
        Some(b"P5") => {}
        Some(m) => {
            return Err(PgmError::new(
                0,
                format!(
                    "expected magic \"P5\", found {:?}",
                    String::from_utf8_lossy(m)
                ),
            ))
        }
        None => {
            return Err(PgmError::new(
                bytes.len(),
                "file too short for a magic number",
            ))
        }
    }
    let mut pos = 2;
    let (width, width_at) = header_field(bytes, &mut pos, "width")?;
    let (height, _) = header_field(bytes, &mut pos, "height")?;
    let (maxval, maxval_at) = header_field(bytes, &mut pos, "maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::new(
            width_at,
            format!("empty image {width}x{height}"),
        ));
    }
    if maxval != 255 {
        return Err(PgmError::new(
            maxval_at,
            format!("maxval must be 255, got {maxval}"),
        ));
    }
    match bytes.get(pos) {
        Some(&b) if is_space(b) => pos += 1,
        _ => {
            return Err(PgmError::new(
                pos,
                "expected one whitespace byte after maxval",
            ))
        }
    }
    let need = width
        .checked_mul(height)
        .ok_or_else(|| PgmError::new(width_at, "image dimensions overflow"))?;
    let have = bytes.len() - pos;
    if have < need {
        return Err(PgmError::new(
            bytes.len(),
            format!("truncated payload: expected {need} bytes, found {have}"),
        ));
    }
    Grid::from_vec(width, height, bytes[pos..pos + need].to_vec())
        .map_err(|e| PgmError::new(pos, e.to_string()))
}

pub fn encode_pgm(gray: &Grid<u8>) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", gray.width(), gray.height()).into_bytes();
    out.extend_from_slice(gray.as_slice());
    out
}

pub fn load_gray(path: &Path) -> Result<Grid<u8>> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_pgm(&bytes).map_err(|source| CliError::Pgm {
        path: path.to_path_buf(),
        source,
    })
}

/// Gray levels to stimuli: `S = max(g / 255, 1e-3)`.
pub fn load_image(path: &Path) -> Result<StimulusField> {
    let gray = load_gray(path)?;
    let levels: Vec<f64> = gray.as_slice().iter().map(|&g| g as f64).collect();
    Ok(StimulusField::from_gray(
        gray.width(),
        gray.height(),
        &levels,
    )?)
}

/// Gray levels on the [0, 1] scale, without the stimulus floor.
pub fn load_unit_image(path: &Path) -> Result<Image> {
    Ok(load_gray(path)?.map(|&g| g as f64 / 255.0))
}

pub fn save_gray(gray: &Grid<u8>, path: &Path) -> Result<()> {
    fs::write(path, encode_pgm(gray)).map_err(|e| CliError::io(path, e))
}

pub fn save_image(field: &StimulusField, path: &Path) -> Result<()> {
    save_gray(&field.to_gray_levels(), path)
}

/// Foreground 255, background 0.
pub fn save_mask(mask: &BinaryMask, path: &Path) -> Result<()> {
    save_gray(&mask.to_gray_levels(), path)
}

/// Counts scaled so the largest maps to 255, rounded half up.
pub fn counts_to_gray(counts: &Grid<u32>) -> Grid<u8> {
    let max = counts.as_slice().iter().copied().max().unwrap_or(0) as u64;
    if max == 0 {
        return counts.map(|_| 0);
    }
    counts.map(|&c| ((c as u64 * 255 + max / 2) / max) as u8)
}
