//! Per-pulse discrimination factors: the RCNN ignition integral and the
//! charge-comparison, zero-crossing and falling-edge-slope baselines.

use crate::dynamics::{run_rcnn, RcnnParams};
use crate::error::{Error, Result};
use crate::grid::{Grid, StimulusField};

use super::data::peak_index;

pub const DEFAULT_SHORT_GATE: usize = 25;
pub const DEFAULT_LONG_GATE: usize = 250;
/// Time constant of the zero-crossing shaper, in samples.
pub const ZC_TIME_CONSTANT: f64 = 40.0;

/// Integration window after the pulse peak, in samples: `[peak + delay,
/// peak + delay + width)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PsdWindow {
    pub delay: usize,
    pub width: usize,
}

impl Default for PsdWindow {
    fn default() -> Self {
        Self {
            delay: 20,
            width: 200,
        }
    }
}

fn positive_peak(samples: &[f64]) -> Result<(usize, f64)> {
    let p = peak_index(samples).ok_or_else(|| Error::DegenerateInput("empty pulse".into()))?;
    let peak = samples[p];
    if peak.is_nan() || peak <= 0.0 {
        return Err(Error::DegenerateInput(format!(
            "pulse peak {peak} is not positive"
        )));
    }
    Ok((p, peak))
}

fn trapezoid(samples: &[f64]) -> f64 {
    samples.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum()
}

/// Share of the ignition counts that falls in the window after the peak.
///
/// The pulse, scaled to unit peak, drives a single-row RCNN lattice; with
/// zero padding only the kernel's middle row couples neighboring samples.
pub fn rcnn_discrimination_factor(
    samples: &[f64],
    params: &RcnnParams,
    window: PsdWindow,
) -> Result<f64> {
    let (p, peak) = positive_peak(samples)?;
    let start = p + window.delay;
    let end = start + window.width;
    if end > samples.len() {
        return Err(Error::WindowOutOfRange(format!(
            "window [{start}, {end}) exceeds {} samples",
            samples.len()
        )));
    }
    let unit = Grid::from_vec(samples.len(), 1, samples.iter().map(|v| v / peak).collect())?;
    let run = run_rcnn(&StimulusField::from_unit(&unit), params, false)?;
    let counts = run.ignition_map.as_slice();
    let total: u64 = counts.iter().map(|&c| c as u64).sum();
    let inside: u64 = counts[start..end].iter().map(|&c| c as u64).sum();
    if total == 0 {
        return Err(Error::DegenerateInput("no neuron fired".into()));
    }
    Ok(inside as f64 / total as f64)
}

/// Tail-to-total charge ratio with gates anchored at the peak.
pub fn charge_comparison_factor(
    samples: &[f64],
    short_gate: usize,
    long_gate: usize,
) -> Result<f64> {
    if short_gate > long_gate {
        return Err(Error::InvalidParameter(format!(
            "short gate {short_gate} exceeds long gate {long_gate}"
        )));
    }
    let (p, _) = positive_peak(samples)?;
    let end = p + long_gate;
    if end >= samples.len() {
        return Err(Error::WindowOutOfRange(format!(
            "long gate ends at sample {end}, record has {}",
            samples.len()
        )));
    }
    let total = trapezoid(&samples[p..=end]);
    if total.is_nan() || total <= 0.0 {
        return Err(Error::DegenerateInput(format!("total charge {total}")));
    }
    Ok(trapezoid(&samples[p + short_gate..=end]) / total)
}

/// One CR differentiator: `y[n] = a (y[n-1] + x[n] - x[n-1])`.
fn cr(x: &[f64], a: f64) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    for n in 1..x.len() {
        y[n] = a * (y[n - 1] + x[n] - x[n - 1]);
    }
    y
}

/// Bipolar shaping: running integral followed by two CR stages.
pub fn zc_shape(samples: &[f64]) -> Vec<f64> {
    let a = (-1.0 / ZC_TIME_CONSTANT).exp();
    let integral: Vec<f64> = samples
        .iter()
        .scan(0.0, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    cr(&cr(&integral, a), a)
}

/// Linearly interpolated time of the last upward crossing of `level`
/// before the peak.
fn rise_time(samples: &[f64], p: usize, level: f64) -> f64 {
    match (0..p).rev().find(|&i| samples[i] < level) {
        Some(j) => j as f64 + (level - samples[j]) / (samples[j + 1] - samples[j]),
        None => 0.0,
    }
}

/// Samples from the 10% rise point to the shaped signal's zero crossing.
pub fn zero_crossing_factor(samples: &[f64]) -> Result<f64> {
    let (p, peak) = positive_peak(samples)?;
    let t_rise = rise_time(samples, p, 0.1 * peak);
    let shaped = zc_shape(samples);
    let m = peak_index(&shaped).expect("non-empty");
    let n = (m + 1..shaped.len())
        .find(|&n| shaped[n] <= 0.0)
        .ok_or(Error::NoZeroCrossing)?;
    let (a, b) = (shaped[n - 1], shaped[n]);
    let t_zero = (n - 1) as f64 + if a == b { 0.0 } else { a / (a - b) };
    Ok(t_zero - t_rise)
}

/// Absolute falling-edge slope between 90% and 10% of the peak,
/// amplitude per sample.
pub fn feps_factor(samples: &[f64]) -> Result<f64> {
    let (p, peak) = positive_peak(samples)?;
    let crossing = |from: usize, level: f64, percent: u32| -> Result<(usize, f64)> {
        let n = (from + 1..samples.len())
            .find(|&n| samples[n] <= level)
            .ok_or(Error::FallingEdgeIncomplete(percent))?;
        let (a, b) = (samples[n - 1], samples[n]);
        Ok((n, (n - 1) as f64 + (a - level) / (a - b)))
    };
    let (a90, a10) = (0.9 * peak, 0.1 * peak);
    let (n90, t90) = crossing(p, a90, 90)?;
    let (_, t10) = crossing(n90 - 1, a10, 10)?;
    Ok(((a90 - a10) / (t10 - t90)).abs())
}
