//! Spike-train statistics: periodic vs irregular encoding.
//!
//! Irregularity is measured by the coefficient of variation of the
//! inter-spike intervals after a burn-in window.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::dynamics::{run_rcnn_sequence, RcnnParams};
use crate::error::{Error, Result};
use crate::grid::StimulusField;

pub const DEFAULT_BURN_IN: usize = 500;
pub const DEFAULT_CV_THRESHOLD: f64 = 0.1;
/// Side of the time-varying patch in the video stimulus.
pub const VIDEO_PATCH: usize = 6;

/// Firing iterations of one neuron, strictly increasing and 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SpikeTrain {
    fires: Vec<usize>,
}

impl SpikeTrain {
    pub fn new(fires: Vec<usize>) -> Result<Self> {
        if fires.first() == Some(&0) {
            return Err(Error::InvalidParameter("fire times start at 1".into()));
        }
        if fires.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "fire times must be strictly increasing".into(),
            ));
        }
        Ok(Self { fires })
    }

    pub(crate) fn from_sorted_unchecked(fires: Vec<usize>) -> Self {
        Self { fires }
    }

    pub fn fires(&self) -> &[usize] {
        &self.fires
    }

    pub fn len(&self) -> usize {
        self.fires.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fires.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsiStats {
    pub intervals: Vec<usize>,
    pub mean: f64,
    /// Population standard deviation over the mean.
    pub cv: f64,
    /// Most frequent interval, smallest on ties.
    pub dominant_period: usize,
}

/// Interval statistics of the fires strictly after `burn_in`.
pub fn isi_statistics(train: &SpikeTrain, burn_in: usize) -> Result<IsiStats> {
    let kept: Vec<usize> = train
        .fires
        .iter()
        .copied()
        .filter(|&t| t > burn_in)
        .collect();
    if kept.len() < 3 {
        return Err(Error::TooFewSpikes(kept.len()));
    }
    let intervals: Vec<usize> = kept.windows(2).map(|w| w[1] - w[0]).collect();
    let n = intervals.len() as f64;
    let mean = intervals.iter().sum::<usize>() as f64 / n;
    let var = intervals
        .iter()
        .map(|&i| (i as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    let cv = if intervals.iter().all(|&i| i == intervals[0]) {
        0.0
    } else {
        var.sqrt() / mean
    };
    let mut freq: BTreeMap<usize, usize> = BTreeMap::new();
    for &i in &intervals {
        *freq.entry(i).or_default() += 1;
    }
    let dominant_period = freq
        .iter()
        .max_by_key(|(&period, &count)| (count, Reverse(period)))
        .map(|(&period, _)| period)
        .unwrap_or(0);
    Ok(IsiStats {
        intervals,
        mean,
        cv,
        dominant_period,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    Periodic,
    Chaotic,
}

pub fn classify_encoding(stats: &IsiStats, cv_threshold: f64) -> Encoding {
    if stats.cv <= cv_threshold {
        Encoding::Periodic
    } else {
        Encoding::Chaotic
    }
}

/// Gray levels of the diagonal ramp: 0 at the top-left corner, 255 at the
/// bottom-right, linear in `row + col`.
pub fn gradient_gray(size: usize) -> Vec<f64> {
    let span = (2 * size.saturating_sub(1)).max(1) as f64;
    (0..size * size)
        .map(|i| 255.0 * ((i / size) + (i % size)) as f64 / span)
        .collect()
}

pub fn gradient_stimulus(size: usize) -> Result<StimulusField> {
    if size == 0 {
        return Err(Error::InvalidParameter("size must be >= 1".into()));
    }
    StimulusField::from_gray(size, size, &gradient_gray(size))
}

/// Gray value of the dynamic patch at frame `n`: `100 + sin(nπ/50)`.
pub fn video_patch_gray(n: usize) -> f64 {
    100.0 + (n as f64 * PI / 50.0).sin()
}

/// Is `(row, col)` inside the centered dynamic patch?
pub fn in_video_patch(size: usize, row: usize, col: usize) -> bool {
    let lo = (size - VIDEO_PATCH) / 2;
    let hi = lo + VIDEO_PATCH;
    (lo..hi).contains(&row) && (lo..hi).contains(&col)
}

/// Frames `0..frames` of the video stimulus: the diagonal ramp with a
/// centered 6×6 patch oscillating around gray 100.
pub fn synth_video_stimulus(size: usize, frames: usize) -> Result<Vec<StimulusField>> {
    if size < 8 {
        return Err(Error::InvalidParameter(format!(
            "video stimulus needs size >= 8, got {size}"
        )));
    }
    let base = gradient_gray(size);
    (0..frames)
        .map(|n| {
            let patch = video_patch_gray(n);
            let gray: Vec<f64> = base
                .iter()
                .enumerate()
                .map(|(i, &g)| {
                    if in_video_patch(size, i / size, i % size) {
                        patch
                    } else {
                        g
                    }
                })
                .collect();
            StimulusField::from_gray(size, size, &gray)
        })
        .collect()
}

/// Mean ISI CV inside the dynamic patch and over the constant neurons.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatchContrast {
    pub patch_mean_cv: f64,
    pub constant_mean_cv: f64,
}

impl PatchContrast {
    pub fn ratio(&self) -> f64 {
        self.patch_mean_cv / self.constant_mean_cv
    }
}

/// Runs the video stimulus for `params.iterations` frames and compares the
/// irregularity of the dynamic patch against the static ramp.
pub fn video_cv_contrast(
    size: usize,
    params: &RcnnParams,
    burn_in: usize,
) -> Result<PatchContrast> {
    // Iteration n sees frame n, so frame 0 is skipped.
    let frames = synth_video_stimulus(size, params.iterations + 1)?;
    let run = run_rcnn_sequence(&frames[1..], params, true)?;
    let raster = run.spike_raster.expect("raster was requested");
    let (mut patch, mut n_patch, mut fixed, mut n_fixed) = (0.0, 0usize, 0.0, 0usize);
    for i in 0..size * size {
        let cv = isi_statistics(&raster.train(i), burn_in)?.cv;
        if in_video_patch(size, i / size, i % size) {
            patch += cv;
            n_patch += 1;
        } else {
            fixed += cv;
            n_fixed += 1;
        }
    }
    Ok(PatchContrast {
        patch_mean_cv: patch / n_patch as f64,
        constant_mean_cv: fixed / n_fixed as f64,
    })
}
