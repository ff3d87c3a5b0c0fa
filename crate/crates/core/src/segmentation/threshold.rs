//! Histogram thresholds: between-class variance (Otsu) and maximum
//! within-class entropy (Kapur).

use crate::error::{Error, Result};
use crate::grid::Grid;

pub const GRAY_LEVELS: usize = 256;

/// Scores this close (relative) are ties, so rounding cannot move the
/// smallest-maximizer choice past a mathematically equal score.
const TIE_TOLERANCE: f64 = 1e-12;

fn beats(candidate: f64, best: f64) -> bool {
    candidate > best + TIE_TOLERANCE * best.abs()
}

/// 256-bin histogram of 8-bit gray levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayHistogram {
    counts: Vec<u64>,
    total: u64,
}

impl GrayHistogram {
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.len() != GRAY_LEVELS {
            return Err(Error::InvalidParameter(format!(
                "histogram needs {GRAY_LEVELS} bins, got {}",
                counts.len()
            )));
        }
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::DegenerateInput("empty histogram".into()));
        }
        Ok(Self { counts, total })
    }

    pub fn from_levels(levels: &Grid<u8>) -> Self {
        let mut counts = vec![0u64; GRAY_LEVELS];
        for &g in levels.as_slice() {
            counts[g as usize] += 1;
        }
        Self {
            counts,
            total: levels.len() as u64,
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    fn distinct_levels(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }
}

/// Otsu threshold `T`: class 1 is `0..=T`, class 2 is `T+1..=255`.
///
/// Maximizes `P1 P2 (μ1 - μ2)²` over `0 <= T < 255`, skipping thresholds
/// that leave a class empty; the smallest maximizer wins.
pub fn otsu_threshold(hist: &GrayHistogram) -> Result<u8> {
    if hist.distinct_levels() < 2 {
        return Err(Error::DegenerateInput(
            "histogram has a single gray level".into(),
        ));
    }
    let n = hist.total;
    let total_moment: u64 = hist
        .counts
        .iter()
        .enumerate()
        .map(|(i, &c)| i as u64 * c)
        .sum();
    let nf = n as f64;
    let mut count_below = 0u64;
    let mut moment_below = 0u64;
    let mut best: Option<(u8, f64)> = None;
    for t in 0..GRAY_LEVELS - 1 {
        count_below += hist.counts[t];
        moment_below += t as u64 * hist.counts[t];
        if count_below == 0 || count_below == n {
            continue;
        }
        let count_above = n - count_below;
        let p1 = count_below as f64 / nf;
        let p2 = count_above as f64 / nf;
        let mu1 = moment_below as f64 / count_below as f64;
        let mu2 = (total_moment - moment_below) as f64 / count_above as f64;
        let var = p1 * p2 * (mu1 - mu2) * (mu1 - mu2);
        if best.is_none_or(|(_, v)| beats(var, v)) {
            best = Some((t as u8, var));
        }
    }
    best.map(|(t, _)| t)
        .ok_or_else(|| Error::DegenerateInput("no valid threshold".into()))
}

/// Kapur threshold over a histogram of arbitrary length: class 1 is
/// `0..=T`, class 2 is `T+1..`. Maximizes the sum of the two classes'
/// Shannon entropies (nats); the smallest maximizer wins.
pub fn kapur_threshold_counts(counts: &[u64]) -> Result<usize> {
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::DegenerateInput(
            "need at least two distinct values".into(),
        ));
    }
    let total: u64 = counts.iter().sum();
    let c_ln_c = |c: u64| {
        if c == 0 {
            0.0
        } else {
            c as f64 * (c as f64).ln()
        }
    };
    let total_cln: f64 = counts.iter().map(|&c| c_ln_c(c)).sum();

    // With class count C and Σ c ln c = K, the class entropy is ln C - K / C.
    let mut count_below = 0u64;
    let mut cln_below = 0.0;
    let mut best: Option<(usize, f64)> = None;
    for (t, &c) in counts.iter().enumerate().take(counts.len() - 1) {
        count_below += c;
        cln_below += c_ln_c(c);
        if count_below == 0 || count_below == total {
            continue;
        }
        let count_above = total - count_below;
        let h_below = (count_below as f64).ln() - cln_below / count_below as f64;
        let h_above = (count_above as f64).ln() - (total_cln - cln_below) / count_above as f64;
        let h = h_below + h_above;
        if best.is_none_or(|(_, v)| beats(h, v)) {
            best = Some((t, h));
        }
    }
    best.map(|(t, _)| t)
        .ok_or_else(|| Error::DegenerateInput("no valid threshold".into()))
}

/// Kapur threshold of an ignition map; counts strictly above `T` form the
/// upper class.
pub fn kapur_threshold(map: &Grid<u32>) -> Result<u32> {
    let max = map.as_slice().iter().copied().max().unwrap_or(0) as usize;
    let mut counts = vec![0u64; max + 1];
    for &v in map.as_slice() {
        counts[v as usize] += 1;
    }
    kapur_threshold_counts(&counts).map(|t| t as u32)
}
