//! Objective fusion quality measures.

use crate::error::{Error, Result};
use crate::grid::{Grid, Image};

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FusionReport {
    /// Mean Sobel gradient magnitude, [0, 1] scale.
    pub es: f64,
    /// Entropy of the 8-bit histogram, bits.
    pub h: f64,
    /// Standard deviation, [0, 1] scale.
    pub sd: f64,
    /// Spatial frequency, 0-255 scale.
    pub sf: f64,
    /// Sum over sources of mutual information with the fused image, bits.
    pub ff: f64,
    /// Mean SSIM against the sources.
    pub ssim: f64,
}

fn levels(img: &Image) -> Vec<usize> {
    img.to_gray_levels()
        .as_slice()
        .iter()
        .map(|&g| g as usize)
        .collect()
}

fn entropy_bits(counts: impl Iterator<Item = u64>, total: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

pub fn entropy(img: &Image) -> f64 {
    let mut hist = [0u64; 256];
    for l in levels(img) {
        hist[l] += 1;
    }
    entropy_bits(hist.into_iter(), img.len() as f64)
}

pub fn standard_deviation(img: &Image) -> f64 {
    let n = img.len() as f64;
    let mean = img.as_slice().iter().sum::<f64>() / n;
    (img.as_slice()
        .iter()
        .map(|v| (v - mean).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
}

pub fn spatial_frequency(img: &Image) -> f64 {
    let (w, h) = img.dims();
    let mean_sq = |pairs: &mut dyn Iterator<Item = (f64, f64)>| {
        let (mut sum, mut n) = (0.0, 0usize);
        for (a, b) in pairs {
            sum += (255.0 * (a - b)).powi(2);
            n += 1;
        }
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    };
    let rf = mean_sq(
        &mut (0..h)
            .flat_map(|r| (1..w).map(move |c| (r, c)))
            .map(|(r, c)| (*img.get(r, c), *img.get(r, c - 1))),
    );
    let cf = mean_sq(
        &mut (1..h)
            .flat_map(|r| (0..w).map(move |c| (r, c)))
            .map(|(r, c)| (*img.get(r, c), *img.get(r - 1, c))),
    );
    (rf + cf).sqrt()
}

pub fn edge_strength(img: &Image) -> f64 {
    let (w, h) = img.dims();
    let at = |r: isize, c: isize| {
        *img.get(
            r.clamp(0, h as isize - 1) as usize,
            c.clamp(0, w as isize - 1) as usize,
        )
    };
    let mut sum = 0.0;
    for r in 0..h as isize {
        for c in 0..w as isize {
            let gx = (at(r - 1, c + 1) - at(r - 1, c - 1))
                + 2.0 * (at(r, c + 1) - at(r, c - 1))
                + (at(r + 1, c + 1) - at(r + 1, c - 1));
            let gy = (at(r + 1, c - 1) - at(r - 1, c - 1))
                + 2.0 * (at(r + 1, c) - at(r - 1, c))
                + (at(r + 1, c + 1) - at(r - 1, c + 1));
            sum += gx.hypot(gy);
        }
    }
    sum / img.len() as f64
}

pub fn mutual_information(a: &Image, b: &Image) -> Result<f64> {
    a.ensure_same_dims(b, "mutual information")?;
    let mut joint = vec![0u64; 256 * 256];
    let mut ha = [0u64; 256];
    let mut hb = [0u64; 256];
    for (x, y) in levels(a).into_iter().zip(levels(b)) {
        joint[x * 256 + y] += 1;
        ha[x] += 1;
        hb[y] += 1;
    }
    let n = a.len() as f64;
    let mi = entropy_bits(ha.into_iter(), n) + entropy_bits(hb.into_iter(), n)
        - entropy_bits(joint.into_iter(), n);
    Ok(mi.max(0.0))
}

fn gaussian_window() -> Vec<f64> {
    let half = (SSIM_WINDOW / 2) as f64;
    let raw: Vec<f64> = (0..SSIM_WINDOW * SSIM_WINDOW)
        .map(|i| {
            let dy = (i / SSIM_WINDOW) as f64 - half;
            let dx = (i % SSIM_WINDOW) as f64 - half;
            (-(dx * dx + dy * dy) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Mean SSIM over all fully contained 11×11 Gaussian windows, dynamic
/// range 1.
pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    a.ensure_same_dims(b, "ssim")?;
    let (w, h) = a.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::ImageTooSmall(format!(
            "ssim needs at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {w}x{h}"
        )));
    }
    let win = gaussian_window();
    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let mut total = 0.0;
    let mut count = 0usize;
    for r0 in 0..=h - SSIM_WINDOW {
        for c0 in 0..=w - SSIM_WINDOW {
            let (mut ma, mut mb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (i, &g) in win.iter().enumerate() {
                let (r, c) = (r0 + i / SSIM_WINDOW, c0 + i % SSIM_WINDOW);
                let (x, y) = (*a.get(r, c), *b.get(r, c));
                ma += g * x;
                mb += g * y;
                saa += g * x * x;
                sbb += g * y * y;
                sab += g * x * y;
            }
            let va = saa - ma * ma;
            let vb = sbb - mb * mb;
            let cov = sab - ma * mb;
            total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
                / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            count += 1;
        }
    }
    Ok(total / count as f64)
}

pub fn fusion_metrics(fused: &Image, sources: &[Image]) -> Result<FusionReport> {
    if sources.is_empty() {
        return Err(Error::InvalidParameter("no source images".into()));
    }
    let mut ff = 0.0;
    let mut ssim_sum = 0.0;
    for s in sources {
        ff += mutual_information(s, fused)?;
        ssim_sum += ssim(s, fused)?;
    }
    Ok(FusionReport {
        es: edge_strength(fused),
        h: entropy(fused),
        sd: standard_deviation(fused),
        sf: spatial_frequency(fused),
        ff,
        ssim: ssim_sum / sources.len() as f64,
    })
}

/// 0/1 checkerboard on the [0, 1] scale.
pub fn checkerboard(width: usize, height: usize) -> Image {
    Grid::from_fn(width, height, |r, c| ((r + c) % 2) as f64)
}
