//! Binary segmentation from RCNN ignition maps, with Otsu and K-means
//! baselines and overlap metrics.

mod kmeans;
mod phantom;
mod threshold;

pub use kmeans::{kmeans_1d, KMeans};
pub use phantom::{add_poisson_noise, two_gaussian_phantom, Phantom, PhantomSpec};
pub use threshold::{
    kapur_threshold, kapur_threshold_counts, otsu_threshold, GrayHistogram, GRAY_LEVELS,
};

use crate::dynamics::{run_rcnn, RcnnParams};
use crate::error::{Error, Result};
use crate::grid::{Grid, StimulusField};

/// Foreground (1) / background (0) labels over an image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    grid: Grid<u8>,
}

impl BinaryMask {
    pub fn new(grid: Grid<u8>) -> Result<Self> {
        if grid.as_slice().iter().any(|&v| v > 1) {
            return Err(Error::InvalidParameter("mask values must be 0 or 1".into()));
        }
        Ok(Self { grid })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        Self {
            grid: Grid::from_fn(width, height, |r, c| f(r, c) as u8),
        }
    }

    pub fn grid(&self) -> &Grid<u8> {
        &self.grid
    }

    pub fn width(&self) -> usize {
        self.grid.width()
    }

    pub fn height(&self) -> usize {
        self.grid.height()
    }

    pub fn is_set(&self, row: usize, col: usize) -> bool {
        *self.grid.get(row, col) == 1
    }

    pub fn foreground_count(&self) -> usize {
        self.grid.as_slice().iter().filter(|&&v| v == 1).count()
    }

    pub fn complement(&self) -> Self {
        Self {
            grid: self.grid.map(|&v| 1 - v),
        }
    }

    /// 0/255 rendering for 8-bit image output.
    pub fn to_gray_levels(&self) -> Grid<u8> {
        self.grid.map(|&v| v * 255)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentationMetrics {
    pub pa: f64,
    pub iou: f64,
    pub dice: f64,
}

/// Pixel accuracy, intersection over union and Dice of `pred` against
/// `truth`. IoU and Dice are 1 when both masks are empty.
pub fn segmentation_metrics(pred: &BinaryMask, truth: &BinaryMask) -> Result<SegmentationMetrics> {
    pred.grid
        .ensure_same_dims(&truth.grid, "segmentation metrics")?;
    let (mut tp, mut fp, mut fn_, mut tn) = (0u64, 0u64, 0u64, 0u64);
    for (&p, &t) in pred.grid.as_slice().iter().zip(truth.grid.as_slice()) {
        match (p, t) {
            (1, 1) => tp += 1,
            (1, _) => fp += 1,
            (_, 1) => fn_ += 1,
            _ => tn += 1,
        }
    }
    let n = (tp + fp + fn_ + tn) as f64;
    let union = tp + fp + fn_;
    let (iou, dice) = if union == 0 {
        (1.0, 1.0)
    } else {
        (
            tp as f64 / union as f64,
            2.0 * tp as f64 / (2 * tp + fp + fn_) as f64,
        )
    };
    Ok(SegmentationMetrics {
        pa: (tp + tn) as f64 / n,
        iou,
        dice,
    })
}

/// Pixels strictly above the Otsu threshold are foreground.
pub fn otsu_segment(image: &Grid<u8>) -> Result<(BinaryMask, u8)> {
    let t = otsu_threshold(&GrayHistogram::from_levels(image))?;
    let mask = BinaryMask {
        grid: image.map(|&g| (g > t) as u8),
    };
    Ok((mask, t))
}

/// K-means labels of the gray values; label 0 has the darkest center.
pub fn kmeans_labels(image: &Grid<u8>, k: usize, max_iter: usize) -> Result<(Grid<usize>, KMeans)> {
    let values: Vec<f64> = image.as_slice().iter().map(|&g| g as f64).collect();
    let km = kmeans_1d(&values, k, max_iter)?;
    let labels = Grid::from_vec(image.width(), image.height(), km.labels.clone())?;
    Ok((labels, km))
}

/// Two-cluster K-means; the brighter cluster is foreground.
pub fn kmeans_segment(image: &Grid<u8>, max_iter: usize) -> Result<(BinaryMask, KMeans)> {
    let (labels, km) = kmeans_labels(image, 2, max_iter)?;
    let mask = BinaryMask {
        grid: labels.map(|&l| l as u8),
    };
    Ok((mask, km))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RcnnSegmentation {
    pub mask: BinaryMask,
    pub ignition_map: Grid<u32>,
    /// Kapur threshold on firing counts; foreground is `count > threshold`
    /// before any polarity flip.
    pub threshold: u32,
    pub flipped: bool,
}

/// Runs the RCNN on the image and splits its ignition map with the Kapur
/// threshold. The class with the brighter mean gray is reported as 1.
pub fn rcnn_segment(image: &Grid<u8>, params: &RcnnParams) -> Result<RcnnSegmentation> {
    let gray: Vec<f64> = image.as_slice().iter().map(|&g| g as f64).collect();
    let stimulus = StimulusField::from_gray(image.width(), image.height(), &gray)?;
    let run = run_rcnn(&stimulus, params, false)?;
    let threshold = kapur_threshold(&run.ignition_map)?;
    let mut mask = BinaryMask {
        grid: run.ignition_map.map(|&c| (c > threshold) as u8),
    };
    let (mut fg_sum, mut fg_n, mut bg_sum, mut bg_n) = (0u64, 0u64, 0u64, 0u64);
    for (&m, &g) in mask.grid.as_slice().iter().zip(image.as_slice()) {
        if m == 1 {
            fg_sum += g as u64;
            fg_n += 1;
        } else {
            bg_sum += g as u64;
            bg_n += 1;
        }
    }
    // Compare fg_sum/fg_n < bg_sum/bg_n without division.
    let flipped =
        fg_n > 0 && bg_n > 0 && (fg_sum as u128 * bg_n as u128) < (bg_sum as u128 * fg_n as u128);
    if flipped {
        mask = mask.complement();
    }
    Ok(RcnnSegmentation {
        mask,
        ignition_map: run.ignition_map,
        threshold,
        flipped,
    })
}
