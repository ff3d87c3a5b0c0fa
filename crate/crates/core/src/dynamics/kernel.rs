//! Link-weight kernels and their per-iteration random inactivation.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng;

/// Largest supported kernel radius (41×41 kernel).
pub const MAX_RADIUS: usize = 20;

fn check_radius(radius: usize) -> Result<()> {
    if radius == 0 || radius > MAX_RADIUS {
        return Err(Error::InvalidParameter(format!(
            "kernel radius must be in 1..={MAX_RADIUS}, got {radius}"
        )));
    }
    Ok(())
}

fn check_sigma(name: &str, sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {sigma}"
        )));
    }
    Ok(())
}

/// Square `(2R+1)×(2R+1)` weight matrix, row-major, centered on the
/// receiving neuron. The center weight is always zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    radius: usize,
    weights: Vec<f64>,
}

impl Kernel {
    /// Isotropic 2D normal density sampled at integer offsets, center zeroed.
    /// No normalization: the overall link gain lives in `beta * v_u`.
    pub fn gaussian(radius: usize, sigma: f64) -> Result<Self> {
        check_radius(radius)?;
        check_sigma("sigma", sigma)?;
        let size = 2 * radius + 1;
        let r = radius as isize;
        let norm = 1.0 / (2.0 * PI * sigma * sigma);
        let mut weights = Vec::with_capacity(size * size);
        for a in -r..=r {
            for b in -r..=r {
                let d2 = (a * a + b * b) as f64;
                weights.push(norm * (-d2 / (2.0 * sigma * sigma)).exp());
            }
        }
        weights[radius * size + radius] = 0.0;
        Ok(Self { radius, weights })
    }

    /// The fixed 3×3 SPCNN link matrix.
    pub fn spcnn() -> Self {
        Self {
            radius: 1,
            weights: vec![0.5, 1.0, 0.5, 1.0, 0.0, 1.0, 0.5, 1.0, 0.5],
        }
    }

    /// The classic 3×3 PCNN matrix with inverse-distance diagonals.
    pub fn pcnn() -> Self {
        let d = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            radius: 1,
            weights: vec![d, 1.0, d, 1.0, 0.0, 1.0, d, 1.0, d],
        }
    }

    /// Build from explicit weights, enforcing non-negativity, a zero center
    /// and point symmetry.
    pub fn from_weights(radius: usize, weights: Vec<f64>) -> Result<Self> {
        check_radius(radius)?;
        let size = 2 * radius + 1;
        if weights.len() != size * size {
            return Err(Error::DimensionMismatch(format!(
                "radius {radius} kernel needs {} weights, got {}",
                size * size,
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidParameter(
                "kernel weights must be finite and non-negative".into(),
            ));
        }
        if weights[radius * size + radius] != 0.0 {
            return Err(Error::InvalidParameter("kernel center must be 0".into()));
        }
        let n = weights.len();
        if (0..n).any(|i| weights[i] != weights[n - 1 - i]) {
            return Err(Error::InvalidParameter(
                "kernel must be point symmetric".into(),
            ));
        }
        Ok(Self { radius, weights })
    }

    #[inline]
    pub fn radius(&self) -> usize {
        self.radius
    }

    #[inline]
    pub fn size(&self) -> usize {
        2 * self.radius + 1
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at kernel row `a`, column `b` (both in `0..size`).
    #[inline]
    pub fn at(&self, a: usize, b: usize) -> f64 {
        self.weights[a * self.size() + b]
    }
}

/// How closing probability depends on distance from the center channel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InactivationMode {
    /// `1 - g`: far channels close more often, the center never closes.
    #[default]
    DistanceIncreasing,
    /// `g` itself: peak-normalized Gaussian, largest at the center.
    RawGaussian,
}

impl InactivationMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            InactivationMode::DistanceIncreasing => "distance-increasing",
            InactivationMode::RawGaussian => "raw-gaussian",
        }
    }
}

impl std::str::FromStr for InactivationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distance-increasing" => Ok(InactivationMode::DistanceIncreasing),
            "raw-gaussian" => Ok(InactivationMode::RawGaussian),
            other => Err(Error::InvalidParameter(format!(
                "unknown inactivation mode {other:?}"
            ))),
        }
    }
}

/// Per-channel closing probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct InactivationProfile {
    radius: usize,
    closing_prob: Vec<f64>,
    mode: InactivationMode,
}

impl InactivationProfile {
    pub fn new(radius: usize, sigma_d: f64, mode: InactivationMode) -> Result<Self> {
        check_radius(radius)?;
        check_sigma("sigma_d", sigma_d)?;
        let r = radius as isize;
        let mut closing_prob = Vec::with_capacity((2 * radius + 1).pow(2));
        for a in -r..=r {
            for b in -r..=r {
                let g = (-((a * a + b * b) as f64) / (2.0 * sigma_d * sigma_d)).exp();
                closing_prob.push(match mode {
                    InactivationMode::DistanceIncreasing => 1.0 - g,
                    InactivationMode::RawGaussian => g,
                });
            }
        }
        Ok(Self {
            radius,
            closing_prob,
            mode,
        })
    }

    /// Same closing probability on every channel. Mainly for tests and for
    /// disabling inactivation (`p = 0`).
    pub fn constant(radius: usize, p: f64) -> Result<Self> {
        check_radius(radius)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "closing probability {p} outside [0, 1]"
            )));
        }
        Ok(Self {
            radius,
            closing_prob: vec![p; (2 * radius + 1).pow(2)],
            mode: InactivationMode::DistanceIncreasing,
        })
    }

    pub fn from_probabilities(radius: usize, closing_prob: Vec<f64>) -> Result<Self> {
        check_radius(radius)?;
        if closing_prob.len() != (2 * radius + 1).pow(2) {
            return Err(Error::DimensionMismatch(format!(
                "radius {radius} profile needs {} entries, got {}",
                (2 * radius + 1).pow(2),
                closing_prob.len()
            )));
        }
        if closing_prob.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter(
                "closing probabilities must lie in [0, 1]".into(),
            ));
        }
        Ok(Self {
            radius,
            closing_prob,
            mode: InactivationMode::DistanceIncreasing,
        })
    }

    #[inline]
    pub fn radius(&self) -> usize {
        self.radius
    }

    #[inline]
    pub fn size(&self) -> usize {
        2 * self.radius + 1
    }

    #[inline]
    pub fn mode(&self) -> InactivationMode {
        self.mode
    }

    #[inline]
    pub fn closing_prob(&self) -> &[f64] {
        &self.closing_prob
    }

    #[inline]
    pub fn at(&self, a: usize, b: usize) -> f64 {
        self.closing_prob[a * self.size() + b]
    }

    /// Draw the open/closed mask for one iteration. One mask is shared by
    /// every neuron in the lattice.
    pub fn sample(&self, key: u64, iteration: u64) -> InactivationMask {
        let open = self
            .closing_prob
            .iter()
            .enumerate()
            .map(|(channel, &p)| {
                let u = rng::uniform(key, iteration, channel as u64);
                u8::from(p <= u)
            })
            .collect();
        InactivationMask {
            radius: self.radius,
            open,
        }
    }
}

/// 0/1 channel mask for one iteration; 1 means the channel is open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InactivationMask {
    radius: usize,
    open: Vec<u8>,
}

impl InactivationMask {
    pub fn all_open(radius: usize) -> Self {
        Self {
            radius,
            open: vec![1; (2 * radius + 1).pow(2)],
        }
    }

    pub fn from_bits(radius: usize, open: Vec<u8>) -> Result<Self> {
        if open.len() != (2 * radius + 1).pow(2) || open.iter().any(|&v| v > 1) {
            return Err(Error::InvalidParameter(
                "mask must be (2R+1)^2 entries of 0 or 1".into(),
            ));
        }
        Ok(Self { radius, open })
    }

    #[inline]
    pub fn radius(&self) -> usize {
        self.radius
    }

    #[inline]
    pub fn bits(&self) -> &[u8] {
        &self.open
    }

    pub fn open_count(&self) -> usize {
        self.open.iter().map(|&v| v as usize).sum()
    }
}

/// Sample the mask for `iteration` (1-based) under `key`.
pub fn sample_inactivation_mask(
    profile: &InactivationProfile,
    key: u64,
    iteration: u64,
) -> Result<InactivationMask> {
    if iteration == 0 {
        return Err(Error::InvalidParameter(
            "iterations are numbered from 1".into(),
        ));
    }
    Ok(profile.sample(key, iteration))
}

/// Hadamard product of the link kernel with an inactivation mask.
pub fn effective_weights(kernel: &Kernel, mask: &InactivationMask) -> Result<Kernel> {
    if kernel.radius != mask.radius {
        return Err(Error::DimensionMismatch(format!(
            "kernel radius {} vs mask radius {}",
            kernel.radius, mask.radius
        )));
    }
    let weights = kernel
        .weights
        .iter()
        .zip(&mask.open)
        .map(|(&w, &m)| if m == 1 { w } else { 0.0 })
        .collect();
    Ok(Kernel {
        radius: kernel.radius,
        weights,
    })
}
