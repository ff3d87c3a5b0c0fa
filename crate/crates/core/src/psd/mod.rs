//! Neutron/gamma pulse shape discrimination.
//!
//! Each pulse is low-pass filtered, rescaled to unit peak and reduced to a
//! scalar factor; the factor histogram is fitted with two Gaussians whose
//! separation gives the figure of merit.

mod data;
mod factors;
mod filter;
mod fom;

pub use data::{
    model_pulse, peak_index, pulse_shape, synth_pulse_dataset, PulseLabel, PulseRecord, FAST_NS,
    GAMMA_SLOW_FRACTION, MAX_PULSE_PEAK, MIN_PULSE_LEN, NEUTRON_SLOW_FRACTION, RISE_NS, SLOW_NS,
    SYNTH_PERIOD_S, SYNTH_PRETRIGGER, SYNTH_SAMPLES,
};
pub use factors::{
    charge_comparison_factor, feps_factor, rcnn_discrimination_factor, zc_shape,
    zero_crossing_factor, PsdWindow, DEFAULT_LONG_GATE, DEFAULT_SHORT_GATE, ZC_TIME_CONSTANT,
};
pub use filter::fourier_lowpass;
pub use fom::{
    fit_fom, DiscriminationResult, DoubleGaussian, GaussianComponent, Histogram, DEFAULT_BINS,
    FWHM_PER_SIGMA, MIN_FACTORS,
};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dynamics::RcnnParams;
use crate::error::{Error, Result};
use crate::rng::derive_key;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Rcnn,
    ChargeComparison,
    ZeroCrossing,
    Feps,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Rcnn,
        Method::ChargeComparison,
        Method::ZeroCrossing,
        Method::Feps,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Rcnn => "rcnn",
            Method::ChargeComparison => "cc",
            Method::ZeroCrossing => "zc",
            Method::Feps => "feps",
        }
    }

    /// Whether neutrons are expected to score higher than gammas.
    pub fn neutron_scores_higher(self) -> bool {
        !matches!(self, Method::Feps)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown PSD method {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsdConfig {
    /// Low-pass cutoff as a fraction of the sampling rate.
    pub cutoff_fraction: f64,
    /// Lattice parameters for the RCNN factor; `seed` is mixed with each
    /// pulse's dataset index.
    pub rcnn: RcnnParams,
    pub window: PsdWindow,
    pub short_gate: usize,
    pub long_gate: usize,
    pub bins: usize,
}

impl Default for PsdConfig {
    fn default() -> Self {
        Self {
            cutoff_fraction: 0.05,
            rcnn: RcnnParams::pulse_shape(),
            window: PsdWindow::default(),
            short_gate: DEFAULT_SHORT_GATE,
            long_gate: DEFAULT_LONG_GATE,
            bins: DEFAULT_BINS,
        }
    }
}

/// Low-pass filter and rescale to unit peak.
pub fn preprocess(samples: &[f64], cutoff_fraction: f64) -> Result<Vec<f64>> {
    let filtered = fourier_lowpass(samples, cutoff_fraction)?;
    let p = peak_index(&filtered).ok_or_else(|| Error::DegenerateInput("empty pulse".into()))?;
    let peak = filtered[p];
    if peak.is_nan() || peak <= 0.0 {
        return Err(Error::DegenerateInput(format!(
            "filtered peak {peak} is not positive"
        )));
    }
    Ok(filtered.into_iter().map(|v| v / peak).collect())
}

/// Factor of one raw pulse; `index` is its position in the dataset.
pub fn pulse_factor(
    samples: &[f64],
    index: usize,
    method: Method,
    config: &PsdConfig,
) -> Result<f64> {
    let x = preprocess(samples, config.cutoff_fraction)?;
    match method {
        Method::Rcnn => {
            let params = RcnnParams {
                seed: derive_key(config.rcnn.seed, index as u64),
                ..config.rcnn.clone()
            };
            rcnn_discrimination_factor(&x, &params, config.window)
        }
        Method::ChargeComparison => {
            charge_comparison_factor(&x, config.short_gate, config.long_gate)
        }
        Method::ZeroCrossing => zero_crossing_factor(&x),
        Method::Feps => feps_factor(&x),
    }
}

pub fn discrimination_factors(
    pulses: &[PulseRecord],
    method: Method,
    config: &PsdConfig,
) -> Result<Vec<f64>> {
    if method == Method::Rcnn {
        config.rcnn.validate()?;
    }
    pulses
        .par_iter()
        .enumerate()
        .map(|(i, p)| pulse_factor(p.samples(), i, method, config))
        .collect()
}

pub fn discriminate(
    pulses: &[PulseRecord],
    method: Method,
    config: &PsdConfig,
) -> Result<DiscriminationResult> {
    let factors = discrimination_factors(pulses, method, config)?;
    fit_fom(&factors, config.bins)
}

/// Mean factor per class, `(neutron, gamma)`; `None` if a class is absent.
pub fn class_means(pulses: &[PulseRecord], factors: &[f64]) -> Option<(f64, f64)> {
    let mut sums = [0.0; 2];
    let mut counts = [0usize; 2];
    for (p, &f) in pulses.iter().zip(factors) {
        let k = match p.label()? {
            PulseLabel::Neutron => 0,
            PulseLabel::Gamma => 1,
        };
        sums[k] += f;
        counts[k] += 1;
    }
    (counts[0] > 0 && counts[1] > 0)
        .then(|| (sums[0] / counts[0] as f64, sums[1] / counts[1] as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("lg".parse::<Method>().is_err());
    }

    #[test]
    fn noiseless_classes_are_ordered() {
        let pulses = synth_pulse_dataset(8, 0.0, 1).unwrap();
        let cfg = PsdConfig::default();
        for m in Method::ALL {
            let f = discrimination_factors(&pulses, m, &cfg).unwrap();
            let (n, g) = class_means(&pulses, &f).unwrap();
            assert_eq!(n > g, m.neutron_scores_higher(), "{m}: {n} vs {g}");
        }
    }
}
